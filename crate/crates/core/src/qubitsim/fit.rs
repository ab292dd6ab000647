use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::QubitError;
use crate::numerics::optimize::golden_section_min;
use crate::numerics::{levenberg_marquardt, LmOptions, LmResult};

/// `A·exp(−(T/T₂)ⁿ)`.
pub fn stretched_exp(t: f64, a: f64, t2: f64, n: f64) -> f64 {
    a * (-(t / t2).powf(n)).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StretchedExpFit {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
    pub n: f64,
    /// Order: A, T2, n.
    pub covariance: Vec<Vec<f64>>,
    pub stderr: Vec<f64>,
    pub residual_norm: f64,
}

fn check_points(t: &[f64], y: &[f64], need: usize) -> Result<(), QubitError> {
    if t.len() != y.len() {
        return Err(QubitError::BadInput("time and value lists differ in length".into()));
    }
    if t.len() < need {
        return Err(QubitError::TooFewPoints { got: t.len(), need });
    }
    if t.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(QubitError::BadInput("non-finite data".into()));
    }
    Ok(())
}

fn covariance_of(res: &LmResult, weighted: bool) -> Vec<Vec<f64>> {
    if weighted {
        res.covariance_unscaled.clone()
    } else {
        res.covariance.clone()
    }
}

/// Least-squares fit of `A·exp(−(T/T₂)ⁿ)`. With `sigma` the residuals are
/// weighted and the covariance is not rescaled by the residual scatter.
pub fn fit_stretched_exp(t: &[f64], y: &[f64], sigma: Option<&[f64]>) -> Result<StretchedExpFit, QubitError> {
    check_points(t, y, 5)?;
    let mut ts = t.to_vec();
    ts.sort_by(f64::total_cmp);
    if ts.windows(2).any(|w| w[0] == w[1]) {
        return Err(QubitError::BadInput("T values must be distinct".into()));
    }
    if t.iter().any(|&v| v < 0.0) {
        return Err(QubitError::BadInput("T values must be non-negative".into()));
    }
    if let Some(s) = sigma {
        if s.len() != t.len() || s.iter().any(|&v| !(v > 0.0)) {
            return Err(QubitError::BadInput("sigma must be positive, one per point".into()));
        }
    }
    // seed from the log-log linearization ln(−ln(y/A)) = n·ln T − n·ln T₂
    let a0 = y.iter().copied().fold(f64::NEG_INFINITY, f64::max) * 1.01;
    let lin: Vec<(f64, f64)> = t
        .iter()
        .zip(y)
        .filter(|(&ti, &yi)| ti > 0.0 && yi > 0.0 && yi < a0)
        .map(|(&ti, &yi)| (ti.ln(), (-(yi / a0).ln()).ln()))
        .collect();
    let (mut n0, mut t20) = (1.0, ts[ts.len() / 2].max(1e-12));
    if lin.len() >= 2 {
        let m = lin.len() as f64;
        let (sx, sy) = lin.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / m, sy / m);
        let sxx: f64 = lin.iter().map(|(x, _)| (x - mx).powi(2)).sum();
        let sxy: f64 = lin.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        if sxx > 0.0 && sxy / sxx > 0.0 {
            n0 = (sxy / sxx).clamp(0.2, 5.0);
            t20 = (mx - my / n0).exp();
        }
    }
    let r = |p: &[f64]| -> Option<Vec<f64>> {
        if !(p[1] > 0.0 && p[2] > 0.0 && p[2] < 50.0) {
            return None;
        }
        Some(
            t.iter()
                .zip(y)
                .enumerate()
                .map(|(i, (&ti, &yi))| (stretched_exp(ti, p[0], p[1], p[2]) - yi) / sigma.map_or(1.0, |s| s[i]))
                .collect(),
        )
    };
    let opts = LmOptions { max_iterations: 2000, ..Default::default() };
    let res = levenberg_marquardt(r, &[a0, t20, n0], &opts)?;
    let tmax = ts[ts.len() - 1];
    if res.params[1] > 1e6 * tmax.max(f64::MIN_POSITIVE) {
        return Err(QubitError::BadInput(format!(
            "T2 = {} runs far beyond the data; no decay resolved",
            res.params[1]
        )));
    }
    let cov = covariance_of(&res, sigma.is_some());
    Ok(StretchedExpFit {
        a: res.params[0],
        t2: res.params[1],
        n: res.params[2],
        stderr: (0..3).map(|i| cov[i][i].max(0.0).sqrt()).collect(),
        covariance: cov,
        residual_norm: (2.0 * res.cost).sqrt(),
    })
}

/// `offset + amplitude·exp(−decay_rate·t)·cos(2π·frequency·t + phase)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinusoidFit {
    pub offset: f64,
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
    pub decay_rate: f64,
    /// Order: offset, amplitude, frequency, phase, decay_rate.
    pub covariance: Vec<Vec<f64>>,
    pub stderr: Vec<f64>,
    pub residual_norm: f64,
}

impl SinusoidFit {
    pub fn eval(&self, t: f64) -> f64 {
        self.offset + self.amplitude * (-self.decay_rate * t).exp() * (2.0 * PI * self.frequency * t + self.phase).cos()
    }

    /// Fringe contrast `amplitude / offset` and its standard error.
    pub fn contrast(&self) -> (f64, f64) {
        let (a, o) = (self.amplitude, self.offset);
        let c = a / o;
        let rel2 =
            self.covariance[1][1] / (a * a) + self.covariance[0][0] / (o * o) - 2.0 * self.covariance[0][1] / (a * o);
        (c, c.abs() * rel2.max(0.0).sqrt())
    }
}

fn linear_phase_fit(t: &[f64], y: &[f64], f: f64) -> (f64, f64, f64) {
    let mut m = Matrix3::zeros();
    let mut v = Vector3::zeros();
    for (&ti, &yi) in t.iter().zip(y) {
        let (s, c) = (2.0 * PI * f * ti).sin_cos();
        let row = Vector3::new(1.0, c, s);
        m += row * row.transpose();
        v += row * yi;
    }
    let sol = m.lu().solve(&v).unwrap_or_else(Vector3::zeros);
    (sol[0], sol[1], sol[2])
}

/// Damped-sinusoid fit; the frequency is seeded by the periodogram peak.
pub fn fit_damped_sinusoid(t: &[f64], y: &[f64]) -> Result<SinusoidFit, QubitError> {
    check_points(t, y, 6)?;
    let (tmin, tmax) = t.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = tmax - tmin;
    if !(span > 0.0) {
        return Err(QubitError::BadInput("time values must span a positive range".into()));
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let power = |f: f64| {
        let (mut re, mut im) = (0.0, 0.0);
        for (&ti, &yi) in t.iter().zip(y) {
            let (s, c) = (2.0 * PI * f * (ti - tmin)).sin_cos();
            re += (yi - mean) * c;
            im += (yi - mean) * s;
        }
        re * re + im * im
    };
    let df = 0.1 / span;
    let fmax = 0.5 * (t.len() - 1) as f64 / span;
    let n_f = ((fmax - 0.5 / span) / df).ceil().max(1.0) as usize;
    let f_grid = (0..=n_f).map(|k| 0.5 / span + df * k as f64);
    let f_peak = f_grid.max_by(|&a, &b| power(a).total_cmp(&power(b))).unwrap_or(1.0 / span);
    let (f0, _) = golden_section_min(|f| -power(f), (f_peak - df).max(1e-3 / span), f_peak + df, 1e-12);
    let (off0, a_c, a_s) = linear_phase_fit(t, y, f0);
    let amp0 = a_c.hypot(a_s);
    let phi0 = (-a_s).atan2(a_c);

    let model = |p: &[f64], ti: f64| p[0] + p[1] * (-p[4] * ti).exp() * (2.0 * PI * p[2] * ti + p[3]).cos();
    let r = |p: &[f64]| -> Option<Vec<f64>> {
        (p[2] > 0.0).then(|| t.iter().zip(y).map(|(&ti, &yi)| model(p, ti) - yi).collect())
    };
    let opts = LmOptions { max_iterations: 2000, ..Default::default() };
    let res = levenberg_marquardt(r, &[off0, amp0, f0, phi0, 0.0], &opts)?;
    let mut p = res.params.clone();
    if p[1] < 0.0 {
        p[1] = -p[1];
        p[3] += PI;
    }
    p[3] = (p[3] + PI).rem_euclid(2.0 * PI) - PI;
    let cov = res.covariance.clone();
    Ok(SinusoidFit {
        offset: p[0],
        amplitude: p[1],
        frequency: p[2],
        phase: p[3],
        decay_rate: p[4],
        stderr: (0..5).map(|i| cov[i][i].max(0.0).sqrt()).collect(),
        covariance: cov,
        residual_norm: (2.0 * res.cost).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub ratio: f64,
    pub stderr: f64,
}

/// Ratio of the fringe contrasts of two fits, `a / b`.
pub fn contrast_ratio(a: &SinusoidFit, b: &SinusoidFit) -> RatioEstimate {
    let (ca, sa) = a.contrast();
    let (cb, sb) = b.contrast();
    let ratio = ca / cb;
    RatioEstimate { ratio, stderr: ratio.abs() * ((sa / ca).powi(2) + (sb / cb).powi(2)).sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stretched_exp_noise_free() {
        let t: Vec<f64> = (0..12).map(|i| 0.1 * i as f64).collect();
        let y: Vec<f64> = t.iter().map(|&x| stretched_exp(x, 0.97, 0.67, 1.2)).collect();
        let f = fit_stretched_exp(&t, &y, None).unwrap();
        assert!((f.a - 0.97).abs() < 1e-6 && (f.t2 - 0.67).abs() < 1e-6 && (f.n - 1.2).abs() < 1e-6, "{f:?}");
    }

    #[test]
    fn stretched_exp_input_checks() {
        assert!(matches!(fit_stretched_exp(&[1.0; 3], &[1.0; 3], None), Err(QubitError::TooFewPoints { .. })));
        let t = [0.0, 1.0, 1.0, 2.0, 3.0];
        assert!(fit_stretched_exp(&t, &[1.0, 0.5, 0.5, 0.3, 0.2], None).is_err());
    }

    #[test]
    fn cosine_noise_free() {
        let t: Vec<f64> = (0..40).map(|i| i as f64 * 2.5e-5).collect();
        let y: Vec<f64> = t.iter().map(|&x| 0.5 + 0.45 * (2.0 * PI * 1875.0 * x + 0.3).cos()).collect();
        let f = fit_damped_sinusoid(&t, &y).unwrap();
        assert!((f.offset - 0.5).abs() < 1e-9);
        assert!((f.amplitude - 0.45).abs() < 1e-9);
        assert!((f.frequency - 1875.0).abs() < 1e-9 * 1875.0);
        assert!((f.phase - 0.3).abs() < 1e-9);
        assert!(f.decay_rate.abs() < 1e-9);
        assert!((f.contrast().0 - 0.9).abs() < 1e-9);
    }

    #[test]
    fn ratio_of_fits() {
        let t: Vec<f64> = (0..30).map(|i| i as f64 * 4e-5).collect();
        let mk = |amp: f64| -> Vec<f64> { t.iter().map(|&x| 0.5 + amp * (2.0 * PI * 1875.0 * x).cos()).collect() };
        let a = fit_damped_sinusoid(&t, &mk(0.4 * 0.991)).unwrap();
        let b = fit_damped_sinusoid(&t, &mk(0.4)).unwrap();
        assert!((contrast_ratio(&a, &b).ratio - 0.991).abs() < 1e-9);
    }
}
