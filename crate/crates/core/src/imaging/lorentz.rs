use serde::{Deserialize, Serialize};

use super::ImagingError;
use crate::numerics::{levenberg_marquardt, LmOptions};

/// `offset − Σ A_k·(w_k/2)² / ((x − x_k)² + (w_k/2)²)` with `w_k` the full
/// width at half maximum. `p = [offset, A1, x1, w1, A2, x2, w2]`.
pub fn double_lorentzian(x: f64, p: &[f64]) -> f64 {
    let dip = |a: f64, x0: f64, w: f64| {
        let g = 0.25 * w * w;
        a * g / ((x - x0).powi(2) + g)
    };
    p[0] - dip(p[1], p[2], p[3]) - dip(p[4], p[5], p[6])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleLorentzianFit {
    pub offset: f64,
    /// Sorted by centre.
    pub centers: [f64; 2],
    pub widths: [f64; 2],
    pub amplitudes: [f64; 2],
    /// Order: offset, A1, x1, w1, A2, x2, w2 (after sorting).
    pub covariance: Vec<Vec<f64>>,
    pub stderr: Vec<f64>,
    /// An amplitude is compatible with zero within two standard errors.
    pub single_dip: bool,
    pub residual_norm: f64,
}

fn half_width_guess(x: &[f64], y: &[f64], i: usize, base: f64) -> f64 {
    let half = 0.5 * (base + y[i]);
    let mut l = i;
    while l > 0 && y[l] < half {
        l -= 1;
    }
    let mut r = i;
    while r + 1 < y.len() && y[r] < half {
        r += 1;
    }
    (x[r] - x[l]).abs().max(1e-3 * (x[x.len() - 1] - x[0]).abs())
}

/// Least-squares fit of two Lorentzian dips on a constant background.
pub fn fit_double_lorentzian(x: &[f64], y: &[f64]) -> Result<DoubleLorentzianFit, ImagingError> {
    if x.len() != y.len() {
        return Err(ImagingError::BadInput("x and y differ in length".into()));
    }
    if x.len() < 8 {
        return Err(ImagingError::TooFewSamples { got: x.len(), need: 8 });
    }
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let xs: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let mut ysorted = ys.clone();
    ysorted.sort_by(f64::total_cmp);
    let base = ysorted[(3 * ysorted.len()) / 4];
    let span = xs[xs.len() - 1] - xs[0];

    let i1 = (0..ys.len()).min_by(|&a, &b| ys[a].total_cmp(&ys[b])).unwrap();
    let w1 = half_width_guess(&xs, &ys, i1, base);
    let p1 = [base, base - ys[i1], xs[i1], w1, 0.0, 0.0, 1.0];
    // second dip: deepest point of the residual after removing the first
    let resid: Vec<f64> = xs.iter().zip(&ys).map(|(&xi, &yi)| yi - double_lorentzian(xi, &p1) + base).collect();
    let i2 = (0..ys.len())
        .filter(|&i| (xs[i] - xs[i1]).abs() > 0.5 * w1)
        .min_by(|&a, &b| resid[a].total_cmp(&resid[b]))
        .unwrap_or(if i1 == 0 { ys.len() - 1 } else { 0 });
    let w2 = half_width_guess(&xs, &resid, i2, base).min(0.5 * span);
    let p0 = [base, base - ys[i1], xs[i1], w1, (base - resid[i2]).max(1e-6 * base.abs().max(1e-12)), xs[i2], w2];

    let r = |p: &[f64]| -> Option<Vec<f64>> {
        if p[3] <= 0.0 || p[6] <= 0.0 {
            return None;
        }
        Some(xs.iter().zip(&ys).map(|(&xi, &yi)| double_lorentzian(xi, p) - yi).collect())
    };
    let opts = LmOptions { max_iterations: 2000, ..Default::default() };
    let res = levenberg_marquardt(r, &p0, &opts)?;
    let mut p = res.params.clone();
    let mut cov = res.covariance.clone();
    if p[5] < p[2] {
        // swap the two components (indices 1..4 <-> 4..7)
        let perm = [0, 4, 5, 6, 1, 2, 3];
        p = perm.iter().map(|&i| res.params[i]).collect();
        cov = perm.iter().map(|&i| perm.iter().map(|&j| res.covariance[i][j]).collect()).collect();
    }
    let stderr: Vec<f64> = (0..7).map(|i| cov[i][i].max(0.0).sqrt()).collect();
    let single_dip = p[1].abs() < 2.0 * stderr[1] || p[4].abs() < 2.0 * stderr[4];
    Ok(DoubleLorentzianFit {
        offset: p[0],
        centers: [p[2], p[5]],
        widths: [p[3], p[6]],
        amplitudes: [p[1], p[4]],
        covariance: cov,
        stderr,
        single_dip,
        residual_norm: (2.0 * res.cost).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_free_recovery() {
        let truth = [0.4, 0.2, -716.4, 6.0, 0.15, -698.8, 8.0];
        let x: Vec<f64> = (0..81).map(|i| -740.0 + 0.8 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&v| double_lorentzian(v, &truth)).collect();
        let f = fit_double_lorentzian(&x, &y).unwrap();
        let got = [f.offset, f.amplitudes[0], f.centers[0], f.widths[0], f.amplitudes[1], f.centers[1], f.widths[1]];
        for (g, t) in got.iter().zip(truth) {
            assert!((g - t).abs() < 1e-9 * t.abs().max(1.0), "{got:?}");
        }
        assert!(!f.single_dip);
    }

    #[test]
    fn too_few_points() {
        assert!(fit_double_lorentzian(&[1.0; 5], &[1.0; 5]).is_err());
    }
}
