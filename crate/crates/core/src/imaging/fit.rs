use serde::{Deserialize, Serialize};

use super::{DarkModel, HistogramModel, ImagingError};
use crate::numerics::{levenberg_marquardt, LmError, LmOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub dark: DarkModel,
    /// Upper end of the count axis; defaults to the largest count.
    pub x_max: Option<f64>,
    pub min_samples: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { dark: DarkModel::Exponential, x_max: None, min_samples: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramFit {
    pub model: HistogramModel,
    /// Order: F, sigma_D, mu_D, a, b, sigma_B, mu_B, c.
    pub covariance: Vec<Vec<f64>>,
    pub stderr: Vec<f64>,
    pub bin_width: f64,
    pub n_bins: usize,
    /// Poisson deviance at the optimum.
    pub deviance: f64,
    pub pearson_chi2: f64,
    pub dof: usize,
    pub iterations: usize,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (pos - i as f64) * (sorted[j] - sorted[i])
}

/// Freedman–Diaconis bin width `2·IQR·n^(−1/3)` of sorted data.
pub fn freedman_diaconis_width(sorted: &[f64]) -> f64 {
    let iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
    2.0 * iqr / (sorted.len() as f64).cbrt()
}

/// Otsu split of a histogram: the bin edge maximizing between-class variance.
fn otsu(counts: &[f64], edges: &[f64]) -> f64 {
    let total: f64 = counts.iter().sum();
    let centers: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let sum_all: f64 = counts.iter().zip(&centers).map(|(n, x)| n * x).sum();
    let (mut w0, mut s0) = (0.0, 0.0);
    let mut best = (f64::NEG_INFINITY, edges[edges.len() / 2]);
    for i in 0..counts.len() - 1 {
        w0 += counts[i];
        s0 += counts[i] * centers[i];
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let (m0, m1) = (s0 / w0, (sum_all - s0) / w1);
        let v = w0 * w1 * (m0 - m1).powi(2);
        if v > best.0 {
            best = (v, edges[i + 1]);
        }
    }
    best.1
}

fn robust_sigma(sorted: &[f64]) -> f64 {
    (quantile(sorted, 0.75) - quantile(sorted, 0.25)) / 1.349
}

const GL_X: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL_W: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// Fits the mixture to binned counts by minimizing the Poisson deviance.
pub fn fit_histogram(counts: &[f64], opts: &FitOptions) -> Result<HistogramFit, ImagingError> {
    if counts.len() < opts.min_samples {
        return Err(ImagingError::TooFewSamples { got: counts.len(), need: opts.min_samples });
    }
    if counts.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(ImagingError::BadInput("counts must be finite and non-negative".into()));
    }
    let mut sorted = counts.to_vec();
    sorted.sort_by(f64::total_cmp);
    let width = freedman_diaconis_width(&sorted);
    if !(width > 0.0) {
        return Err(ImagingError::Degenerate("counts have zero spread".into()));
    }
    let x_max = opts.x_max.unwrap_or(*sorted.last().unwrap());
    let n_bins = ((x_max / width).ceil() as usize).max(1);
    let h = x_max / n_bins as f64;
    let edges: Vec<f64> = (0..=n_bins).map(|i| h * i as f64).collect();
    let mut hist = vec![0.0; n_bins];
    for &x in counts {
        if x <= x_max {
            hist[((x / h) as usize).min(n_bins - 1)] += 1.0;
        }
    }
    let n_tot: f64 = hist.iter().sum();

    let split = otsu(&hist, &edges);
    let cut = sorted.partition_point(|&x| x < split);
    let (dark, bright) = sorted.split_at(cut);
    if dark.len() < 10 || bright.len() < 10 {
        return Err(ImagingError::Degenerate("only one peak found; the two-component model is degenerate".into()));
    }
    let (md, mb) = (quantile(dark, 0.5), quantile(bright, 0.5));
    let (sd, sb) = (robust_sigma(dark).max(h), robust_sigma(bright).max(h));
    // Ashman's D: below 2 the two classes are not clearly separated
    if (mb - md).abs() / ((sd * sd + sb * sb) / 2.0).sqrt() < 2.0 {
        return Err(ImagingError::Degenerate("only one peak found; the two-component model is degenerate".into()));
    }
    // a second mode must rise out of a valley, not just continue a tail
    let smooth: Vec<f64> = (0..n_bins)
        .map(|i| {
            let (l, r) = (i.saturating_sub(1), (i + 1).min(n_bins - 1));
            hist[l..=r].iter().sum::<f64>() / (r - l + 1) as f64
        })
        .collect();
    let split_bin = ((split / h) as usize).min(n_bins - 1);
    let argmax = |r: std::ops::Range<usize>| r.max_by(|&i, &j| smooth[i].total_cmp(&smooth[j]).then(j.cmp(&i)));
    if let (Some(pd), Some(pb)) = (argmax(0..split_bin), argmax(split_bin..n_bins)) {
        let valley = smooth[pd..=pb].iter().copied().fold(f64::INFINITY, f64::min);
        if valley > 0.5 * smooth[pd].min(smooth[pb]) {
            return Err(ImagingError::Degenerate("only one peak found; the two-component model is degenerate".into()));
        }
    }
    let b0 = 3.0 / (mb - md);
    let p0 = [bright.len() as f64 / sorted.len() as f64, sd, md, 0.01 * b0, b0, sb, mb, 0.0];
    let base = HistogramModel {
        f: p0[0],
        sigma_d: sd,
        mu_d: md,
        a: p0[3],
        b: b0,
        sigma_b: sb,
        mu_b: mb,
        c: 0.0,
        x_max,
        dark: opts.dark,
    };

    let expected = |p: &[f64]| -> Option<Vec<f64>> {
        let pm = base.with_params(p).prepare().ok()?;
        Some(
            edges
                .windows(2)
                .map(|w| {
                    let (c, r) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
                    n_tot * r * GL_X.iter().zip(GL_W).map(|(x, wt)| wt * pm.pdf(c + r * x)).sum::<f64>()
                })
                .collect(),
        )
    };
    let residuals = |p: &[f64]| -> Option<Vec<f64>> {
        let mu = expected(p)?;
        Some(
            mu.iter()
                .zip(&hist)
                .map(|(&m, &n)| {
                    let m = m.max(1e-300);
                    let dev = if n > 0.0 { 2.0 * (m - n + n * (n / m).ln()) } else { 2.0 * m };
                    (n - m).signum() * dev.max(0.0).sqrt()
                })
                .collect(),
        )
    };
    let lm_opts = LmOptions { x_tol: 1e-10, f_tol: 1e-13, max_iterations: 1000, ..Default::default() };
    let degenerate = |last: &[f64]| {
        ImagingError::Degenerate(format!(
            "fit collapsed to a single component (last parameters {last:?}); the two-component model is degenerate"
        ))
    };
    let res = match levenberg_marquardt(residuals, &p0, &lm_opts) {
        Ok(r) => r,
        Err(LmError::Singular { last }) => return Err(degenerate(&last)),
        Err(e) => return Err(e.into()),
    };
    if res.params[0] * n_tot < 5.0 || (1.0 - res.params[0]) * n_tot < 5.0 {
        return Err(degenerate(&res.params));
    }
    let model = base.with_params(&res.params);
    let mu = expected(&res.params).expect("optimum is valid");
    let pearson_chi2 = mu.iter().zip(&hist).filter(|(m, _)| **m > 0.0).map(|(m, n)| (n - m).powi(2) / m).sum();
    Ok(HistogramFit {
        model,
        stderr: res.stderr_unscaled(),
        covariance: res.covariance_unscaled,
        bin_width: h,
        n_bins,
        deviance: 2.0 * res.cost,
        pearson_chi2,
        dof: res.dof,
        iterations: res.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::sample_histogram;

    #[test]
    fn identical_counts_are_degenerate() {
        let e = fit_histogram(&vec![5.0; 2000], &FitOptions::default()).unwrap_err();
        assert!(matches!(e, ImagingError::Degenerate(_)));
    }

    #[test]
    fn single_peak_is_degenerate() {
        let m = HistogramModel { f: 0.0, ..HistogramModel::typical_399() };
        let xs = sample_histogram(&m, 5000, 2).unwrap();
        assert!(matches!(fit_histogram(&xs, &FitOptions::default()), Err(ImagingError::Degenerate(_))));
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(fit_histogram(&[1.0, 2.0], &FitOptions::default()), Err(ImagingError::TooFewSamples { .. })));
    }

    #[test]
    fn recovers_generator_parameters() {
        let truth = HistogramModel::typical_399();
        let xs = sample_histogram(&truth, 100_000, 9).unwrap();
        let fit = fit_histogram(&xs, &FitOptions::default()).unwrap();
        for ((name, got), (want, se)) in
            HistogramModel::PARAM_NAMES.iter().zip(fit.model.params()).zip(truth.params().iter().zip(&fit.stderr))
        {
            assert!((got - want).abs() < 3.0 * se, "{name}: {got} vs {want} ± {se}");
        }
    }

    #[test]
    fn fd_width() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let w = freedman_diaconis_width(&xs);
        assert!((w - 2.0 * 499.5 / 10.0).abs() < 1e-9);
    }
}
