use serde::{Deserialize, Serialize};

use super::{HistogramModel, ImagingError, PreparedModel};
use crate::numerics::optimize::golden_section_min;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    /// Counts at or above the threshold are read as "atom present".
    pub threshold: f64,
    pub fidelity: f64,
    /// Total error `(1−F)·E0 + F·E1`.
    pub error: f64,
    /// Dark mass above threshold.
    #[serde(rename = "E0")]
    pub e0: f64,
    /// Bright mass below threshold.
    #[serde(rename = "E1")]
    pub e1: f64,
    /// Not available from a count model alone.
    pub survival: Option<f64>,
    /// Set when the components overlap so much that the optimum is useless.
    pub unreliable: bool,
}

fn report_at(pm: &PreparedModel, x: f64) -> Result<FidelityReport, ImagingError> {
    let e0 = pm.dark_above(x)?.clamp(0.0, 1.0);
    let e1 = pm.bright_below(x)?.clamp(0.0, 1.0);
    let f = pm.model.f;
    let error = (1.0 - f) * e0 + f * e1;
    Ok(FidelityReport { threshold: x, fidelity: 1.0 - error, error, e0, e1, survival: None, unreliable: false })
}

/// Error components on a list of thresholds.
pub fn infidelity_curve(model: &HistogramModel, thresholds: &[f64]) -> Result<Vec<FidelityReport>, ImagingError> {
    let pm = model.prepare()?;
    thresholds.iter().map(|&x| report_at(&pm, x)).collect()
}

const SCAN_POINTS: usize = 600;
const NEGLIGIBLE: f64 = 1e-17;

/// Threshold minimizing the classification error: grid scan over
/// `[0, x_max]` followed by golden-section refinement around the best point.
pub fn optimize_threshold(model: &HistogramModel) -> Result<FidelityReport, ImagingError> {
    let pm = model.prepare()?;
    let xm = model.x_max;
    let xs: Vec<f64> = (0..=SCAN_POINTS).map(|i| xm * i as f64 / SCAN_POINTS as f64).collect();
    let mut errs = Vec::with_capacity(xs.len());
    for &x in &xs {
        errs.push(report_at(&pm, x)?.error);
    }
    let best = (0..xs.len()).min_by(|&i, &j| errs[i].total_cmp(&errs[j]).then(i.cmp(&j))).unwrap();
    let lo = xs[best.saturating_sub(1)];
    let hi = xs[(best + 1).min(xs.len() - 1)];
    // the objective is ≥ 0; errors inside the closure become +inf
    let (x, _) = golden_section_min(|x| report_at(&pm, x).map(|r| r.error).unwrap_or(f64::INFINITY), lo, hi, 1e-12);
    let mut rep = report_at(&pm, x)?;
    if rep.error > errs[best] {
        rep = report_at(&pm, xs[best])?;
    }
    // a numerically error-free gap: report its centre
    if rep.error < NEGLIGIBLE {
        let (mut a, mut b) = (best, best);
        while a > 0 && errs[a - 1] < NEGLIGIBLE {
            a -= 1;
        }
        while b + 1 < xs.len() && errs[b + 1] < NEGLIGIBLE {
            b += 1;
        }
        rep = report_at(&pm, 0.5 * (xs[a] + xs[b]))?;
    }
    let at_edge = best == 0 || best == xs.len() - 1;
    rep.unreliable = rep.error > 0.5 || at_edge || rep.error >= 0.5 * model.f.min(1.0 - model.f);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::DarkModel;

    #[test]
    fn symmetric_gaussians_split_at_midpoint() {
        let m = HistogramModel {
            f: 0.5,
            sigma_d: 8.0,
            mu_d: 30.0,
            a: 0.0,
            b: 1.0,
            sigma_b: 8.0,
            mu_b: 70.0,
            c: 0.0,
            x_max: 100.0,
            dark: DarkModel::Exponential,
        };
        let r = optimize_threshold(&m).unwrap();
        assert!((r.threshold - 50.0).abs() < 1e-4, "{}", r.threshold);
        assert!((r.e0 - r.e1).abs() < 1e-9);
        assert!(!r.unreliable);
    }

    #[test]
    fn separated_peaks_give_unit_fidelity() {
        let m = HistogramModel {
            f: 0.4,
            sigma_d: 1.0,
            mu_d: 10.0,
            a: 0.0,
            b: 1.0,
            sigma_b: 1.0,
            mu_b: 500.0,
            c: 0.0,
            x_max: 1000.0,
            dark: DarkModel::Exponential,
        };
        let r = optimize_threshold(&m).unwrap();
        assert_eq!(r.fidelity, 1.0);
        assert!(r.threshold > 60.0 && r.threshold < 450.0);
        for x in [100.0, 250.0, 400.0] {
            assert_eq!(infidelity_curve(&m, &[x]).unwrap()[0].fidelity, 1.0);
        }
    }

    #[test]
    fn minimum_not_above_endpoints() {
        let m = HistogramModel::typical_399();
        let r = optimize_threshold(&m).unwrap();
        let ends = infidelity_curve(&m, &[0.0, m.x_max]).unwrap();
        assert!(r.error <= ends[0].error && r.error <= ends[1].error);
        assert!(r.error > 1.4e-3 && r.error < 1.6e-3, "{}", r.error);
    }

    #[test]
    fn overlapping_components_flagged() {
        let m = HistogramModel { mu_b: 22.0, sigma_b: 6.0, c: 0.0, ..HistogramModel::typical_399() };
        assert!(optimize_threshold(&m).unwrap().unreliable);
    }
}
