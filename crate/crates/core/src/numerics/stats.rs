//! Binomial intervals and small statistical helpers.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Exact (Clopper-Pearson) two-sided interval for `k` successes in `n`
/// trials at confidence `conf`. With `n = 0` the interval is `[0, 1]`.
pub fn clopper_pearson(k: u64, n: u64, conf: f64) -> Interval {
    if n == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    let alpha = 1.0 - conf;
    let (kf, nf) = (k as f64, n as f64);
    let lo = if k == 0 { 0.0 } else { Beta::new(kf, nf - kf + 1.0).map(|b| b.inverse_cdf(alpha / 2.0)).unwrap_or(0.0) };
    let hi = if k == n {
        1.0
    } else {
        Beta::new(kf + 1.0, nf - kf).map(|b| b.inverse_cdf(1.0 - alpha / 2.0)).unwrap_or(1.0)
    };
    Interval { lo, hi }
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_interval() {
        // 5 of 20 at 95%: [0.0866, 0.4910]
        let iv = clopper_pearson(5, 20, 0.95);
        assert!((iv.lo - 0.086_57).abs() < 1e-4);
        assert!((iv.hi - 0.491_04).abs() < 1e-4);
    }

    #[test]
    fn edge_counts() {
        let iv = clopper_pearson(0, 10, 0.95);
        assert_eq!(iv.lo, 0.0);
        assert!((iv.hi - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-9);
        let iv = clopper_pearson(10, 10, 0.95);
        assert_eq!(iv.hi, 1.0);
        assert_eq!(clopper_pearson(0, 0, 0.95), Interval { lo: 0.0, hi: 1.0 });
    }
}
