//! Three-image consistency estimator.
//!
//! Each occupied-or-empty site is imaged three times in a row. With b_i the
//! binary detection in image i:
//!
//! * false-negative rate = N(1,0,1) / N(1,*,1),
//! * false-positive rate = N(0,1,0) / N(0,*,0),
//! * survival = P(b_{i+1} = 1 | b_i = 1) pooled over both consecutive pairs,
//! * fidelity = 1 − [(1−f)·FP + f·FN] with f the observed bright fraction.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ImagingError;
use crate::numerics::stats::{clopper_pearson, Interval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleImageRecord {
    pub site: usize,
    pub shot: usize,
    pub b1: bool,
    pub b2: bool,
    pub b3: bool,
}

impl TripleImageRecord {
    fn pattern(&self) -> usize {
        (self.b1 as usize) << 2 | (self.b2 as usize) << 1 | self.b3 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    /// `None` when the conditioning set is empty.
    pub rate: Option<f64>,
    pub k: u64,
    pub n: u64,
    /// 95 % Clopper–Pearson interval; `[0, 1]` when undefined.
    pub ci: Interval,
}

impl RateEstimate {
    fn new(k: u64, n: u64) -> Self {
        RateEstimate { rate: (n > 0).then(|| k as f64 / n as f64), k, n, ci: clopper_pearson(k, n, CONFIDENCE) }
    }
}

/// Record counts keyed by pattern, e.g. `"101"`.
pub type PatternCounts = BTreeMap<String, u64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFreeReport {
    pub n_records: usize,
    pub fidelity: f64,
    pub fidelity_ci: Interval,
    pub survival: Option<f64>,
    pub survival_ci: Interval,
    /// Survival with false detections removed: bright readings of empty
    /// sites are taken out of the conditioning set and the result is
    /// divided by the detection probability `1 − FN`.
    pub survival_corrected: Option<f64>,
    /// The raw survival interval mapped through the same correction, with
    /// FN and FP at the ends of their own intervals.
    pub survival_corrected_ci: Interval,
    pub false_negative: RateEstimate,
    pub false_positive: RateEstimate,
    pub bright_fraction: f64,
    /// True when a rate entering the fidelity is undefined; its full
    /// `[0, 1]` interval then enters the fidelity bounds.
    pub undefined_rates: bool,
    pub patterns: PatternCounts,
}

const CONFIDENCE: f64 = 0.95;

pub fn model_free_fidelity(records: &[TripleImageRecord]) -> Result<ModelFreeReport, ImagingError> {
    if records.is_empty() {
        return Err(ImagingError::TooFewSamples { got: 0, need: 1 });
    }
    let mut n = [0u64; 8];
    for r in records {
        n[r.pattern()] += 1;
    }
    let fneg = RateEstimate::new(n[0b101], n[0b101] + n[0b111]);
    let fpos = RateEstimate::new(n[0b010], n[0b010] + n[0b000]);

    let (mut kept, mut bright_before, mut bright) = (0u64, 0u64, 0u64);
    for r in records {
        let b = [r.b1, r.b2, r.b3];
        bright += b.iter().filter(|&&x| x).count() as u64;
        for w in b.windows(2) {
            if w[0] {
                bright_before += 1;
                kept += w[1] as u64;
            }
        }
    }
    let survival = (bright_before > 0).then(|| kept as f64 / bright_before as f64);
    let fb = bright as f64 / (3 * records.len()) as f64;
    let err = |p: f64, q: f64| (1.0 - fb) * p + fb * q;
    let fidelity = 1.0 - err(fpos.rate.unwrap_or(0.0), fneg.rate.unwrap_or(0.0));
    let fidelity_ci = Interval { lo: 1.0 - err(fpos.ci.hi, fneg.ci.hi), hi: 1.0 - err(fpos.ci.lo, fneg.ci.lo) };
    let survival_ci = clopper_pearson(kept, bright_before, CONFIDENCE);
    let patterns =
        (0..8).map(|i| (format!("{}{}{}", (i >> 2) & 1, (i >> 1) & 1, i & 1), n[i])).collect::<PatternCounts>();
    Ok(ModelFreeReport {
        n_records: records.len(),
        fidelity,
        fidelity_ci,
        survival,
        survival_ci,
        survival_corrected: survival
            .map(|s| correct_survival(s, fneg.rate.unwrap_or(0.0), fpos.rate.unwrap_or(0.0), fb)),
        survival_corrected_ci: Interval {
            lo: correct_survival(survival_ci.lo, fneg.ci.lo, fpos.ci.lo, fb),
            hi: correct_survival(survival_ci.hi, fneg.ci.hi, fpos.ci.hi, fb),
        },
        false_negative: fneg,
        false_positive: fpos,
        bright_fraction: fb,
        undefined_rates: fneg.rate.is_none() || fpos.rate.is_none(),
        patterns,
    })
}

/// Survival of a present atom given the raw conditional `s`. A fraction
/// `1 − w` of bright readings comes from empty sites, which read bright
/// again with probability `fp`; a surviving atom reads bright with
/// probability `1 − fn`. Increasing in each argument, clamped to [0, 1].
fn correct_survival(s: f64, fneg: f64, fpos: f64, bright_fraction: f64) -> f64 {
    if bright_fraction <= 0.0 {
        return s;
    }
    let w = (1.0 - fpos * (1.0 - bright_fraction) / bright_fraction).max(f64::MIN_POSITIVE);
    ((s - (1.0 - w) * fpos) / (w * (1.0 - fneg).max(f64::MIN_POSITIVE))).clamp(0.0, 1.0)
}

/// Synthetic three-image data: an atom is present with probability `load`;
/// each image misses a present atom with probability `miss`, reports an
/// empty site as bright with probability `false_positive`, and then loses
/// the atom with probability `loss`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleGenerator {
    pub n_sites: usize,
    pub n_shots: usize,
    pub load: f64,
    pub miss: f64,
    pub false_positive: f64,
    pub loss: f64,
    pub seed: u64,
}

impl TripleGenerator {
    /// Survival of one image.
    pub fn survival(&self) -> f64 {
        1.0 - self.loss
    }

    /// Fidelity seen by the estimator when the bright fraction is `f`.
    pub fn fidelity(&self, bright_fraction: f64) -> f64 {
        1.0 - ((1.0 - bright_fraction) * self.false_positive + bright_fraction * self.miss)
    }
}

pub fn generate_triples(g: &TripleGenerator) -> Result<Vec<TripleImageRecord>, ImagingError> {
    for (name, p) in [("load", g.load), ("miss", g.miss), ("false_positive", g.false_positive), ("loss", g.loss)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(ImagingError::BadInput(format!("{name} = {p} is not a probability")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let mut out = Vec::with_capacity(g.n_sites * g.n_shots);
    for shot in 0..g.n_shots {
        for site in 0..g.n_sites {
            let mut present = rng.random::<f64>() < g.load;
            let mut b = [false; 3];
            for bi in &mut b {
                let u: f64 = rng.random();
                *bi = if present { u >= g.miss } else { u < g.false_positive };
                if present && rng.random::<f64>() < g.loss {
                    present = false;
                }
            }
            out.push(TripleImageRecord { site, shot, b1: b[0], b2: b[1], b3: b[2] });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(b: [bool; 3]) -> TripleImageRecord {
        TripleImageRecord { site: 0, shot: 0, b1: b[0], b2: b[1], b3: b[2] }
    }

    #[test]
    fn consistent_records() {
        let mut rs = vec![rec([true; 3]); 600];
        rs.extend(vec![rec([false; 3]); 600]);
        let r = model_free_fidelity(&rs).unwrap();
        assert_eq!(r.fidelity, 1.0);
        assert_eq!(r.survival, Some(1.0));
        assert!(!r.undefined_rates);
        assert_eq!(r.patterns["111"], 600);
    }

    #[test]
    fn dark_first_image_leaves_false_negative_undefined() {
        let rs = vec![rec([false, true, false]), rec([false, false, false])];
        let r = model_free_fidelity(&rs).unwrap();
        assert_eq!(r.false_negative.rate, None);
        assert_eq!(r.false_negative.ci, Interval { lo: 0.0, hi: 1.0 });
        assert!(r.undefined_rates);
        assert_eq!(r.false_positive.rate, Some(0.5));
    }

    #[test]
    fn shuffle_invariance() {
        let g = TripleGenerator {
            n_sites: 100,
            n_shots: 20,
            load: 0.5,
            miss: 0.01,
            false_positive: 0.01,
            loss: 0.02,
            seed: 3,
        };
        let mut rs = generate_triples(&g).unwrap();
        let a = model_free_fidelity(&rs).unwrap();
        rs.reverse();
        rs.swap(3, 700);
        assert_eq!(model_free_fidelity(&rs).unwrap(), a);
    }
}
