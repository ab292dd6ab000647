use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ArrayError, ArrayGeometry, ArrayState, Occupancy};

/// Independent per-site loading probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadingModel {
    pub p1: f64,
    pub p2: f64,
    pub p_dual: f64,
    pub seed: u64,
}

impl LoadingModel {
    pub fn validate(&self) -> Result<(), ArrayError> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if !(ok(self.p1) && ok(self.p2) && ok(self.p_dual) && self.p1 + self.p2 + self.p_dual <= 1.0 + 1e-12) {
            return Err(ArrayError::BadLoading { p1: self.p1, p2: self.p2, p_dual: self.p_dual });
        }
        Ok(())
    }
}

pub fn sample_loading(geometry: &ArrayGeometry, model: &LoadingModel) -> Result<ArrayState, ArrayError> {
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    sample_loading_rng(geometry, model, &mut rng)
}

/// As [`sample_loading`], drawing from a caller-supplied generator (the
/// model's seed is ignored).
pub fn sample_loading_rng<R: Rng + ?Sized>(
    geometry: &ArrayGeometry,
    model: &LoadingModel,
    rng: &mut R,
) -> Result<ArrayState, ArrayError> {
    geometry.validate()?;
    model.validate()?;
    let (a, b, c) = (model.p1, model.p1 + model.p2, model.p1 + model.p2 + model.p_dual);
    let occupancy = (0..geometry.n_sites())
        .map(|_| {
            let u: f64 = rng.random();
            if u < a {
                Occupancy::Iso1
            } else if u < b {
                Occupancy::Iso2
            } else if u < c {
                Occupancy::Dual
            } else {
                Occupancy::Empty
            }
        })
        .collect();
    ArrayState::new(*geometry, occupancy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits() {
        let g = ArrayGeometry::new(4, 5, 5.0).unwrap();
        let zero = LoadingModel { p1: 0.0, p2: 0.0, p_dual: 0.0, seed: 3 };
        assert_eq!(sample_loading(&g, &zero).unwrap().count(Occupancy::Empty), 20);
        let full = LoadingModel { p1: 1.0, ..zero };
        assert_eq!(sample_loading(&g, &full).unwrap().count(Occupancy::Iso1), 20);
        let bad = LoadingModel { p1: 0.7, p2: 0.5, ..zero };
        assert!(sample_loading(&g, &bad).is_err());
        let neg = LoadingModel { p1: -0.1, ..zero };
        assert!(sample_loading(&g, &neg).is_err());
    }

    #[test]
    fn reproducible() {
        let g = ArrayGeometry::new(10, 10, 5.0).unwrap();
        let m = LoadingModel { p1: 0.21, p2: 0.21, p_dual: 0.002, seed: 99 };
        assert_eq!(sample_loading(&g, &m).unwrap(), sample_loading(&g, &m).unwrap());
    }
}
