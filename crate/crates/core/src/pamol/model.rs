//! Radial model potential: adiabatic curve plus rotational, van der Waals
//! and short-range terms.

use serde::{Deserialize, Serialize};

use super::curves::Block;
use super::numerov::RadialPotential;
use super::{PaError, PaParameters, PotentialCurve};

/// How ⟨F²⟩ enters the rotational term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FSquaredMode {
    /// Expectation value in the adiabatic eigenvector at each R.
    #[default]
    Expectation,
    /// Expectation value in the eigenvector at the outer edge of the curve
    /// grid, held constant.
    Asymptotic,
}

/// V(R) = ⟨H_int⟩ − D + ħ²[T_e(T_e+1) + ⟨F²⟩ − 2Ω²]/(2μR²) − C6/R⁶ + C12/R¹²
/// in MHz, measured from the curve's own dissociation limit D.
///
/// The adiabatic energy is recomputed by diagonalization at every R rather
/// than interpolated, so the only use of the curve's grid is as the valid
/// domain.
#[derive(Debug, Clone)]
pub struct ModelPotential {
    block: Block,
    rank: usize,
    pub te: f64,
    pub abs_omega: f64,
    pub asymptote: f64,
    pub curve_index: usize,
    kinetic: f64,
    c6: f64,
    c12: f64,
    f_mode: FSquaredMode,
    f2_far: f64,
    lo: f64,
    hi: f64,
}

impl ModelPotential {
    pub fn new(curve: &PotentialCurve, te: f64, params: &PaParameters) -> Result<Self, PaError> {
        Self::with_mode(curve, te, params, FSquaredMode::default())
    }

    pub fn with_mode(
        curve: &PotentialCurve,
        te: f64,
        params: &PaParameters,
        f_mode: FSquaredMode,
    ) -> Result<Self, PaError> {
        params.validate()?;
        if !(te >= 0.0 && te.is_finite()) {
            return Err(PaError::InvalidParameter { name: "Te", value: te });
        }
        let block = Block::new(curve.two_omega(), params);
        let (lo, hi) = curve.r_range();
        let f2_far = *curve.f_squared.last().expect("non-empty curve");
        Ok(ModelPotential {
            block,
            rank: curve.block_rank,
            te,
            abs_omega: curve.abs_omega,
            asymptote: curve.asymptote,
            curve_index: curve.index,
            kinetic: params.kinetic(),
            c6: params.c6_mhz(),
            c12: params.c12_mhz(),
            f_mode,
            f2_far,
            lo,
            hi,
        })
    }

    pub fn kinetic(&self) -> f64 {
        self.kinetic
    }

    /// Checked evaluation.
    pub fn eval(&self, r: f64) -> Result<f64, PaError> {
        if r < self.lo || r > self.hi || r.is_nan() {
            return Err(PaError::OutOfRange { r, lo: self.lo, hi: self.hi });
        }
        Ok(self.value(r))
    }

    /// Short-range and long-range pieces without the adiabatic energy.
    pub fn radial_terms(&self, r: f64, f2: f64) -> f64 {
        let r2 = r * r;
        let r6 = r2 * r2 * r2;
        let rot = self.te * (self.te + 1.0) + f2 - 2.0 * self.abs_omega * self.abs_omega;
        self.kinetic * rot / r2 - self.c6 / r6 + self.c12 / (r6 * r6)
    }
}

impl RadialPotential for ModelPotential {
    fn value(&self, r: f64) -> f64 {
        let (e, f2) = self.block.level(r, self.rank);
        let f2 = match self.f_mode {
            FSquaredMode::Expectation => f2,
            FSquaredMode::Asymptotic => self.f2_far,
        };
        e - self.asymptote + self.radial_terms(r, f2)
    }

    fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}
