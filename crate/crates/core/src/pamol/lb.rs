//! LeRoy-Bernstein near-threshold level spacing and density.
//!
//! For a long-range tail −C_n/R^n the spacing obeys
//! dE/dv ∝ C_n^{−1/n} (D − E)^{(n+2)/(2n)}. The relevant binding energies
//! are set by the cooling-light detuning, a few linewidths Γ, so the number
//! of levels per linewidth scales as Γ / (dE/dv).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum C6Scaling {
    /// C6 grows with the resonant dipole strength squared, C6 ∝ d⁴ ∝ Γ².
    #[default]
    GammaSquared,
    /// C6 held fixed while Γ varies.
    Fixed,
}

/// Level spacing dE/dv at binding energy `binding` for a −C_n/R^n tail, up
/// to a mass- and unit-dependent constant.
pub fn lb_level_spacing(n: u32, c_n: f64, binding: f64) -> f64 {
    let n = f64::from(n);
    c_n.powf(-1.0 / n) * binding.abs().powf((n + 2.0) / (2.0 * n))
}

/// Relative number of bound levels per linewidth for a transition of
/// linewidth `gamma` (any fixed unit).
pub fn lb_level_density(gamma: f64, mode: C6Scaling) -> f64 {
    // spacing ∝ C6^{-1/6} Γ^{2/3}; density = Γ / spacing
    match mode {
        C6Scaling::GammaSquared => gamma.powf(2.0 / 3.0),
        C6Scaling::Fixed => gamma.powf(1.0 / 3.0),
    }
}

pub fn lb_density_ratio(gamma_a: f64, gamma_b: f64, mode: C6Scaling) -> f64 {
    lb_level_density(gamma_a, mode) / lb_level_density(gamma_b, mode)
}
