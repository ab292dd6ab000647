use serde::{Deserialize, Serialize};

use super::PaError;
use crate::units::{self, CODATA2018};

/// Inputs of the photoassociation calculation.
///
/// Serialized field names follow the usual symbols (`A`, `d2`, `C6`, `C12`,
/// `mu`, `k_photon`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaParameters {
    /// Hyperfine constant of ¹⁷¹Yb ³P₁ in MHz.
    #[serde(rename = "A")]
    pub a_hfs: f64,
    /// d²/(4πε₀) in E_h·a0³.
    pub d2: f64,
    /// van der Waals coefficient in E_h·a0⁶.
    #[serde(rename = "C6")]
    pub c6: f64,
    /// Short-range repulsion coefficient in E_h·a0¹².
    #[serde(rename = "C12")]
    pub c12: f64,
    /// Reduced mass in u.
    pub mu: f64,
    /// Transition wavenumber 2π/λ in 1/a0.
    pub k_photon: f64,
    pub retardation: bool,
    /// Multiplies the resonant dipole coupling. With 1.0 the Σ exchange
    /// element is -2·d²/R³ and the Π element +d²/R³.
    #[serde(default = "one")]
    pub dipole_scale: f64,
}

fn one() -> f64 {
    1.0
}

/// Wavenumber of the 555.8 nm intercombination line in 1/a0.
pub fn k_556() -> f64 {
    2.0 * std::f64::consts::PI / (555.8e-9 / CODATA2018.bohr_radius)
}

impl PaParameters {
    /// Literature values with the short-range coefficient as published and
    /// unit dipole scale.
    pub fn table2() -> Self {
        PaParameters {
            a_hfs: 3957.781,
            d2: 0.087_443_13,
            c6: 2_405.364_747,
            c12: 9.318e8,
            mu: units::yb171_yb174_reduced_mass(),
            k_photon: k_556(),
            retardation: true,
            dipole_scale: 1.0,
        }
    }

    /// Literature values with the dipole scale and short-range coefficient
    /// fitted to the calculated potential-2 resonance list (deep pair
    /// -717.8/-699.4 MHz, middle pair -283.6/-270.5 MHz, shallow pair
    /// -62.9/-55.3 MHz). See `examples/calibrate_pa.rs`.
    pub fn calibrated() -> Self {
        PaParameters { dipole_scale: CALIBRATED_DIPOLE_SCALE, c12: CALIBRATED_C12, ..Self::table2() }
    }

    pub fn validate(&self) -> Result<(), PaError> {
        // A = 0 is allowed: it switches the hyperfine coupling off.
        if !(self.a_hfs >= 0.0 && self.a_hfs.is_finite()) {
            return Err(PaError::InvalidParameter { name: "A", value: self.a_hfs });
        }
        let checks: [(&'static str, f64); 6] = [
            ("d2", self.d2),
            ("C6", self.c6),
            ("C12", self.c12),
            ("mu", self.mu),
            ("k_photon", self.k_photon),
            ("dipole_scale", self.dipole_scale),
        ];
        for (name, value) in checks {
            if !(value > 0.0 && value.is_finite()) {
                return Err(PaError::InvalidParameter { name, value });
            }
        }
        Ok(())
    }

    /// ħ²/(2μ) in MHz·a0².
    pub fn kinetic(&self) -> f64 {
        CODATA2018.kinetic_mhz_a0sq(self.mu)
    }

    pub fn d2_mhz(&self) -> f64 {
        self.d2 * units::HARTREE_MHZ
    }

    pub fn c6_mhz(&self) -> f64 {
        self.c6 * units::HARTREE_MHZ
    }

    pub fn c12_mhz(&self) -> f64 {
        self.c12 * units::HARTREE_MHZ
    }
}

pub const CALIBRATED_DIPOLE_SCALE: f64 = 0.690_21;
pub const CALIBRATED_C12: f64 = 9.039_100e8;
