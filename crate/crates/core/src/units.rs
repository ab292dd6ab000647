//! Physical constants (CODATA 2018) and the handful of conversions the
//! toolkit needs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnitsError {
    #[error("unknown energy unit `{0}` (expected hartree, mhz, joule or kelvin)")]
    UnknownUnit(String),
    #[error("mass must be positive and finite, got {0}")]
    NonPositiveMass(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Hartree energy divided by h, in Hz.
    pub hartree_per_h: f64,
    /// Bohr radius in m.
    pub bohr_radius: f64,
    /// Planck constant in J s.
    pub planck: f64,
    /// Atomic mass constant in kg.
    pub amu: f64,
    /// Boltzmann constant in J/K.
    pub boltzmann: f64,
    /// Electron mass in kg.
    pub electron_mass: f64,
    /// 4πε₀ in atomic units. Dipole couplings are quoted as d²/(4πε₀), so
    /// this is 1 and only kept to make the convention explicit.
    pub vacuum_permittivity_factor: f64,
}

pub const CODATA2018: PhysicalConstants = PhysicalConstants {
    hartree_per_h: 6.579_683_920_502e15,
    bohr_radius: 5.291_772_109_03e-11,
    planck: 6.626_070_15e-34,
    amu: 1.660_539_066_60e-27,
    boltzmann: 1.380_649e-23,
    electron_mass: 9.109_383_701_5e-31,
    vacuum_permittivity_factor: 1.0,
};

/// One Hartree in MHz.
pub const HARTREE_MHZ: f64 = 6.579_683_920_502e9;
/// Atomic mass constant in electron masses.
pub const AMU_IN_ELECTRON_MASSES: f64 = 1_822.888_486_209;
/// ¹⁷¹Yb atomic mass in u.
pub const YB171_MASS_AMU: f64 = 170.936_330_2;
/// ¹⁷⁴Yb atomic mass in u.
pub const YB174_MASS_AMU: f64 = 173.938_866_4;

impl PhysicalConstants {
    pub fn hartree_joule(&self) -> f64 {
        self.hartree_per_h * self.planck
    }

    pub fn hartree_kelvin(&self) -> f64 {
        self.hartree_joule() / self.boltzmann
    }

    pub fn hartree_mhz(&self) -> f64 {
        self.hartree_per_h * 1e-6
    }

    pub fn amu_in_electron_masses(&self) -> f64 {
        self.amu / self.electron_mass
    }

    /// ħ²/(2μ) for a reduced mass given in u, expressed in MHz·a0².
    pub fn kinetic_mhz_a0sq(&self, mu_amu: f64) -> f64 {
        self.hartree_mhz() / (2.0 * mu_amu * AMU_IN_ELECTRON_MASSES)
    }

    pub fn all_positive(&self) -> bool {
        [
            self.hartree_per_h,
            self.bohr_radius,
            self.planck,
            self.amu,
            self.boltzmann,
            self.electron_mass,
            self.vacuum_permittivity_factor,
        ]
        .iter()
        .all(|v| *v > 0.0 && v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyUnit {
    Hartree,
    MHz,
    Joule,
    Kelvin,
}

impl EnergyUnit {
    pub const ALL: [EnergyUnit; 4] = [EnergyUnit::Hartree, EnergyUnit::MHz, EnergyUnit::Joule, EnergyUnit::Kelvin];

    /// Size of one unit in Hartree.
    fn in_hartree(self, c: &PhysicalConstants) -> f64 {
        match self {
            EnergyUnit::Hartree => 1.0,
            EnergyUnit::MHz => 1.0 / c.hartree_mhz(),
            EnergyUnit::Joule => 1.0 / c.hartree_joule(),
            EnergyUnit::Kelvin => 1.0 / c.hartree_kelvin(),
        }
    }
}

impl FromStr for EnergyUnit {
    type Err = UnitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hartree" | "eh" | "au" => Ok(EnergyUnit::Hartree),
            "mhz" => Ok(EnergyUnit::MHz),
            "joule" | "j" => Ok(EnergyUnit::Joule),
            "kelvin" | "k" => Ok(EnergyUnit::Kelvin),
            other => Err(UnitsError::UnknownUnit(other.to_string())),
        }
    }
}

impl fmt::Display for EnergyUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EnergyUnit::Hartree => "hartree",
            EnergyUnit::MHz => "mhz",
            EnergyUnit::Joule => "joule",
            EnergyUnit::Kelvin => "kelvin",
        };
        f.write_str(s)
    }
}

pub fn convert_energy(value: f64, from: EnergyUnit, to: EnergyUnit) -> f64 {
    convert_energy_with(&CODATA2018, value, from, to)
}

pub fn convert_energy_with(c: &PhysicalConstants, value: f64, from: EnergyUnit, to: EnergyUnit) -> f64 {
    if from == to {
        return value;
    }
    value * from.in_hartree(c) / to.in_hartree(c)
}

/// Parses both unit tags and converts.
pub fn convert_energy_str(value: f64, from: &str, to: &str) -> Result<f64, UnitsError> {
    Ok(convert_energy(value, from.parse()?, to.parse()?))
}

pub fn reduced_mass(m1: f64, m2: f64) -> Result<f64, UnitsError> {
    for m in [m1, m2] {
        if !(m > 0.0 && m.is_finite()) {
            return Err(UnitsError::NonPositiveMass(m));
        }
    }
    Ok(m1 * m2 / (m1 + m2))
}

/// Reduced mass of the ¹⁷¹Yb-¹⁷⁴Yb pair in u.
pub fn yb171_yb174_reduced_mass() -> f64 {
    YB171_MASS_AMU * YB174_MASS_AMU / (YB171_MASS_AMU + YB174_MASS_AMU)
}

/// Length conversion helpers.
pub fn bohr_to_nm(r: f64) -> f64 {
    r * CODATA2018.bohr_radius * 1e9
}

pub fn nm_to_bohr(r: f64) -> f64 {
    r / (CODATA2018.bohr_radius * 1e9)
}
