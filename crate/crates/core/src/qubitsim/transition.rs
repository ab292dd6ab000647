use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// An optical transition seen by a spectator isotope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionSpec {
    pub label: String,
    /// Natural linewidth Γ in rad/s.
    pub gamma: f64,
    /// Saturation intensity in mW/cm².
    pub i_sat: f64,
    /// Detuning of the spectator from the probed isotope's line, rad/s.
    pub isotope_shift: f64,
}

impl TransitionSpec {
    /// ¹S₀–¹P₁ at 399 nm. The isotope shift is an order-of-magnitude
    /// placeholder; set it from data when it matters.
    pub fn yb_399() -> Self {
        TransitionSpec {
            label: "399nm 1S0-1P1".into(),
            gamma: 2.0 * PI * 29.0e6,
            i_sat: 59.97,
            isotope_shift: 2.0 * PI * 1.0e9,
        }
    }

    /// ¹S₀–³P₁ at 556 nm.
    pub fn yb_556() -> Self {
        TransitionSpec {
            label: "556nm 1S0-3P1".into(),
            gamma: 2.0 * PI * 182.0e3,
            i_sat: 0.139,
            isotope_shift: 2.0 * PI * 1.0e9,
        }
    }

    /// Off-resonant scattering rate of the spectator at intensity `s·I_s`.
    pub fn spectator_rate(&self, s: f64) -> f64 {
        scattering_rate(s, self.isotope_shift, self.gamma)
    }
}

/// Steady-state two-level photon scattering rate (1/s) at saturation
/// parameter `s`, detuning `delta` and linewidth `gamma` (both rad/s).
pub fn scattering_rate(s: f64, delta: f64, gamma: f64) -> f64 {
    let x = 2.0 * delta / gamma;
    0.5 * gamma * s / (1.0 + s + x * x)
}
