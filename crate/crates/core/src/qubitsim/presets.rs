//! Named noise models calibrated to measured coherence curves.
//!
//! The trap-light rate reproduces the 4.3 s echo decay without imaging. The
//! quasi-static spread reproduces the 130 ms Ramsey decay without imaging
//! (together with the trap rate). Each imaging preset then lumps the extra
//! decoherence into a single exposed-wait rate that reproduces its own
//! measured 1/e time.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{NoiseModel, QubitError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceKind {
    Ramsey,
    Echo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub kind: SequenceKind,
    pub noise: NoiseModel,
    pub rabi_hz: f64,
    /// Measured 1/e time the preset is calibrated to (s).
    pub target_t2: f64,
    pub description: String,
}

/// Field during the hold (G).
pub const HOLD_FIELD_GAUSS: f64 = 2.5;
/// ¹⁷¹Yb ground-state nuclear Zeeman splitting per gauss (Hz/G).
pub const YB171_HZ_PER_GAUSS: f64 = 750.0;
pub const RABI_HZ: f64 = 208.0e3;
pub const ECHO_T2_NO_IMAGING: f64 = 4.3;
pub const RAMSEY_T2_NO_IMAGING: f64 = 0.130;

/// Quasi-static spread σ (Hz) such that `exp(−γT − (2πσT)²/2) = e⁻¹` at
/// `T = t2_star`.
pub fn solve_quasistatic_sigma(t2_star: f64, trap_rate: f64) -> Result<f64, QubitError> {
    let rest = 1.0 - trap_rate * t2_star;
    if !(t2_star > 0.0) || rest < 0.0 {
        return Err(QubitError::InvalidParameter { name: "t2_star", value: t2_star });
    }
    Ok((2.0 * rest).sqrt() / (2.0 * PI * t2_star))
}

/// Exposed-wait rate (1/s) that brings a Ramsey decay with the given trap
/// rate and quasi-static spread to 1/e at `t2`.
pub fn solve_exposed_rate(t2: f64, trap_rate: f64, sigma: f64) -> Result<f64, QubitError> {
    let g = (1.0 - 0.5 * (2.0 * PI * sigma * t2).powi(2)) / t2 - trap_rate;
    if !(t2 > 0.0) || g < 0.0 {
        return Err(QubitError::InvalidParameter { name: "t2", value: t2 });
    }
    Ok(g)
}

fn build(name: &str) -> Result<Preset, QubitError> {
    let trap = 1.0 / ECHO_T2_NO_IMAGING;
    let sigma = solve_quasistatic_sigma(RAMSEY_T2_NO_IMAGING, trap)?;
    let base = NoiseModel {
        scatter_rate: 0.0,
        trap_scatter_rate: trap,
        quasistatic_sigma: sigma,
        larmor: HOLD_FIELD_GAUSS * YB171_HZ_PER_GAUSS,
        destructive_fraction: 1.0,
        readout_infidelity: 0.0,
    };
    let (kind, t2, scatter, description) = match name {
        "echo-noimaging" => (SequenceKind::Echo, ECHO_T2_NO_IMAGING, 0.0, "Hahn echo, no imaging light"),
        "echo-399" => (
            SequenceKind::Echo,
            0.67,
            1.0 / 0.67 - trap,
            "Hahn echo with 399 nm probe and 556 nm cooling light during the hold",
        ),
        "ramsey-noimaging" => (SequenceKind::Ramsey, RAMSEY_T2_NO_IMAGING, 0.0, "Ramsey, no imaging light"),
        "ramsey-556" => (
            SequenceKind::Ramsey,
            0.122,
            solve_exposed_rate(0.122, trap, sigma)?,
            "Ramsey with a resonant 556 nm probe during the hold",
        ),
        "ramsey-399" => (
            SequenceKind::Ramsey,
            0.077,
            solve_exposed_rate(0.077, trap, sigma)?,
            "Ramsey with 399 nm probe and 556 nm cooling light during the hold",
        ),
        _ => return Err(QubitError::UnknownPreset(name.to_string())),
    };
    Ok(Preset {
        name: name.to_string(),
        kind,
        noise: NoiseModel { scatter_rate: scatter, ..base },
        rabi_hz: RABI_HZ,
        target_t2: t2,
        description: description.to_string(),
    })
}

pub const PRESET_NAMES: [&str; 5] = ["echo-noimaging", "echo-399", "ramsey-noimaging", "ramsey-556", "ramsey-399"];

pub fn preset(name: &str) -> Result<Preset, QubitError> {
    build(name)
}

pub fn presets() -> Vec<Preset> {
    PRESET_NAMES.iter().map(|n| build(n).expect("built-in presets are valid")).collect()
}

impl Preset {
    /// Same preset with the hold-field Larmor frequency recomputed.
    pub fn with_field(mut self, gauss: f64, hz_per_gauss: f64) -> Self {
        self.noise.larmor = gauss * hz_per_gauss;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramsey_decay(n: &NoiseModel, t: f64) -> f64 {
        (-(n.trap_scatter_rate + n.scatter_rate) * t - 0.5 * (2.0 * PI * n.quasistatic_sigma * t).powi(2)).exp()
    }

    #[test]
    fn presets_hit_their_targets() {
        for p in presets() {
            let c = match p.kind {
                SequenceKind::Ramsey => ramsey_decay(&p.noise, p.target_t2),
                SequenceKind::Echo => (-(p.noise.trap_scatter_rate + p.noise.scatter_rate) * p.target_t2).exp(),
            };
            assert!((c - (-1f64).exp()).abs() < 1e-12, "{}", p.name);
            p.noise.validate().unwrap();
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn larmor_from_field() {
        assert_eq!(preset("echo-399").unwrap().noise.larmor, 1875.0);
        assert_eq!(preset("echo-399").unwrap().with_field(1.0, 750.0).noise.larmor, 750.0);
    }
}
