//! Nuclear-spin qubit under imaging crosstalk: Bloch-vector Monte Carlo of
//! Ramsey and Hahn-echo sequences, fringe-contrast extraction and the
//! coherence-curve fitters.

mod fit;
mod presets;
mod sequence;
mod transition;

use thiserror::Error;

use crate::numerics::LmError;

pub use fit::{
    contrast_ratio, fit_damped_sinusoid, fit_stretched_exp, stretched_exp, RatioEstimate, SinusoidFit, StretchedExpFit,
};
pub use presets::{
    preset, presets, solve_exposed_rate, solve_quasistatic_sigma, Preset, SequenceKind, HOLD_FIELD_GAUSS, PRESET_NAMES,
    RABI_HZ, YB171_HZ_PER_GAUSS,
};
pub use sequence::{
    apply_pulse, contrast_curve, echo, pi_pulse_fidelity, ramsey, simulate_sequence, trajectory_population, Bloch,
    ContrastPoint, DtScan, Element, NoiseModel, PulseSequence, SimResult,
};
pub use transition::{scattering_rate, TransitionSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QubitError {
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { got: usize, need: usize },
    #[error("fit failed: {0}")]
    Fit(#[from] LmError),
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}
