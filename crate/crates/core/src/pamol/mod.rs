//! Heteronuclear ¹⁷¹Yb-¹⁷⁴Yb photoassociation: coupled-channel interaction
//! Hamiltonian, adiabatic potentials, the radial model potential and
//! Numerov bound states near the ¹S₀-³P₁ asymptote.

mod curves;
mod hamiltonian;
mod lb;
mod model;
mod numerov;
mod params;
mod spectrum;

use thiserror::Error;

pub use curves::{adiabatic_potentials, default_curve_grid, PotentialCurve};
pub use hamiltonian::{block_states, build_hamiltonian, f_squared_matrix, BasisState, ChannelBasis, Sector};
pub use lb::{lb_density_ratio, lb_level_density, lb_level_spacing, C6Scaling};
pub use model::{FSquaredMode, ModelPotential};
pub use numerov::{solve_bound_states, solve_bound_states_with_kinetic, BoundState, GridSpec, RadialPotential};
pub use params::PaParameters;
pub use spectrum::{pa_spectrum, SpectrumLine, SpectrumOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PaError {
    #[error("interatomic distance must be positive, got {0} a0")]
    NonPositiveDistance(f64),
    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("radial grid must be strictly increasing and positive")]
    BadGrid,
    #[error("grid too coarse for continuity tracking between R = {r0} and R = {r1} a0 (best overlap {overlap:.3}); refine the grid there")]
    TrackingFailed { r0: f64, r1: f64, overlap: f64 },
    #[error("no curve with number {0} (valid: 1-6)")]
    NoSuchCurve(usize),
    #[error("R = {r} a0 outside the sampled range [{lo}, {hi}]")]
    OutOfRange { r: f64, lo: f64, hi: f64 },
    #[error("energy window ({0}, {1}) is empty or inverted")]
    BadWindow(f64, f64),
    #[error("level {level} did not converge; last bracket [{lo}, {hi}] MHz")]
    NotConverged { level: usize, lo: f64, hi: f64 },
    #[error("outer grid edge would have to exceed {cap} a0 for the tail at E = {energy} MHz to decay")]
    TailNotContained { energy: f64, cap: f64 },
    #[error("potential has no classically allowed region inside the window")]
    NoWell,
}
