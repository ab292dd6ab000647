//! Dual-isotope tweezer array: loading, rearrangement planning, lossy move
//! execution and Monte Carlo benchmarks.

mod execute;
mod grid;
mod loading;
mod montecarlo;
mod path;
mod plan;

use thiserror::Error;

pub use execute::{execute_plan, LossCause, LossEvent, LossMode, LossModel};
pub use grid::{ArrayGeometry, ArrayState, Occupancy, SiteTarget, Species, TargetPattern};
pub use loading::{sample_loading, sample_loading_rng, LoadingModel};
pub use montecarlo::{
    run_trial, scaling_benchmark, success_probability, trial_rng, BenchPattern, BenchRow, BenchmarkOptions,
    SuccessEstimate, TrialConfig, TrialOutcome,
};
pub use path::{
    corridor_path, parabolic_path, parking_position, path_distance, Point, TrajectoryMode, DEFAULT_PARABOLIC_APEX,
};
pub use plan::{
    plan_rearrangement, Cargo, Destination, Infeasibility, Move, MoveKind, MovePlan, Phase, PhaseRecord, PlanOptions,
    Shortfall,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArrayError {
    #[error("invalid geometry: rows={rows}, cols={cols}, pitch={pitch}")]
    BadGeometry { rows: usize, cols: usize, pitch: f64 },
    #[error("occupancy has {got} sites, geometry needs {want}")]
    SizeMismatch { got: usize, want: usize },
    #[error("state and target have different shapes ({0}x{1} vs {2}x{3})")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("invalid loading probabilities p1={p1}, p2={p2}, p_dual={p_dual}")]
    BadLoading { p1: f64, p2: f64, p_dual: f64 },
    #[error("invalid loss model: {0}")]
    BadLossModel(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("rearrangement infeasible: {0}")]
    Infeasible(Infeasibility),
    #[error("plan inconsistent with state: move {index} {msg}")]
    PlanInconsistent { index: usize, msg: String },
    #[error("n_trials must be at least 1")]
    NoTrials,
}
