//! Photon-count histograms: mixture model, fitting, threshold choice, the
//! three-image model-free estimator and a double-Lorentzian line fitter.

mod fit;
mod lorentz;
mod model;
mod modelfree;
mod threshold;

use thiserror::Error;

use crate::numerics::{quad::QuadError, LmError};

pub use fit::{fit_histogram, freedman_diaconis_width, FitOptions, HistogramFit};
pub use lorentz::{double_lorentzian, fit_double_lorentzian, DoubleLorentzianFit};
pub use model::{sample_histogram, DarkModel, HistogramModel, PreparedModel};
pub use modelfree::{
    generate_triples, model_free_fidelity, ModelFreeReport, PatternCounts, RateEstimate, TripleGenerator,
    TripleImageRecord,
};
pub use threshold::{infidelity_curve, optimize_threshold, FidelityReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImagingError {
    #[error("invalid histogram model: {0}")]
    BadModel(String),
    #[error("not enough data: {got} samples, need at least {need}")]
    TooFewSamples { got: usize, need: usize },
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("fit failed: {0}")]
    Fit(#[from] LmError),
    #[error("quadrature failed: {0}")]
    Quad(#[from] QuadError),
    #[error("invalid input: {0}")]
    BadInput(String),
}
