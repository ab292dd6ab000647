//! Shared numerical building blocks: quadrature, least squares, 1-D
//! minimization, root bracketing and interval statistics.

pub mod lm;
pub mod optimize;
pub mod quad;
pub mod stats;

pub use lm::{levenberg_marquardt, LmError, LmOptions, LmResult};
pub use optimize::{brent_root, golden_section_min};
pub use quad::{integrate, QuadError};
pub use stats::{clopper_pearson, Interval};
