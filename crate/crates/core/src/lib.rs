//! Simulation and analysis toolkit for dual-isotope (¹⁷¹Yb/¹⁷⁴Yb) optical
//! tweezer arrays.
//!
//! * [`arraysim`]: stochastic loading, dual-species rearrangement planning
//!   and lossy execution.
//! * [`pamol`]: heteronuclear photoassociation bound states.
//! * [`imaging`]: photon-count histograms, threshold fidelity and the
//!   three-image estimator.
//! * [`qubitsim`]: nuclear-spin qubit Ramsey/echo simulation and fitters.

// Negated comparisons are used on purpose so that NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arraysim;
pub mod cli;
pub mod imaging;
pub mod numerics;
pub mod pamol;
pub mod qubitsim;
pub mod units;
