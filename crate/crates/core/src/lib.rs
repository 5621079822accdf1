//! Survival phase diagram of the branching random walk on `{-N, ..., N}`.
//!
//! Individuals die at rate 1 and give birth onto each neighbouring site at
//! rate `lambda`; births across the boundary of the interval are suppressed.
//! The crate computes critical birth rates and interval sizes from the
//! spectrum of the mean generator ([`spectral`]), the mean semigroup
//! ([`mean`]), and Monte Carlo estimates with pathwise couplings
//! ([`sim`]).

pub mod error;
pub mod exec;
pub mod format;
pub mod mean;
pub mod params;
pub mod sim;
pub mod spectral;

pub use error::{BrwError, Result};
pub use exec::Execution;
pub use params::{BirthRate, IntervalRadius};
