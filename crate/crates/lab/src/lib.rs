//! Experiment harness around `doa-core`.
//!
//! * [`scenarios`]: declarative Monte Carlo scenarios, the builtin set that
//!   mirrors each reference experiment, SNR and resolution sweeps, and
//!   optimal angle matching for scoring.
//! * [`config`]: the JSON scenario schema (unit-suffixed keys, unknown keys
//!   rejected).
//! * [`output`]: `report.json`, `estimates.csv` and spectrum CSV writers.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod error;
pub mod output;
pub mod scenarios;

pub use error::LabError;

pub type Result<T, E = LabError> = std::result::Result<T, E>;
