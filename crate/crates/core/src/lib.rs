//! Measuring the line integral of a classical field with carriers that pass
//! through it one at a time.
//!
//! Two families of protocol are simulated side by side:
//!
//! * [`classical`]: bits that flip with a probability set by the integral.
//!   The error falls as `N^{-1/2}` in the number of bits.
//! * [`quantum`]: spins that precess by an angle set by the integral. With a
//!   halving coupling ladder and adaptive correction angles each qubit
//!   yields one binary digit, so the error falls as `2^{-N}`.
//!
//! [`field`] supplies the ground-truth integral. [`analysis`] runs seeded
//! Monte Carlo experiments over both families on the substreams of [`rng`],
//! so every run is reproducible.

pub mod analysis;
pub mod classical;
pub mod field;
pub mod quantum;
pub mod rng;

use thiserror::Error;

pub use field::{FieldSpec, MagnitudeScale};
pub use rng::RngStream;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] field::FieldError),
    #[error(transparent)]
    Classical(#[from] classical::ClassicalError),
    #[error(transparent)]
    Quantum(#[from] quantum::QuantumError),
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("malformed record on line {line}: {reason}")]
    BadRecord { line: u64, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
