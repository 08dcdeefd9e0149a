//! Qubits sent through the field one at a time.
//!
//! A qubit is a spin in the x-y plane that precesses about z by an angle
//! proportional to the field integral times its coupling strength. Four
//! protocols are built from that one primitive:
//!
//! * the parity test ([`gh_parity`]): for `I = m α` and a half turn per `α`,
//!   one measurement tells whether `m` is even or odd;
//! * method I ([`method_i_estimate`]): every qubit gets the same coupling and
//!   the spin direction is estimated from x and y statistics, with error
//!   falling as `N^{-1/2}`;
//! * method II ([`run_method_ii`]): qubit `k` couples at `2^{-(k-1)}` of the
//!   first qubit's strength and is pre-rotated to cancel the digits already
//!   read, so each qubit yields one binary digit of `I / α`;
//! * the combined method ([`run_combined`]): method I measures the remainder
//!   `β = I mod α`, method II then reads the quotient.
//!
//! [`analytic`] has the closed-form readout distribution for method II.

pub mod analytic;
mod ladder;
mod method_i;
mod spin;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::field::MagnitudeScale;

pub use analytic::{
    error_probability, lattice_weight, readout_probability, tail_probability,
    tail_probability_symmetric,
};
pub use ladder::{
    choose_alpha, correction_angle, gh_parity, run_combined, run_method_ii, DigitReadout, Ladder,
    LadderStep, Parity,
};
pub use method_i::{method_i_estimate, run_method_i};
pub use spin::{Outcome, PlanarSpin};

/// Most ladder steps a run may use. Beyond this the readout lattice is too
/// fine for the phase bookkeeping in `f64`.
pub const MAX_LADDER_STEPS: u32 = 40;

/// Coupling range guard used by default: `α = 10 M / 2^N`.
pub const DEFAULT_GUARD: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("integral must be finite, got {0}")]
    NonFinite(f64),
    #[error("alpha must be positive and finite, got {0}")]
    BadAlpha(f64),
    #[error(
        "alpha = {alpha:e} is below 2^-46 M (M = {m}); phase reduction is no longer trustworthy"
    )]
    PrecisionLoss { alpha: f64, m: f64 },
    #[error("ladder of {0} steps exceeds the supported {MAX_LADDER_STEPS}")]
    LadderTooLong(u32),
    #[error("need n0 < n_qubits, got n0 = {n0}, n_qubits = {n_qubits}")]
    BadCarrierSplit { n_qubits: u32, n0: u32 },
    #[error("guard factor must be >= 1, got {0}")]
    BadGuard(f64),
    #[error("need at least {needed} qubits here, got {got}")]
    TooFewQubits { needed: u32, got: u32 },
    #[error("operation needs mode {expected}, config has {got}")]
    WrongMode { expected: Mode, got: Mode },
    #[error("beta estimate {beta} outside [0, alpha = {alpha})")]
    BetaOutOfRange { beta: f64, alpha: f64 },
    #[error("|I / alpha| = {0:e} is too large to reduce")]
    IntegralTooLarge(f64),
    #[error("range must be positive and finite, got {0}")]
    BadRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[serde(rename = "method-i")]
    MethodI,
    #[serde(rename = "method-ii")]
    MethodII,
    Combined,
    GhParity,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::MethodI => "method-i",
            Self::MethodII => "method-ii",
            Self::Combined => "combined",
            Self::GhParity => "gh-parity",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "method-i" => Ok(Self::MethodI),
            "method-ii" => Ok(Self::MethodII),
            "combined" => Ok(Self::Combined),
            "gh-parity" => Ok(Self::GhParity),
            other => Err(format!("unknown quantum mode `{other}`")),
        }
    }
}

/// Parameters of a quantum run.
///
/// For the ladder modes `alpha` is the readout quantum. In method-I mode it
/// is the integral that produces one full turn, i.e. the unambiguous range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantumConfig {
    pub mode: Mode,
    pub alpha: f64,
    pub n_qubits: u32,
    /// Qubits spent on the remainder in combined mode.
    pub n0: u32,
    pub guard: f64,
    pub scale: MagnitudeScale,
}

impl QuantumConfig {
    /// Derives `alpha` from the scale: `guard * M / 2^(N - N0)` for the
    /// ladder modes, `guard * M` for method I.
    pub fn new(
        mode: Mode,
        scale: MagnitudeScale,
        n_qubits: u32,
        n0: u32,
        guard: f64,
    ) -> Result<Self, QuantumError> {
        if !(guard.is_finite() && guard >= 1.0) {
            return Err(QuantumError::BadGuard(guard));
        }
        if n0 >= n_qubits {
            return Err(QuantumError::BadCarrierSplit { n_qubits, n0 });
        }
        let alpha = match mode {
            Mode::MethodI => guard * scale.value(),
            _ => choose_alpha(scale.value(), n_qubits, n0, guard)?,
        };
        let cfg = Self {
            mode,
            alpha,
            n_qubits,
            n0,
            guard,
            scale,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Pure method II with the default guard: `α = 10 M / 2^N`.
    pub fn method_ii(scale: MagnitudeScale, n_qubits: u32) -> Result<Self, QuantumError> {
        Self::new(Mode::MethodII, scale, n_qubits, 0, DEFAULT_GUARD)
    }

    /// Replaces the derived `alpha`.
    pub fn with_alpha(mut self, alpha: f64) -> Result<Self, QuantumError> {
        self.alpha = alpha;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), QuantumError> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(QuantumError::BadAlpha(self.alpha));
        }
        if !(self.guard.is_finite() && self.guard >= 1.0) {
            return Err(QuantumError::BadGuard(self.guard));
        }
        if self.n0 >= self.n_qubits {
            return Err(QuantumError::BadCarrierSplit {
                n_qubits: self.n_qubits,
                n0: self.n0,
            });
        }
        match self.mode {
            Mode::MethodI => {
                if self.n_qubits < 2 {
                    return Err(QuantumError::TooFewQubits {
                        needed: 2,
                        got: self.n_qubits,
                    });
                }
            }
            Mode::Combined if self.n0 < 2 => {
                return Err(QuantumError::TooFewQubits {
                    needed: 2,
                    got: self.n0,
                });
            }
            _ => {}
        }
        if self.mode != Mode::MethodI && self.ladder_len() > MAX_LADDER_STEPS {
            return Err(QuantumError::LadderTooLong(self.ladder_len()));
        }
        Ok(())
    }

    /// Qubits available for the digit ladder.
    pub fn ladder_len(&self) -> u32 {
        self.n_qubits - self.n0
    }
}
