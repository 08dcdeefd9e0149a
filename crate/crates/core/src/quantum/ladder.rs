//! The digit ladder (method II), its parity-test special case and the
//! combined remainder-plus-quotient method.
//!
//! Step `k` rotates a fresh spin by `Θ_k = I π / (2^(k-1) α) + θ_k`, where the
//! correction `θ_k` removes the contribution of the digits read so far and of
//! the remainder estimate. At `N = 30` the first angle is of order `10^8` rad,
//! so the angle is never formed directly. Instead `I / α` is split once into
//! an integer `q` and a fraction `f`, and step `k` uses
//!
//! ```text
//! Θ_k / 2π = (((q - m_{<k}) mod 2^k) + f - β/α) / 2^k     (turns)
//! ```
//!
//! with `m_{<k}` the integer formed by the digits already read. The modulus is
//! taken in integer arithmetic, so the reduced angle is as accurate as `f`.

use std::f64::consts::PI;

use serde::Serialize;

use super::{method_i_estimate, Mode, Outcome, PlanarSpin, QuantumConfig, QuantumError};
use crate::rng::RngStream;

/// The correction angle before step `k`:
/// `θ_k = -Σ_{i<k} π d(i) / 2^(k-i) - π β / (2^(k-1) α)`.
///
/// `digits[0]` is the least significant digit. Only the first `k - 1`
/// digits are used.
pub fn correction_angle(digits: &[u8], k: u32, beta_hat: f64, alpha: f64) -> f64 {
    assert!(k >= 1, "ladder steps are numbered from 1");
    let digit_part: f64 = digits
        .iter()
        .take((k - 1) as usize)
        .enumerate()
        .filter(|(_, &d)| d != 0)
        .map(|(i, _)| PI / (k as f64 - (i as f64 + 1.0)).exp2())
        .sum();
    let beta_part = PI * beta_hat / ((k as f64 - 1.0).exp2() * alpha);
    -digit_part - beta_part
}

/// Ladder quantum `α = guard M / 2^(N - N0)`.
pub fn choose_alpha(m_scale: f64, n_qubits: u32, n0: u32, guard: f64) -> Result<f64, QuantumError> {
    if n0 >= n_qubits {
        return Err(QuantumError::BadCarrierSplit { n_qubits, n0 });
    }
    let steps = (n_qubits - n0).min(2000) as i32;
    let alpha = guard * m_scale / 2f64.powi(steps);
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(QuantumError::BadAlpha(alpha));
    }
    if alpha < 2f64.powi(-46) * m_scale {
        return Err(QuantumError::PrecisionLoss { alpha, m: m_scale });
    }
    Ok(alpha)
}

/// `I / α` split into an integer and a fraction, plus the remainder
/// estimate in units of `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ladder {
    whole: i128,
    frac: f64,
    beta_turns: f64,
    alpha: f64,
    beta_hat: f64,
}

/// One rung of the ladder as it was executed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderStep {
    pub k: u32,
    /// Rotation per unit integral, `π / (2^(k-1) α)`.
    pub coupling: f64,
    /// Correction angle `θ_k` in radians, unreduced.
    pub theta_corr: f64,
    /// Total rotation `Θ_k` reduced to `[0, 2π)`.
    pub theta_total: f64,
    /// Probability that the measurement reads digit 1.
    pub flip_probability: f64,
}

impl Ladder {
    pub fn new(integral: f64, alpha: f64, beta_hat: f64) -> Result<Self, QuantumError> {
        if !integral.is_finite() {
            return Err(QuantumError::NonFinite(integral));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(QuantumError::BadAlpha(alpha));
        }
        if !(beta_hat.is_finite() && (0.0..alpha).contains(&beta_hat)) {
            return Err(QuantumError::BetaOutOfRange {
                beta: beta_hat,
                alpha,
            });
        }
        let x = integral / alpha;
        if !x.is_finite() || x.abs() >= 2f64.powi(100) {
            return Err(QuantumError::IntegralTooLarge(x));
        }
        // Recover the bits of I/α lost to rounding: I - x α is exact via fma.
        let residual = (-x).mul_add(alpha, integral) / alpha;
        let floor = x.floor();
        let mut whole = floor as i128;
        let mut frac = (x - floor) + residual;
        if frac >= 1.0 {
            frac -= 1.0;
            whole += 1;
        } else if frac < 0.0 {
            frac += 1.0;
            whole -= 1;
        }
        Ok(Self {
            whole,
            frac,
            beta_turns: beta_hat / alpha,
            alpha,
            beta_hat,
        })
    }

    /// Spin state just before the measurement at step `k`, given the integer
    /// `partial` formed by the digits already read.
    pub fn spin_at(&self, k: u32, partial: u64) -> PlanarSpin {
        debug_assert!((1..=64).contains(&k));
        let modulus = 1i128 << k;
        let rem = (self.whole - i128::from(partial)).rem_euclid(modulus) as f64;
        PlanarSpin::from_turns((rem + self.frac - self.beta_turns) / modulus as f64)
    }

    pub fn step(&self, k: u32, digits: &[u8]) -> LadderStep {
        let partial = digits_value(digits);
        let spin = self.spin_at(k, partial);
        LadderStep {
            k,
            coupling: PI / ((k as f64 - 1.0).exp2() * self.alpha),
            theta_corr: correction_angle(digits, k, self.beta_hat, self.alpha),
            theta_total: spin.theta(),
            flip_probability: spin.minus_x_probability(),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta_hat(&self) -> f64 {
        self.beta_hat
    }
}

fn digits_value(digits: &[u8]) -> u64 {
    digits
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &d)| acc | (u64::from(d & 1) << i))
}

/// Transcript of a ladder run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DigitReadout {
    /// `digits[0]` is the least significant.
    pub digits: Vec<u8>,
    pub m_hat: u64,
    pub alpha: f64,
    pub beta_hat: f64,
    /// `m_hat * alpha + beta_hat`.
    pub i_tilde: f64,
    pub steps: Vec<LadderStep>,
}

fn run_ladder(
    integral: f64,
    alpha: f64,
    beta_hat: f64,
    len: u32,
    rng: &RngStream,
) -> Result<DigitReadout, QuantumError> {
    if len > super::MAX_LADDER_STEPS {
        return Err(QuantumError::LadderTooLong(len));
    }
    let ladder = Ladder::new(integral, alpha, beta_hat)?;
    let mut digits = Vec::with_capacity(len as usize);
    let mut steps = Vec::with_capacity(len as usize);
    let mut partial = 0u64;
    for k in 1..=len {
        let step = ladder.step(k, &digits);
        let outcome = PlanarSpin::from_angle(step.theta_total)
            .measure_x(&mut rng.substream(u64::from(k - 1)));
        let digit = u8::from(outcome == Outcome::Minus);
        partial |= u64::from(digit) << (k - 1);
        digits.push(digit);
        steps.push(step);
    }
    Ok(DigitReadout {
        digits,
        m_hat: partial,
        alpha,
        beta_hat,
        i_tilde: partial as f64 * alpha + beta_hat,
        steps,
    })
}

/// Method II: reads `cfg.ladder_len()` binary digits of `(I - β) / α`, one per
/// qubit, never stopping early. Qubit `k` draws from substream `k - 1`.
///
/// When `I = m α + β` exactly with `0 <= m < 2^len`, every step is
/// deterministic and the readout equals `I`. Otherwise `m` is read modulo
/// `2^len`.
pub fn run_method_ii(
    integral: f64,
    cfg: &QuantumConfig,
    beta_hat: f64,
    rng: &RngStream,
) -> Result<DigitReadout, QuantumError> {
    cfg.validate()?;
    if !matches!(cfg.mode, Mode::MethodII | Mode::Combined) {
        return Err(QuantumError::WrongMode {
            expected: Mode::MethodII,
            got: cfg.mode,
        });
    }
    run_ladder(integral, cfg.alpha, beta_hat, cfg.ladder_len(), rng)
}

/// Combined method: `n0` qubits estimate `β = I mod α` by method I with one
/// full turn per `α`; the rest run the ladder with that remainder
/// compensated. Substream 0 feeds method I, substream 1 the ladder.
pub fn run_combined(
    integral: f64,
    cfg: &QuantumConfig,
    rng: &RngStream,
) -> Result<DigitReadout, QuantumError> {
    cfg.validate()?;
    if cfg.mode != Mode::Combined {
        return Err(QuantumError::WrongMode {
            expected: Mode::Combined,
            got: cfg.mode,
        });
    }
    let mut beta_hat = method_i_estimate(integral, cfg.alpha, cfg.n0, &rng.substream(0))?;
    if beta_hat >= cfg.alpha {
        beta_hat = 0.0;
    }
    run_ladder(
        integral,
        cfg.alpha,
        beta_hat,
        cfg.ladder_len(),
        &rng.substream(1),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Single-qubit parity test: half a turn per `α` of integral, then an x
/// measurement. Deterministic when `I` is an integer multiple of `α`.
pub fn gh_parity(integral: f64, alpha: f64, rng: &mut RngStream) -> Result<Parity, QuantumError> {
    let spin = Ladder::new(integral, alpha, 0.0)?.spin_at(1, 0);
    Ok(match spin.measure_x(rng) {
        Outcome::Plus => Parity::Even,
        Outcome::Minus => Parity::Odd,
    })
}
