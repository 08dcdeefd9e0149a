use std::f64::consts::TAU;

use super::{Mode, Outcome, PlanarSpin, QuantumConfig, QuantumError};
use crate::rng::RngStream;

/// Method I: `n_qubits` identical spins each turn by `Θ = 2π I / range_max`.
/// The first `⌈n/2⌉` are measured along x, the rest along y, giving
/// estimates of `cos Θ` and `sin Θ`; the direction is their `atan2`.
///
/// Returns an estimate in `[0, range_max)`. Integrals outside that range are
/// read modulo `range_max`. Qubit `i` draws from substream `i`.
pub fn method_i_estimate(
    integral: f64,
    range_max: f64,
    n_qubits: u32,
    rng: &RngStream,
) -> Result<f64, QuantumError> {
    if n_qubits < 2 {
        return Err(QuantumError::TooFewQubits {
            needed: 2,
            got: n_qubits,
        });
    }
    if !integral.is_finite() {
        return Err(QuantumError::NonFinite(integral));
    }
    if !(range_max.is_finite() && range_max > 0.0) {
        return Err(QuantumError::BadRange(range_max));
    }
    let spin = PlanarSpin::from_turns(integral / range_max);
    let n_x = n_qubits.div_ceil(2);
    let n_y = n_qubits - n_x;

    let mut plus_x = 0u32;
    let mut plus_y = 0u32;
    for i in 0..n_qubits {
        let mut stream = rng.substream(u64::from(i));
        if i < n_x {
            plus_x += u32::from(spin.measure_x(&mut stream) == Outcome::Plus);
        } else {
            plus_y += u32::from(spin.measure_y(&mut stream) == Outcome::Plus);
        }
    }
    let cos_hat = 2.0 * f64::from(plus_x) / f64::from(n_x) - 1.0;
    let sin_hat = 2.0 * f64::from(plus_y) / f64::from(n_y) - 1.0;
    let theta_hat = sin_hat.atan2(cos_hat).rem_euclid(TAU);
    let estimate = theta_hat / TAU * range_max;
    Ok(if estimate >= range_max { 0.0 } else { estimate })
}

/// Method I with the range taken from a method-I config (`alpha` is the
/// full-turn integral).
pub fn run_method_i(
    integral: f64,
    cfg: &QuantumConfig,
    rng: &RngStream,
) -> Result<f64, QuantumError> {
    cfg.validate()?;
    if cfg.mode != Mode::MethodI {
        return Err(QuantumError::WrongMode {
            expected: Mode::MethodI,
            got: cfg.mode,
        });
    }
    method_i_estimate(integral, cfg.alpha, cfg.n_qubits, rng)
}
