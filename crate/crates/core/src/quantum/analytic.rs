//! Closed-form readout statistics of the digit ladder.
//!
//! The ladder returns `Ĩ = m α` with probability
//! `∏_{k=1}^{N} cos²((I - Ĩ) π / (2^k α))`. The function vanishes on the
//! lattice `I - Ĩ = n α`, `n ≠ 0`, and is largest half-way between lattice
//! points, so the worst case is `I mod α = α/2`.

use std::f64::consts::PI;

/// `∏_{k=1}^{N} cos²(offset π / 2^k)` for an offset measured in units of `α`.
///
/// The argument of each factor is reduced modulo one half-period before the
/// cosine is taken.
pub fn lattice_weight(offset: f64, n: u32) -> f64 {
    (1..=n)
        .map(|k| {
            let t = (offset / (k as f64).exp2()).rem_euclid(1.0);
            let c = (PI * t).cos();
            c * c
        })
        .product()
}

/// Probability that an `N`-step ladder reads `i_tilde` when the integral is
/// `integral`.
pub fn readout_probability(i_tilde: f64, integral: f64, alpha: f64, n: u32) -> f64 {
    lattice_weight((integral - i_tilde) / alpha, n)
}

/// Probability of an error `delta` with `α = guard M / 2^N`:
/// `∏_{k=1}^{N} cos²(δ π / (2^(k-N) guard M))`.
pub fn error_probability(delta: f64, m_scale: f64, n: u32, guard: f64) -> f64 {
    let span = guard * m_scale;
    (1..=n)
        .map(|k| {
            let c = (delta * PI / ((k as f64 - n as f64).exp2() * span)).cos();
            c * c
        })
        .product()
}

fn lattice_mass(lo: i64, hi: i64, n: u32) -> f64 {
    (lo..=hi).map(|j| lattice_weight(j as f64 + 0.5, n)).sum()
}

/// Probability that the readout misses by more than `threshold` lattice
/// steps at the worst-case offset `I mod α = α/2`:
/// `1 - Σ_{j=-(T-1)}^{T} ∏_{k=1}^{N} cos²((j + 1/2) π / 2^k)`.
///
/// The kept outcomes are `δ = (j + 1/2) α` for `j` in `-(T-1)..=T`, which is
/// not symmetric about zero; [`tail_probability_symmetric`] keeps
/// `|δ| < T α` instead.
pub fn tail_probability(threshold: u64, n: u32) -> f64 {
    let t = threshold as i64;
    1.0 - lattice_mass(-(t - 1), t, n)
}

/// As [`tail_probability`], keeping `j` in `-T..=T-1`, i.e. `|δ| < T α`.
pub fn tail_probability_symmetric(threshold: u64, n: u32) -> f64 {
    let t = threshold as i64;
    1.0 - lattice_mass(-t, t - 1, n)
}
