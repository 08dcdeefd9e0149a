use crate::quantum::Ladder;
use crate::{Error, Result};

/// Largest ladder length [`enumerate_distribution`] will walk.
pub const MAX_ENUMERATION_STEPS: u32 = 12;

/// Exact distribution of the method-II readout `m̂` over all `2^N` adaptive
/// transcripts, found by pushing probability mass down the decision tree.
///
/// Each prefix of digits is identified with the integer it spells, so level
/// `k` of the tree is a vector of `2^k` masses. Step probabilities come from
/// the same reduced-phase ladder the simulator measures. Entry `m` of the
/// result is `P(m̂ = m)`.
pub fn enumerate_distribution(integral: f64, alpha: f64, n: u32) -> Result<Vec<f64>> {
    enumerate_with_beta(integral, alpha, 0.0, n)
}

/// As [`enumerate_distribution`] with a remainder estimate `beta_hat`
/// compensated on every step.
pub fn enumerate_with_beta(integral: f64, alpha: f64, beta_hat: f64, n: u32) -> Result<Vec<f64>> {
    if n > MAX_ENUMERATION_STEPS {
        return Err(Error::Unsupported(format!(
            "enumeration is limited to {MAX_ENUMERATION_STEPS} steps, got {n}"
        )));
    }
    let ladder = Ladder::new(integral, alpha, beta_hat)?;
    let mut mass = vec![1.0];
    for k in 1..=n {
        let mut next = vec![0.0; mass.len() * 2];
        let high = 1usize << (k - 1);
        for (partial, &w) in mass.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let flip = ladder.spin_at(k, partial as u64).minus_x_probability();
            next[partial] += w * (1.0 - flip);
            next[partial | high] += w * flip;
        }
        mass = next;
    }
    Ok(mass)
}

/// Total variation distance between two distributions on the same support.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "distributions on different supports");
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
