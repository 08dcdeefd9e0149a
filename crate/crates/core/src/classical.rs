//! Classical bits sent through the field one at a time.
//!
//! Each bit starts in 0 and flips irreversibly to 1 with probability
//! `p = 1 - exp(-λ I)`. The integral is recovered from the observed flip
//! fraction by inverting that relation. The bits-sent-together probabilistic
//! counter lives here too, as the exponential-precision classical baseline.

use rand_distr::{Distribution, Poisson};
use serde::Serialize;
use thiserror::Error;

use crate::field::MagnitudeScale;
use crate::rng::RngStream;

/// The coupling suggested for the reference simulation: `λ = 1.2 / M`.
pub const REFERENCE_LAMBDA_TIMES_M: f64 = 1.2;

/// Largest carrier count for which the counter's mean count stays well
/// inside the exactly representable integers of an `f64`.
pub const MAX_COUNTER_BITS: u32 = 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassicalError {
    #[error("the classical protocol needs a non-negative integral, got {0}")]
    NegativeIntegral(f64),
    #[error("integral must be finite, got {0}")]
    NonFinite(f64),
    #[error("lambda must be positive and finite, got {0}")]
    BadLambda(f64),
    #[error("at least one bit is required")]
    NoBits,
    #[error("flip count {count} exceeds the {n_bits} bits sent")]
    FlipCountOutOfRange { count: u32, n_bits: u32 },
    #[error("counter supports at most {MAX_COUNTER_BITS} bits, got {0}")]
    CounterTooWide(u32),
    #[error("guard factor must be >= 1, got {0}")]
    BadGuard(f64),
    #[error("counter mean {0:e} overflows the exact count range")]
    CounterOverflow(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalConfig {
    pub lambda: f64,
    pub n_bits: u32,
    pub scale: MagnitudeScale,
}

impl ClassicalConfig {
    pub fn new(lambda: f64, n_bits: u32, scale: MagnitudeScale) -> Result<Self, ClassicalError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(ClassicalError::BadLambda(lambda));
        }
        if n_bits == 0 {
            return Err(ClassicalError::NoBits);
        }
        Ok(Self {
            lambda,
            n_bits,
            scale,
        })
    }

    /// `λ = 1.2 / M`.
    pub fn reference(n_bits: u32, scale: MagnitudeScale) -> Result<Self, ClassicalError> {
        Self::new(REFERENCE_LAMBDA_TIMES_M / scale.value(), n_bits, scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalEstimate {
    pub flip_count: u32,
    pub p_hat: f64,
    pub i_hat: f64,
    /// Set when every bit flipped and `p_hat` was pulled back to
    /// `(N - 1/2) / N` to keep the estimate finite.
    pub clamped: bool,
}

fn check_integral(integral: f64) -> Result<(), ClassicalError> {
    if !integral.is_finite() {
        return Err(ClassicalError::NonFinite(integral));
    }
    if integral < 0.0 {
        return Err(ClassicalError::NegativeIntegral(integral));
    }
    Ok(())
}

/// `1 - exp(-λ I)`.
pub fn flip_probability(integral: f64, lambda: f64) -> Result<f64, ClassicalError> {
    check_integral(integral)?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(ClassicalError::BadLambda(lambda));
    }
    Ok(-(-lambda * integral).exp_m1())
}

/// Sends `cfg.n_bits` bits through a field with integral `integral` and
/// returns how many flipped. Bit `i` draws from substream `i` of `rng`.
pub fn simulate_bits(
    integral: f64,
    cfg: &ClassicalConfig,
    rng: &RngStream,
) -> Result<u32, ClassicalError> {
    let p = flip_probability(integral, cfg.lambda)?;
    let flips = (0..cfg.n_bits)
        .filter(|&i| rng.substream(u64::from(i)).bernoulli(p))
        .count();
    Ok(flips as u32)
}

/// Maximum-likelihood inversion of the flip fraction.
pub fn estimate_integral(
    flip_count: u32,
    cfg: &ClassicalConfig,
) -> Result<ClassicalEstimate, ClassicalError> {
    let n = cfg.n_bits;
    if flip_count > n {
        return Err(ClassicalError::FlipCountOutOfRange {
            count: flip_count,
            n_bits: n,
        });
    }
    let nf = f64::from(n);
    let p_hat = f64::from(flip_count) / nf;
    let clamped = flip_count == n;
    let p_used = if clamped { (nf - 0.5) / nf } else { p_hat };
    Ok(ClassicalEstimate {
        flip_count,
        p_hat,
        i_hat: -(-p_used).ln_1p() / cfg.lambda,
        clamped,
    })
}

/// One full classical measurement: simulate, then invert.
pub fn measure(
    integral: f64,
    cfg: &ClassicalConfig,
    rng: &RngStream,
) -> Result<ClassicalEstimate, ClassicalError> {
    let flips = simulate_bits(integral, cfg, rng)?;
    estimate_integral(flips, cfg)
}

/// Propagated binomial uncertainty of the estimate,
/// `sqrt(exp(λI) - 1) / (λ sqrt(N))`.
pub fn uncertainty(integral: f64, lambda: f64, n_bits: u32) -> f64 {
    (lambda * integral).exp_m1().sqrt() / (lambda * f64::from(n_bits).sqrt())
}

/// Coupling that minimises [`uncertainty`] at `I = M`, found by bracketing
/// and golden-section search. The result does not depend on `n_bits`, which
/// only rescales the objective.
pub fn optimize_lambda(m_scale: f64, n_bits: u32) -> f64 {
    let f = |lambda: f64| uncertainty(m_scale, lambda, n_bits);

    // Expand geometrically until the middle point is lowest.
    let (mut a, mut b, mut c) = (0.25 / m_scale, 0.5 / m_scale, 1.0 / m_scale);
    while f(c) < f(b) {
        (a, b, c) = (b, c, 2.0 * c);
    }
    while f(a) < f(b) {
        (a, b, c) = (0.5 * a, a, b);
    }

    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a, c);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-10 * b {
        if f1 <= f2 {
            hi = x2;
            (x2, f2) = (x1, f1);
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            (x1, f1) = (x2, f2);
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Optimal coupling next to the reference `1.2 / M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaComparison {
    pub m_scale: f64,
    pub n_bits: u32,
    pub lambda_opt: f64,
    pub lambda_reference: f64,
    pub uncertainty_opt: f64,
    pub uncertainty_reference: f64,
    /// `uncertainty_reference / uncertainty_opt - 1`.
    pub excess: f64,
}

pub fn compare_lambda(m_scale: f64, n_bits: u32) -> LambdaComparison {
    let lambda_opt = optimize_lambda(m_scale, n_bits);
    let lambda_reference = REFERENCE_LAMBDA_TIMES_M / m_scale;
    let uncertainty_opt = uncertainty(m_scale, lambda_opt, n_bits);
    let uncertainty_reference = uncertainty(m_scale, lambda_reference, n_bits);
    LambdaComparison {
        m_scale,
        n_bits,
        lambda_opt,
        lambda_reference,
        uncertainty_opt,
        uncertainty_reference,
        excess: uncertainty_reference / uncertainty_opt - 1.0,
    }
}

/// All bits travel together and drive a counter of capacity `2^N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CounterConfig {
    pub n_bits: u32,
    pub scale: MagnitudeScale,
    pub guard: f64,
}

impl CounterConfig {
    pub fn new(n_bits: u32, scale: MagnitudeScale, guard: f64) -> Result<Self, ClassicalError> {
        if n_bits == 0 {
            return Err(ClassicalError::NoBits);
        }
        if n_bits > MAX_COUNTER_BITS {
            return Err(ClassicalError::CounterTooWide(n_bits));
        }
        if !(guard.is_finite() && guard >= 1.0) {
            return Err(ClassicalError::BadGuard(guard));
        }
        Ok(Self {
            n_bits,
            scale,
            guard,
        })
    }

    /// Counts per unit integral, chosen so the mean count reaches `2^N` at
    /// `I = guard * M`.
    pub fn rate(&self) -> f64 {
        (self.n_bits as f64).exp2() / (self.guard * self.scale.value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CounterEstimate {
    pub count: u64,
    pub mean_count: f64,
    pub i_hat: f64,
}

/// Poisson-sampled probabilistic counter. Relative error is `1/sqrt(mean)`.
pub fn counter_baseline(
    integral: f64,
    cfg: &CounterConfig,
    rng: &mut RngStream,
) -> Result<CounterEstimate, ClassicalError> {
    check_integral(integral)?;
    let rate = cfg.rate();
    let mean_count = rate * integral;
    if mean_count > 2f64.powi(53) {
        return Err(ClassicalError::CounterOverflow(mean_count));
    }
    let count = if mean_count == 0.0 {
        0.0
    } else {
        Poisson::new(mean_count)
            .map_err(|_| ClassicalError::CounterOverflow(mean_count))?
            .sample(rng)
    };
    Ok(CounterEstimate {
        count: count as u64,
        mean_count,
        i_hat: count / rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scale5() -> MagnitudeScale {
        MagnitudeScale::new(5.0).unwrap()
    }

    #[test]
    fn flip_probability_values() {
        assert_eq!(flip_probability(0.0, 3.0).unwrap(), 0.0);
        assert!((flip_probability(2f64.ln(), 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((flip_probability(5.0, 0.24).unwrap() - 0.698_805_788_087_797_8).abs() < 1e-12);
        assert!(matches!(
            flip_probability(-1.0, 1.0),
            Err(ClassicalError::NegativeIntegral(_))
        ));
        assert!(flip_probability(1.0, 0.0).is_err());
    }

    #[test]
    fn flip_probability_strictly_increasing() {
        let mut prev = -1.0;
        for i in 0..200 {
            let p = flip_probability(f64::from(i) * 0.05, 0.24).unwrap();
            assert!(p > prev);
            assert!(p < 1.0);
            prev = p;
        }
    }

    #[test]
    fn zero_field_never_flips() {
        let cfg = ClassicalConfig::reference(30, scale5()).unwrap();
        for t in 0..100 {
            let rng = RngStream::new(t);
            assert_eq!(simulate_bits(0.0, &cfg, &rng).unwrap(), 0);
        }
    }

    #[test]
    fn all_flip_rate_matches_binomial_tail() {
        // p = 1 - eps with eps = e^{-3}; P(all 30 flip) = (1-eps)^30.
        let cfg = ClassicalConfig::new(1.0, 30, scale5()).unwrap();
        let p = flip_probability(3.0, 1.0).unwrap();
        let expect = p.powi(30);
        let trials = 20_000;
        let root = RngStream::new(11);
        let hits = (0..trials)
            .filter(|&t| simulate_bits(3.0, &cfg, &root.substream(t)).unwrap() == 30)
            .count();
        let freq = hits as f64 / trials as f64;
        let se = (expect * (1.0 - expect) / trials as f64).sqrt();
        assert!(
            (freq - expect).abs() < 4.0 * se,
            "freq={freq} expect={expect}"
        );
    }

    #[test]
    fn large_n_flip_rate() {
        // lambda * I = ln 2 -> p = 0.5; binomial standard error 0.0016 at N=1e5.
        let cfg = ClassicalConfig::new(1.0, 100_000, scale5()).unwrap();
        let flips = simulate_bits(2f64.ln(), &cfg, &RngStream::new(3)).unwrap();
        let rate = f64::from(flips) / 1e5;
        assert!((rate - 0.5).abs() < 0.005, "rate={rate}");
    }

    #[test]
    fn estimator_edges() {
        let cfg = ClassicalConfig::new(0.24, 30, scale5()).unwrap();
        let zero = estimate_integral(0, &cfg).unwrap();
        assert_eq!(zero.i_hat, 0.0);
        assert!(!zero.clamped);

        let full = estimate_integral(30, &cfg).unwrap();
        assert!(full.clamped);
        assert_eq!(full.p_hat, 1.0);
        assert!((full.i_hat - 60f64.ln() / 0.24).abs() < 1e-12);

        let mid = estimate_integral(21, &cfg).unwrap();
        assert!((mid.p_hat - 0.7).abs() < 1e-15);
        assert!((mid.i_hat - 5.016_553_351_358_067).abs() < 1e-9);

        assert!(matches!(
            estimate_integral(31, &cfg),
            Err(ClassicalError::FlipCountOutOfRange { .. })
        ));
    }

    #[test]
    fn estimator_monotone_in_flip_count() {
        for n in [1, 2, 7, 30, 500] {
            let cfg = ClassicalConfig::new(0.37, n, scale5()).unwrap();
            let mut prev = -1.0;
            for k in 0..=n {
                let e = estimate_integral(k, &cfg).unwrap();
                assert!(e.i_hat >= prev && e.i_hat.is_finite());
                prev = e.i_hat;
            }
        }
    }

    #[test]
    fn round_trip_within_quantisation() {
        for n in [30u32, 100, 1000] {
            let cfg = ClassicalConfig::new(0.24, n, scale5()).unwrap();
            for i in 1..40 {
                let integral = f64::from(i) * 0.2;
                let p = flip_probability(integral, cfg.lambda).unwrap();
                if p >= 0.9 {
                    continue;
                }
                let k = (f64::from(n) * p).round() as u32;
                let est = estimate_integral(k, &cfg).unwrap().i_hat;
                let bound = 1.0 / (2.0 * f64::from(n) * cfg.lambda * (1.0 - p));
                assert!((est - integral).abs() <= bound, "n={n} I={integral}");
            }
        }
    }

    #[test]
    fn uncertainty_values() {
        assert!((uncertainty(5.0, 0.24, 30) - 1.158_732_176_222_478).abs() < 1e-9);
        assert_eq!(uncertainty(0.0, 0.24, 30), 0.0);
        let ratio = uncertainty(3.0, 0.4, 30) / uncertainty(3.0, 0.4, 120);
        assert!((ratio - 2.0).abs() < 1e-12);
    }

    /// Independent route: bisection on the stationarity condition
    /// x e^x = 2 (e^x - 1), x = λM.
    fn stationary_x() -> f64 {
        let g = |x: f64| x * x.exp() - 2.0 * x.exp_m1();
        let (mut lo, mut hi) = (0.5, 3.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn optimizer_matches_stationarity_root() {
        let x = stationary_x();
        assert!((x - 1.593_624_260_040_029).abs() < 1e-12);
        for m in [0.1, 1.0, 5.0, 123.0] {
            let lam = optimize_lambda(m, 30);
            assert!((lam * m - x).abs() < 1e-6, "m={m} lam*m={}", lam * m);
        }
    }

    #[test]
    fn optimizer_scale_invariance_and_n_independence() {
        let a = optimize_lambda(5.0, 30) * 5.0;
        let b = optimize_lambda(10.0, 30) * 10.0;
        assert!((a - b).abs() < 1e-6);
        let c = optimize_lambda(5.0, 1920) * 5.0;
        assert!((a - c).abs() < 1e-6);
    }

    #[test]
    fn reference_lambda_close_to_optimum() {
        let cmp = compare_lambda(5.0, 30);
        assert!((cmp.uncertainty_reference - 1.158_732).abs() < 1e-5);
        assert!((cmp.uncertainty_opt - 1.134_364).abs() < 1e-5);
        assert!(cmp.excess > 0.0 && cmp.excess < 0.05);
    }

    #[test]
    fn counter_zero_and_errors() {
        let cfg = CounterConfig::new(30, scale5(), 10.0).unwrap();
        let mut rng = RngStream::new(0);
        let e = counter_baseline(0.0, &cfg, &mut rng).unwrap();
        assert_eq!((e.count, e.i_hat), (0, 0.0));
        assert!(matches!(
            CounterConfig::new(41, scale5(), 10.0),
            Err(ClassicalError::CounterTooWide(41))
        ));
        let wide = CounterConfig::new(40, scale5(), 1.0).unwrap();
        assert!(matches!(
            counter_baseline(1e6, &wide, &mut rng),
            Err(ClassicalError::CounterOverflow(_))
        ));
    }

    #[test]
    fn counter_relative_error() {
        // mu = 2^30 * 5 / 50 ~ 1.07e8 -> relative error ~ 9.7e-5.
        let cfg = CounterConfig::new(30, scale5(), 10.0).unwrap();
        let mu = cfg.rate() * 5.0;
        assert!((mu - 2f64.powi(30) * 0.1).abs() < 1e-6);
        let predicted = 1.0 / mu.sqrt();
        assert!((predicted - 9.65e-5).abs() < 1e-6);

        let root = RngStream::new(21);
        let trials = 4000;
        let ms: f64 = (0..trials)
            .map(|t| {
                let e = counter_baseline(5.0, &cfg, &mut root.substream(t)).unwrap();
                ((e.i_hat - 5.0) / 5.0).powi(2)
            })
            .sum::<f64>()
            / trials as f64;
        let rel = ms.sqrt();
        assert!((rel / predicted - 1.0).abs() < 0.1, "rel={rel}");
    }
}
