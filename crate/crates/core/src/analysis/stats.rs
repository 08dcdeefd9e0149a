use serde::{Deserialize, Serialize};

/// Summary of a set of signed errors `I_est - I_true`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub trials: u64,
    /// Signed mean; the bias.
    pub mean_error: f64,
    pub rms_error: f64,
    pub median_abs_error: f64,
    pub max_abs_error: f64,
    /// Nearest-rank quantiles of the absolute error at 0.5, 0.9, 0.99.
    pub quantiles: (f64, f64, f64),
}

/// Nearest-rank quantile of an ascending slice: the element at rank
/// `ceil(q n)`, clamped to `1..=n`.
pub fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

impl ErrorStats {
    /// # Panics
    /// If `errors` is empty.
    pub fn from_errors(errors: &[f64]) -> Self {
        assert!(!errors.is_empty(), "no trials to summarise");
        let n = errors.len() as f64;
        let mean_error = errors.iter().sum::<f64>() / n;
        let rms_error = (errors.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
        let mut abs: Vec<f64> = errors.iter().map(|e| e.abs()).collect();
        abs.sort_by(f64::total_cmp);
        let p50 = nearest_rank(&abs, 0.5);
        Self {
            trials: errors.len() as u64,
            mean_error,
            rms_error,
            median_abs_error: p50,
            max_abs_error: abs[abs.len() - 1],
            quantiles: (p50, nearest_rank(&abs, 0.9), nearest_rank(&abs, 0.99)),
        }
    }

    /// Fraction of trials whose absolute error exceeds `bound`.
    pub fn fraction_above(errors: &[f64], bound: f64) -> f64 {
        errors.iter().filter(|e| e.abs() > bound).count() as f64 / errors.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_sample() {
        let s = ErrorStats::from_errors(&[-3.0, 1.0, 2.0, -1.0]);
        assert_eq!(s.trials, 4);
        assert_eq!(s.mean_error, -0.25);
        assert_eq!(s.rms_error, (15.0f64 / 4.0).sqrt());
        assert_eq!(s.median_abs_error, 1.0);
        assert_eq!(s.max_abs_error, 3.0);
        assert_eq!(s.quantiles, (1.0, 3.0, 3.0));
    }

    #[test]
    fn nearest_rank_definition() {
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(nearest_rank(&xs, 0.0), 1.0);
        assert_eq!(nearest_rank(&xs, 0.5), 5.0);
        assert_eq!(nearest_rank(&xs, 0.51), 6.0);
        assert_eq!(nearest_rank(&xs, 0.9), 9.0);
        assert_eq!(nearest_rank(&xs, 1.0), 10.0);
    }

    proptest! {
        #[test]
        fn quantiles_monotone_and_rms_bounds_mean(
            errors in prop::collection::vec(-1e6..1e6f64, 1..300),
            qa in 0.0..1.0f64,
            qb in 0.0..1.0f64,
        ) {
            let s = ErrorStats::from_errors(&errors);
            prop_assert!(s.quantiles.0 <= s.quantiles.1 && s.quantiles.1 <= s.quantiles.2);
            prop_assert!(s.quantiles.2 <= s.max_abs_error);
            prop_assert!(s.rms_error >= s.mean_error.abs() * (1.0 - 1e-12));
            let mut abs: Vec<f64> = errors.iter().map(|e| e.abs()).collect();
            abs.sort_by(f64::total_cmp);
            let (lo, hi) = if qa <= qb { (qa, qb) } else { (qb, qa) };
            prop_assert!(nearest_rank(&abs, lo) <= nearest_rank(&abs, hi));
        }
    }
}
