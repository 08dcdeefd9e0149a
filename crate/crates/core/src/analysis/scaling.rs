//! Error scaling with carrier count.
//!
//! Classical bits and method I are fitted as `ln(error)` against `ln N`
//! (expected slope `-1/2`). Method II is fitted as `log2(median |error|)`
//! against `N` (expected slope `-1`), and the counter as
//! `log2(rms relative error)` against `N` (expected slope `-1/2`).

use serde::Serialize;

use super::experiment::{run_experiment, ExperimentSpec, ProtocolConfig, ProtocolKind};
use crate::classical::{ClassicalConfig, CounterConfig};
use crate::field::MagnitudeScale;
use crate::quantum::{Mode, QuantumConfig, DEFAULT_GUARD};
use crate::rng::derive_key;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingAxis {
    /// `ln(metric)` against `ln N`.
    LogLog,
    /// `log2(metric)` against `N`.
    Log2VsN,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: u32,
    pub integral: f64,
    pub metric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub protocol: ProtocolKind,
    pub axis: ScalingAxis,
    /// What `metric` measures in each row.
    pub metric: &'static str,
    pub rows: Vec<ScalingRow>,
    pub slope: f64,
    pub slope_stderr: f64,
    pub seed: u64,
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingOptions {
    pub scale: MagnitudeScale,
    pub guard: f64,
}

impl Default for ScalingOptions {
    fn default() -> Self {
        Self {
            scale: MagnitudeScale::new(5.0).expect("positive"),
            guard: DEFAULT_GUARD,
        }
    }
}

/// Ordinary least squares slope of `y` on `x` and its standard error.
pub fn fit_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let stderr = if x.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    (slope, stderr)
}

/// Runs `protocol` at each carrier count in `n_list` and fits the scaling
/// slope. The integral is `M` except for method II, which uses the worst
/// case offset `α (⌊M/α⌋ + 1/2)`.
pub fn scaling_study(
    protocol: ProtocolKind,
    n_list: &[u32],
    trials: u64,
    seed: u64,
    opts: ScalingOptions,
) -> Result<ScalingFit> {
    if n_list.len() < 3 {
        return Err(Error::InvalidSpec(
            "a scaling fit needs at least 3 carrier counts".into(),
        ));
    }
    let m = opts.scale.value();
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let (config, integral) = match protocol {
            ProtocolKind::Classical => (
                ProtocolConfig::Classical(ClassicalConfig::reference(n, opts.scale)?),
                m,
            ),
            ProtocolKind::MethodI => (
                ProtocolConfig::Quantum(QuantumConfig::new(
                    Mode::MethodI,
                    opts.scale,
                    n,
                    0,
                    opts.guard,
                )?),
                m,
            ),
            ProtocolKind::MethodII => {
                let q = QuantumConfig::new(Mode::MethodII, opts.scale, n, 0, opts.guard)?;
                let worst = q.alpha * ((m / q.alpha).floor() + 0.5);
                (ProtocolConfig::Quantum(q), worst)
            }
            ProtocolKind::Counter => (
                ProtocolConfig::Counter(CounterConfig::new(n, opts.scale, opts.guard)?),
                m,
            ),
            ProtocolKind::Combined => {
                return Err(Error::Unsupported(
                    "scaling study is not defined for the combined method".into(),
                ))
            }
        };
        let spec = ExperimentSpec {
            protocol: config,
            integrals: vec![integral],
            trials,
            seed: derive_key(seed, u64::from(n)),
        };
        let res = run_experiment(&spec)?;
        let metric = match protocol {
            ProtocolKind::MethodII => res.overall.median_abs_error,
            ProtocolKind::Counter => res.overall.rms_error / integral,
            _ => res.overall.rms_error,
        };
        rows.push(ScalingRow {
            n,
            integral,
            metric,
        });
    }

    let (axis, metric) = match protocol {
        ProtocolKind::MethodII => (ScalingAxis::Log2VsN, "median |error|"),
        ProtocolKind::Counter => (ScalingAxis::Log2VsN, "rms relative error"),
        _ => (ScalingAxis::LogLog, "rms error"),
    };
    let (x, y): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .map(|r| match axis {
            ScalingAxis::LogLog => (f64::from(r.n).ln(), r.metric.ln()),
            ScalingAxis::Log2VsN => (f64::from(r.n), r.metric.log2()),
        })
        .unzip();
    let (slope, slope_stderr) = fit_slope(&x, &y);
    Ok(ScalingFit {
        protocol,
        axis,
        metric,
        rows,
        slope,
        slope_stderr,
        seed,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.0, -1.0, -3.0, -5.0];
        let (s, se) = fit_slope(&x, &y);
        assert!((s + 2.0).abs() < 1e-12);
        assert!(se.abs() < 1e-7);
    }

    #[test]
    fn needs_three_points() {
        assert!(scaling_study(
            ProtocolKind::Classical,
            &[30, 60],
            10,
            0,
            ScalingOptions::default()
        )
        .is_err());
        assert!(scaling_study(
            ProtocolKind::Combined,
            &[30, 60, 90],
            10,
            0,
            ScalingOptions::default()
        )
        .is_err());
    }

    #[test]
    fn method_i_slope_is_minus_half() {
        let fit = scaling_study(
            ProtocolKind::MethodI,
            &[100, 400, 1600],
            2000,
            1,
            ScalingOptions::default(),
        )
        .unwrap();
        assert!((fit.slope + 0.5).abs() < 0.1, "slope {}", fit.slope);
    }
}
