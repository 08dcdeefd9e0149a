//! Classical field along the path and its exact line integral.
//!
//! Every protocol couples to the field only through the integral `I`, so
//! [`FieldSpec::Target`] is the canonical way to drive experiments. The
//! other shapes exist so that a field can be described physically.
//!
//! # Text format
//!
//! One `key = value` pair per line. Blank lines and lines starting with `#`
//! are ignored. Keys may appear at most once.
//!
//! | kind              | required keys            |
//! |-------------------|--------------------------|
//! | `constant`        | `amplitude`, `length`    |
//! | `sampled-grid`    | `samples`, `dx`          |
//! | `target-integral` | `target`                 |
//!
//! `samples` is a comma-separated list of at least two numbers. All numbers
//! must be finite; `length` and `dx` must be positive.
//!
//! ```text
//! kind = sampled-grid
//! samples = 1.0, 1.0, 1.0
//! dx = 0.5
//! ```

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("unknown field kind `{0}`")]
    UnknownKind(String),
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("key `{key}` does not apply to kind `{kind}`")]
    UnexpectedKey { key: String, kind: &'static str },
    #[error("`{key}`: invalid number `{value}`")]
    BadNumber { key: &'static str, value: String },
    #[error("`{0}` must be positive")]
    NotPositive(&'static str),
    #[error("sampled grid needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("field value {value} is negative; the classical protocol needs a non-negative field")]
    NegativeField { value: f64 },
}

/// The known order of magnitude `M` of the integral.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct MagnitudeScale(f64);

impl MagnitudeScale {
    pub fn new(m: f64) -> Result<Self, FieldError> {
        if m.is_finite() && m > 0.0 {
            Ok(Self(m))
        } else {
            Err(FieldError::NotPositive("M"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldSpec {
    /// Uniform field `amplitude` over a path of `length`.
    Constant { amplitude: f64, length: f64 },
    /// Samples on a uniform grid with spacing `dx`; integrated with the
    /// trapezoid rule.
    SampledGrid { samples: Vec<f64>, dx: f64 },
    /// Only the integral is given.
    #[serde(rename = "target-integral")]
    Target { target: f64 },
}

impl FieldSpec {
    pub fn constant(amplitude: f64, length: f64) -> Result<Self, FieldError> {
        let f = Self::Constant { amplitude, length };
        f.validate()?;
        Ok(f)
    }

    pub fn grid(samples: Vec<f64>, dx: f64) -> Result<Self, FieldError> {
        let f = Self::SampledGrid { samples, dx };
        f.validate()?;
        Ok(f)
    }

    pub fn target(integral: f64) -> Result<Self, FieldError> {
        let f = Self::Target { target: integral };
        f.validate()?;
        Ok(f)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::SampledGrid { .. } => "sampled-grid",
            Self::Target { .. } => "target-integral",
        }
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        match self {
            Self::Constant { amplitude, length } => {
                finite("amplitude", *amplitude)?;
                positive("length", *length)
            }
            Self::SampledGrid { samples, dx } => {
                if samples.len() < 2 {
                    return Err(FieldError::TooFewSamples(samples.len()));
                }
                for &s in samples {
                    finite("samples", s)?;
                }
                positive("dx", *dx)
            }
            Self::Target { target } => finite("target", *target),
        }
    }

    /// The line integral of the field. Exact for constant and target fields,
    /// trapezoidal for sampled grids.
    pub fn integrate(&self) -> f64 {
        match self {
            Self::Constant { amplitude, length } => amplitude * length,
            Self::SampledGrid { samples, dx } => {
                let n = samples.len();
                let interior: f64 = samples[1..n - 1].iter().sum();
                dx * (0.5 * (samples[0] + samples[n - 1]) + interior)
            }
            Self::Target { target } => *target,
        }
    }

    /// Like [`integrate`](Self::integrate), but rejects fields with any
    /// negative value.
    pub fn classical_integral(&self) -> Result<f64, FieldError> {
        let min = match self {
            Self::Constant { amplitude, .. } => *amplitude,
            Self::SampledGrid { samples, .. } => {
                samples.iter().copied().fold(f64::INFINITY, f64::min)
            }
            Self::Target { target } => *target,
        };
        if min < 0.0 {
            return Err(FieldError::NegativeField { value: min });
        }
        Ok(self.integrate())
    }
}

fn finite(key: &'static str, v: f64) -> Result<(), FieldError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(FieldError::BadNumber {
            key,
            value: v.to_string(),
        })
    }
}

fn positive(key: &'static str, v: f64) -> Result<(), FieldError> {
    finite(key, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(FieldError::NotPositive(key))
    }
}

const KEYS: [&str; 6] = ["kind", "amplitude", "length", "samples", "dx", "target"];

fn parse_number(key: &'static str, raw: &str) -> Result<f64, FieldError> {
    let v: f64 = raw.trim().parse().map_err(|_| FieldError::BadNumber {
        key,
        value: raw.trim().to_string(),
    })?;
    finite(key, v)?;
    Ok(v)
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut values: [Option<&str>; 6] = [None; 6];
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(FieldError::Syntax { line: idx + 1 })?;
            let key = key.trim();
            let slot =
                KEYS.iter()
                    .position(|k| *k == key)
                    .ok_or_else(|| FieldError::UnknownKey {
                        line: idx + 1,
                        key: key.to_string(),
                    })?;
            if values[slot].replace(value.trim()).is_some() {
                return Err(FieldError::DuplicateKey {
                    line: idx + 1,
                    key: key.to_string(),
                });
            }
        }

        let [kind, amplitude, length, samples, dx, target] = values;
        let kind = kind.ok_or(FieldError::MissingKey("kind"))?;
        let (allowed, kind_name): (&[usize], &'static str) = match kind {
            "constant" => (&[1, 2], "constant"),
            "sampled-grid" => (&[3, 4], "sampled-grid"),
            "target-integral" => (&[5], "target-integral"),
            other => return Err(FieldError::UnknownKind(other.to_string())),
        };
        for (slot, v) in values.iter().enumerate().skip(1) {
            if v.is_some() && !allowed.contains(&slot) {
                return Err(FieldError::UnexpectedKey {
                    key: KEYS[slot].to_string(),
                    kind: kind_name,
                });
            }
        }

        let spec = match kind_name {
            "constant" => Self::Constant {
                amplitude: parse_number(
                    "amplitude",
                    amplitude.ok_or(FieldError::MissingKey("amplitude"))?,
                )?,
                length: parse_number("length", length.ok_or(FieldError::MissingKey("length"))?)?,
            },
            "sampled-grid" => {
                let list = samples.ok_or(FieldError::MissingKey("samples"))?;
                let samples = list
                    .split(',')
                    .map(|s| parse_number("samples", s))
                    .collect::<Result<Vec<_>, _>>()?;
                Self::SampledGrid {
                    samples,
                    dx: parse_number("dx", dx.ok_or(FieldError::MissingKey("dx"))?)?,
                }
            }
            _ => Self::Target {
                target: parse_number("target", target.ok_or(FieldError::MissingKey("target"))?)?,
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for FieldSpec {
    /// Renders the text format; `{:?}` on `f64` round-trips exactly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind = {}", self.kind_name())?;
        match self {
            Self::Constant { amplitude, length } => {
                writeln!(f, "amplitude = {amplitude:?}")?;
                writeln!(f, "length = {length:?}")
            }
            Self::SampledGrid { samples, dx } => {
                let list: Vec<String> = samples.iter().map(|s| format!("{s:?}")).collect();
                writeln!(f, "samples = {}", list.join(", "))?;
                writeln!(f, "dx = {dx:?}")
            }
            Self::Target { target } => writeln!(f, "target = {target:?}"),
        }
    }
}
