use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::ErrorStats;
use crate::classical::{self, ClassicalConfig, CounterConfig};
use crate::quantum::{self, Mode, QuantumConfig};
use crate::rng::RngStream;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolKind {
    #[serde(rename = "classical")]
    Classical,
    #[serde(rename = "method-i")]
    MethodI,
    #[serde(rename = "method-ii")]
    MethodII,
    #[serde(rename = "combined")]
    Combined,
    #[serde(rename = "counter")]
    Counter,
}

impl ProtocolKind {
    pub const ALL: [Self; 5] = [
        Self::Classical,
        Self::MethodI,
        Self::MethodII,
        Self::Combined,
        Self::Counter,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Classical => "classical",
            Self::MethodI => "method-i",
            Self::MethodII => "method-ii",
            Self::Combined => "combined",
            Self::Counter => "counter",
        }
    }

    /// First label on every trial's substream path.
    pub fn stream_label(self) -> u64 {
        match self {
            Self::Classical => 1,
            Self::MethodI => 2,
            Self::MethodII => 3,
            Self::Combined => 4,
            Self::Counter => 5,
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProtocolKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown protocol `{s}`"))
    }
}

fn no_estimate() -> Error {
    Error::Unsupported("gh-parity answers a yes/no question and has no integral estimate".into())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", content = "config", rename_all = "kebab-case")]
pub enum ProtocolConfig {
    Classical(ClassicalConfig),
    Quantum(QuantumConfig),
    Counter(CounterConfig),
}

impl ProtocolConfig {
    pub fn kind(&self) -> Result<ProtocolKind> {
        Ok(match self {
            Self::Classical(_) => ProtocolKind::Classical,
            Self::Counter(_) => ProtocolKind::Counter,
            Self::Quantum(q) => match q.mode {
                Mode::MethodI => ProtocolKind::MethodI,
                Mode::MethodII => ProtocolKind::MethodII,
                Mode::Combined => ProtocolKind::Combined,
                Mode::GhParity => return Err(no_estimate()),
            },
        })
    }

    /// One measurement of `integral`, drawing only from `rng`.
    pub fn estimate(&self, integral: f64, rng: &RngStream) -> Result<f64> {
        Ok(match self {
            Self::Classical(c) => classical::measure(integral, c, rng)?.i_hat,
            Self::Counter(c) => classical::counter_baseline(integral, c, &mut rng.clone())?.i_hat,
            Self::Quantum(q) => match q.mode {
                Mode::MethodI => quantum::run_method_i(integral, q, rng)?,
                Mode::MethodII => quantum::run_method_ii(integral, q, 0.0, rng)?.i_tilde,
                Mode::Combined => quantum::run_combined(integral, q, rng)?.i_tilde,
                Mode::GhParity => return Err(no_estimate()),
            },
        })
    }
}

/// A protocol, the integrals to measure, and how often.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub protocol: ProtocolConfig,
    pub integrals: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<ProtocolKind> {
        if self.trials == 0 {
            return Err(Error::InvalidSpec("trials must be at least 1".into()));
        }
        if self.integrals.is_empty() {
            return Err(Error::InvalidSpec("no integral values given".into()));
        }
        if let Some(bad) = self.integrals.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec(format!("integral {bad} is not finite")));
        }
        self.protocol.kind()
    }

    /// Stream for trial `trial_id` at integral index `i_index`:
    /// path `[protocol label, i_index, trial_id]` under the master seed.
    pub fn trial_stream(&self, kind: ProtocolKind, i_index: usize, trial_id: u64) -> RngStream {
        RngStream::new(self.seed).substream_path(&[kind.stream_label(), i_index as u64, trial_id])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: u64,
    pub protocol: ProtocolKind,
    pub i_index: u32,
    pub i_true: f64,
    pub i_est: f64,
    pub abs_error: f64,
}

impl TrialRecord {
    pub fn error(&self) -> f64 {
        self.i_est - self.i_true
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueStats {
    pub i_index: u32,
    pub i_true: f64,
    pub stats: ErrorStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub records: Vec<TrialRecord>,
    pub overall: ErrorStats,
    pub per_value: Vec<ValueStats>,
}

impl ExperimentResult {
    pub fn errors_at(&self, i_index: u32) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.i_index == i_index)
            .map(TrialRecord::error)
            .collect()
    }
}

/// Runs every trial on the global rayon pool. The result is identical for
/// any thread count: each trial owns its stream, and records come back in
/// `(i_index, trial_id)` order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let kind = spec.validate()?;
    let jobs: Vec<(usize, u64)> = (0..spec.integrals.len())
        .flat_map(|i| (0..spec.trials).map(move |t| (i, t)))
        .collect();
    let records = jobs
        .into_par_iter()
        .map(|(i, t)| {
            let i_true = spec.integrals[i];
            let i_est = spec
                .protocol
                .estimate(i_true, &spec.trial_stream(kind, i, t))?;
            Ok(TrialRecord {
                trial_id: t,
                protocol: kind,
                i_index: i as u32,
                i_true,
                i_est,
                abs_error: (i_est - i_true).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let all: Vec<f64> = records.iter().map(TrialRecord::error).collect();
    let per_value = spec
        .integrals
        .iter()
        .enumerate()
        .map(|(i, &i_true)| {
            let chunk = &all[i * spec.trials as usize..(i + 1) * spec.trials as usize];
            ValueStats {
                i_index: i as u32,
                i_true,
                stats: ErrorStats::from_errors(chunk),
            }
        })
        .collect();
    Ok(ExperimentResult {
        spec: spec.clone(),
        overall: ErrorStats::from_errors(&all),
        per_value,
        records,
    })
}

/// [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(
    spec: &ExperimentSpec,
    threads: usize,
) -> Result<ExperimentResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidSpec(e.to_string()))?;
    pool.install(|| run_experiment(spec))
}

/// Column names of the trial CSV, in order.
pub const CSV_HEADER: [&str; 6] = [
    "trial_id",
    "protocol",
    "i_index",
    "i_true",
    "i_est",
    "abs_error",
];

/// Writes the trial records as CSV. The file opens with `#` comment lines
/// carrying the seed and the full spec as JSON, then the fixed header row,
/// then one row per trial.
pub fn write_csv<W: Write>(result: &ExperimentResult, mut out: W) -> Result<()> {
    writeln!(out, "# fieldprobe trial records")?;
    writeln!(out, "# seed = {}", result.spec.seed)?;
    writeln!(out, "# spec = {}", serde_json::to_string(&result.spec)?)?;
    let mut w = csv::Writer::from_writer(out);
    for r in &result.records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads trial records written by [`write_csv`]. Comment lines are skipped;
/// the header must match [`CSV_HEADER`] and every row must satisfy
/// `abs_error = |i_est - i_true|`.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<TrialRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::BadRecord {
            line: 1,
            reason: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut records = Vec::new();
    for row in reader.deserialize::<TrialRecord>() {
        let rec = row?;
        let expect = (rec.i_est - rec.i_true).abs();
        if !(rec.abs_error == expect || (rec.abs_error - expect).abs() <= 1e-12 * expect.max(1.0)) {
            return Err(Error::BadRecord {
                line: records.len() as u64 + 2,
                reason: format!("abs_error {} != |i_est - i_true| = {expect}", rec.abs_error),
            });
        }
        records.push(rec);
    }
    Ok(records)
}

#[derive(Serialize)]
struct Summary<'a> {
    seed: u64,
    spec: &'a ExperimentSpec,
    overall: &'a ErrorStats,
    per_value: &'a [ValueStats],
}

/// JSON summary: seed, spec echo and error statistics.
pub fn summary_json(result: &ExperimentResult) -> Result<String> {
    Ok(serde_json::to_string_pretty(&Summary {
        seed: result.spec.seed,
        spec: &result.spec,
        overall: &result.overall,
        per_value: &result.per_value,
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::MagnitudeScale;

    fn m5() -> MagnitudeScale {
        MagnitudeScale::new(5.0).unwrap()
    }

    #[test]
    fn exact_multiples_have_zero_error() {
        let q = QuantumConfig::method_ii(m5(), 20).unwrap();
        let spec = ExperimentSpec {
            protocol: ProtocolConfig::Quantum(q),
            integrals: vec![0.0, 12345.0 * q.alpha, 999_999.0 * q.alpha],
            trials: 50,
            seed: 3,
        };
        let res = run_experiment(&spec).unwrap();
        assert!(res.records.iter().all(|r| r.abs_error == 0.0));
        assert_eq!(res.overall.max_abs_error, 0.0);
    }

    #[test]
    fn records_are_ordered() {
        let c = ClassicalConfig::reference(30, m5()).unwrap();
        let spec = ExperimentSpec {
            protocol: ProtocolConfig::Classical(c),
            integrals: vec![1.0, 2.0, 3.0],
            trials: 7,
            seed: 1,
        };
        let res = run_experiment(&spec).unwrap();
        let keys: Vec<(u32, u64)> = res
            .records
            .iter()
            .map(|r| (r.i_index, r.trial_id))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(res.per_value.len(), 3);
        assert_eq!(res.per_value[1].stats.trials, 7);
    }

    #[test]
    fn classical_zero_integral_estimates_zero() {
        let c = ClassicalConfig::reference(30, m5()).unwrap();
        let spec = ExperimentSpec {
            protocol: ProtocolConfig::Classical(c),
            integrals: vec![0.0],
            trials: 20,
            seed: 0,
        };
        let res = run_experiment(&spec).unwrap();
        assert!(res.records.iter().all(|r| r.i_est == 0.0));
    }

    #[test]
    fn spec_rejections() {
        let c = ClassicalConfig::reference(30, m5()).unwrap();
        let mut spec = ExperimentSpec {
            protocol: ProtocolConfig::Classical(c),
            integrals: vec![1.0],
            trials: 0,
            seed: 0,
        };
        assert!(matches!(run_experiment(&spec), Err(Error::InvalidSpec(_))));
        spec.trials = 1;
        spec.integrals.clear();
        assert!(matches!(run_experiment(&spec), Err(Error::InvalidSpec(_))));
        spec.integrals = vec![-1.0];
        assert!(matches!(run_experiment(&spec), Err(Error::Classical(_))));

        let mut gh = QuantumConfig::method_ii(m5(), 10).unwrap();
        gh.mode = Mode::GhParity;
        spec.protocol = ProtocolConfig::Quantum(gh);
        spec.integrals = vec![1.0];
        assert!(matches!(run_experiment(&spec), Err(Error::Unsupported(_))));
    }

    #[test]
    fn csv_round_trip_and_summary() {
        let q = QuantumConfig::method_ii(m5(), 12).unwrap();
        let spec = ExperimentSpec {
            protocol: ProtocolConfig::Quantum(q),
            integrals: vec![1.2345, 4.5],
            trials: 25,
            seed: 77,
        };
        let res = run_experiment(&spec).unwrap();
        let mut buf = Vec::new();
        write_csv(&res, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# fieldprobe trial records\n# seed = 77\n# spec = {"));
        assert!(text.contains("\ntrial_id,protocol,i_index,i_true,i_est,abs_error\n"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), res.records);

        let json: serde_json::Value = serde_json::from_str(&summary_json(&res).unwrap()).unwrap();
        assert_eq!(json["seed"], 77);
        assert_eq!(json["spec"]["protocol"]["family"], "quantum");
        assert_eq!(json["spec"]["protocol"]["config"]["mode"], "method-ii");
        assert_eq!(json["overall"]["trials"], 50);
    }

    #[test]
    fn read_csv_rejects_bad_input() {
        let bad_header = "a,b\n1,2\n";
        assert!(matches!(
            read_csv(bad_header.as_bytes()),
            Err(Error::BadRecord { .. })
        ));
        let inconsistent =
            "trial_id,protocol,i_index,i_true,i_est,abs_error\n0,classical,0,1.0,2.0,5.0\n";
        assert!(matches!(
            read_csv(inconsistent.as_bytes()),
            Err(Error::BadRecord { line: 2, .. })
        ));
        let bad_protocol =
            "trial_id,protocol,i_index,i_true,i_est,abs_error\n0,abacus,0,1.0,2.0,1.0\n";
        assert!(matches!(
            read_csv(bad_protocol.as_bytes()),
            Err(Error::Csv(_))
        ));
    }

    #[test]
    fn protocol_kind_names() {
        for k in ProtocolKind::ALL {
            assert_eq!(k.as_str().parse::<ProtocolKind>().unwrap(), k);
        }
    }
}
