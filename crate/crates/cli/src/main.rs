use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fieldprobe::analysis::{
    run_experiment, scaling_study, summary_json, table1_experiment, write_csv, ExperimentSpec,
    ProtocolConfig, ProtocolKind, ScalingOptions,
};
use fieldprobe::classical::{compare_lambda, uncertainty, ClassicalConfig, CounterConfig};
use fieldprobe::quantum::{
    choose_alpha, error_probability, tail_probability, tail_probability_symmetric, Mode,
    QuantumConfig,
};
use fieldprobe::{FieldSpec, MagnitudeScale};
use serde::Serialize;

/// Compare classical bits and qubits as carriers for measuring a field
/// integral.
#[derive(Parser, Debug)]
#[command(name = "fieldprobe", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a seeded Monte Carlo experiment and emit per-trial CSV or a JSON summary
    Simulate(SimulateArgs),
    /// One quantum and one classical readout of I = (n pi) mod 10, n = 1..10
    Table1(Table1Args),
    /// Readout error probability against the offset from the truth
    ErrorProfile(ErrorProfileArgs),
    /// Coupling that minimises the classical uncertainty at I = M
    OptimizeLambda(OptimizeLambdaArgs),
    /// Error against carrier count with a fitted slope
    Scaling(ScalingArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct Output {
    /// Master seed; all randomness derives from it
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format (default depends on the command)
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct Scale {
    /// Magnitude scale M of the expected integral
    #[arg(long, default_value_t = 5.0)]
    m_scale: f64,

    /// Guard factor: the ladder covers guard * M
    #[arg(long, default_value_t = 10.0)]
    guard: f64,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    output: Output,

    #[arg(long, alias = "mode", default_value = "method-ii")]
    protocol: ProtocolKind,

    /// Integral to measure; repeat for several values
    #[arg(
        long = "target-i",
        required_unless_present = "field",
        allow_negative_numbers = true
    )]
    target_i: Vec<f64>,

    /// Field spec file whose integral is measured (after any --target-i values)
    #[arg(long)]
    field: Option<PathBuf>,

    #[arg(long, default_value_t = 1000)]
    trials: u64,

    /// Number of carriers (bits or qubits)
    #[arg(long, alias = "n-bits", default_value_t = 30)]
    n_qubits: u32,

    /// Qubits spent on the remainder in combined mode
    #[arg(long, default_value_t = 0)]
    n0: u32,

    /// Classical coupling (default 1.2 / M)
    #[arg(long)]
    lambda: Option<f64>,

    #[arg(long, default_value_t = 5.0)]
    m_scale: f64,

    #[arg(long, default_value_t = 10.0)]
    guard: f64,

    /// Ladder step, replacing the one derived from --m-scale and --guard
    #[arg(long, conflicts_with_all = ["m_scale", "guard"])]
    alpha: Option<f64>,
}

#[derive(Args, Debug)]
struct Table1Args {
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ErrorProfileArgs {
    #[command(flatten)]
    output: Output,

    #[command(flatten)]
    scale: Scale,

    #[arg(long, alias = "n-bits", default_value_t = 30)]
    n_qubits: u32,

    /// Largest offset, in units of alpha
    #[arg(long, default_value_t = 4)]
    max_n_alpha: u32,

    /// Samples per alpha
    #[arg(long, default_value_t = 4)]
    per_alpha: u32,

    /// Tail thresholds, in units of alpha
    #[arg(long, value_delimiter = ',', default_value = "1,2,5,10")]
    thresholds: Vec<u64>,
}

#[derive(Args, Debug)]
struct OptimizeLambdaArgs {
    #[command(flatten)]
    output: Output,

    #[arg(long, default_value_t = 5.0)]
    m_scale: f64,

    #[arg(long, alias = "n-qubits", default_value_t = 30)]
    n_bits: u32,

    /// Curve samples between lambda M = 0.25 and 4
    #[arg(long, default_value_t = 16)]
    samples: u32,
}

#[derive(Args, Debug)]
struct ScalingArgs {
    #[command(flatten)]
    output: Output,

    #[command(flatten)]
    scale: Scale,

    #[arg(long, alias = "mode", default_value = "method-ii")]
    protocol: ProtocolKind,

    /// Carrier counts
    #[arg(long, value_delimiter = ',', default_value = "10,16,22,28")]
    n: Vec<u32>,

    #[arg(long, default_value_t = 1000)]
    trials: u64,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<fieldprobe::Error> for Failure {
    fn from(e: fieldprobe::Error) -> Self {
        match e {
            fieldprobe::Error::Io(_) | fieldprobe::Error::Csv(_) | fieldprobe::Error::Json(_) => {
                Failure::Runtime(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn pick(format: Option<Format>, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let f = format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(usage(
            format!("format {f:?} is not available for this command").to_lowercase(),
        ))
    }
}

fn emit(output: &Output, body: &str) -> Result<(), Failure> {
    let res = match &output.out {
        Some(path) => fs::write(path, body),
        None => io::stdout().lock().write_all(body.as_bytes()),
    };
    res.map_err(|e| Failure::Runtime(format!("writing output: {e}")))
}

fn protocol_config(a: &SimulateArgs) -> Result<ProtocolConfig, Failure> {
    let scale = MagnitudeScale::new(a.m_scale).map_err(usage)?;
    let quantum = |mode| -> Result<ProtocolConfig, Failure> {
        let cfg = QuantumConfig::new(mode, scale, a.n_qubits, a.n0, a.guard).map_err(usage)?;
        let cfg = match a.alpha {
            Some(alpha) => cfg.with_alpha(alpha).map_err(usage)?,
            None => cfg,
        };
        Ok(ProtocolConfig::Quantum(cfg))
    };
    let misplaced = |flag: &str| {
        usage(format!(
            "--{flag} does not apply to the {} protocol",
            a.protocol
        ))
    };
    let classical = matches!(a.protocol, ProtocolKind::Classical | ProtocolKind::Counter);
    if classical && a.alpha.is_some() {
        return Err(misplaced("alpha"));
    }
    if classical && a.n0 != 0 {
        return Err(misplaced("n0"));
    }
    if a.protocol != ProtocolKind::Classical && a.lambda.is_some() {
        return Err(misplaced("lambda"));
    }
    Ok(match a.protocol {
        ProtocolKind::Classical => {
            let cfg = match a.lambda {
                Some(l) => ClassicalConfig::new(l, a.n_qubits, scale),
                None => ClassicalConfig::reference(a.n_qubits, scale),
            };
            ProtocolConfig::Classical(cfg.map_err(usage)?)
        }
        ProtocolKind::Counter => {
            ProtocolConfig::Counter(CounterConfig::new(a.n_qubits, scale, a.guard).map_err(usage)?)
        }
        ProtocolKind::MethodI => quantum(Mode::MethodI)?,
        ProtocolKind::MethodII => quantum(Mode::MethodII)?,
        ProtocolKind::Combined => quantum(Mode::Combined)?,
    })
}

fn simulate(a: SimulateArgs) -> Result<(), Failure> {
    let format = pick(a.output.format, Format::Csv, &[Format::Csv, Format::Json])?;
    let protocol = protocol_config(&a)?;
    let mut integrals = a.target_i.clone();
    if let Some(path) = &a.field {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Runtime(format!("reading {}: {e}", path.display())))?;
        let spec: FieldSpec = text
            .parse()
            .map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let integral = match protocol {
            ProtocolConfig::Quantum(_) => spec.integrate(),
            _ => spec.classical_integral().map_err(usage)?,
        };
        integrals.push(integral);
    }
    let spec = ExperimentSpec {
        protocol,
        integrals,
        trials: a.trials,
        seed: a.output.seed,
    };
    let result = run_experiment(&spec)?;
    let body = match format {
        Format::Json => summary_json(&result)? + "\n",
        _ => {
            let mut buf = Vec::new();
            write_csv(&result, &mut buf)?;
            String::from_utf8(buf).expect("csv output is utf-8")
        }
    };
    emit(&a.output, &body)
}

fn table1(a: Table1Args) -> Result<(), Failure> {
    let format = pick(a.output.format, Format::Text, &[Format::Text, Format::Json])?;
    let table = table1_experiment(a.output.seed)?;
    let body = match format {
        Format::Json => to_json(&table)?,
        _ => table.to_string(),
    };
    emit(&a.output, &body)
}

#[derive(Serialize)]
struct ProfileRow {
    delta_over_alpha: f64,
    delta: f64,
    probability: f64,
}

#[derive(Serialize)]
struct TailRow {
    threshold: u64,
    tail: f64,
    tail_symmetric: f64,
}

#[derive(Serialize)]
struct Profile {
    n_qubits: u32,
    m_scale: f64,
    guard: f64,
    alpha: f64,
    rows: Vec<ProfileRow>,
    tails: Vec<TailRow>,
}

fn error_profile(a: ErrorProfileArgs) -> Result<(), Failure> {
    let format = pick(
        a.output.format,
        Format::Text,
        &[Format::Text, Format::Csv, Format::Json],
    )?;
    let Scale { m_scale, guard } = a.scale;
    MagnitudeScale::new(m_scale).map_err(usage)?;
    if a.per_alpha == 0 {
        return Err(usage("--per-alpha must be at least 1"));
    }
    let alpha = choose_alpha(m_scale, a.n_qubits, 0, guard).map_err(usage)?;
    let steps = a.max_n_alpha * a.per_alpha;
    let rows: Vec<ProfileRow> = (0..=steps)
        .map(|j| {
            let x = f64::from(j) / f64::from(a.per_alpha);
            ProfileRow {
                delta_over_alpha: x,
                delta: x * alpha,
                probability: error_probability(x * alpha, m_scale, a.n_qubits, guard),
            }
        })
        .collect();
    let tails = a
        .thresholds
        .iter()
        .map(|&t| TailRow {
            threshold: t,
            tail: tail_probability(t, a.n_qubits),
            tail_symmetric: tail_probability_symmetric(t, a.n_qubits),
        })
        .collect();
    let profile = Profile {
        n_qubits: a.n_qubits,
        m_scale,
        guard,
        alpha,
        rows,
        tails,
    };
    let header = format!(
        "# N = {}, M = {}, guard = {}, alpha = {:e}\n",
        profile.n_qubits, profile.m_scale, profile.guard, profile.alpha
    );
    let body = match format {
        Format::Json => to_json(&profile)?,
        Format::Csv => {
            let mut s = header;
            s.push_str("delta_over_alpha,delta,probability\n");
            for r in &profile.rows {
                let _ = writeln!(
                    s,
                    "{},{:e},{:e}",
                    r.delta_over_alpha, r.delta, r.probability
                );
            }
            s
        }
        Format::Text => {
            let mut s = header;
            let _ = writeln!(
                s,
                "{:>10}  {:>14}  {:>12}",
                "delta/alpha", "delta", "probability"
            );
            for r in &profile.rows {
                let _ = writeln!(
                    s,
                    "{:>11.4}  {:>14.6e}  {:>12.6e}",
                    r.delta_over_alpha, r.delta, r.probability
                );
            }
            let _ = writeln!(s);
            let _ = writeln!(s, "worst-case offset I mod alpha = alpha/2:");
            for t in &profile.tails {
                let _ = writeln!(
                    s,
                    "  P(miss by more than {} alpha) = {:.6}   (|delta| < {} alpha window: {:.6})",
                    t.threshold, t.tail, t.threshold, t.tail_symmetric
                );
            }
            s
        }
    };
    emit(&a.output, &body)
}

#[derive(Serialize)]
struct LambdaReport {
    m_scale: f64,
    n_bits: u32,
    lambda_opt: f64,
    lambda_opt_times_m: f64,
    lambda_reference: f64,
    uncertainty_opt: f64,
    uncertainty_reference: f64,
    excess: f64,
    curve: Vec<(f64, f64)>,
}

fn optimize_lambda(a: OptimizeLambdaArgs) -> Result<(), Failure> {
    let format = pick(a.output.format, Format::Text, &[Format::Text, Format::Json])?;
    ClassicalConfig::reference(a.n_bits, MagnitudeScale::new(a.m_scale).map_err(usage)?)
        .map_err(usage)?;
    let c = compare_lambda(a.m_scale, a.n_bits);
    let samples = a.samples.max(2);
    let curve = (0..samples)
        .map(|i| {
            let x = 0.25 * 16f64.powf(f64::from(i) / f64::from(samples - 1));
            (x, uncertainty(a.m_scale, x / a.m_scale, a.n_bits))
        })
        .collect();
    let report = LambdaReport {
        m_scale: c.m_scale,
        n_bits: c.n_bits,
        lambda_opt: c.lambda_opt,
        lambda_opt_times_m: c.lambda_opt * c.m_scale,
        lambda_reference: c.lambda_reference,
        uncertainty_opt: c.uncertainty_opt,
        uncertainty_reference: c.uncertainty_reference,
        excess: c.excess,
        curve,
    };
    let body = match format {
        Format::Json => to_json(&report)?,
        _ => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "# M = {}, N = {}, evaluated at I = M",
                report.m_scale, report.n_bits
            );
            let _ = writeln!(
                s,
                "lambda*     = {:.9}  (lambda* M = {:.6})",
                report.lambda_opt, report.lambda_opt_times_m
            );
            let _ = writeln!(s, "uncertainty = {:.6} at lambda*", report.uncertainty_opt);
            let _ = writeln!(
                s,
                "reference lambda = 1.2/M = {:.6} gives {:.6}, {:+.2}% above the minimum",
                report.lambda_reference,
                report.uncertainty_reference,
                100.0 * report.excess
            );
            let _ = writeln!(s, "note: the reference 1.2/M is not the minimiser; lambda* M solves x e^x = 2 (e^x - 1)");
            let _ = writeln!(s);
            let _ = writeln!(s, "{:>10}  {:>12}", "lambda M", "uncertainty");
            for (x, u) in &report.curve {
                let _ = writeln!(s, "{x:>10.4}  {u:>12.6}");
            }
            s
        }
    };
    emit(&a.output, &body)
}

fn scaling(a: ScalingArgs) -> Result<(), Failure> {
    let format = pick(a.output.format, Format::Text, &[Format::Text, Format::Json])?;
    let opts = ScalingOptions {
        scale: MagnitudeScale::new(a.scale.m_scale).map_err(usage)?,
        guard: a.scale.guard,
    };
    let fit = scaling_study(a.protocol, &a.n, a.trials, a.output.seed, opts)?;
    let body = match format {
        Format::Json => to_json(&fit)?,
        _ => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "# protocol = {}, M = {}, guard = {}, trials = {}, seed = {}",
                fit.protocol, a.scale.m_scale, a.scale.guard, fit.trials, fit.seed
            );
            let _ = writeln!(s, "{:>6}  {:>20}  {:>14}", "N", "I", fit.metric);
            for r in &fit.rows {
                let _ = writeln!(s, "{:>6}  {:>20.12}  {:>14.6e}", r.n, r.integral, r.metric);
            }
            let _ = writeln!(
                s,
                "slope = {:.4} +/- {:.4} ({:?})",
                fit.slope, fit.slope_stderr, fit.axis
            );
            s
        }
    };
    emit(&a.output, &body)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Runtime(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Table1(a) => table1(a),
        Command::ErrorProfile(a) => error_profile(a),
        Command::OptimizeLambda(a) => optimize_lambda(a),
        Command::Scaling(a) => scaling(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("fieldprobe: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("fieldprobe: {msg}");
            ExitCode::from(1)
        }
    }
}
