use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use super::experiment::{run_experiment, ExperimentSpec, ProtocolConfig};
use crate::classical::ClassicalConfig;
use crate::field::MagnitudeScale;
use crate::quantum::{QuantumConfig, DEFAULT_GUARD};
use crate::Result;

pub const TABLE1_CARRIERS: u32 = 30;
pub const TABLE1_SCALE: f64 = 5.0;

/// `I_n = (n π) mod 10` for `n = 1..=10`.
pub fn table1_grid() -> Vec<f64> {
    (1..=10).map(|n| (f64::from(n) * PI) % 10.0).collect()
}

/// Configs of the reference comparison: 30 carriers, `M = 5`, guard 10,
/// `λ = 1.2 / M`.
pub fn table1_configs() -> (QuantumConfig, ClassicalConfig) {
    let scale = MagnitudeScale::new(TABLE1_SCALE).expect("positive");
    (
        QuantumConfig::method_ii(scale, TABLE1_CARRIERS).expect("valid reference config"),
        ClassicalConfig::reference(TABLE1_CARRIERS, scale).expect("valid reference config"),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Row {
    pub n: u32,
    pub integral: f64,
    pub quantum: f64,
    pub classical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1 {
    pub seed: u64,
    pub n_carriers: u32,
    pub m_scale: f64,
    pub guard: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub rows: Vec<Table1Row>,
}

/// One quantum and one classical readout per grid value. Single draws, so
/// only their error magnitudes are meaningful.
pub fn table1_experiment(seed: u64) -> Result<Table1> {
    let (q, c) = table1_configs();
    let grid = table1_grid();
    let run = |protocol| {
        run_experiment(&ExperimentSpec {
            protocol,
            integrals: grid.clone(),
            trials: 1,
            seed,
        })
    };
    let quantum = run(ProtocolConfig::Quantum(q))?;
    let classical = run(ProtocolConfig::Classical(c))?;
    let rows = grid
        .iter()
        .zip(quantum.records.iter().zip(&classical.records))
        .enumerate()
        .map(|(i, (&integral, (qr, cr)))| Table1Row {
            n: i as u32 + 1,
            integral,
            quantum: qr.i_est,
            classical: cr.i_est,
        })
        .collect();
    Ok(Table1 {
        seed,
        n_carriers: TABLE1_CARRIERS,
        m_scale: TABLE1_SCALE,
        guard: DEFAULT_GUARD,
        lambda: c.lambda,
        alpha: q.alpha,
        rows,
    })
}

impl fmt::Display for Table1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "# seed = {}, N = {}, M = {}, guard = {}, lambda = {}, alpha = {:e}",
            self.seed, self.n_carriers, self.m_scale, self.guard, self.lambda, self.alpha
        )?;
        writeln!(
            f,
            "# single draws per row; compare error magnitudes, not digits"
        )?;
        writeln!(
            f,
            "{:>3} | {:>14} | {:>14} | {:>14}",
            "n", "I=n*pi mod 10", "quantum", "classical"
        )?;
        writeln!(f, "{:-<4}+{:-<16}+{:-<16}+{:-<15}", "", "", "", "")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>3} | {:>14.9} | {:>14.9} | {:>14.9}",
                r.n, r.integral, r.quantum, r.classical
            )?;
        }
        Ok(())
    }
}
