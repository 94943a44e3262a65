//! Experiment orchestration: configuration, deterministic parallel driving,
//! JSONL records, CSV summaries and scaling fits.

mod config;
mod stats;

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use config::{Experiment, ExperimentConfig, KEYS};
pub use stats::{fit_points, fit_scaling, spearman, summarize, write_summary_csv, FitModel, FitResult, SummaryRow};

use crate::animal::{greedy_value_anneal, AnimalClass, AnnealConfig};
use crate::curve::suite::{run_suite, Suite};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::field::{sample_field, LazyField};
use crate::ising::{correlation_length, origin_magnetizations, Beta};
use crate::polygrow::{init_growth, run, GrowthMode, GrowthParams};
use crate::rng::derive_seed;

/// One sample of one grid cell. Cell parameters and payload share the flat `fields` map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub exp: Experiment,
    pub cell: usize,
    pub k: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(flatten)]
    pub fields: BTreeMap<String, Value>,
}

impl RunRecord {
    pub fn number(&self, key: &str) -> Option<f64> {
        self.fields.get(key).and_then(Value::as_f64)
    }
}

/// Grid keys identifying a cell, in CSV column order.
pub fn param_keys(exp: Experiment) -> &'static [&'static str] {
    match exp {
        Experiment::Mag => &["N", "eps", "beta"],
        Experiment::Psi => &["eps", "beta", "m"],
        Experiment::AnimalScan => &["N", "class"],
        Experiment::GrowScan => &["N", "eps", "m", "mode"],
        Experiment::CurveSuite => &["suite"],
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Cell {
    Mag { n: i64, eps: f64, beta: Beta },
    Psi { eps: f64, beta: Beta, m: f64 },
    Animal { n: i64, class: AnimalClass },
    Grow { n: i64, eps: f64, m: f64, mode: GrowthMode },
    Curve { suite: Suite },
}

fn beta_value(beta: Beta) -> Value {
    match beta {
        Beta::Infinite => json!("inf"),
        Beta::Finite(b) => json!(b),
    }
}

impl Cell {
    fn params(&self) -> BTreeMap<String, Value> {
        let pairs = match self {
            Cell::Mag { n, eps, beta } => vec![("N", json!(n)), ("eps", json!(eps)), ("beta", beta_value(*beta))],
            Cell::Psi { eps, beta, m } => vec![("eps", json!(eps)), ("beta", beta_value(*beta)), ("m", json!(m))],
            Cell::Animal { n, class } => vec![("N", json!(n)), ("class", json!(class.to_string()))],
            Cell::Grow { n, eps, m, mode } => {
                vec![("N", json!(n)), ("eps", json!(eps)), ("m", json!(m)), ("mode", json!(mode.to_string()))]
            }
            Cell::Curve { suite } => vec![("suite", json!(suite.to_string()))],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    fn run(&self, cfg: &ExperimentConfig, seed: u64) -> Result<BTreeMap<String, Value>> {
        let pairs = match *self {
            Cell::Mag { n, eps, beta } => {
                let (plus, minus) = origin_magnetizations(n, eps, beta, seed)?;
                vec![("m_plus", json!(plus)), ("m_minus", json!(minus))]
            }
            Cell::Psi { eps, beta, m } => {
                let cl = correlation_length(beta, m, eps, cfg.mag_samples, cfg.n_max, seed, Execution::Sequential)?;
                let psi = cl.psi.map_or(json!("exceeded"), |p| json!(p));
                let trace: Vec<Value> = cl.trace.iter().map(|e| json!([e.n, e.mean, e.std_error])).collect();
                vec![("psi", psi), ("trace", Value::Array(trace))]
            }
            Cell::Animal { n, class } => {
                let field = sample_field(n, seed, 1.0);
                let config = AnnealConfig { anchored: true, ..AnnealConfig::new(cfg.budget, seed, class) };
                let best = greedy_value_anneal(&field, &config)?.best;
                vec![("value", json!(best.normalized_value)), ("size", json!(best.len())), ("boundary", json!(best.boundary_size))]
            }
            Cell::Grow { n, eps, m, mode } => {
                let mut state = init_growth(GrowthParams::new(n, eps, m, seed, mode)?);
                let rep = run(&mut state, &LazyField { seed })?;
                let accepted = rep.decisions.iter().filter(|d| d.z).count();
                vec![
                    ("n_star", json!(rep.params.n_star)),
                    ("sides", json!(rep.sides())),
                    ("perimeter", json!(rep.perimeter)),
                    ("lattice_boundary", json!(rep.lattice_boundary)),
                    ("gamma_value", json!(rep.gamma_value)),
                    ("ratio", json!(rep.certificate_ratio)),
                    ("accepted", json!(accepted)),
                ]
            }
            Cell::Curve { suite } => {
                let rep = run_suite(suite, cfg.trials, seed);
                let shown: Vec<&String> = rep.violations.iter().take(3).collect();
                vec![
                    ("checks", json!(rep.checks)),
                    ("worst", json!(rep.worst)),
                    ("violations", json!(rep.violations.len())),
                    ("instances", json!(shown)),
                ]
            }
        };
        Ok(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }
}

fn cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    match cfg.experiment {
        Experiment::Mag => {
            for &n in &cfg.n {
                for &eps in &cfg.eps {
                    for &beta in &cfg.beta {
                        out.push(Cell::Mag { n, eps, beta });
                    }
                }
            }
        }
        Experiment::Psi => {
            for &eps in &cfg.eps {
                for &beta in &cfg.beta {
                    for &m in &cfg.m {
                        out.push(Cell::Psi { eps, beta, m });
                    }
                }
            }
        }
        Experiment::AnimalScan => {
            for &n in &cfg.n {
                for &class in &cfg.class {
                    out.push(Cell::Animal { n, class });
                }
            }
        }
        Experiment::GrowScan => {
            for &n in &cfg.n {
                for &eps in &cfg.eps {
                    for &m in &cfg.m {
                        for &mode in &cfg.mode {
                            out.push(Cell::Grow { n, eps, m, mode });
                        }
                    }
                }
            }
        }
        Experiment::CurveSuite => out.extend(cfg.suite.iter().map(|&suite| Cell::Curve { suite })),
    }
    out
}

/// Seed of sample `k` in cell `cell`.
pub fn record_seed(master_seed: u64, cell: usize, k: u64) -> u64 {
    derive_seed(master_seed, &[cell as u64, k])
}

/// Runs every (cell, sample) task. Records come back sorted by cell, then sample,
/// whatever the worker count; a failing task yields a record with `error` set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.check()?;
    let cells = cells(cfg);
    let exec = Execution::with_workers(cfg.workers.unwrap_or(0));
    let samples = cfg.samples;
    Ok(exec.map(cells.len() * samples, |t| {
        let (cell, k) = (t / samples, (t % samples) as u64);
        let seed = record_seed(cfg.master_seed, cell, k);
        let mut fields = cells[cell].params();
        let error = match cells[cell].run(cfg, seed) {
            Ok(payload) => {
                fields.extend(payload);
                None
            }
            Err(e) => Some(e.to_string()),
        };
        RunRecord { exp: cfg.experiment, cell, k, seed, error, fields }
    }))
}

pub fn write_records<W: Write>(records: &[RunRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_records<R: BufRead>(input: R) -> Result<Vec<RunRecord>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?);
    }
    Ok(out)
}
