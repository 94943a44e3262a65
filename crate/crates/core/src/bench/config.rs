use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::animal::AnimalClass;
use crate::curve::suite::Suite;
use crate::error::{Error, Result};
use crate::ising::Beta;
use crate::polygrow::GrowthMode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Mag,
    Psi,
    AnimalScan,
    GrowScan,
    CurveSuite,
}

impl Experiment {
    pub fn tag(self) -> &'static str {
        match self {
            Experiment::Mag => "mag",
            Experiment::Psi => "psi",
            Experiment::AnimalScan => "animal_scan",
            Experiment::GrowScan => "grow_scan",
            Experiment::CurveSuite => "curve_suite",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mag" => Ok(Experiment::Mag),
            "psi" => Ok(Experiment::Psi),
            "animal_scan" => Ok(Experiment::AnimalScan),
            "grow_scan" => Ok(Experiment::GrowScan),
            "curve_suite" => Ok(Experiment::CurveSuite),
            _ => Err(Error::InvalidArgument(format!("unknown experiment {s:?}"))),
        }
    }
}

/// A parameter grid with its sampling plan.
///
/// Text form is one `key=value` per line, `#` comments, lists as `N=4,8,16`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: Vec<i64>,
    pub eps: Vec<f64>,
    pub beta: Vec<Beta>,
    pub m: Vec<f64>,
    pub class: Vec<AnimalClass>,
    pub mode: Vec<GrowthMode>,
    pub suite: Vec<Suite>,
    pub samples: usize,
    pub master_seed: u64,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    /// Largest box tried by the ψ search.
    pub n_max: i64,
    /// Disorder samples per magnetization estimate inside the ψ search.
    pub mag_samples: usize,
    /// Annealing moves per animal.
    pub budget: u64,
    /// Random instances per curve-suite sample.
    pub trials: usize,
}

pub const KEYS: &[&str] = &[
    "experiment", "N", "eps", "beta", "m", "class", "mode", "suite", "samples", "seed", "workers", "out", "n_max",
    "mag_samples", "budget", "trials",
];

fn list<T: FromStr>(key: &str, value: &str, line: usize) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(|item| {
            item.trim().parse::<T>().map_err(|e| Error::Parse { line, msg: format!("{key}: {item:?}: {e}") })
        })
        .collect()
}

fn one<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| Error::Parse { line, msg: format!("{key}: {value:?}: {e}") })
}

impl ExperimentConfig {
    /// Defaults for everything but the experiment and the seed.
    pub fn new(experiment: Experiment, master_seed: u64) -> Self {
        ExperimentConfig {
            experiment,
            n: vec![4],
            eps: vec![1.0],
            beta: vec![Beta::Infinite],
            m: vec![0.5],
            class: vec![AnimalClass::SimplyConnected],
            mode: vec![GrowthMode::LatticeSimplified],
            suite: vec![Suite::Coarsening],
            samples: 1,
            master_seed,
            workers: None,
            out: None,
            n_max: 64,
            mag_samples: 200,
            budget: 2000,
            trials: 10,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::Parse { line, msg: format!("expected key=value, got {content:?}") })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::Parse { line, msg: format!("unknown key {key:?}") });
            }
            if !seen.insert(key.to_string()) {
                return Err(Error::Parse { line, msg: format!("duplicate key {key:?}") });
            }
            pairs.push((line, key, value.trim()));
        }
        let find = |k: &str| pairs.iter().find(|p| p.1 == k);
        let (l, _, v) = find("experiment").ok_or_else(|| Error::Parse { line: 0, msg: "missing key \"experiment\"".into() })?;
        let experiment = one::<Experiment>("experiment", v, *l)?;
        let (l, _, v) = find("seed").ok_or_else(|| Error::Parse { line: 0, msg: "missing key \"seed\"".into() })?;
        let mut cfg = ExperimentConfig::new(experiment, one("seed", v, *l)?);
        for &(line, key, value) in &pairs {
            match key {
                "N" => cfg.n = list(key, value, line)?,
                "eps" => cfg.eps = list(key, value, line)?,
                "beta" => cfg.beta = list(key, value, line)?,
                "m" => cfg.m = list(key, value, line)?,
                "class" => cfg.class = list(key, value, line)?,
                "mode" => cfg.mode = list(key, value, line)?,
                "suite" => cfg.suite = list(key, value, line)?,
                "samples" => cfg.samples = one(key, value, line)?,
                "workers" => cfg.workers = Some(one(key, value, line)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                "n_max" => cfg.n_max = one(key, value, line)?,
                "mag_samples" => cfg.mag_samples = one(key, value, line)?,
                "budget" => cfg.budget = one(key, value, line)?,
                "trials" => cfg.trials = one(key, value, line)?,
                _ => {}
            }
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        if self.samples == 0 {
            return bad("samples must be at least 1");
        }
        let grid_empty = match self.experiment {
            Experiment::Mag => self.n.is_empty() || self.eps.is_empty() || self.beta.is_empty(),
            Experiment::Psi => self.eps.is_empty() || self.beta.is_empty() || self.m.is_empty(),
            Experiment::AnimalScan => self.n.is_empty() || self.class.is_empty(),
            Experiment::GrowScan => self.n.is_empty() || self.eps.is_empty() || self.m.is_empty() || self.mode.is_empty(),
            Experiment::CurveSuite => self.suite.is_empty(),
        };
        if grid_empty {
            return bad("every grid axis of the experiment needs at least one value");
        }
        if self.n.iter().any(|&n| n < 1) || self.n_max < 1 {
            return bad("box sizes must be at least 1");
        }
        if self.mag_samples == 0 || self.trials == 0 {
            return bad("mag_samples and trials must be at least 1");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_comments() {
        let cfg = ExperimentConfig::parse("experiment=mag # ground states\nN=4,8, 16\neps=0.5,1\nbeta=inf,2\nsamples=10\nseed=7\n")
            .unwrap();
        assert_eq!(cfg.n, vec![4, 8, 16]);
        assert_eq!(cfg.eps, vec![0.5, 1.0]);
        assert_eq!(cfg.beta, vec![Beta::Infinite, Beta::Finite(2.0)]);
        assert_eq!(cfg.samples, 10);
        assert_eq!(cfg.master_seed, 7);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ExperimentConfig::parse("experiment=mag\nseed=1\nNN=4\n"), Err(Error::Parse { line: 3, .. })));
        assert!(ExperimentConfig::parse("experiment=mag\nN=4\n").is_err());
        assert!(ExperimentConfig::parse("experiment=mag\nseed=1\nseed=2\n").is_err());
        assert!(ExperimentConfig::parse("experiment=magic\nseed=1\n").is_err());
        assert!(ExperimentConfig::parse("experiment=mag\nseed=1\nsamples=0\n").is_err());
        assert!(ExperimentConfig::parse("experiment=mag\nseed=1\nN\n").is_err());
    }
}
