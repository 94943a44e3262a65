use serde::{Deserialize, Serialize};

use super::gibbs::{gibbs_exact, Beta, ENUMERATION_CAP};
use super::ground::ground_spins;
use super::hamiltonian::IndexedRegion;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::field::{sample_field, SiteSet, ORIGIN};
use crate::rng::derive_seed;

/// Origin spin expectations for one disorder sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagSample {
    pub k: u64,
    pub seed: u64,
    pub m_plus: f64,
    pub m_minus: f64,
}

impl MagSample {
    /// `½(⟨σ⁺_o⟩ − ⟨σ⁻_o⟩)`.
    pub fn value(&self) -> f64 {
        0.5 * (self.m_plus - self.m_minus)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagnetizationEstimate {
    pub n: i64,
    pub epsilon: f64,
    pub beta: Beta,
    pub samples: usize,
    pub mean: f64,
    pub std_error: f64,
}

/// Seed of the `k`-th disorder sample. It does not depend on `N`, so different
/// box sizes see the same field on their common sites.
pub fn sample_seed(master_seed: u64, k: u64) -> u64 {
    derive_seed(master_seed, &[k])
}

/// Per-sample origin magnetizations on `Λ_N`, in sample order.
pub fn magnetization_samples(
    n: i64,
    epsilon: f64,
    beta: Beta,
    samples: usize,
    master_seed: u64,
    exec: Execution,
) -> Result<Vec<MagSample>> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let omega = SiteSet::square(n);
    if !beta.is_infinite() && omega.len() > ENUMERATION_CAP {
        return Err(Error::SizeCap { size: omega.len(), cap: ENUMERATION_CAP });
    }
    let indexed = IndexedRegion::new(&omega);
    let results = exec.map(samples, |k| -> Result<MagSample> {
        let seed = sample_seed(master_seed, k as u64);
        let (m_plus, m_minus) = influence(&indexed, &omega, n, epsilon, beta, seed)?;
        let s = MagSample { k: k as u64, seed, m_plus, m_minus };
        let v = s.value();
        if !(-1e-9..=1.0 + 1e-9).contains(&v) {
            return Err(Error::Violation(format!("sample {k}: boundary influence {v} outside [0, 1]")));
        }
        Ok(s)
    });
    results.into_iter().collect()
}

fn influence(indexed: &IndexedRegion, omega: &SiteSet, n: i64, epsilon: f64, beta: Beta, seed: u64) -> Result<(f64, f64)> {
    let o = indexed.index[&ORIGIN];
    let field = sample_field(n, seed, epsilon);
    Ok(match beta {
        Beta::Infinite => {
            let plus = ground_spins(indexed, 1.0, &field);
            let minus = ground_spins(indexed, -1.0, &field);
            (f64::from(plus[o]), f64::from(minus[o]))
        }
        Beta::Finite(_) => {
            let g = gibbs_exact(beta, omega, &field)?;
            (g.magnetization_plus[o], g.magnetization_minus[o])
        }
    })
}

/// `(⟨σ⁺_o⟩, ⟨σ⁻_o⟩)` on `Λ_N` for the field drawn from `seed`.
pub fn origin_magnetizations(n: i64, epsilon: f64, beta: Beta, seed: u64) -> Result<(f64, f64)> {
    let omega = SiteSet::square(n);
    if !beta.is_infinite() && omega.len() > ENUMERATION_CAP {
        return Err(Error::SizeCap { size: omega.len(), cap: ENUMERATION_CAP });
    }
    influence(&IndexedRegion::new(&omega), &omega, n, epsilon, beta, seed)
}

/// Sample mean and standard error (unbiased variance over `√n`).
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn summarize_samples(n: i64, epsilon: f64, beta: Beta, samples: &[MagSample]) -> MagnetizationEstimate {
    let values: Vec<f64> = samples.iter().map(MagSample::value).collect();
    let (mean, std_error) = mean_and_stderr(&values);
    MagnetizationEstimate { n, epsilon, beta, samples: samples.len(), mean, std_error }
}

/// Disorder-averaged boundary influence `m_{β,Λ_N,ε}`.
pub fn magnetization_mc(
    n: i64,
    epsilon: f64,
    beta: Beta,
    samples: usize,
    master_seed: u64,
    exec: Execution,
) -> Result<MagnetizationEstimate> {
    let s = magnetization_samples(n, epsilon, beta, samples, master_seed, exec)?;
    Ok(summarize_samples(n, epsilon, beta, &s))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationLength {
    /// `None` when no tested `N ≤ N_max` crossed the target.
    pub psi: Option<i64>,
    /// Every tested size, sorted by `N`.
    pub trace: Vec<MagnetizationEstimate>,
}

/// Smallest tested `N` whose upper confidence bound `m̂ + 2·se` is at most `m_target`.
///
/// Doubles `N = 1, 2, 4, …` (capped at `N_max`) until the bound crosses, then bisects.
pub fn correlation_length(
    beta: Beta,
    m_target: f64,
    epsilon: f64,
    samples: usize,
    n_max: i64,
    master_seed: u64,
    exec: Execution,
) -> Result<CorrelationLength> {
    if !(0.0 < m_target && m_target < 1.0) {
        return Err(Error::InvalidArgument(format!("m_target must lie in (0,1), got {m_target}")));
    }
    let mut trace = Vec::new();
    let test = |n: i64, trace: &mut Vec<MagnetizationEstimate>| -> Result<bool> {
        let est = magnetization_mc(n, epsilon, beta, samples, master_seed, exec)?;
        let pass = est.mean + 2.0 * est.std_error <= m_target;
        trace.push(est);
        Ok(pass)
    };
    let mut lo = 0i64;
    let mut hi = None;
    let mut n = 1i64;
    while n <= n_max {
        if test(n, &mut trace)? {
            hi = Some(n);
            break;
        }
        lo = n;
        if n == n_max {
            break;
        }
        n = (n * 2).min(n_max);
    }
    if let Some(mut h) = hi {
        while h - lo > 1 {
            let mid = lo + (h - lo) / 2;
            if test(mid, &mut trace)? {
                h = mid;
            } else {
                lo = mid;
            }
        }
        hi = Some(h);
    }
    trace.sort_by_key(|e| e.n);
    Ok(CorrelationLength { psi: hi, trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_disorder_means_full_influence() {
        for n in [1, 3, 6] {
            let est = magnetization_mc(n, 0.0, Beta::Infinite, 5, 1, Execution::Sequential).unwrap();
            assert_eq!(est.mean, 1.0);
            assert_eq!(est.std_error, 0.0);
        }
    }

    #[test]
    fn finite_beta_cap() {
        assert!(magnetization_mc(2, 1.0, Beta::Finite(1.0), 1, 1, Execution::Sequential).is_err());
        let est = magnetization_mc(1, 1.0, Beta::Finite(1.0), 4, 1, Execution::Sequential).unwrap();
        assert!(est.mean > 0.0 && est.mean <= 1.0);
    }

    #[test]
    fn no_disorder_never_crosses() {
        let cl = correlation_length(Beta::Infinite, 0.5, 0.0, 3, 16, 2, Execution::Sequential).unwrap();
        assert_eq!(cl.psi, None);
        assert_eq!(cl.trace.iter().map(|e| e.n).collect::<Vec<_>>(), vec![1, 2, 4, 8, 16]);
    }

    #[test]
    fn stderr_of_two_point_sample() {
        let v: Vec<f64> = (0..1000).map(|i| (i % 2) as f64).collect();
        let (m, se) = mean_and_stderr(&v);
        assert_eq!(m, 0.5);
        assert!((se - (0.25 * 1000.0 / 999.0 / 1000.0f64).sqrt()).abs() < 1e-15);
    }
}
