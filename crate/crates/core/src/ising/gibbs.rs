use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ground::ground_spins;
use super::hamiltonian::IndexedRegion;
use crate::error::{Error, Result};
use crate::field::{ExternalField, Site, SiteSet};

/// Largest domain handled by exhaustive summation.
pub const ENUMERATION_CAP: usize = 20;

/// Inverse temperature; `Infinite` selects ground states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Beta {
    pub fn is_infinite(self) -> bool {
        matches!(self, Beta::Infinite)
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Finite(b) => write!(f, "{b}"),
            Beta::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Beta {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(Beta::Infinite);
        }
        match s.parse::<f64>() {
            Ok(b) if b.is_infinite() && b > 0.0 => Ok(Beta::Infinite),
            Ok(b) if b > 0.0 => Ok(Beta::Finite(b)),
            _ => Err(Error::InvalidArgument(format!("beta must be positive or 'inf', got {s:?}"))),
        }
    }
}

/// Serialized as the string `"inf"` or a JSON number.
impl Serialize for Beta {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Beta::Finite(b) => s.serialize_f64(*b),
            Beta::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Beta {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(b) if b > 0.0 => Ok(Beta::Finite(b)),
            Raw::Num(b) => Err(serde::de::Error::custom(format!("non-positive beta {b}"))),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Free energies and single-site magnetizations under both boundary conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct GibbsSummary {
    pub beta: Beta,
    pub free_energy_plus: f64,
    pub free_energy_minus: f64,
    pub sites: Vec<Site>,
    pub magnetization_plus: Vec<f64>,
    pub magnetization_minus: Vec<f64>,
}

impl GibbsSummary {
    pub fn delta_free_energy(&self) -> f64 {
        self.free_energy_plus - self.free_energy_minus
    }

    fn position(&self, v: Site) -> Option<usize> {
        self.sites.binary_search(&v).ok()
    }

    pub fn magnetization_plus_at(&self, v: Site) -> Option<f64> {
        self.position(v).map(|i| self.magnetization_plus[i])
    }

    pub fn magnetization_minus_at(&self, v: Site) -> Option<f64> {
        self.position(v).map(|i| self.magnetization_minus[i])
    }
}

/// Per-half lookup tables so that a configuration's linear terms are a sum of two entries.
struct SplitTable {
    low_bits: usize,
    low: Vec<f64>,
    high: Vec<f64>,
}

impl SplitTable {
    fn new(coeffs: &[f64]) -> Self {
        let n = coeffs.len();
        let low_bits = n / 2;
        let build = |cs: &[f64]| -> Vec<f64> {
            (0..1usize << cs.len())
                .map(|m| cs.iter().enumerate().map(|(i, &c)| if m >> i & 1 == 1 { c } else { -c }).sum())
                .collect()
        };
        SplitTable { low_bits, low: build(&coeffs[..low_bits]), high: build(&coeffs[low_bits..]) }
    }

    #[inline]
    fn eval(&self, mask: usize) -> f64 {
        self.low[mask & ((1 << self.low_bits) - 1)] + self.high[mask >> self.low_bits]
    }
}

/// Exhaustive Gibbs computation on `Ω` (at most [`ENUMERATION_CAP`] sites).
pub fn gibbs_exact<F: ExternalField + ?Sized>(beta: Beta, omega: &SiteSet, field: &F) -> Result<GibbsSummary> {
    let indexed = IndexedRegion::new(omega);
    let n = indexed.len();
    let beta_value = match beta {
        Beta::Infinite => return Ok(ground_summary(&indexed, field)),
        Beta::Finite(b) => b,
    };
    if n > ENUMERATION_CAP {
        return Err(Error::SizeCap { size: n, cap: ENUMERATION_CAP });
    }
    if n == 0 {
        return Ok(GibbsSummary {
            beta,
            free_energy_plus: 0.0,
            free_energy_minus: 0.0,
            sites: vec![],
            magnetization_plus: vec![],
            magnetization_minus: vec![],
        });
    }
    let ext: Vec<f64> = indexed.sites.iter().map(|&v| field.f(v)).collect();
    let bnd: Vec<f64> = indexed.outside.iter().map(|&k| f64::from(k)).collect();
    let ext_table = SplitTable::new(&ext);
    let bnd_table = SplitTable::new(&bnd);

    // Visit masks in Gray-code order, tracking the interior sum exactly as an integer.
    let walk = |visit: &mut dyn FnMut(usize, f64, f64)| {
        let mut spins = vec![-1i8; n];
        let mut interior: i64 = indexed.edges.len() as i64;
        let mut mask = 0usize;
        for k in 0..1usize << n {
            if k > 0 {
                let i = k.trailing_zeros() as usize;
                let old = i64::from(spins[i]);
                let nb: i64 = indexed.adj[i].iter().map(|&j| i64::from(spins[j])).sum();
                interior -= 2 * old * nb;
                spins[i] = -spins[i];
                mask ^= 1 << i;
            }
            let e = ext_table.eval(mask);
            let b = bnd_table.eval(mask);
            let common = interior as f64 + e;
            visit(mask, -(common + b), -(common - b));
        }
    };

    let (mut min_plus, mut min_minus) = (f64::INFINITY, f64::INFINITY);
    walk(&mut |_, hp, hm| {
        min_plus = min_plus.min(hp);
        min_minus = min_minus.min(hm);
    });
    let (mut z_plus, mut z_minus) = (0.0f64, 0.0f64);
    let mut acc_plus = vec![0.0f64; n];
    let mut acc_minus = vec![0.0f64; n];
    walk(&mut |mask, hp, hm| {
        let wp = (-beta_value * (hp - min_plus)).exp();
        let wm = (-beta_value * (hm - min_minus)).exp();
        z_plus += wp;
        z_minus += wm;
        for i in 0..n {
            if mask >> i & 1 == 1 {
                acc_plus[i] += wp;
                acc_minus[i] += wm;
            } else {
                acc_plus[i] -= wp;
                acc_minus[i] -= wm;
            }
        }
    });
    let clamp = |m: f64| m.clamp(-1.0, 1.0);
    Ok(GibbsSummary {
        beta,
        free_energy_plus: min_plus - z_plus.ln() / beta_value,
        free_energy_minus: min_minus - z_minus.ln() / beta_value,
        sites: indexed.sites.clone(),
        magnetization_plus: acc_plus.iter().map(|a| clamp(a / z_plus)).collect(),
        magnetization_minus: acc_minus.iter().map(|a| clamp(a / z_minus)).collect(),
    })
}

fn ground_summary<F: ExternalField + ?Sized>(indexed: &IndexedRegion, field: &F) -> GibbsSummary {
    use super::hamiltonian::Bc;
    let plus = ground_spins(indexed, 1.0, field);
    let minus = ground_spins(indexed, -1.0, field);
    GibbsSummary {
        beta: Beta::Infinite,
        free_energy_plus: indexed.energy(&plus, Bc::Plus, field),
        free_energy_minus: indexed.energy(&minus, Bc::Minus, field),
        sites: indexed.sites.clone(),
        magnetization_plus: plus.iter().map(|&s| f64::from(s)).collect(),
        magnetization_minus: minus.iter().map(|&s| f64::from(s)).collect(),
    }
}

/// `ΔF(B, f) = F⁺(B, f) − F⁻(B, f)`; at `β = ∞` the ground-energy difference.
pub fn delta_free_energy<F: ExternalField + ?Sized>(beta: Beta, b: &SiteSet, field: &F) -> Result<f64> {
    if b.is_empty() {
        return Ok(0.0);
    }
    Ok(gibbs_exact(beta, b, field)?.delta_free_energy())
}

/// `Γ(A, Ω, f) = ΔF(Ω∖A, f)`.
pub fn gamma<F: ExternalField + ?Sized>(a: &SiteSet, omega: &SiteSet, field: &F, beta: Beta) -> Result<f64> {
    if !a.is_subset(omega) {
        return Err(Error::Domain("A must be a subset of Ω".into()));
    }
    delta_free_energy(beta, &omega.difference(a), field)
}

/// `G(A, B, Ω, f) = Γ(A∪B, Ω, f) − Γ(A, Ω, f)` for disjoint `A, B ⊆ Ω`.
pub fn gamma_increment<F: ExternalField + ?Sized>(
    a: &SiteSet,
    b: &SiteSet,
    omega: &SiteSet,
    field: &F,
    beta: Beta,
) -> Result<f64> {
    if !a.is_disjoint(b) {
        return Err(Error::Domain("A and B must be disjoint".into()));
    }
    if !a.is_subset(omega) || !b.is_subset(omega) {
        return Err(Error::Domain("A and B must lie in Ω".into()));
    }
    if b.is_empty() {
        return Ok(0.0);
    }
    Ok(gamma(&a.union(b), omega, field, beta)? - gamma(a, omega, field, beta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{sample_field, ORIGIN};

    fn origin() -> SiteSet {
        [ORIGIN].into_iter().collect()
    }

    #[test]
    fn single_spin_closed_form() {
        let zero = |_: Site| 0.0;
        let g = gibbs_exact(Beta::Finite(1.0), &origin(), &zero).unwrap();
        assert!((g.magnetization_plus[0] - 4f64.tanh()).abs() < 1e-14);
        assert!((g.magnetization_minus[0] + 4f64.tanh()).abs() < 1e-14);
        for beta in [0.1, 1.0, 7.5] {
            let g = gibbs_exact(Beta::Finite(beta), &origin(), &zero).unwrap();
            assert!(g.delta_free_energy().abs() < 1e-12);
        }
    }

    #[test]
    fn delta_f_at_zero_temperature() {
        let zero = |_: Site| 0.0;
        assert_eq!(delta_free_energy(Beta::Infinite, &origin(), &zero).unwrap(), 0.0);
        let spike = |v: Site| if v == ORIGIN { 10.0 } else { 0.0 };
        assert_eq!(delta_free_energy(Beta::Infinite, &origin(), &spike).unwrap(), -8.0);
        assert_eq!(delta_free_energy(Beta::Finite(1.0), &SiteSet::new(), &spike).unwrap(), 0.0);
    }

    #[test]
    fn cap_is_enforced() {
        let f = sample_field(2, 1, 1.0);
        let err = gibbs_exact(Beta::Finite(1.0), &SiteSet::square(2), &f).unwrap_err();
        assert!(matches!(err, Error::SizeCap { size: 25, cap: 20 }));
        assert!(gibbs_exact(Beta::Infinite, &SiteSet::square(2), &f).is_ok());
    }

    #[test]
    fn gamma_domain_errors() {
        let f = sample_field(1, 1, 1.0);
        let omega = SiteSet::square(1);
        let outside: SiteSet = [Site::new(5, 5)].into_iter().collect();
        assert!(gamma(&outside, &omega, &f, Beta::Infinite).is_err());
        assert_eq!(gamma(&omega, &omega, &f, Beta::Finite(2.0)).unwrap(), 0.0);
        let a = origin();
        assert!(gamma_increment(&a, &a, &omega, &f, Beta::Infinite).is_err());
        assert_eq!(gamma_increment(&a, &SiteSet::new(), &omega, &f, Beta::Infinite).unwrap(), 0.0);
    }

    #[test]
    fn beta_parsing() {
        assert_eq!("inf".parse::<Beta>().unwrap(), Beta::Infinite);
        assert_eq!("2".parse::<Beta>().unwrap(), Beta::Finite(2.0));
        assert!("-1".parse::<Beta>().is_err());
        assert_eq!(serde_json::to_string(&Beta::Infinite).unwrap(), "\"inf\"");
        assert_eq!(serde_json::from_str::<Beta>("0.5").unwrap(), Beta::Finite(0.5));
    }
}
