use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ExternalField, Site, SiteSet};

/// Boundary condition: every spin outside the domain is fixed to `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bc {
    Plus,
    Minus,
}

impl Bc {
    pub fn sign(self) -> f64 {
        match self {
            Bc::Plus => 1.0,
            Bc::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub omega: SiteSet,
    pub bc: Bc,
}

impl Region {
    pub fn new(omega: SiteSet, bc: Bc) -> Self {
        Region { omega, bc }
    }

    pub fn square(n: i64, bc: Bc) -> Self {
        Region { omega: SiteSet::square(n), bc }
    }
}

/// Dense view of a domain: site list, interior edges and outside-neighbour counts.
#[derive(Clone, Debug)]
pub(crate) struct IndexedRegion {
    pub sites: Vec<Site>,
    pub index: HashMap<Site, usize>,
    /// Each unordered interior edge once, `(i, j)` with `i < j`.
    pub edges: Vec<(usize, usize)>,
    /// `k_v`: neighbours of `v` outside the domain.
    pub outside: Vec<u32>,
    /// Interior neighbour lists.
    pub adj: Vec<Vec<usize>>,
}

impl IndexedRegion {
    pub fn new(omega: &SiteSet) -> Self {
        let sites: Vec<Site> = omega.iter().collect();
        let index: HashMap<Site, usize> = sites.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = Vec::new();
        let mut outside = vec![0u32; sites.len()];
        let mut adj = vec![Vec::new(); sites.len()];
        for (i, v) in sites.iter().enumerate() {
            for u in v.neighbors() {
                match index.get(&u) {
                    Some(&j) => {
                        adj[i].push(j);
                        if i < j {
                            edges.push((i, j));
                        }
                    }
                    None => outside[i] += 1,
                }
            }
        }
        IndexedRegion { sites, index, edges, outside, adj }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn energy<F: ExternalField + ?Sized>(&self, spins: &[i8], bc: Bc, field: &F) -> f64 {
        let interior: f64 = self.edges.iter().map(|&(i, j)| f64::from(spins[i] * spins[j])).sum();
        let boundary: f64 = spins.iter().zip(&self.outside).map(|(&s, &k)| f64::from(s) * f64::from(k)).sum();
        let external: f64 = spins.iter().zip(&self.sites).map(|(&s, &v)| field.f(v) * f64::from(s)).sum();
        -(interior + bc.sign() * boundary + external)
    }
}

/// A `±1` assignment over a region, with its energy under that region's boundary condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinConfig {
    sites: Vec<Site>,
    spins: Vec<i8>,
    bc: Bc,
    energy: f64,
}

impl SpinConfig {
    /// Builds a configuration from a spin function and evaluates its energy.
    pub fn from_fn<F: ExternalField + ?Sized>(region: &Region, field: &F, spin: impl Fn(Site) -> i8) -> Self {
        let indexed = IndexedRegion::new(&region.omega);
        let spins: Vec<i8> = indexed.sites.iter().map(|&v| if spin(v) >= 0 { 1 } else { -1 }).collect();
        Self::from_indexed(&indexed, spins, region.bc, field)
    }

    pub(crate) fn from_indexed<F: ExternalField + ?Sized>(
        indexed: &IndexedRegion,
        spins: Vec<i8>,
        bc: Bc,
        field: &F,
    ) -> Self {
        let energy = indexed.energy(&spins, bc, field);
        SpinConfig { sites: indexed.sites.clone(), spins, bc, energy }
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn bc(&self) -> Bc {
        self.bc
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn spin(&self, v: Site) -> Option<i8> {
        self.sites.binary_search(&v).ok().map(|i| self.spins[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Site, i8)> + '_ {
        self.sites.iter().copied().zip(self.spins.iter().copied())
    }

    /// Sites carrying spin `+1`.
    pub fn plus_sites(&self) -> SiteSet {
        self.iter().filter(|&(_, s)| s > 0).map(|(v, _)| v).collect()
    }
}

/// `H^{bc}(σ, Ω, f) = −(Σ_{u∼v∈Ω} σ_uσ_v ± Σ_{∂Ω} σ_u + Σ f_u σ_u)`.
pub fn hamiltonian<F: ExternalField + ?Sized>(spins: &SpinConfig, region: &Region, field: &F) -> Result<f64> {
    if spins.sites.len() != region.omega.len() || !spins.sites.iter().all(|&v| region.omega.contains(v)) {
        return Err(Error::Domain("spin configuration and region have different domains".into()));
    }
    let indexed = IndexedRegion::new(&region.omega);
    Ok(indexed.energy(&spins.spins, region.bc, field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{sample_field, ORIGIN};

    fn origin_region(bc: Bc) -> Region {
        Region::new([ORIGIN].into_iter().collect(), bc)
    }

    #[test]
    fn single_spin_plus_boundary() {
        let zero = |_: Site| 0.0;
        let cfg = SpinConfig::from_fn(&origin_region(Bc::Plus), &zero, |_| 1);
        assert_eq!(hamiltonian(&cfg, &origin_region(Bc::Plus), &zero).unwrap(), -4.0);
        assert_eq!(cfg.energy(), -4.0);
    }

    #[test]
    fn single_spin_sign_bookkeeping() {
        let field = |v: Site| if v == ORIGIN { 10.0 } else { 0.0 };
        let cfg = SpinConfig::from_fn(&origin_region(Bc::Minus), &field, |_| 1);
        assert_eq!(hamiltonian(&cfg, &origin_region(Bc::Minus), &field).unwrap(), -6.0);
    }

    #[test]
    fn mismatched_domain_is_rejected() {
        let zero = |_: Site| 0.0;
        let cfg = SpinConfig::from_fn(&origin_region(Bc::Plus), &zero, |_| 1);
        assert!(hamiltonian(&cfg, &Region::square(1, Bc::Plus), &zero).is_err());
    }

    /// Term-by-term recomputation straight from the definition.
    fn reference_energy(spins: &HashMap<Site, i8>, bc: Bc, field: &dyn Fn(Site) -> f64) -> f64 {
        let mut pair = 0.0;
        let mut bnd = 0.0;
        let mut ext = 0.0;
        for (&u, &su) in spins {
            ext += field(u) * f64::from(su);
            for v in u.neighbors() {
                match spins.get(&v) {
                    // ordered pairs double count each unordered edge
                    Some(&sv) => pair += 0.5 * f64::from(su * sv),
                    None => bnd += f64::from(su),
                }
            }
        }
        -(pair + bc.sign() * bnd + ext)
    }

    #[test]
    fn matches_reference_on_random_configs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for trial in 0..50 {
            let field = sample_field(1, trial, 0.8);
            let region = Region::square(1, if trial % 2 == 0 { Bc::Plus } else { Bc::Minus });
            let spins: HashMap<Site, i8> =
                region.omega.iter().map(|v| (v, if rng.gen_bool(0.5) { 1 } else { -1 })).collect();
            let cfg = SpinConfig::from_fn(&region, &field, |v| spins[&v]);
            let f = |v: Site| field.f(v);
            let expect = reference_energy(&spins, region.bc, &f);
            assert!((cfg.energy() - expect).abs() < 1e-12);
        }
    }
}
