//! Greedy lattice animals normalized by boundary size.

mod anneal;
mod certificate;
mod enumerate;
mod exact;
mod holes;

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub use anneal::{greedy_value_anneal, AnnealConfig};
pub use certificate::flip_certificate;
pub use enumerate::{enumerate_animals, visit_animals, ENUMERATION_SIZE_CAP};
pub use exact::{greedy_value_exact, reduction_identity_check, ReductionCheck};
pub use holes::fill_holes;

use crate::error::{Error, Result};
use crate::field::{is_connected, GaussianSource, SiteSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnimalClass {
    Connected,
    SimplyConnected,
}

impl std::str::FromStr for AnimalClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "connected" => Ok(AnimalClass::Connected),
            "simply_connected" | "simply-connected" => Ok(AnimalClass::SimplyConnected),
            _ => Err(Error::InvalidArgument(format!("unknown animal class {s:?}"))),
        }
    }
}

impl std::fmt::Display for AnimalClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AnimalClass::Connected => "connected",
            AnimalClass::SimplyConnected => "simply_connected",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exact,
    Anneal,
    Construction,
}

/// A connected site set with its field sum `Σ h_v` and boundary size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeAnimal {
    pub sites: SiteSet,
    pub value_numerator: f64,
    pub boundary_size: usize,
    pub normalized_value: f64,
}

impl LatticeAnimal {
    pub fn new<G: GaussianSource + ?Sized>(sites: SiteSet, field: &G) -> Result<Self> {
        if sites.is_empty() || !is_connected(&sites) {
            return Err(Error::Domain("a lattice animal must be nonempty and connected".into()));
        }
        let value_numerator: f64 = sites.iter().map(|v| field.h(v)).sum();
        Ok(Self::from_parts(sites, value_numerator))
    }

    pub(crate) fn from_parts(sites: SiteSet, value_numerator: f64) -> Self {
        let boundary_size = sites.boundary_size();
        LatticeAnimal { sites, value_numerator, boundary_size, normalized_value: value_numerator / boundary_size as f64 }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// `value boundary size` on the first line, then `x,y;x,y;…`.
    pub fn dump(&self) -> String {
        let mut s = format!("{:.16e} {} {}\n", self.normalized_value, self.boundary_size, self.len());
        let body: Vec<String> = self.sites.iter().map(|v| format!("{},{}", v.x, v.y)).collect();
        let _ = writeln!(s, "{}", body.join(";"));
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnimalSearchResult {
    pub best: LatticeAnimal,
    pub mode: SearchMode,
    pub explored: u64,
    pub seed: Option<u64>,
}
