use serde::{Deserialize, Serialize};

use super::enumerate::visit_animals;
use super::holes::fill_holes;
use super::{AnimalClass, AnimalSearchResult, LatticeAnimal, SearchMode};
use crate::error::{Error, Result};
use crate::field::{DisorderField, SiteSet};

/// Exhaustive maximum of `Σ_{v∈A} h_v / |∂A|` over animals in the field's box
/// with at most `max_size` sites. Ties keep the first animal in enumeration order.
pub fn greedy_value_exact(
    field: &DisorderField,
    max_size: usize,
    class: AnimalClass,
    anchored: bool,
) -> Result<AnimalSearchResult> {
    let mut best: Option<(f64, SiteSet)> = None;
    let explored = visit_animals(field.half_width(), max_size, class, anchored, |a| {
        let value = field.sum_h(a) / a.boundary_size() as f64;
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, a.clone()));
        }
    })?;
    let (_, sites) = best.ok_or_else(|| Error::Domain("no animal in the enumerated class".into()))?;
    let best = LatticeAnimal::new(sites, field)?;
    Ok(AnimalSearchResult { best, mode: SearchMode::Exact, explored, seed: None })
}

/// Outcome of comparing `max |Σh|/|∂|` over simply connected and connected animals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionCheck {
    pub max_simply_connected: f64,
    pub max_connected: f64,
    /// Maximizer over all connected animals.
    pub connected_maximizer: SiteSet,
    /// Whether that maximizer's filled hull is within the size cap, i.e. the
    /// truncated classes still contain every piece the identity decomposes it into.
    pub hull_fits: bool,
}

impl ReductionCheck {
    pub fn holds(&self, tol: f64) -> bool {
        (self.max_simply_connected - self.max_connected).abs() <= tol
    }
}

/// Both maxima of `|Σ_{v∈B} h_v| / |∂B|` over animals contained in `Λ_N` of size at most `max_size`.
pub fn reduction_identity_check(field: &DisorderField, max_size: usize) -> Result<ReductionCheck> {
    let ratio = |a: &SiteSet| field.sum_h(a).abs() / a.boundary_size() as f64;
    let mut max_c: Option<(f64, SiteSet)> = None;
    let mut max_sc = f64::NEG_INFINITY;
    visit_animals(field.half_width(), max_size, AnimalClass::Connected, false, |a| {
        let r = ratio(a);
        if max_c.as_ref().is_none_or(|(b, _)| r > *b) {
            max_c = Some((r, a.clone()));
        }
    })?;
    visit_animals(field.half_width(), max_size, AnimalClass::SimplyConnected, false, |a| {
        max_sc = max_sc.max(ratio(a));
    })?;
    let (max_connected, connected_maximizer) = max_c.ok_or_else(|| Error::Domain("empty enumeration".into()))?;
    let (filled, _) = fill_holes(&connected_maximizer)?;
    Ok(ReductionCheck {
        max_simply_connected: max_sc,
        max_connected,
        hull_fits: filled.len() <= max_size,
        connected_maximizer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{sample_field, GaussianSource, Site, ORIGIN};

    fn value_of<G: GaussianSource + ?Sized>(field: &G, a: &SiteSet) -> f64 {
        a.iter().map(|v| field.h(v)).sum::<f64>() / a.boundary_size() as f64
    }

    #[test]
    fn isolated_positive_spike() {
        let mut f = DisorderField::constant(2, 1.0, -10.0);
        f.set_h(ORIGIN, 3.0);
        for class in [AnimalClass::Connected, AnimalClass::SimplyConnected] {
            let r = greedy_value_exact(&f, 6, class, true).unwrap();
            assert_eq!(r.best.sites, [ORIGIN].into_iter().collect());
            assert_eq!(r.best.normalized_value, 0.75);
        }
    }

    #[test]
    fn constant_field_prefers_the_block() {
        let c = 0.7;
        let f = DisorderField::constant(1, 1.0, c);
        let r = greedy_value_exact(&f, 9, AnimalClass::Connected, true).unwrap();
        assert_eq!(r.best.sites, SiteSet::square(1));
        assert!((r.best.normalized_value - 9.0 * c / 12.0).abs() < 1e-15);
    }

    #[test]
    fn spike_is_both_maxima() {
        let mut f = DisorderField::constant(1, 1.0, 0.0);
        f.set_h(Site::new(1, -1), 50.0);
        let r = reduction_identity_check(&f, 9).unwrap();
        assert_eq!(r.connected_maximizer, [Site::new(1, -1)].into_iter().collect());
        assert_eq!(r.max_connected, 12.5);
        assert_eq!(r.max_simply_connected, 12.5);
    }

    #[test]
    fn exact_value_dominates_every_enumerated_animal() {
        let f = sample_field(1, 4, 1.0);
        let r = greedy_value_exact(&f, 9, AnimalClass::Connected, false).unwrap();
        visit_animals(1, 9, AnimalClass::Connected, false, |a| {
            assert!(value_of(&f, a) <= r.best.normalized_value);
        })
        .unwrap();
    }
}
