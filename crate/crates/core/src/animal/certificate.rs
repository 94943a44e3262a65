use super::LatticeAnimal;
use crate::error::{Error, Result};
use crate::field::{components, DisorderField, ORIGIN};
use crate::ising::{ground_state, Bc, Region};

/// Plus-spin cluster of the origin in the minus-boundary ground state on the field's box.
///
/// Returns `None` when the origin is minus. Otherwise the cluster `S` must satisfy
/// `ε Σ_{v∈S} h_v ≥ |∂S|`; a failure is reported as [`Error::Violation`].
pub fn flip_certificate(field: &DisorderField) -> Result<Option<LatticeAnimal>> {
    let region = Region::square(field.half_width(), Bc::Minus);
    let sigma = ground_state(&region, field);
    if sigma.spin(ORIGIN) != Some(1) {
        return Ok(None);
    }
    let s = components(&sigma.plus_sites())
        .into_iter()
        .find(|c| c.contains(ORIGIN))
        .expect("origin is a plus site");
    let animal = LatticeAnimal::new(s, field)?;
    let lhs = field.epsilon() * animal.value_numerator;
    if lhs < animal.boundary_size as f64 {
        return Err(Error::Violation(format!(
            "flip certificate of size {} has eps*sum h = {lhs} < |boundary| = {}",
            animal.len(),
            animal.boundary_size
        )));
    }
    Ok(Some(animal))
}
