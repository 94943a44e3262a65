use crate::error::{Error, Result};
use crate::field::{components, enclosed_sites, is_connected, SiteSet};

/// Fills the holes of a connected set.
///
/// Returns `A` together with every site it separates from infinity, and the
/// connected components of those enclosed sites.
pub fn fill_holes(a: &SiteSet) -> Result<(SiteSet, Vec<SiteSet>)> {
    if !is_connected(a) {
        return Err(Error::Domain("fill_holes needs a connected set".into()));
    }
    let enclosed = enclosed_sites(a);
    let filled = a.union(&enclosed);
    Ok((filled, components(&enclosed)))
}
