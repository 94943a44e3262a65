use super::AnimalClass;
use crate::error::{Error, Result};
use crate::field::{enclosed_sites, Site, SiteSet, ORIGIN};

/// Largest animal size accepted by the exhaustive enumerator.
pub const ENUMERATION_SIZE_CAP: usize = 14;

struct BoxGraph {
    n: i64,
    side: usize,
}

impl BoxGraph {
    fn site(&self, i: usize) -> Site {
        Site::new((i % self.side) as i64 - self.n, (i / self.side) as i64 - self.n)
    }

    fn index(&self, v: Site) -> Option<usize> {
        (v.sup_norm() <= self.n).then(|| (v.y + self.n) as usize * self.side + (v.x + self.n) as usize)
    }
}

struct Search<'a, F> {
    graph: &'a BoxGraph,
    max_size: usize,
    min_index: usize,
    seen: Vec<bool>,
    current: Vec<usize>,
    emit: &'a mut F,
}

impl<F: FnMut(&[usize])> Search<'_, F> {
    // Redelmeier's extension scheme: every connected set containing the root
    // (and no site below `min_index`) is produced exactly once.
    fn extend(&mut self, mut untried: Vec<usize>) {
        while let Some(v) = untried.pop() {
            self.current.push(v);
            (self.emit)(&self.current);
            if self.current.len() < self.max_size {
                let mut added = Vec::new();
                for u in self.graph.site(v).neighbors() {
                    if let Some(j) = self.graph.index(u) {
                        if j >= self.min_index && !self.seen[j] {
                            self.seen[j] = true;
                            added.push(j);
                        }
                    }
                }
                let mut next = untried.clone();
                next.extend_from_slice(&added);
                self.extend(next);
                for j in added {
                    self.seen[j] = false;
                }
            }
            self.current.pop();
        }
    }
}

/// Calls `visit` once for every connected subset of `Λ_N` with at most `max_size`
/// sites (containing the origin when `anchored`) that belongs to `class`.
pub fn visit_animals(
    n: i64,
    max_size: usize,
    class: AnimalClass,
    anchored: bool,
    mut visit: impl FnMut(&SiteSet),
) -> Result<u64> {
    if max_size > ENUMERATION_SIZE_CAP {
        return Err(Error::SizeCap { size: max_size, cap: ENUMERATION_SIZE_CAP });
    }
    if max_size == 0 {
        return Ok(0);
    }
    let graph = BoxGraph { n, side: (2 * n + 1) as usize };
    let total = graph.side * graph.side;
    let mut count = 0u64;
    let mut emit = |idx: &[usize]| {
        let set: SiteSet = idx.iter().map(|&i| graph.site(i)).collect();
        if class == AnimalClass::SimplyConnected && !enclosed_sites(&set).is_empty() {
            return;
        }
        count += 1;
        visit(&set);
    };
    let roots: Vec<usize> = if anchored { graph.index(ORIGIN).into_iter().collect() } else { (0..total).collect() };
    for root in roots {
        let mut search = Search {
            graph: &graph,
            max_size,
            min_index: if anchored { 0 } else { root },
            seen: vec![false; total],
            current: Vec::with_capacity(max_size),
            emit: &mut emit,
        };
        search.seen[root] = true;
        search.extend(vec![root]);
    }
    Ok(count)
}

/// All qualifying animals, in enumeration order.
pub fn enumerate_animals(n: i64, max_size: usize, class: AnimalClass, anchored: bool) -> Result<Vec<SiteSet>> {
    let mut out = Vec::new();
    visit_animals(n, max_size, class, anchored, |a| out.push(a.clone()))?;
    Ok(out)
}
