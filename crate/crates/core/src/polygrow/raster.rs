use std::collections::BTreeMap;

use crate::field::{GaussianSource, Site, SiteSet};
use crate::geom::Point;

const SNAP: f64 = 1e-9;

/// Integer points of a closed polygon, stored as maximal runs per row.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LatticeRaster {
    rows: BTreeMap<i64, Vec<(i64, i64)>>,
}

impl LatticeRaster {
    /// Rasterizes the closed region bounded by the simple polygon `v`;
    /// points within `1e-9` of the boundary count as inside.
    pub fn of_polygon(v: &[Point]) -> Self {
        let n = v.len();
        let ymin = v.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        let ymax = v.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
        let mut rows = BTreeMap::new();
        for y in (ymin - SNAP).ceil() as i64..=(ymax + SNAP).floor() as i64 {
            let yf = y as f64;
            let mut xs = Vec::new();
            let mut runs = Vec::new();
            for i in 0..n {
                let (a, b) = (v[i], v[(i + 1) % n]);
                if a.y != b.y && a.y.min(b.y) <= yf && yf < a.y.max(b.y) {
                    xs.push(a.x + (yf - a.y) * (b.x - a.x) / (b.y - a.y));
                } else if (a.y - yf).abs() <= SNAP && (b.y - yf).abs() <= SNAP {
                    runs.push(snap_interval(a.x.min(b.x), a.x.max(b.x)));
                }
                if (a.y - yf).abs() <= SNAP && (a.x - a.x.round()).abs() <= SNAP {
                    let x = a.x.round() as i64;
                    runs.push((x, x));
                }
            }
            xs.sort_by(f64::total_cmp);
            for pair in xs.chunks_exact(2) {
                runs.push(snap_interval(pair[0], pair[1]));
            }
            let merged = merge(runs);
            if !merged.is_empty() {
                rows.insert(y, merged);
            }
        }
        LatticeRaster { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.values().flatten().map(|&(a, b)| (b - a + 1) as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = (i64, &[(i64, i64)])> {
        self.rows.iter().map(|(&y, r)| (y, r.as_slice()))
    }

    pub fn contains(&self, v: Site) -> bool {
        self.rows.get(&v.y).is_some_and(|r| r.iter().any(|&(a, b)| a <= v.x && v.x <= b))
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.rows.iter().flat_map(|(&y, r)| r.iter().flat_map(move |&(a, b)| (a..=b).map(move |x| Site::new(x, y))))
    }

    pub fn to_site_set(&self) -> SiteSet {
        self.sites().collect()
    }

    pub fn sum<G: GaussianSource + ?Sized>(&self, field: &G) -> f64 {
        self.sites().map(|v| field.h(v)).sum()
    }

    /// Edge boundary `|∂𝖯|` of the point set.
    pub fn boundary_size(&self) -> usize {
        let horizontal: usize = self.rows.values().map(|r| 2 * r.len()).sum();
        let empty = Vec::new();
        let mut vertical = 0;
        let (Some(&lo), Some(&hi)) = (self.rows.keys().next(), self.rows.keys().next_back()) else {
            return 0;
        };
        for y in lo - 1..=hi {
            let a = self.rows.get(&y).unwrap_or(&empty);
            let b = self.rows.get(&(y + 1)).unwrap_or(&empty);
            vertical += count(a) + count(b) - 2 * overlap(a, b);
        }
        horizontal + vertical
    }
}

fn snap_interval(x0: f64, x1: f64) -> (i64, i64) {
    ((x0 - SNAP).ceil() as i64, (x1 + SNAP).floor() as i64)
}

fn merge(mut runs: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    runs.retain(|&(a, b)| a <= b);
    runs.sort_unstable();
    let mut out: Vec<(i64, i64)> = Vec::with_capacity(runs.len());
    for (a, b) in runs {
        match out.last_mut() {
            Some(last) if a <= last.1 + 1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn count(r: &[(i64, i64)]) -> usize {
    r.iter().map(|&(a, b)| (b - a + 1) as usize).sum()
}

fn overlap(a: &[(i64, i64)], b: &[(i64, i64)]) -> usize {
    let (mut i, mut j, mut total) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if lo <= hi {
            total += (hi - lo + 1) as usize;
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Triangle;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn square_matches_lambda() {
        let sq = [p(-5., -5.), p(5., -5.), p(5., 5.), p(-5., 5.)];
        let r = LatticeRaster::of_polygon(&sq);
        assert_eq!(r.len(), 121);
        assert_eq!(r.to_site_set(), SiteSet::square(5));
        assert_eq!(r.boundary_size(), 44);
    }

    #[test]
    fn agrees_with_pointwise_triangle_test() {
        let tris = [
            Triangle([p(0.3, -2.2), p(7.9, 1.1), p(-1.5, 6.0)]),
            Triangle([p(0., 0.), p(6., 0.), p(0., 6.)]),
            Triangle([p(-3.5, 2.), p(4.25, 2.), p(0.5, 9.75)]),
        ];
        for t in tris {
            let r = LatticeRaster::of_polygon(&t.0);
            let pts: SiteSet = t.lattice_points().into_iter().map(|(x, y)| Site::new(x, y)).collect();
            assert_eq!(r.to_site_set(), pts);
            assert_eq!(r.boundary_size(), pts.boundary_size());
        }
    }
}
