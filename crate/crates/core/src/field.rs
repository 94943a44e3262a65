//! Lattice geometry and the Gaussian disorder.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::gaussian_at;

/// A point of the square lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub x: i64,
    pub y: i64,
}

pub const ORIGIN: Site = Site { x: 0, y: 0 };

impl Site {
    pub const fn new(x: i64, y: i64) -> Self {
        Site { x, y }
    }

    /// The four nearest neighbours, in the order E, N, W, S.
    pub fn neighbors(self) -> [Site; 4] {
        [
            Site::new(self.x + 1, self.y),
            Site::new(self.x, self.y + 1),
            Site::new(self.x - 1, self.y),
            Site::new(self.x, self.y - 1),
        ]
    }

    pub fn is_adjacent(self, other: Site) -> bool {
        (self.x - other.x).abs() + (self.y - other.y).abs() == 1
    }

    pub fn sup_norm(self) -> i64 {
        self.x.abs().max(self.y.abs())
    }

    pub fn translate(self, dx: i64, dy: i64) -> Site {
        Site::new(self.x + dx, self.y + dy)
    }
}

/// A finite set of lattice sites.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SiteSet {
    sites: BTreeSet<Site>,
}

impl FromIterator<Site> for SiteSet {
    fn from_iter<I: IntoIterator<Item = Site>>(iter: I) -> Self {
        SiteSet { sites: iter.into_iter().collect() }
    }
}

impl<'a> IntoIterator for &'a SiteSet {
    type Item = Site;
    type IntoIter = std::iter::Copied<std::collections::btree_set::Iter<'a, Site>>;
    fn into_iter(self) -> Self::IntoIter {
        self.sites.iter().copied()
    }
}

impl SiteSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// The box `Λ_n = {v : |v|_∞ ≤ n}`.
    pub fn square(n: i64) -> Self {
        (-n..=n).flat_map(|y| (-n..=n).map(move |x| Site::new(x, y))).collect()
    }

    /// Axis-aligned rectangle with inclusive corners.
    pub fn rect(x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        (y0..=y1).flat_map(|y| (x0..=x1).map(move |x| Site::new(x, y))).collect()
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, v: Site) -> bool {
        self.sites.contains(&v)
    }

    pub fn insert(&mut self, v: Site) -> bool {
        self.sites.insert(v)
    }

    pub fn remove(&mut self, v: Site) -> bool {
        self.sites.remove(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = Site> + '_ {
        self.sites.iter().copied()
    }

    pub fn is_subset(&self, other: &SiteSet) -> bool {
        self.sites.is_subset(&other.sites)
    }

    pub fn is_disjoint(&self, other: &SiteSet) -> bool {
        self.sites.is_disjoint(&other.sites)
    }

    pub fn union(&self, other: &SiteSet) -> SiteSet {
        self.sites.union(&other.sites).copied().collect()
    }

    pub fn difference(&self, other: &SiteSet) -> SiteSet {
        self.sites.difference(&other.sites).copied().collect()
    }

    /// Inclusive bounding box `(xmin, ymin, xmax, ymax)`; `None` when empty.
    pub fn bounding_box(&self) -> Option<(i64, i64, i64, i64)> {
        let mut it = self.sites.iter();
        let first = it.next()?;
        let init = (first.x, first.y, first.x, first.y);
        Some(it.fold(init, |(a, b, c, d), v| (a.min(v.x), b.min(v.y), c.max(v.x), d.max(v.y))))
    }

    /// Number of edges with exactly one endpoint in the set.
    pub fn boundary_size(&self) -> usize {
        self.sites
            .iter()
            .map(|v| v.neighbors().iter().filter(|u| !self.contains(**u)).count())
            .sum()
    }
}

/// Edge boundary of `a`: the count and every `(inside, outside)` pair once.
pub fn boundary(a: &SiteSet) -> (usize, Vec<(Site, Site)>) {
    let edges: Vec<(Site, Site)> = a
        .iter()
        .flat_map(|v| v.neighbors().into_iter().filter(|u| !a.contains(*u)).map(move |u| (v, u)))
        .collect();
    (edges.len(), edges)
}

/// 4-connectivity; the empty set and singletons count as connected.
pub fn is_connected(a: &SiteSet) -> bool {
    let Some(start) = a.iter().next() else {
        return true;
    };
    let mut seen = HashSet::with_capacity(a.len());
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for u in v.neighbors() {
            if a.contains(u) && seen.insert(u) {
                queue.push_back(u);
            }
        }
    }
    seen.len() == a.len()
}

/// Splits `a` into its 4-connected components, each listed in site order.
pub fn components(a: &SiteSet) -> Vec<SiteSet> {
    let mut seen: HashSet<Site> = HashSet::with_capacity(a.len());
    let mut out = Vec::new();
    for start in a.iter() {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = SiteSet::new();
        comp.insert(start);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for u in v.neighbors() {
                if a.contains(u) && seen.insert(u) {
                    comp.insert(u);
                    queue.push_back(u);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Sites not in `a` that `a` separates from infinity.
///
/// Flood fill of the complement inside the bounding box padded by one layer;
/// anything the fill from the outer layer cannot reach is enclosed.
pub(crate) fn enclosed_sites(a: &SiteSet) -> SiteSet {
    let Some((x0, y0, x1, y1)) = a.bounding_box() else {
        return SiteSet::new();
    };
    let (x0, y0, x1, y1) = (x0 - 1, y0 - 1, x1 + 1, y1 + 1);
    let w = (x1 - x0 + 1) as usize;
    let h = (y1 - y0 + 1) as usize;
    let idx = |v: Site| (v.y - y0) as usize * w + (v.x - x0) as usize;
    let mut outside = vec![false; w * h];
    let mut queue = VecDeque::new();
    let start = Site::new(x0, y0);
    outside[idx(start)] = true;
    queue.push_back(start);
    while let Some(v) = queue.pop_front() {
        for u in v.neighbors() {
            if u.x < x0 || u.x > x1 || u.y < y0 || u.y > y1 || a.contains(u) {
                continue;
            }
            let i = idx(u);
            if !outside[i] {
                outside[i] = true;
                queue.push_back(u);
            }
        }
    }
    let mut enclosed = SiteSet::new();
    for y in y0..=y1 {
        for x in x0..=x1 {
            let v = Site::new(x, y);
            if !outside[idx(v)] && !a.contains(v) {
                enclosed.insert(v);
            }
        }
    }
    enclosed
}

/// True iff the connected set `a` encloses no complement site.
pub fn is_simply_connected(a: &SiteSet) -> Result<bool> {
    if a.is_empty() || !is_connected(a) {
        return Err(Error::Domain("simple connectivity is defined for nonempty connected sets".into()));
    }
    Ok(enclosed_sites(a).is_empty())
}

/// Raw standard-normal disorder `h_v`.
pub trait GaussianSource: Sync {
    fn h(&self, v: Site) -> f64;
}

/// The external field `f_v` entering the Hamiltonian (for the disorder, `εh_v`).
pub trait ExternalField: Sync {
    fn f(&self, v: Site) -> f64;
}

impl<F> ExternalField for F
where
    F: Fn(Site) -> f64 + Sync,
{
    fn f(&self, v: Site) -> f64 {
        self(v)
    }
}

/// Unmaterialized disorder: values are generated on demand from the seed.
#[derive(Clone, Copy, Debug)]
pub struct LazyField {
    pub seed: u64,
}

impl GaussianSource for LazyField {
    fn h(&self, v: Site) -> f64 {
        gaussian_at(self.seed, v.x, v.y)
    }
}

/// I.i.d. standard Gaussian field on `Λ_N` with disorder strength `ε`.
///
/// Values are keyed on `(seed, x, y)`, so a box of any size agrees with every
/// other box generated from the same seed on their common sites. Sites outside
/// the box are evaluated on demand with the same generator.
#[derive(Clone, Debug, PartialEq)]
pub struct DisorderField {
    half_width: i64,
    seed: u64,
    epsilon: f64,
    values: Vec<f64>,
}

impl DisorderField {
    pub fn half_width(&self) -> i64 {
        self.half_width
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn side(&self) -> usize {
        (2 * self.half_width + 1) as usize
    }

    pub fn in_box(&self, v: Site) -> bool {
        v.sup_norm() <= self.half_width
    }

    fn index(&self, v: Site) -> usize {
        let n = self.half_width;
        (v.y + n) as usize * self.side() + (v.x + n) as usize
    }

    /// Overwrites `h_v` inside the box; used to build hand-made instances.
    pub fn set_h(&mut self, v: Site, h: f64) {
        assert!(self.in_box(v), "site {v:?} outside the field box");
        let i = self.index(v);
        self.values[i] = h;
    }

    /// Same disorder with a different strength.
    pub fn with_epsilon(&self, epsilon: f64) -> DisorderField {
        DisorderField { epsilon, ..self.clone() }
    }

    /// Constant field `h ≡ c` on `Λ_N` (outside the box values stay random).
    pub fn constant(half_width: i64, epsilon: f64, c: f64) -> DisorderField {
        let mut f = sample_field(half_width, 0, epsilon);
        f.values.iter_mut().for_each(|h| *h = c);
        f
    }

    /// Sites of the box in row-major order (y outer, x inner).
    pub fn sites(&self) -> impl Iterator<Item = Site> {
        let n = self.half_width;
        (-n..=n).flat_map(move |y| (-n..=n).map(move |x| Site::new(x, y)))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `Σ_{v∈A} h_v` (no `ε`).
    pub fn sum_h(&self, a: &SiteSet) -> f64 {
        a.iter().map(|v| self.h(v)).sum()
    }

    /// Text dump: header `N=.. seed=.. eps=..` then `x y h` per site, row-major.
    pub fn write_dump<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "N={} seed={} eps={}", self.half_width, self.seed, self.epsilon)?;
        let mut line = String::new();
        for v in self.sites() {
            line.clear();
            let _ = writeln!(line, "{} {} {:.16e}", v.x, v.y, self.h(v));
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn read_dump<R: BufRead>(input: R) -> Result<DisorderField> {
        let mut lines = input.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty dump".into() })?;
        let header = header?;
        let mut kv: HashMap<&str, &str> = HashMap::new();
        for tok in header.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: 1, msg: format!("bad header token {tok:?}") })?;
            kv.insert(k, v);
        }
        let get = |k: &str| {
            kv.get(k).copied().ok_or_else(|| Error::Parse { line: 1, msg: format!("missing {k}") })
        };
        let bad = |line: usize, what: &str| Error::Parse { line, msg: format!("cannot parse {what}") };
        let n: i64 = get("N")?.parse().map_err(|_| bad(1, "N"))?;
        let seed: u64 = get("seed")?.parse().map_err(|_| bad(1, "seed"))?;
        let eps: f64 = get("eps")?.parse().map_err(|_| bad(1, "eps"))?;
        let mut field = sample_field(n, seed, eps);
        let mut count = 0usize;
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let mut next = |what: &str| parts.next().ok_or_else(|| bad(i + 1, what));
            let x: i64 = next("x")?.parse().map_err(|_| bad(i + 1, "x"))?;
            let y: i64 = next("y")?.parse().map_err(|_| bad(i + 1, "y"))?;
            let h: f64 = next("h")?.parse().map_err(|_| bad(i + 1, "h"))?;
            let v = Site::new(x, y);
            if !field.in_box(v) {
                return Err(Error::Parse { line: i + 1, msg: format!("site {v:?} outside Λ_{n}") });
            }
            field.set_h(v, h);
            count += 1;
        }
        if count != field.values.len() {
            return Err(Error::Parse {
                line: count + 1,
                msg: format!("expected {} sites, found {count}", field.values.len()),
            });
        }
        Ok(field)
    }
}

impl GaussianSource for DisorderField {
    fn h(&self, v: Site) -> f64 {
        if self.in_box(v) {
            self.values[self.index(v)]
        } else {
            gaussian_at(self.seed, v.x, v.y)
        }
    }
}

impl ExternalField for DisorderField {
    fn f(&self, v: Site) -> f64 {
        self.epsilon * self.h(v)
    }
}

/// Generates the disorder on `Λ_N`. `N = 0` gives the single-site box.
pub fn sample_field(half_width: i64, seed: u64, epsilon: f64) -> DisorderField {
    assert!(half_width >= 0, "negative half width");
    let n = half_width;
    let values = (-n..=n)
        .flat_map(|y| (-n..=n).map(move |x| gaussian_at(seed, x, y)))
        .collect();
    DisorderField { half_width, seed, epsilon, values }
}
