//! Randomized triangle-growing polygons.
//!
//! Starting from a square, every side of the current polygon proposes an
//! outward isosceles triangle on its middle half. A decision rule looks at the
//! disorder in the proposal and either attaches the triangle or splits the
//! side into four collinear pieces. Every stage quadruples the side count.

mod raster;
mod validate;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub use raster::LatticeRaster;
pub use validate::{decode_flags, replay, validate, Violation, ViolationKind};

use crate::error::{Error, Result};
use crate::field::{GaussianSource, Site, SiteSet};
use crate::geom::{orient, perimeter, Point, Triangle};
use crate::ising::{gamma_increment, Beta};
use crate::rng::{derive_seed, gaussian_at};

/// How a proposed triangle is judged.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthMode {
    /// `ε Σ_{T*∩ℤ²} h ≥ 10 δ² r` on a `[−N, N]²` start.
    LatticeSimplified,
    /// `Σ_{T∩ℤ²} h > 0` with height `ε^{2/3} l / 8` on a `[−N/2, N/2]²` start.
    Continuum,
    /// Monte Carlo estimate of the conditional mean of the ground-state
    /// Γ-increment over `Ω = [−2N, 2N]²`, compared with `10 δ² r`. Tiny `N` only.
    IsingGround { resamples: usize },
}

impl FromStr for GrowthMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lattice" | "lattice_simplified" => Ok(GrowthMode::LatticeSimplified),
            "continuum" => Ok(GrowthMode::Continuum),
            "ising" => Ok(GrowthMode::IsingGround { resamples: 8 }),
            _ => Err(Error::InvalidArgument(format!("unknown growth mode {s:?}"))),
        }
    }
}

impl fmt::Display for GrowthMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthMode::LatticeSimplified => write!(f, "lattice"),
            GrowthMode::Continuum => write!(f, "continuum"),
            GrowthMode::IsingGround { .. } => write!(f, "ising"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthParams {
    pub n: i64,
    pub epsilon: f64,
    pub m_param: f64,
    pub seed: u64,
    pub mode: GrowthMode,
    pub delta: f64,
    pub n_star: usize,
}

impl GrowthParams {
    pub fn new(n: i64, epsilon: f64, m_param: f64, seed: u64, mode: GrowthMode) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain(format!("N must be at least 1, got {n}")));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::Domain(format!("eps must lie in [0, 1], got {epsilon}")));
        }
        if !(m_param > 0.0 && m_param < 1.0) {
            return Err(Error::Domain(format!("m must lie in (0, 1), got {m_param}")));
        }
        Ok(GrowthParams {
            n,
            epsilon,
            m_param,
            seed,
            mode,
            delta: default_delta(epsilon, m_param),
            n_star: n_star(n),
        })
    }

    /// Replaces the aspect ratio `δ` of lattice-mode triangles.
    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_n_star(mut self, n_star: usize) -> Self {
        self.n_star = n_star;
        self
    }

    fn initial_square(&self) -> Vec<Point> {
        let h = match self.mode {
            GrowthMode::Continuum => self.n as f64 / 2.0,
            _ => self.n as f64,
        };
        vec![Point::new(-h, -h), Point::new(h, -h), Point::new(h, h), Point::new(-h, h)]
    }

    /// Triangle height over a side of quarter-length `r`.
    fn height(&self, r: f64) -> f64 {
        match self.mode {
            GrowthMode::Continuum => self.epsilon.powf(2.0 / 3.0) * r / 2.0,
            _ => self.delta * r,
        }
    }
}

/// `δ = 10⁻² (ε 𝚖)^{2/3}`.
pub fn default_delta(epsilon: f64, m_param: f64) -> f64 {
    1e-2 * (epsilon * m_param).powf(2.0 / 3.0)
}

/// `⌊log₁₆ N⌋`, computed in integers.
pub fn n_star(n: i64) -> usize {
    let mut k = 0;
    let mut p: i64 = 16;
    while p <= n {
        k += 1;
        p = p.saturating_mul(16);
    }
    k
}

/// A proposed triangle `T` on side `S_{n,i}` and its inner region `T*`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrianglePair {
    pub stage: usize,
    pub index: usize,
    pub side: [Point; 2],
    pub r: f64,
    pub height: f64,
    pub t: Triangle,
    pub t_star: Triangle,
}

impl TrianglePair {
    fn new(params: &GrowthParams, stage: usize, index: usize, a: Point, b: Point) -> Self {
        let l = a.dist(b);
        let r = l / 4.0;
        let d = (b - a) * (1.0 / l);
        let normal = Point::new(d.y, -d.x);
        let height = params.height(r);
        let m = a.lerp(b, 0.5);
        let apex = m + normal * height;
        let t = Triangle([a + d * r, apex, a + d * (3.0 * r)]);
        let star_base = m + normal * (2.0 * height / 3.0);
        let t_star = Triangle([star_base - d * (r / 3.0), apex, star_base + d * (r / 3.0)]);
        TrianglePair { stage, index, side: [a, b], r, height, t, t_star }
    }

    pub fn apex(&self) -> Point {
        self.t.0[1]
    }

    /// The four sides replacing `S_{n,i}` after the decision, as their start points.
    fn children(&self, accepted: bool) -> [Point; 4] {
        let [a, b] = self.side;
        let [p1, apex, p3] = self.t.0;
        let middle = if accepted { apex } else { a.lerp(b, 0.5) };
        [a, p1, middle, p3]
    }

    fn is_degenerate(&self) -> bool {
        !(self.height > 0.0)
    }

    /// Whether the lattice point `v` sits on the base segment.
    fn on_base(&self, v: Point) -> bool {
        let [a, b] = self.side;
        orient(a, b, v).abs() <= 1e-9 * a.dist(b)
    }
}

/// One decided proposal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub pair: TrianglePair,
    pub z: bool,
    /// Field sum over the lattice points added to the polygon, zero when rejected.
    pub gain: f64,
}

/// Per-stage summary of the polygon `P_n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageStat {
    pub stage: usize,
    pub sides: usize,
    pub perimeter: f64,
    /// `W(P_n) − W(P_1)` with `W` the lattice field sum.
    pub field_gain: f64,
    pub accepted: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthState {
    pub params: GrowthParams,
    stage: usize,
    next: usize,
    base: Vec<Point>,
    done: Vec<Point>,
    decisions: Vec<Decision>,
    stats: Vec<StageStat>,
}

/// `P_1` with the side `S_{1,1}` at the bottom.
pub fn init_growth(params: GrowthParams) -> GrowthState {
    let base = params.initial_square();
    let stats = vec![StageStat { stage: 1, sides: 4, perimeter: perimeter(&base), field_gain: 0.0, accepted: 0 }];
    GrowthState { params, stage: 1, next: 0, base, done: Vec::new(), decisions: Vec::new(), stats }
}

impl GrowthState {
    /// Current stage `n`.
    pub fn stage(&self) -> usize {
        self.stage
    }

    /// One-based index of the next side to decide.
    pub fn next_index(&self) -> usize {
        self.next + 1
    }

    pub fn decisions(&self) -> &[Decision] {
        &self.decisions
    }

    pub fn stage_stats(&self) -> &[StageStat] {
        &self.stats
    }

    pub fn is_finished(&self) -> bool {
        self.stage >= self.params.n_star.max(1)
    }

    /// Vertices of `P_{n,i}`, counter-clockwise.
    pub fn polygon(&self) -> Vec<Point> {
        let mut v = self.done.clone();
        v.extend_from_slice(&self.base[self.next..]);
        v
    }

    /// Vertices of `P_n` at the start of the current stage.
    pub fn stage_polygon(&self) -> &[Point] {
        &self.base
    }

    /// The proposal on the next undecided side.
    pub fn propose(&self) -> TrianglePair {
        let k = self.base.len();
        let (a, b) = (self.base[self.next], self.base[(self.next + 1) % k]);
        TrianglePair::new(&self.params, self.stage, self.next + 1, a, b)
    }

    /// Decides the next side from the disorder and applies the outcome.
    pub fn step<G: GaussianSource + ?Sized>(&mut self, field: &G) -> Result<bool> {
        let pair = self.propose();
        let (z, gain) = decide(self, &pair, field)?;
        let gain = match (z, gain) {
            (true, None) => added_sum(&pair, field),
            (_, g) => g.unwrap_or(0.0),
        };
        self.apply(pair, z, if z { gain } else { 0.0 });
        Ok(z)
    }

    /// Applies a decision regardless of the disorder.
    pub fn force<G: GaussianSource + ?Sized>(&mut self, z: bool, field: &G) {
        let pair = self.propose();
        let gain = if z { added_sum(&pair, field) } else { 0.0 };
        self.apply(pair, z, gain);
    }

    /// Applies a decision without touching the disorder; stage gains are left at zero.
    pub(crate) fn force_flag(&mut self, z: bool) {
        let pair = self.propose();
        self.apply(pair, z, 0.0);
    }

    fn apply(&mut self, pair: TrianglePair, z: bool, gain: f64) {
        self.done.extend_from_slice(&pair.children(z));
        self.decisions.push(Decision { pair, z, gain });
        self.next += 1;
        if self.next == self.base.len() {
            self.base = std::mem::take(&mut self.done);
            self.next = 0;
            self.stage += 1;
            let this_stage: Vec<&Decision> = self.decisions.iter().filter(|d| d.pair.stage == self.stage - 1).collect();
            let prev = self.stats.last().map_or(0.0, |s| s.field_gain);
            self.stats.push(StageStat {
                stage: self.stage,
                sides: self.base.len(),
                perimeter: perimeter(&self.base),
                field_gain: prev + this_stage.iter().map(|d| d.gain).sum::<f64>(),
                accepted: this_stage.iter().filter(|d| d.z).count(),
            });
        }
    }

    /// Decides every side until the polygon `P_{n*}` is reached.
    pub fn grow<G: GaussianSource + ?Sized>(&mut self, field: &G) -> Result<()> {
        while !self.is_finished() {
            self.step(field)?;
        }
        Ok(())
    }
}

fn lattice_sum<G: GaussianSource + ?Sized>(t: &Triangle, field: &G) -> Option<f64> {
    let pts = t.lattice_points();
    (!pts.is_empty()).then(|| pts.into_iter().map(|(x, y)| field.h(Site::new(x, y))).sum())
}

/// Field sums over `T ∩ ℤ²` and over its points off the base; `None` when `T` has no lattice point.
fn triangle_sums<G: GaussianSource + ?Sized>(pair: &TrianglePair, field: &G) -> Option<(f64, f64)> {
    let pts = pair.t.lattice_points();
    if pts.is_empty() {
        return None;
    }
    let (mut all, mut off_base) = (0.0, 0.0);
    for (x, y) in pts {
        let h = field.h(Site::new(x, y));
        all += h;
        if !pair.on_base(Point::new(x as f64, y as f64)) {
            off_base += h;
        }
    }
    Some((all, off_base))
}

/// Field sum over the lattice points that attaching `T` adds to the polygon.
fn added_sum<G: GaussianSource + ?Sized>(pair: &TrianglePair, field: &G) -> f64 {
    triangle_sums(pair, field).map_or(0.0, |(_, off)| off)
}

/// The decision `Z_{n,i}` for `pair` given the disorder.
pub fn accept<G: GaussianSource + ?Sized>(state: &GrowthState, pair: &TrianglePair, field: &G) -> Result<bool> {
    Ok(decide(state, pair, field)?.0)
}

/// The decision, plus the added field sum when it came for free.
fn decide<G: GaussianSource + ?Sized>(
    state: &GrowthState,
    pair: &TrianglePair,
    field: &G,
) -> Result<(bool, Option<f64>)> {
    if pair.is_degenerate() {
        return Ok((false, None));
    }
    let p = &state.params;
    let threshold = 10.0 * p.delta * p.delta * pair.r;
    match p.mode {
        GrowthMode::LatticeSimplified => {
            Ok((lattice_sum(&pair.t_star, field).is_some_and(|s| p.epsilon * s >= threshold), None))
        }
        GrowthMode::Continuum => Ok(match triangle_sums(pair, field) {
            Some((all, off)) => (all > 0.0, Some(off)),
            None => (false, None),
        }),
        GrowthMode::IsingGround { resamples } => {
            if pair.t_star.lattice_points().is_empty() {
                return Ok((false, None));
            }
            Ok((ising_increment(state, pair, field, resamples)? >= threshold, None))
        }
    }
}

/// Averages the ground-state `G(A, T, Ω)` over resampled disorder, keeping the
/// values revealed so far (all decided `T*` regions and the current one).
fn ising_increment<G: GaussianSource + ?Sized>(
    state: &GrowthState,
    pair: &TrianglePair,
    field: &G,
    resamples: usize,
) -> Result<f64> {
    let p = &state.params;
    let omega = SiteSet::square(2 * p.n);
    let a: SiteSet = LatticeRaster::of_polygon(&state.polygon()).sites().filter(|v| omega.contains(*v)).collect();
    let b: SiteSet = pair
        .t
        .lattice_points()
        .into_iter()
        .map(|(x, y)| Site::new(x, y))
        .filter(|v| omega.contains(*v) && !a.contains(*v))
        .collect();
    let mut revealed = SiteSet::new();
    for t in state.decisions.iter().map(|d| d.pair.t_star).chain([pair.t_star]) {
        for (x, y) in t.lattice_points() {
            revealed.insert(Site::new(x, y));
        }
    }
    let eps = p.epsilon;
    let mut total = 0.0;
    for k in 0..resamples.max(1) {
        let seed = derive_seed(p.seed, &[pair.stage as u64, pair.index as u64, k as u64]);
        let f = |v: Site| eps * if revealed.contains(v) { field.h(v) } else { gaussian_at(seed, v.x, v.y) };
        total += gamma_increment(&a, &b, &omega, &f, Beta::Infinite)?;
    }
    Ok(total / resamples.max(1) as f64)
}

/// Summary of a finished growth run.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthReport {
    pub params: GrowthParams,
    pub p_star: Vec<Point>,
    pub lattice_set: LatticeRaster,
    pub perimeter: f64,
    pub lattice_boundary: usize,
    pub gamma_value: f64,
    pub certificate_ratio: f64,
    pub decisions: Vec<Decision>,
    pub stage_stats: Vec<StageStat>,
    pub violations: Vec<Violation>,
}

impl GrowthReport {
    pub fn sides(&self) -> usize {
        self.p_star.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "N": self.params.n,
            "eps": self.params.epsilon,
            "m": self.params.m_param,
            "seed": self.params.seed,
            "mode": self.params.mode.to_string(),
            "n_star": self.params.n_star,
            "sides": self.sides(),
            "perimeter": self.perimeter,
            "lattice_boundary": self.lattice_boundary,
            "gamma_value": self.gamma_value,
            "ratio": self.certificate_ratio,
            "accepted": self.decisions.iter().filter(|d| d.z).count(),
            "violations": self.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        })
    }

    /// One `x y` line per vertex.
    pub fn vertex_dump(&self) -> String {
        self.p_star.iter().map(|p| format!("{:.17e} {:.17e}\n", p.x, p.y)).collect()
    }
}

/// Grows to `P_{n*}` and reports, validating after every stage.
///
/// Validation failures abort with [`Error::Violation`] naming the broken property.
pub fn run<G: GaussianSource + ?Sized>(state: &mut GrowthState, field: &G) -> Result<GrowthReport> {
    let mut violations = validate(state);
    while violations.is_empty() && !state.is_finished() {
        let stage = state.stage();
        while state.stage() == stage {
            state.step(field)?;
        }
        violations = validate(state);
    }
    if let Some(v) = violations.first() {
        return Err(Error::Violation(v.to_string()));
    }
    Ok(report(state, field))
}

/// Report for the current polygon without validation.
pub fn report<G: GaussianSource + ?Sized>(state: &GrowthState, field: &G) -> GrowthReport {
    let p_star = state.polygon();
    let lattice_set = LatticeRaster::of_polygon(&p_star);
    let lattice_boundary = lattice_set.boundary_size();
    let gamma_value = state.params.epsilon * lattice_set.sum(field);
    GrowthReport {
        params: state.params.clone(),
        perimeter: perimeter(&p_star),
        certificate_ratio: gamma_value / lattice_boundary as f64,
        p_star,
        lattice_set,
        lattice_boundary,
        gamma_value,
        decisions: state.decisions.clone(),
        stage_stats: state.stats.clone(),
        violations: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{DisorderField, LazyField};

    fn lattice(n: i64, eps: f64) -> GrowthParams {
        GrowthParams::new(n, eps, 0.5, 1, GrowthMode::LatticeSimplified).unwrap()
    }

    #[test]
    fn parameters() {
        assert_eq!(n_star(256), 2);
        assert_eq!(n_star(255), 1);
        assert_eq!(n_star(15), 0);
        assert!((default_delta(0.1, 0.5) - 1.357_208_808_297_453e-3).abs() < 1e-15);
        let s = init_growth(lattice(4, 0.5));
        assert_eq!(s.polygon()[0], Point::new(-4., -4.));
        assert_eq!(s.propose().side, [Point::new(-4., -4.), Point::new(4., -4.)]);
    }

    #[test]
    fn unit_triangle_geometry() {
        let p = lattice(1, 1.0).with_delta(0.5);
        let pair = TrianglePair::new(&p, 1, 1, Point::new(0., 0.), Point::new(4., 0.));
        assert_eq!(pair.r, 1.0);
        assert!((pair.t.area() - 0.5).abs() < 1e-15);
        assert_eq!(pair.apex(), Point::new(2., -0.5));
        let star_height = (pair.t_star.0[0].y - pair.apex().y).abs();
        assert!((star_height - 0.5 / 3.0).abs() < 1e-15);
        for v in pair.t_star.0 {
            assert!(pair.t.distance_to_segment(v, v) < 1e-15);
        }
    }

    #[test]
    fn continuum_triangle_area_and_perimeter_increment() {
        let eps: f64 = 0.3;
        let p = GrowthParams::new(64, eps, 0.5, 0, GrowthMode::Continuum).unwrap();
        let l = 12.0;
        let pair = TrianglePair::new(&p, 1, 1, Point::new(0., 0.), Point::new(l, 0.));
        assert!((pair.t.area() - eps.powf(2.0 / 3.0) * l * l / 32.0).abs() < 1e-12);
        let [p1, apex, p3] = pair.t.0;
        let increment = p1.dist(apex) + apex.dist(p3) - p1.dist(p3);
        assert!(increment < eps.powf(4.0 / 3.0) * l / 16.0);
    }

    #[test]
    fn all_accept_and_all_reject() {
        let field = LazyField { seed: 0 };
        let mut acc = init_growth(lattice(16, 0.5).with_n_star(2).with_delta(0.2));
        let mut rej = acc.clone();
        for _ in 0..4 {
            acc.force(true, &field);
            rej.force(false, &field);
        }
        assert_eq!(acc.polygon().len(), 16);
        assert_eq!(rej.polygon().len(), 16);
        assert!(validate(&acc).is_empty() && validate(&rej).is_empty());
        let square = LatticeRaster::of_polygon(&rej.polygon());
        assert_eq!(square.to_site_set(), SiteSet::square(16));
        assert_eq!(crate::geom::signed_area(&rej.polygon()), 32.0 * 32.0);
        let grown = crate::geom::signed_area(&acc.polygon()) - 32.0 * 32.0;
        assert!((grown - 4.0 * 0.2 * 8.0 * 8.0).abs() < 1e-9);
    }

    #[test]
    fn acceptance_rules() {
        let p = lattice(64, 1.0).with_delta(0.5);
        let state = init_growth(p);
        let pair = state.propose();
        assert!(accept(&state, &pair, &DisorderField::constant(200, 1.0, 10.0)).unwrap());
        assert!(!accept(&state, &pair, &DisorderField::constant(200, 1.0, -10.0)).unwrap());
        let tiny = init_growth(lattice(256, 0.2));
        let pair = tiny.propose();
        assert!(pair.t_star.lattice_points().is_empty());
        assert!(!accept(&tiny, &pair, &DisorderField::constant(600, 1.0, 10.0)).unwrap());
    }

    #[test]
    fn zero_disorder_keeps_the_square() {
        let mut s = init_growth(lattice(16, 0.0));
        let field = LazyField { seed: 5 };
        let r = run(&mut s, &field).unwrap();
        assert_eq!(r.lattice_set.to_site_set(), SiteSet::square(16));
        assert_eq!(r.gamma_value, 0.0);
        assert_eq!(r.certificate_ratio, 0.0);
        let mut s = init_growth(lattice(16, 0.0).with_n_star(3));
        let r = run(&mut s, &field).unwrap();
        assert!(r.decisions.iter().all(|d| !d.z));
        assert_eq!(r.sides(), 64);
    }

    #[test]
    fn ising_rule_runs_on_a_tiny_box() {
        let p = GrowthParams::new(3, 1.0, 0.5, 7, GrowthMode::IsingGround { resamples: 2 })
            .unwrap()
            .with_delta(0.8)
            .with_n_star(2);
        let mut s = init_growth(p);
        let r = run(&mut s, &LazyField { seed: 7 }).unwrap();
        assert_eq!(r.decisions.len(), 4);
    }
}
