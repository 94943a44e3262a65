//! Randomized self-checks of the curve identities, as run by `curve check`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use super::generate::{good_curve, monotone_chord, random_polyline, skeleton, strip_partition};
use super::{
    changing_arc_residual, d_nu_raster, decompose_check, interpolation_bound, is_good, is_splitting, nu_terms,
    skeleton_length_check, winding_number, CellMeasure, Curve,
};
use crate::error::{Error, Result};
use crate::field::LazyField;
use crate::geom::Point;
use crate::rng::derive_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Coarsening,
    Splitting,
    Good,
    Distance,
    Skeleton,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coarsening" => Ok(Suite::Coarsening),
            "splitting" => Ok(Suite::Splitting),
            "good" => Ok(Suite::Good),
            "distance" => Ok(Suite::Distance),
            "skeleton" => Ok(Suite::Skeleton),
            _ => Err(Error::InvalidArgument(format!("unknown curve suite {s:?}"))),
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Suite::Coarsening => "coarsening",
            Suite::Splitting => "splitting",
            Suite::Good => "good",
            Suite::Distance => "distance",
            Suite::Skeleton => "skeleton",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub checks: usize,
    /// Largest observed value of the suite's key statistic (residual, |w|, ratio or deficit).
    pub worst: f64,
    pub violations: Vec<String>,
}

impl SuiteReport {
    fn record(&mut self, stat: f64, ok: bool, instance: impl FnOnce() -> String) {
        self.checks += 1;
        self.worst = self.worst.max(stat);
        if !ok {
            self.violations.push(instance());
        }
    }
}

/// Tolerance for identities evaluated against the Gaussian cell measure.
pub const CELL_TOL: f64 = 1e-9;
/// Relative slack of the raster distance against the interpolation bound.
pub const DISTANCE_SLACK: f64 = 0.02;
pub const DISTANCE_RESOLUTION: u32 = 8;

fn describe(points: &[Point]) -> String {
    points.iter().map(|p| format!("({:.17e},{:.17e})", p.x, p.y)).collect::<Vec<_>>().join(" ")
}

/// Largest `|w|` over a probe grid covering `η`, skipping points on the curve.
pub fn max_winding(eta: &Curve, per_unit: f64) -> i64 {
    let (lo, hi) = eta.bounding_box();
    let nx = ((hi.x - lo.x) * per_unit).ceil().max(1.0) as usize + 2;
    let ny = ((hi.y - lo.y) * per_unit).ceil().max(1.0) as usize + 2;
    let mut worst = 0;
    for j in 0..=ny {
        for i in 0..=nx {
            let z = Point::new(
                lo.x - 1.0 / per_unit + (i as f64 + 0.37) / per_unit,
                lo.y - 1.0 / per_unit + (j as f64 + 0.61) / per_unit,
            );
            if let Ok(w) = winding_number(z, eta) {
                worst = worst.max(w.abs());
            }
        }
    }
    worst
}

/// Random breakpoints strictly inside `0..len`.
fn breakpoints(rng: &mut ChaCha8Rng, len: usize) -> Vec<usize> {
    let mut b: Vec<usize> = (1..len - 1).filter(|_| rng.gen_bool(0.4)).collect();
    b.dedup();
    b
}

/// Coarsening decompositions (`trials`) and changing-arc instances (`arcs`) under both measures.
pub fn coarsening(trials: usize, arcs: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::default();
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0, t as u64]));
        let k = rng.gen_range(4..13);
        let eta = Curve { vertices: random_polyline(&mut rng, k, 12.0), closed: rng.gen_bool(0.5) };
        let bps = breakpoints(&mut rng, k);
        let field = LazyField { seed: derive_seed(seed, &[1, t as u64]) };
        let area = decompose_check(&eta, &bps, CellMeasure::SignedArea).expect("valid breakpoints").residual;
        let cells = decompose_check(&eta, &bps, CellMeasure::GaussianField(&field)).expect("valid breakpoints").residual;
        rep.record(area.abs().max(cells.abs()), area == 0.0 && cells.abs() <= CELL_TOL, || {
            format!("coarsening residuals {area} / {cells}: {} breakpoints {bps:?}", describe(&eta.vertices))
        });
        let rev = super::exact_sum(nu_terms(&eta, CellMeasure::SignedArea).into_iter().chain(nu_terms(&eta.reversed(), CellMeasure::SignedArea)));
        rep.record(rev.abs(), rev == 0.0, || format!("reversal residual {rev}: {}", describe(&eta.vertices)));
    }
    for t in 0..arcs {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[2, t as u64]));
        let pts = random_polyline(&mut rng, 2, 12.0);
        let (p, q) = (pts[0], pts[1]);
        let arc = |rng: &mut ChaCha8Rng, from: Point, to: Point| {
            let mut v = vec![from];
            let k = rng.gen_range(0..4);
            v.extend(random_polyline(rng, k, 12.0));
            v.push(to);
            Curve::open(v)
        };
        let start = Point::new(rng.gen_range(0.0..12.0), rng.gen_range(0.0..12.0));
        let end = Point::new(rng.gen_range(0.0..12.0), rng.gen_range(0.0..12.0));
        let e1 = arc(&mut rng, start, p);
        let e2 = arc(&mut rng, p, q);
        let e3 = arc(&mut rng, p, q);
        let e4 = arc(&mut rng, q, end);
        let field = LazyField { seed: derive_seed(seed, &[3, t as u64]) };
        let area = changing_arc_residual([&e1, &e2, &e3, &e4], CellMeasure::SignedArea).expect("arcs meet");
        let cells = changing_arc_residual([&e1, &e2, &e3, &e4], CellMeasure::GaussianField(&field)).expect("arcs meet");
        rep.record(area.abs().max(cells.abs()), area == 0.0 && cells.abs() <= CELL_TOL, || {
            format!("changing-arc residuals {area} / {cells}: {} | {}", describe(&e2.vertices), describe(&e3.vertices))
        });
    }
    rep
}

/// Monotone chords of random convex polygons: certified splitting and `|w| ≤ 1`.
pub fn splitting(trials: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::default();
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[4, t as u64]));
        let corners = rng.gen_range(3..10);
        let s = super::generate::convex_polygon(&mut rng, Point::new(0.0, 0.0), 10.0, corners);
        let interior = rng.gen_range(0..10);
        let eta = monotone_chord(&mut rng, &s, interior);
        let split = is_splitting(&eta, &s);
        let w = max_winding(&eta, 2.0);
        rep.record(w as f64, split && w <= 1, || format!("splitting={split} max|w|={w}: {}", describe(&eta.vertices)));
    }
    rep
}

/// Good curves with witnesses, their strip partitions, and `|w| ≤ 3`.
pub fn good(trials: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::default();
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[5, t as u64]));
        let (eta, witness) = good_curve(&mut rng, Point::new(0.0, 0.0), 10.0);
        let certified = is_good(&eta, &witness).unwrap_or(false);
        let w = max_winding(&eta, 2.0);
        rep.record(w as f64, certified && w <= 3, || format!("good={certified} max|w|={w}: {}", describe(&eta.vertices)));
        let pieces = rng.gen_range(1..6);
        match strip_partition(&mut rng, &eta, &witness, pieces) {
            Some(part) => {
                for (piece, wit) in part.pieces.iter().zip(&part.witnesses) {
                    let ok = is_good(piece, wit).unwrap_or(false);
                    let w = max_winding(piece, 2.0);
                    rep.record(w as f64, ok && w <= 3, || format!("piece good={ok} max|w|={w}: {}", describe(&piece.vertices)));
                }
            }
            None => rep.record(0.0, false, || format!("no strip partition: {}", describe(&eta.vertices))),
        }
    }
    rep
}

/// Raster distance against the interpolation bound on random closed polygons and perturbations.
pub fn distance(trials: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::default();
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[6, t as u64]));
        let k = rng.gen_range(3..9);
        let v = random_polyline(&mut rng, k, 8.0);
        let w: Vec<Point> = v
            .iter()
            .map(|p| *p + Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let d = d_nu_raster(&Curve::closed(v.clone()), &Curve::closed(w.clone()), DISTANCE_RESOLUTION).expect("resolution");
        let bound = interpolation_bound(&v, &w).expect("equal lengths");
        let ratio = if bound > 0.0 { d / bound } else { 0.0 };
        rep.record(ratio, d <= bound * (1.0 + DISTANCE_SLACK), || {
            format!("d={d} bound={bound}: v={} w={}", describe(&v), describe(&w))
        });
    }
    rep
}

/// Admissible skeletons for every even `κ ≤ 64` and `ρ ∈ {0.01, 0.05, 0.1}`, `trials` each.
pub fn skeletons(trials: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::default();
    for kappa in (2..=64).step_by(2) {
        for (ri, rho) in [0.01, 0.05, 0.1].into_iter().enumerate() {
            for t in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[7, kappa as u64, ri as u64, t as u64]));
                let r = rng.gen_range(1.0..100.0);
                let v = skeleton(&mut rng, kappa, rho, r);
                match skeleton_length_check(&v, rho, r) {
                    Ok(c) => rep.record(c.bound - c.lhs, c.satisfied, || {
                        format!("kappa={kappa} rho={rho} R={r} lhs={} bound={}: {}", c.lhs, c.bound, describe(&v))
                    }),
                    Err(e) => rep.record(f64::INFINITY, false, || format!("generator produced {e}")),
                }
            }
        }
    }
    rep
}

/// Runs a suite with `trials` random instances.
pub fn run_suite(suite: Suite, trials: usize, seed: u64) -> SuiteReport {
    match suite {
        Suite::Coarsening => coarsening(trials, trials.div_ceil(2), seed),
        Suite::Splitting => splitting(trials, seed),
        Suite::Good => good(trials, seed),
        Suite::Distance => distance(trials, seed),
        Suite::Skeleton => skeletons(trials, seed),
    }
}
