use std::fmt;

use serde::{Deserialize, Serialize};

use super::{init_growth, GrowthParams, GrowthState, LatticeRaster, TrianglePair};
use crate::geom::{distance_to_boundary, perimeter, point_in_polygon, Point, Triangle, GEOM_EPS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// Two proposals of one stage meet.
    TriangleOverlap,
    /// A proposal meets the polygon outside its own side.
    TriangleEscapesSide,
    /// A proposal leaves `[−2N, 2N]²`.
    OutsideBox,
    /// Two inner regions `T*` meet.
    InnerTriangleOverlap,
    /// A rejected `T*` meets the current polygon.
    RejectedInnerMeetsPolygon,
    /// Replaying or decoding the decision flags does not give back the polygon.
    ReplayMismatch,
    /// `|∂𝖯| > √2 l(∂P) + 2q`.
    LatticeBoundary,
    /// An accepted triangle grew the perimeter by more than `(height/r)² r`.
    PerimeterIncrement,
    /// A side is shorter than the stage allows.
    ShortSide,
    /// Stage `n` does not have `4ⁿ` sides.
    SideCount,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::TriangleOverlap => "triangle-disjointness",
            ViolationKind::TriangleEscapesSide => "triangle-meets-polygon-off-side",
            ViolationKind::OutsideBox => "triangle-outside-box",
            ViolationKind::InnerTriangleOverlap => "inner-triangle-disjointness",
            ViolationKind::RejectedInnerMeetsPolygon => "rejected-inner-triangle-meets-polygon",
            ViolationKind::ReplayMismatch => "flag-replay",
            ViolationKind::LatticeBoundary => "lattice-boundary-bound",
            ViolationKind::PerimeterIncrement => "perimeter-increment",
            ViolationKind::ShortSide => "side-length",
            ViolationKind::SideCount => "side-count",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub stage: usize,
    pub index: usize,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at ({}, {}): {}", self.kind, self.stage, self.index, self.detail)
    }
}

/// Rebuilds the growth from `P_1` using the given decision flags.
pub fn replay(params: &GrowthParams, flags: &[bool]) -> GrowthState {
    let mut s = init_growth(params.clone());
    for &z in flags {
        s.force_flag(z);
    }
    s
}

/// Recovers the first `count` flags from a polygon alone, as `Z = 1` iff `T*` lies in it.
pub fn decode_flags(params: &GrowthParams, polygon: &[Point], count: usize) -> Vec<bool> {
    let mut s = init_growth(params.clone());
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let pair = s.propose();
        let [a, b, c] = pair.t_star.0;
        let centroid = Point::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0);
        let z = !pair.is_degenerate() && point_in_polygon(centroid, polygon);
        s.force_flag(z);
        out.push(z);
    }
    out
}

fn polygon_meets_triangle(polygon: &[Point], t: &Triangle, skip_edge: Option<usize>) -> bool {
    let n = polygon.len();
    (0..n)
        .filter(|&e| Some(e) != skip_edge)
        .any(|e| t.distance_to_segment(polygon[e], polygon[(e + 1) % n]) <= GEOM_EPS)
}

fn outside_strictly(p: Point, polygon: &[Point]) -> bool {
    !point_in_polygon(p, polygon) && distance_to_boundary(p, polygon) > GEOM_EPS
}

fn check_stage_polygon(params: &GrowthParams, stage: usize, v: &[Point], out: &mut Vec<Violation>) {
    let expected = 4usize.pow(stage as u32);
    let mut push = |kind, detail: String| out.push(Violation { kind, stage, index: 0, detail });
    if v.len() != expected {
        push(super::ViolationKind::SideCount, format!("{} sides, expected {expected}", v.len()));
    }
    let start = params.initial_square();
    let min_side = perimeter(&start) / 4f64.powi(stage as i32);
    let n = v.len();
    for i in 0..n {
        let l = v[i].dist(v[(i + 1) % n]);
        if l < min_side * (1.0 - 1e-9) {
            push(super::ViolationKind::ShortSide, format!("side {} has length {l} < {min_side}", i + 1));
        }
    }
    let raster = LatticeRaster::of_polygon(v);
    let bound = 2f64.sqrt() * perimeter(v) + 2.0 * n as f64;
    let b = raster.boundary_size();
    if b as f64 > bound {
        push(super::ViolationKind::LatticeBoundary, format!("|boundary| = {b} > {bound}"));
    }
}

/// Checks every geometric guarantee of the construction on the history of `state`.
pub fn validate(state: &GrowthState) -> Vec<Violation> {
    let params = &state.params;
    let mut out = Vec::new();
    let flags: Vec<bool> = state.decisions().iter().map(|d| d.z).collect();
    let reach = 2.0 * params.n as f64;
    let mut s = init_growth(params.clone());
    check_stage_polygon(params, 1, s.stage_polygon(), &mut out);
    let mut stage_pairs: Vec<TrianglePair> = Vec::new();
    let mut all_pairs: Vec<TrianglePair> = Vec::new();
    for &z in &flags {
        let pair = s.propose();
        let (stage, index) = (pair.stage, pair.index);
        let mut push = |kind, detail: String| out.push(super::Violation { kind, stage, index, detail });
        let polygon = s.polygon();
        let own_edge = 4 * (index - 1);
        let apex_escapes = !pair.is_degenerate() && !outside_strictly(pair.apex(), &polygon);
        if apex_escapes || polygon_meets_triangle(&polygon, &pair.t, Some(own_edge)) {
            push(super::ViolationKind::TriangleEscapesSide, "proposal meets the polygon away from its side".into());
        }
        for other in &stage_pairs {
            if pair.t.distance_to_triangle(&other.t) <= GEOM_EPS {
                push(super::ViolationKind::TriangleOverlap, format!("meets the proposal on side {}", other.index));
            }
        }
        if pair.t.0.iter().any(|p| p.x.abs() > reach || p.y.abs() > reach) {
            push(super::ViolationKind::OutsideBox, format!("apex at ({}, {})", pair.apex().x, pair.apex().y));
        }
        for other in &all_pairs {
            if pair.t_star.distance_to_triangle(&other.t_star) <= GEOM_EPS {
                push(
                    super::ViolationKind::InnerTriangleOverlap,
                    format!("meets the inner triangle of ({}, {})", other.stage, other.index),
                );
            }
        }
        if z {
            let [p1, apex, p3] = pair.t.0;
            let increment = p1.dist(apex) + apex.dist(p3) - p1.dist(p3);
            let ratio = pair.height / pair.r;
            if increment > ratio * ratio * pair.r + 1e-9 {
                push(super::ViolationKind::PerimeterIncrement, format!("increment {increment}"));
            }
        }
        s.force_flag(z);
        if s.stage() != stage {
            stage_pairs.clear();
            check_stage_polygon(params, s.stage(), s.stage_polygon(), &mut out);
        } else {
            stage_pairs.push(pair);
        }
        all_pairs.push(pair);
    }

    let current = state.polygon();
    for (d, &z) in state.decisions().iter().zip(&flags) {
        if !z
            && !d.pair.is_degenerate()
            && (d.pair.t_star.0.iter().any(|&p| !outside_strictly(p, &current))
            || polygon_meets_triangle(&current, &d.pair.t_star, None))
        {
            out.push(Violation {
                kind: ViolationKind::RejectedInnerMeetsPolygon,
                stage: d.pair.stage,
                index: d.pair.index,
                detail: "rejected inner triangle meets the current polygon".into(),
            });
        }
    }

    let (stage, index) = (state.stage(), state.next_index());
    if s.polygon() != current {
        out.push(Violation {
            kind: ViolationKind::ReplayMismatch,
            stage,
            index,
            detail: "replayed polygon differs".into(),
        });
    }
    if decode_flags(params, &current, flags.len()) != flags {
        out.push(Violation {
            kind: ViolationKind::ReplayMismatch,
            stage,
            index,
            detail: "flags decoded from the polygon differ".into(),
        });
    }
    if state.is_finished() {
        let n = current.len();
        if let Some(l) = (0..n).map(|i| current[i].dist(current[(i + 1) % n])).reduce(f64::min) {
            if l < 1.0 {
                out.push(Violation { kind: ViolationKind::ShortSide, stage, index, detail: format!("final side {l} < 1") });
            }
        }
    }
    out
}
