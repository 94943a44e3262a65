use serde::{Deserialize, Serialize};

use super::{Curve, ON_CURVE_TOL};
use crate::error::{Error, Result};
use crate::geom::{clip_convex, is_convex_ccw, is_simple_polygon, orient, segments_intersect, Point};

/// `(η′, S₁, S₂)`: `η′` splits `S₁` and `η′η` splits `S₂`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveWitness {
    pub eta_prime: Curve,
    pub s1: Vec<Point>,
    pub s2: Vec<Point>,
}

/// Smallest signed distance from `p` to the edge lines of a counter-clockwise convex polygon.
fn depth(p: Point, s: &[Point]) -> f64 {
    let n = s.len();
    (0..n)
        .map(|i| {
            let (a, b) = (s[i], s[(i + 1) % n]);
            orient(a, b, p) / a.dist(b)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Whether an open curve has no self-intersections.
pub fn is_simple(eta: &Curve) -> bool {
    if eta.closed {
        return is_simple_polygon(&eta.vertices);
    }
    let v = &eta.vertices;
    if v.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    let m = v.len().saturating_sub(1);
    for i in 0..m {
        for j in i + 1..m {
            let (a, b, c, d) = (v[i], v[i + 1], v[j], v[j + 1]);
            if j == i + 1 {
                if orient(a, b, d) == 0.0 && (a - b).dot(d - b) > 0.0 {
                    return false;
                }
            } else if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Whether the open curve `η` splits the open convex polygon `S`: its endpoints
/// lie on `∂S` and every other point lies in `S`.
pub fn is_splitting(eta: &Curve, s: &[Point]) -> bool {
    if eta.closed || eta.vertices.is_empty() || !is_convex_ccw(s) {
        return false;
    }
    let v = &eta.vertices;
    let on_boundary = |p: Point| depth(p, s).abs() <= ON_CURVE_TOL;
    let inside = |p: Point| depth(p, s) > ON_CURVE_TOL;
    if v.len() == 1 {
        return on_boundary(v[0]);
    }
    let n = v.len();
    on_boundary(v[0])
        && on_boundary(v[n - 1])
        && v[1..n - 1].iter().all(|&p| inside(p))
        && inside(v[0].lerp(v[1], 0.5))
        && inside(v[n - 2].lerp(v[n - 1], 0.5))
        && is_simple(eta)
}

/// Whether `witness` certifies `η` as a good curve.
pub fn is_good(eta: &Curve, witness: &CurveWitness) -> Result<bool> {
    let tau = witness.eta_prime.concat(eta)?;
    Ok(is_simple(eta) && is_splitting(&witness.eta_prime, &witness.s1) && is_splitting(&tau, &witness.s2))
}

/// A good curve cut into pieces with convex exit sets and a witness per piece.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodPartition {
    pub pieces: Vec<Curve>,
    pub exit_sets: Vec<Vec<Point>>,
    pub witnesses: Vec<CurveWitness>,
}

/// Parameter where the segment `p→q` enters the convex polygon `s`, given `q` inside.
fn entry_parameter(p: Point, q: Point, s: &[Point]) -> f64 {
    let n = s.len();
    let mut t0: f64 = 0.0;
    for i in 0..n {
        let (a, b) = (s[i], s[(i + 1) % n]);
        let (dp, dq) = (orient(a, b, p), orient(a, b, q));
        if dp < 0.0 && dq > dp {
            t0 = t0.max(dp / (dp - dq));
        }
    }
    t0
}

/// Witnesses for the pieces `η_1…η_n` of a good curve, following the exit-set construction:
/// `γ_i` is the part of `η_{i−1}` after its last entrance into `O_i` (with `η_0 = η′`,
/// `O_0 = S₁`), and `(γ_i, O_{i−1}∩O_i, O_i)` certifies `η_i`. Exit sets are first
/// intersected with `S₂`.
pub fn partition_witnesses(witness: &CurveWitness, pieces: &[Curve], exit_sets: &[Vec<Point>]) -> Result<GoodPartition> {
    if pieces.len() != exit_sets.len() || pieces.is_empty() {
        return Err(Error::InvalidArgument("one exit set per piece is required".into()));
    }
    let sets: Vec<Vec<Point>> = exit_sets.iter().map(|o| clip_convex(o, &witness.s2)).collect();
    let mut witnesses = Vec::with_capacity(pieces.len());
    for (i, o) in sets.iter().enumerate() {
        let (prev, prev_set) = if i == 0 { (&witness.eta_prime, &witness.s1) } else { (&pieces[i - 1], &sets[i - 1]) };
        let v = &prev.vertices;
        let mut k = v.len() - 1;
        while k > 0 && depth(v[k - 1], o) > 0.0 {
            k -= 1;
        }
        if k == 0 {
            return Err(Error::Domain(format!("piece {} starts inside the next exit set", i)));
        }
        let y = v[k - 1].lerp(v[k], entry_parameter(v[k - 1], v[k], o));
        let mut gamma = vec![y];
        gamma.extend(v[k..].iter().copied().filter(|&p| p != y));
        witnesses.push(CurveWitness {
            eta_prime: Curve::open(gamma),
            s1: clip_convex(prev_set, o),
            s2: o.clone(),
        });
    }
    Ok(GoodPartition { pieces: pieces.to_vec(), exit_sets: sets, witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn square() -> Vec<Point> {
        vec![p(0., 0.), p(4., 0.), p(4., 4.), p(0., 4.)]
    }

    #[test]
    fn chords_split() {
        assert!(is_splitting(&Curve::open(vec![p(0., 1.), p(4., 3.)]), &square()));
        assert!(is_splitting(&Curve::open(vec![p(0., 1.), p(2., 2.), p(4., 3.)]), &square()));
        assert!(!is_splitting(&Curve::open(vec![p(0., 1.), p(5., 2.), p(4., 3.)]), &square()));
        assert!(!is_splitting(&Curve::open(vec![p(0., 0.), p(4., 0.)]), &square()));
    }

    #[test]
    fn splitting_is_good_with_a_point_witness() {
        let eta = Curve::open(vec![p(0., 1.), p(2., 2.), p(4., 3.)]);
        let w = CurveWitness {
            eta_prime: Curve::open(vec![p(0., 1.)]),
            s1: vec![p(-1., 0.), p(0., 0.), p(0., 2.), p(-1., 2.)],
            s2: square(),
        };
        assert!(is_good(&eta, &w).unwrap());
        let bad = CurveWitness { eta_prime: Curve::open(vec![p(1., 1.)]), ..w };
        assert!(is_good(&eta, &bad).is_err());
    }
}
