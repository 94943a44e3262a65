//! Random instances for the curve identities and winding bounds.

use rand::Rng;

use super::split::{partition_witnesses, CurveWitness, GoodPartition};
use super::Curve;
use crate::geom::{clip_half_plane, orient, Point};

/// Counter-clockwise convex polygon inscribed in a random ellipse.
pub fn convex_polygon<R: Rng>(rng: &mut R, center: Point, radius: f64, corners: usize) -> Vec<Point> {
    let (a, b) = (radius * rng.gen_range(0.6..1.0), radius * rng.gen_range(0.6..1.0));
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let gap = std::f64::consts::TAU / corners as f64;
    let (c, s) = (phi.cos(), phi.sin());
    (0..corners)
        .map(|k| {
            let t = gap * (k as f64 + rng.gen_range(0.15..0.85));
            let (x, y) = (a * t.cos(), b * t.sin());
            Point::new(center.x + c * x - s * y, center.y + s * x + c * y)
        })
        .collect()
}

fn depth(p: Point, s: &[Point]) -> f64 {
    let n = s.len();
    (0..n).map(|i| orient(s[i], s[(i + 1) % n], p) / s[i].dist(s[(i + 1) % n])).fold(f64::INFINITY, f64::min)
}

fn boundary_point<R: Rng>(rng: &mut R, s: &[Point], edge: usize) -> Point {
    s[edge].lerp(s[(edge + 1) % s.len()], rng.gen_range(0.2..0.8))
}

/// A chord of `s` between two boundary points, bent through `interior` points
/// whose projections on the chord strictly increase.
pub fn monotone_chord<R: Rng>(rng: &mut R, s: &[Point], interior: usize) -> Curve {
    let n = s.len();
    let e1 = rng.gen_range(0..n);
    let e2 = (e1 + rng.gen_range(1..n)) % n;
    let (a, b) = (boundary_point(rng, s, e1), boundary_point(rng, s, e2));
    let d = b - a;
    let normal = Point::new(-d.y, d.x) * (1.0 / d.norm());
    let mut ts: Vec<f64> = (0..interior).map(|_| rng.gen_range(0.05..0.95)).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut v = vec![a];
    for t in ts {
        let base = a.lerp(b, t);
        let margin = 1e-6 * d.norm();
        let mut offset = rng.gen_range(-0.5..0.5) * d.norm();
        let mut q = base + normal * offset;
        let mut tries = 0;
        while depth(q, s) <= margin && tries < 60 {
            offset /= 2.0;
            q = base + normal * offset;
            tries += 1;
        }
        if depth(q, s) > margin {
            v.push(q);
        }
    }
    v.push(b);
    Curve::open(v)
}

/// Direction along which a monotone chord advances.
fn chord_axis(c: &Curve) -> Point {
    let d = c.end() - c.start();
    d * (1.0 / d.norm())
}

/// A good curve `η` with witness: a monotone chord `τ` of a random convex `S₂`
/// is cut at an interior vertex `x₁` into `η′η`, and `S₁` is the part of `S₂`
/// behind the line through `x₁` orthogonal to the chord.
pub fn good_curve<R: Rng>(rng: &mut R, center: Point, radius: f64) -> (Curve, CurveWitness) {
    loop {
        let corners = rng.gen_range(4..9);
        let s2 = convex_polygon(rng, center, radius, corners);
        let interior = rng.gen_range(3..9);
        let tau = monotone_chord(rng, &s2, interior);
        let m = tau.vertices.len();
        if m < 4 {
            continue;
        }
        let k = rng.gen_range(1..m - 1);
        let x1 = tau.vertices[k];
        let u = chord_axis(&tau);
        let s1 = clip_half_plane(&s2, x1, x1 + Point::new(-u.y, u.x));
        let eta_prime = Curve::open(tau.vertices[..=k].to_vec());
        let eta = Curve::open(tau.vertices[k..].to_vec());
        return (eta, CurveWitness { eta_prime, s1, s2 });
    }
}

/// Cuts a monotone good curve at `u = t` levels and builds strip exit sets
/// `O_i = {l_i < u < t_i}` with `l_i` between the projections of `x_{i−1}` and `x_i`.
pub fn strip_partition<R: Rng>(rng: &mut R, eta: &Curve, witness: &CurveWitness, pieces: usize) -> Option<GoodPartition> {
    let tau = witness.eta_prime.concat(eta).ok()?;
    let u = chord_axis(&tau);
    let origin = tau.start();
    let proj = |p: Point| (p - origin).dot(u);
    let (u_start, u_end) = (proj(eta.start()), proj(eta.end()));
    let mut cuts: Vec<f64> = (1..pieces).map(|_| rng.gen_range(u_start..u_end)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut levels = vec![u_start];
    levels.extend(cuts);
    levels.push(u_end);

    // Vertices of η with the cut points inserted.
    let mut pieces_out: Vec<Curve> = Vec::new();
    let mut current = vec![eta.start()];
    let mut level = 1;
    for w in eta.vertices.windows(2) {
        let (p, q) = (w[0], w[1]);
        while level < levels.len() - 1 && proj(q) > levels[level] {
            let t = (levels[level] - proj(p)) / (proj(q) - proj(p));
            let x = p.lerp(q, t);
            if current.last() != Some(&x) {
                current.push(x);
            }
            pieces_out.push(Curve::open(std::mem::replace(&mut current, vec![x])));
            level += 1;
        }
        if current.last() != Some(&q) {
            current.push(q);
        }
    }
    pieces_out.push(Curve::open(current));
    if pieces_out.iter().any(|c| c.vertices.len() < 2) {
        return None;
    }

    let starts: Vec<f64> = std::iter::once(proj(tau.start())).chain(levels.iter().copied()).collect();
    let far = 4.0 * tau.length() + 1.0;
    let n = pieces_out.len();
    let sets = (0..n)
        .map(|i| {
            let lo = rng.gen_range(starts[i]..starts[i + 1]).max(starts[i] + 1e-3 * (starts[i + 1] - starts[i]));
            let hi = if i + 1 == n { far } else { starts[i + 2] };
            strip(origin, u, lo, hi, far)
        })
        .collect::<Vec<_>>();
    partition_witnesses(witness, &pieces_out, &sets).ok()
}

/// Counter-clockwise rectangle `{lo < u < hi, |u⊥| < far}` in the frame at `origin`.
fn strip(origin: Point, u: Point, lo: f64, hi: f64, far: f64) -> Vec<Point> {
    let perp = Point::new(-u.y, u.x);
    let at = |s: f64, t: f64| origin + u * s + perp * t;
    vec![at(lo, -far), at(hi, -far), at(hi, far), at(lo, far)]
}

/// Random polyline with `k` vertices in `[0, size]²`.
pub fn random_polyline<R: Rng>(rng: &mut R, k: usize, size: f64) -> Vec<Point> {
    (0..k).map(|_| Point::new(rng.gen_range(0.0..size), rng.gen_range(0.0..size))).collect()
}

/// Admissible skeleton: `v₀ = 0`, `v_κ = (R, 0)`, vertices on lines `y = kρR` with unit level steps.
pub fn skeleton<R: Rng>(rng: &mut R, kappa: usize, rho: f64, r: f64) -> Vec<Point> {
    assert!(kappa >= 2 && kappa.is_multiple_of(2), "skeletons need an even number of steps");
    let mut steps: Vec<i64> = (0..kappa).map(|j| if j < kappa / 2 { 1 } else { -1 }).collect();
    for i in (1..steps.len()).rev() {
        steps.swap(i, rng.gen_range(0..=i));
    }
    let mut level = 0;
    let mut v = vec![Point::new(0.0, 0.0)];
    for (j, s) in steps.iter().enumerate() {
        level += s;
        let x = if j + 1 == kappa { r } else { rng.gen_range(-2.0 * r..3.0 * r) };
        v.push(Point::new(x, level as f64 * rho * r));
    }
    v
}
