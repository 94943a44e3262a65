//! Oriented piecewise-linear curves: winding numbers, the ν functional
//! against cell measures, splitting and good curves, distance bounds.

mod distance;
pub mod generate;
mod split;
pub mod suite;

use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

pub use distance::{d_nu_raster, interpolation_bound, skeleton_length_check, SkeletonCheck, C10};
pub use split::{is_good, is_simple, is_splitting, partition_witnesses, CurveWitness, GoodPartition};

use crate::error::{Error, Result};
use crate::field::{GaussianSource, Site};
use crate::geom::{orient, point_segment_distance, Point};

/// Points closer than this to a curve have no winding number.
pub const ON_CURVE_TOL: f64 = 1e-9;
/// Deterministic shift applied to cell centers that sit on the curve.
pub const PROBE_SHIFT: Point = Point::new(1e-7, std::f64::consts::PI * 1e-7);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub vertices: Vec<Point>,
    pub closed: bool,
}

impl Curve {
    pub fn open(vertices: Vec<Point>) -> Self {
        Curve { vertices, closed: false }
    }

    pub fn closed(vertices: Vec<Point>) -> Self {
        Curve { vertices, closed: true }
    }

    pub fn start(&self) -> Point {
        self.vertices[0]
    }

    pub fn end(&self) -> Point {
        if self.closed {
            self.vertices[0]
        } else {
            *self.vertices.last().expect("nonempty curve")
        }
    }

    /// Segments in traversal order, including the closing one of a closed curve.
    pub fn segments(&self) -> Vec<(Point, Point)> {
        let v = &self.vertices;
        let mut out: Vec<(Point, Point)> = v.windows(2).map(|w| (w[0], w[1])).collect();
        if self.closed && v.len() > 1 {
            out.push((v[v.len() - 1], v[0]));
        }
        out
    }

    /// `η⁻`.
    pub fn reversed(&self) -> Curve {
        let mut v = self.vertices.clone();
        if self.closed {
            v[1..].reverse();
        } else {
            v.reverse();
        }
        Curve { vertices: v, closed: self.closed }
    }

    /// `ηγ`; the end of `self` must coincide with the start of `other` to `1e-9`.
    pub fn concat(&self, other: &Curve) -> Result<Curve> {
        if self.closed || other.closed {
            return Err(Error::Domain("only open curves can be concatenated".into()));
        }
        if self.end().dist(other.start()) > ON_CURVE_TOL {
            return Err(Error::Domain("concatenated curves must meet end to start".into()));
        }
        let mut v = self.vertices.clone();
        v.extend_from_slice(&other.vertices[1..]);
        Ok(Curve::open(v))
    }

    pub fn length(&self) -> f64 {
        self.segments().iter().map(|(a, b)| a.dist(*b)).sum()
    }

    pub fn distance_to(&self, p: Point) -> f64 {
        match self.vertices.as_slice() {
            [] => f64::INFINITY,
            [only] => p.dist(*only),
            _ => self.segments().iter().map(|&(a, b)| point_segment_distance(p, a, b)).fold(f64::INFINITY, f64::min),
        }
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    /// Curve file: one `x y` line per vertex and a `#closed` trailer for closed curves.
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for p in &self.vertices {
            writeln!(out, "{:.17e} {:.17e}", p.x, p.y)?;
        }
        if self.closed {
            writeln!(out, "#closed")?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(input: R) -> Result<Curve> {
        let mut vertices = Vec::new();
        let mut closed = false;
        for (k, line) in input.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if t == "#closed" {
                closed = true;
                continue;
            }
            if closed {
                return Err(Error::Parse { line: k + 1, msg: "vertex after #closed".into() });
            }
            let mut it = t.split_whitespace();
            let mut coord = || -> Result<f64> {
                it.next()
                    .ok_or_else(|| Error::Parse { line: k + 1, msg: "expected `x y`".into() })?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse { line: k + 1, msg: e.to_string() })
            };
            let p = Point::new(coord()?, coord()?);
            if it.next().is_some() {
                return Err(Error::Parse { line: k + 1, msg: "expected `x y`".into() });
            }
            vertices.push(p);
        }
        if vertices.is_empty() {
            return Err(Error::Parse { line: 0, msg: "empty curve".into() });
        }
        Ok(Curve { vertices, closed })
    }
}

/// Appends the segment from the end back to the start. Closed input is returned unchanged.
pub fn close_curve(eta: &Curve) -> Curve {
    if eta.closed {
        return eta.clone();
    }
    let mut v = eta.vertices.clone();
    if v.len() > 1 && v[0] == v[v.len() - 1] {
        v.pop();
    }
    Curve::closed(v)
}

/// Signed crossing count of the ray to `+x`, half-open in `y`; no proximity check.
fn crossing_winding(z: Point, segments: &[(Point, Point)]) -> i64 {
    let mut w = 0;
    for &(a, b) in segments {
        if a.y <= z.y && z.y < b.y && orient(a, b, z) > 0.0 {
            w += 1;
        } else if b.y <= z.y && z.y < a.y && orient(a, b, z) < 0.0 {
            w -= 1;
        }
    }
    w
}

/// `w(z, η)` of the closed curve `close_curve(η)`.
pub fn winding_number(z: Point, eta: &Curve) -> Result<i64> {
    let c = close_curve(eta);
    if c.distance_to(z) <= ON_CURVE_TOL {
        return Err(Error::Domain(format!("point ({}, {}) lies on the curve", z.x, z.y)));
    }
    Ok(crossing_winding(z, &c.segments()))
}

/// Winding at `z`, shifted by [`PROBE_SHIFT`] first when `z` is on the curve.
pub fn probe_winding(z: Point, closed: &Curve) -> i64 {
    let z = if closed.distance_to(z) <= ON_CURVE_TOL { z + PROBE_SHIFT } else { z };
    crossing_winding(z, &closed.segments())
}

/// A measure on unit lattice cells, or Lebesgue measure through the shoelace formula.
#[derive(Clone, Copy)]
pub enum CellMeasure<'a> {
    /// Cell `R_v` centered at `v` carries mass `h_v`.
    GaussianField(&'a dyn GaussianSource),
    SignedArea,
}

/// The individual contributions whose sum is `ν(η)`: per-cell `w·h_v`, or
/// half the shoelace cross products.
pub fn nu_terms(eta: &Curve, mu: CellMeasure<'_>) -> Vec<f64> {
    let c = close_curve(eta);
    match mu {
        CellMeasure::SignedArea => c.segments().iter().map(|(a, b)| a.cross(*b) / 2.0).collect(),
        CellMeasure::GaussianField(field) => {
            if c.vertices.len() < 2 {
                return Vec::new();
            }
            let (lo, hi) = c.bounding_box();
            let mut out = Vec::new();
            for y in lo.y.floor() as i64..=hi.y.ceil() as i64 {
                for x in lo.x.floor() as i64..=hi.x.ceil() as i64 {
                    let w = probe_winding(Point::new(x as f64, y as f64), &c);
                    if w != 0 {
                        out.push(w as f64 * field.h(Site::new(x, y)));
                    }
                }
            }
            out
        }
    }
}

/// `ν(η) = Σ_𝒞 w(𝒞, η) W(𝒞)`.
pub fn nu(eta: &Curve, mu: CellMeasure<'_>) -> f64 {
    exact_sum(nu_terms(eta, mu))
}

/// Correctly rounded floating-point sum (Shewchuk's partials).
pub fn exact_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut i = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        partials.truncate(i);
        partials.push(x);
    }
    let mut hi = 0.0;
    while let Some(x) = partials.pop() {
        let prev = hi;
        hi = prev + x;
        let lo = x - (hi - prev);
        if lo != 0.0 {
            // Round-half-even correction against the next partial.
            if let Some(&next) = partials.last() {
                if (lo < 0.0) == (next < 0.0) {
                    let y = lo * 2.0;
                    let z = hi + y;
                    if y == z - hi {
                        hi = z;
                    }
                }
            }
            break;
        }
    }
    hi
}

/// Output of [`decompose_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub coarse: Curve,
    pub segments: Vec<Curve>,
    pub residual: f64,
}

/// Splits `η` at the given vertex indices into the chord curve `η′` and the
/// pieces `η_i`, and returns `ν(η) − ν(η′) − Σ ν(η_i)`.
///
/// The first and last vertex are always breakpoints; a closed curve is read as
/// the open path that returns to its start.
pub fn decompose_check(eta: &Curve, breakpoints: &[usize], mu: CellMeasure<'_>) -> Result<Decomposition> {
    let mut path = eta.vertices.clone();
    if eta.closed {
        path.push(path[0]);
    }
    let last = path.len() - 1;
    if breakpoints.windows(2).any(|w| w[0] >= w[1]) || breakpoints.iter().any(|&b| b > last) {
        return Err(Error::InvalidArgument("breakpoints must be strictly increasing vertex indices".into()));
    }
    let mut cuts = vec![0];
    cuts.extend(breakpoints.iter().copied().filter(|&b| b != 0 && b != last));
    cuts.push(last);
    let coarse = Curve::open(cuts.iter().map(|&i| path[i]).collect());
    let segments: Vec<Curve> = cuts.windows(2).map(|w| Curve::open(path[w[0]..=w[1]].to_vec())).collect();
    let mut terms = nu_terms(eta, mu);
    terms.extend(nu_terms(&coarse, mu).into_iter().map(|t| -t));
    for s in &segments {
        terms.extend(nu_terms(s, mu).into_iter().map(|t| -t));
    }
    Ok(Decomposition { coarse, segments, residual: exact_sum(terms) })
}

/// `ν(η₁η₂η₄) − ν(η₁η₃η₄) − ν(η₂η₃⁻)`, which vanishes when `η₂` and `η₃` share endpoints.
pub fn changing_arc_residual(arcs: [&Curve; 4], mu: CellMeasure<'_>) -> Result<f64> {
    let [e1, e2, e3, e4] = arcs;
    let eta = e1.concat(e2)?.concat(e4)?;
    let gamma = e1.concat(e3)?.concat(e4)?;
    let loop_ = e2.concat(&e3.reversed())?;
    let mut terms = nu_terms(&eta, mu);
    terms.extend(nu_terms(&gamma, mu).into_iter().map(|t| -t));
    terms.extend(nu_terms(&loop_, mu).into_iter().map(|t| -t));
    Ok(exact_sum(terms))
}
