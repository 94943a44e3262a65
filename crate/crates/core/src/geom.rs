//! Planar geometry on `f64` points: orientation predicates, segment and
//! triangle intersection, polygon area and containment, convex clipping.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

/// Slack used by the intersection predicates.
pub const GEOM_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Twice the signed area of `abc`; positive for a counter-clockwise turn.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(d) / len2).clamp(0.0, 1.0);
    p.dist(a + d * t)
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Exact test on the stored doubles, touching included.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(a, c, d))
        || (d2 == 0.0 && on_segment(b, c, d))
        || (d3 == 0.0 && on_segment(c, a, b))
        || (d4 == 0.0 && on_segment(d, a, b))
}

pub fn segment_distance(a: Point, b: Point, c: Point, d: Point) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triangle(pub [Point; 3]);

impl Triangle {
    pub fn area(&self) -> f64 {
        let [a, b, c] = self.0;
        orient(a, b, c).abs() / 2.0
    }

    pub fn edges(&self) -> [(Point, Point); 3] {
        let [a, b, c] = self.0;
        [(a, b), (b, c), (c, a)]
    }

    /// Closed containment.
    pub fn contains(&self, p: Point) -> bool {
        let [a, b, c] = self.0;
        if orient(a, b, c) == 0.0 {
            return self.edges().iter().any(|&(u, v)| point_segment_distance(p, u, v) == 0.0);
        }
        let (d1, d2, d3) = (orient(a, b, p), orient(b, c, p), orient(c, a, p));
        let has_neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
        let has_pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
        !(has_neg && has_pos)
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let xs = self.0.map(|p| p.x);
        let ys = self.0.map(|p| p.y);
        let min = |v: [f64; 3]| v[0].min(v[1]).min(v[2]);
        let max = |v: [f64; 3]| v[0].max(v[1]).max(v[2]);
        (Point::new(min(xs), min(ys)), Point::new(max(xs), max(ys)))
    }

    pub fn distance_to_segment(&self, a: Point, b: Point) -> f64 {
        if self.contains(a) || self.contains(b) {
            return 0.0;
        }
        self.edges().iter().map(|&(p, q)| segment_distance(a, b, p, q)).fold(f64::INFINITY, f64::min)
    }

    pub fn distance_to_triangle(&self, other: &Triangle) -> f64 {
        if other.0.iter().any(|&p| self.contains(p)) || self.0.iter().any(|&p| other.contains(p)) {
            return 0.0;
        }
        other.edges().iter().map(|&(a, b)| self.distance_to_segment(a, b)).fold(f64::INFINITY, f64::min)
    }

    /// Integer points in the closed triangle, row by row.
    pub fn lattice_points(&self) -> Vec<(i64, i64)> {
        let (lo, hi) = self.bounding_box();
        let mut out = Vec::new();
        for y in lo.y.ceil() as i64..=hi.y.floor() as i64 {
            let yf = y as f64;
            let (mut xl, mut xr) = (f64::INFINITY, f64::NEG_INFINITY);
            for (a, b) in self.edges() {
                if a.y == b.y {
                    if a.y == yf {
                        xl = xl.min(a.x.min(b.x));
                        xr = xr.max(a.x.max(b.x));
                    }
                } else if a.y.min(b.y) <= yf && yf <= a.y.max(b.y) {
                    let x = a.x + (yf - a.y) * (b.x - a.x) / (b.y - a.y);
                    xl = xl.min(x);
                    xr = xr.max(x);
                }
            }
            if xl > xr {
                continue;
            }
            // The row range is exact up to rounding; settle the ends with the exact predicate.
            let mut x0 = (xl - 1e-6).ceil() as i64;
            let mut x1 = (xr + 1e-6).floor() as i64;
            while x0 <= x1 && !self.contains(Point::new(x0 as f64, yf)) {
                x0 += 1;
            }
            while x1 >= x0 && !self.contains(Point::new(x1 as f64, yf)) {
                x1 -= 1;
            }
            out.extend((x0..=x1).map(|x| (x, y)));
        }
        out
    }
}

/// Shoelace signed area of the closed polygon through `v`.
pub fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>() / 2.0
}

pub fn perimeter(v: &[Point]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i].dist(v[(i + 1) % n])).sum()
}

/// Whether the closed polygon through `v` has no two non-adjacent sides meeting.
pub fn is_simple_polygon(v: &[Point]) -> bool {
    let n = v.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let (a, b, c, d) = (v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]);
            if adjacent {
                // Adjacent sides may only share their common vertex.
                let (shared, p, q) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                if orient(shared, p, q) == 0.0 && (p - shared).dot(q - shared) > 0.0 {
                    return false;
                }
            } else if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Crossing-number containment for the polygon interior; boundary points are unspecified.
pub fn point_in_polygon(p: Point, v: &[Point]) -> bool {
    let n = v.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if (a.y <= p.y) != (b.y <= p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Distance from `p` to the boundary of the closed polygon through `v`.
pub fn distance_to_boundary(p: Point, v: &[Point]) -> f64 {
    let n = v.len();
    (0..n).map(|i| point_segment_distance(p, v[i], v[(i + 1) % n])).fold(f64::INFINITY, f64::min)
}

/// Sutherland–Hodgman clip of `subject` by the half-plane left of `a→b`.
pub fn clip_half_plane(subject: &[Point], a: Point, b: Point) -> Vec<Point> {
    let mut out = Vec::with_capacity(subject.len() + 1);
    let n = subject.len();
    for i in 0..n {
        let (p, q) = (subject[i], subject[(i + 1) % n]);
        let (sp, sq) = (orient(a, b, p), orient(a, b, q));
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            out.push(p.lerp(q, sp / (sp - sq)));
        }
    }
    out
}

/// Intersection of a polygon with a counter-clockwise convex polygon.
pub fn clip_convex(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let n = clip.len();
    let mut out = subject.to_vec();
    for i in 0..n {
        if out.is_empty() {
            break;
        }
        out = clip_half_plane(&out, clip[i], clip[(i + 1) % n]);
    }
    drop_flat_corners(out)
}

/// Removes repeated vertices and corners whose turn is within rounding of a straight angle.
pub fn drop_flat_corners(mut v: Vec<Point>) -> Vec<Point> {
    loop {
        let n = v.len();
        if n < 3 {
            return v;
        }
        let flat = (0..n).find(|&i| {
            let (p, q, r) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
            let (a, b) = (q - p, r - q);
            a.norm() <= GEOM_EPS || b.norm() <= GEOM_EPS || a.cross(b).abs() <= 1e-12 * a.norm() * b.norm()
        });
        match flat {
            Some(i) => {
                v.remove(i);
            }
            None => return v,
        }
    }
}

pub fn is_convex_ccw(v: &[Point]) -> bool {
    let n = v.len();
    n >= 3 && (0..n).all(|i| orient(v[i], v[(i + 1) % n], v[(i + 2) % n]) > 0.0)
}
