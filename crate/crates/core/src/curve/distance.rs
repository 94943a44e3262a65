use serde::{Deserialize, Serialize};

use super::{close_curve, probe_winding, Curve};
use crate::error::{Error, Result};
use crate::geom::Point;

/// Proof-derived safe value of the skeleton-length constant.
pub const C10: f64 = 1.0 / 40.0;

/// `(∫ (w(·, η₁) − w(·, η₂))² dλ)^{1/2}` on a grid of `resolution` cells per unit,
/// sampling windings at cell centers.
pub fn d_nu_raster(eta1: &Curve, eta2: &Curve, resolution: u32) -> Result<f64> {
    if resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be at least 1".into()));
    }
    let (c1, c2) = (close_curve(eta1), close_curve(eta2));
    let (a_lo, a_hi) = c1.bounding_box();
    let (b_lo, b_hi) = c2.bounding_box();
    let h = 1.0 / f64::from(resolution);
    let (x0, y0) = ((a_lo.x.min(b_lo.x) / h).floor() as i64, (a_lo.y.min(b_lo.y) / h).floor() as i64);
    let (x1, y1) = ((a_hi.x.max(b_hi.x) / h).ceil() as i64, (a_hi.y.max(b_hi.y) / h).ceil() as i64);
    let mut total = 0i64;
    for j in y0..y1 {
        for i in x0..x1 {
            let z = Point::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            let d = probe_winding(z, &c1) - probe_winding(z, &c2);
            total += d * d;
        }
    }
    Ok((total as f64 * h * h).sqrt())
}

/// `Σ_{i=0}^{n} √(½(|w_i − w_{i−1}| + |v_{i+1} − v_i|) |v_i − w_i|)` with
/// `w_{−1} = v_n` and `v_{n+1} = w_0`.
pub fn interpolation_bound(v: &[Point], w: &[Point]) -> Result<f64> {
    if v.len() != w.len() || v.len() < 2 {
        return Err(Error::InvalidArgument("point sequences must have equal length at least 2".into()));
    }
    let n = v.len() - 1;
    let w_at = |i: isize| if i < 0 { v[n] } else { w[i as usize] };
    let v_at = |i: usize| if i > n { w[0] } else { v[i] };
    Ok((0..=n)
        .map(|i| {
            let s = 0.5 * (w_at(i as isize).dist(w_at(i as isize - 1)) + v_at(i + 1).dist(v_at(i)));
            (s * v[i].dist(w[i])).sqrt()
        })
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkeletonCheck {
    /// `Σ |v_j − v_{j−1}| / R`.
    pub lhs: f64,
    /// `1 + ρ² κ / 40`.
    pub bound: f64,
    pub satisfied: bool,
}

/// Length of a strip skeleton from the origin to `(R, 0)` whose consecutive
/// vertices sit on adjacent lines `y = kρR`, compared with `1 + c₁₀ ρ² κ`.
pub fn skeleton_length_check(v: &[Point], rho: f64, r: f64) -> Result<SkeletonCheck> {
    let tol = 1e-9 * r.max(1.0);
    if !(rho > 0.0 && r > 0.0) {
        return Err(Error::Domain("rho and R must be positive".into()));
    }
    if v.len() < 3 {
        return Err(Error::Domain("a skeleton needs at least two steps".into()));
    }
    let kappa = v.len() - 1;
    if v[0].norm() > tol || v[kappa].dist(Point::new(r, 0.0)) > tol {
        return Err(Error::Domain("skeleton must run from the origin to (R, 0)".into()));
    }
    let mut levels = Vec::with_capacity(v.len());
    for (j, p) in v.iter().enumerate() {
        let k = p.y / (rho * r);
        if (k - k.round()).abs() > 1e-9 {
            return Err(Error::Domain(format!("vertex {j} is not on a strip line")));
        }
        levels.push(k.round() as i64);
    }
    if let Some(j) = levels.windows(2).position(|w| (w[1] - w[0]).abs() != 1) {
        return Err(Error::Domain(format!("vertices {j} and {} are not on adjacent lines", j + 1)));
    }
    let lhs = v.windows(2).map(|w| w[0].dist(w[1])).sum::<f64>() / r;
    let bound = 1.0 + C10 * rho * rho * kappa as f64;
    Ok(SkeletonCheck { lhs, bound, satisfied: lhs >= bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn square(x: f64, y: f64, s: f64) -> Curve {
        Curve::closed(vec![p(x, y), p(x + s, y), p(x + s, y + s), p(x, y + s)])
    }

    #[test]
    fn raster_distances() {
        let a = square(0., 0., 1.);
        assert_eq!(d_nu_raster(&a, &a, 4).unwrap(), 0.0);
        assert!((d_nu_raster(&a, &square(3., 0., 1.), 4).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let d = d_nu_raster(&square(-1., -1., 2.), &square(-2., -2., 4.), 8).unwrap();
        assert!((d * d - 12.0).abs() <= 0.03 * 12.0);
    }

    #[test]
    fn bound_basics() {
        let v = [p(0., 0.), p(3., 0.), p(0., 2.)];
        assert_eq!(interpolation_bound(&v, &v).unwrap(), 0.0);
        assert!(interpolation_bound(&v, &v[..2]).is_err());
        let at = |t: f64| {
            let mut w = v;
            w[1] = p(3. + t, 0.);
            interpolation_bound(&v, &w).unwrap()
        };
        for t in [1e-4, 1e-2, 1.0] {
            let ratio = at(4.0 * t) / at(t);
            assert!((ratio - 2.0).abs() < 0.2 * (1.0 + t), "{t} {ratio}");
        }
    }

    #[test]
    fn skeleton_base_case() {
        let (rho, r) = (0.1, 5.0);
        let c = skeleton_length_check(&[p(0., 0.), p(2.5, rho * r), p(r, 0.)], rho, r).unwrap();
        assert!(c.lhs >= 1.0 + rho * rho && c.satisfied);
        assert!(skeleton_length_check(&[p(0., 0.), p(2.5, 2. * rho * r), p(r, 0.)], rho, r).is_err());
    }
}
