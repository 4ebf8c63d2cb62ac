//! Polyline curves on warped products and their length functionals.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WarpError};
use crate::quadrature::gauss;
use crate::space::{SurfacePoint, WarpedSpace};

/// Number of seam crossings of one segment, signed by direction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentWrap {
    pub base: i32,
    pub fiber: i32,
}

/// A polyline with vertices in canonical coordinates. Segment `i` runs from
/// vertex `i` to vertex `i + 1` displaced by `wraps[i]` whole periods, so
/// the straight segment in the universal cover is unambiguous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolylineCurve {
    pub vertices: Vec<SurfacePoint>,
    pub wraps: Vec<SegmentWrap>,
}

impl PolylineCurve {
    /// Builds a curve from vertices in lifted (unwrapped) coordinates.
    pub fn from_lifted(space: &WarpedSpace, lifted: &[(f64, f64)]) -> Result<Self> {
        if lifted.len() < 2 {
            return Err(WarpError::invalid("a curve needs at least two vertices"));
        }
        let c = space.fiber.circumference;
        let base_len = space.base.length();
        let (lo, _) = space.base.bounds();
        let fiber_period = |t: f64| (t / c).floor() as i64;
        let base_period = |r: f64| {
            if space.base.is_circle() {
                ((r - lo) / base_len).floor() as i64
            } else {
                0
            }
        };
        let mut vertices = Vec::with_capacity(lifted.len());
        let mut wraps = Vec::with_capacity(lifted.len() - 1);
        for (i, &(r, t)) in lifted.iter().enumerate() {
            if !(r.is_finite() && t.is_finite()) {
                return Err(WarpError::invalid("curve vertex is not finite"));
            }
            if !space.base.is_circle() && !space.base.contains(r) {
                return Err(WarpError::domain(format!("curve vertex r = {r} outside the base")));
            }
            vertices.push(SurfacePoint { r: space.base.wrap(r), theta: space.fiber.wrap(t) });
            if i > 0 {
                let (pr, pt) = lifted[i - 1];
                if pr == r && pt == t {
                    return Err(WarpError::invalid("consecutive curve vertices coincide"));
                }
                wraps.push(SegmentWrap {
                    base: (base_period(r) - base_period(pr)) as i32,
                    fiber: (fiber_period(t) - fiber_period(pt)) as i32,
                });
            }
        }
        Ok(PolylineCurve { vertices, wraps })
    }

    /// Shortest straight segment between two points in the universal cover.
    pub fn straight(space: &WarpedSpace, p: SurfacePoint, q: SurfacePoint) -> Result<Self> {
        let p = space.normalize(p)?;
        let q = space.normalize(q)?;
        let lifted =
            [(p.r, p.theta), (p.r + space.base.delta(p.r, q.r), p.theta + space.fiber.delta(p.theta, q.theta))];
        Self::from_lifted(space, &lifted)
    }

    /// Vertices in the universal cover, starting at the first vertex.
    pub fn lifted(&self, space: &WarpedSpace) -> Vec<(f64, f64)> {
        let c = space.fiber.circumference;
        let l = space.base.length();
        let mut out = Vec::with_capacity(self.vertices.len());
        let v0 = self.vertices[0];
        out.push((v0.r, v0.theta));
        for (i, w) in self.wraps.iter().enumerate() {
            let (pr, pt) = out[i];
            let a = self.vertices[i];
            let b = self.vertices[i + 1];
            let base_shift = if space.base.is_circle() { w.base as f64 * l } else { 0.0 };
            out.push((pr + (b.r - a.r) + base_shift, pt + (b.theta - a.theta) + w.fiber as f64 * c));
        }
        out
    }

    pub fn first(&self) -> SurfacePoint {
        self.vertices[0]
    }

    pub fn last(&self) -> SurfacePoint {
        self.vertices[self.vertices.len() - 1]
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertices.len() < 2 || self.wraps.len() + 1 != self.vertices.len() {
            return Err(WarpError::invalid("curve needs ≥ 2 vertices and one wrap record per segment"));
        }
        Ok(())
    }
}

/// Length of the straight lifted segment `a → b` under `dr² + f² dθ²`,
/// with an `n`-point Gauss rule on each piece between profile breakpoints.
/// Exact when `Δr = 0`.
pub fn segment_length(space: &WarpedSpace, a: (f64, f64), b: (f64, f64), n: usize, scratch: &mut Vec<f64>) -> f64 {
    let dr = b.0 - a.0;
    let dt = b.1 - a.1;
    if dr == 0.0 {
        return space.f(a.0) * dt.abs();
    }
    if dt == 0.0 {
        return dr.abs();
    }
    let (lo, hi) = if dr > 0.0 { (a.0, b.0) } else { (b.0, a.0) };
    let slope = dt / dr;
    let integrand = |r: f64| {
        let g = space.f(r) * slope;
        (1.0 + g * g).sqrt()
    };
    space.breakpoints_between(lo, hi, scratch);
    let mut s = 0.0;
    let mut left = lo;
    for &x in scratch.iter() {
        s += gauss(integrand, left, x, n);
        left = x;
    }
    s + gauss(integrand, left, hi, n)
}

/// `∫ √(r'² + f(r)² θ'²) dt` along the polyline.
pub fn curve_length(space: &WarpedSpace, curve: &PolylineCurve, quadrature_n: usize) -> f64 {
    let pts = curve.lifted(space);
    let mut scratch = Vec::new();
    pts.windows(2).map(|w| segment_length(space, w[0], w[1], quadrature_n.max(1), &mut scratch)).sum()
}

/// `Θ(C) = (∫ |θ'(r)|² dr)^{1/2}` for a curve strictly monotone in `r`.
/// Each polyline segment has constant `θ'(r) = Δθ/Δr`, contributing
/// `Δθ²/|Δr|`.
pub fn theta_energy(space: &WarpedSpace, curve: &PolylineCurve) -> Result<f64> {
    let pts = curve.lifted(space);
    let mut sign = 0.0f64;
    let mut total = 0.0;
    for w in pts.windows(2) {
        let dr = w[1].0 - w[0].0;
        let dt = w[1].1 - w[0].1;
        if dr == 0.0 || (sign != 0.0 && dr.signum() != sign) {
            return Err(WarpError::invalid("theta energy needs a curve strictly monotone in r"));
        }
        sign = dr.signum();
        total += dt * dt / dr.abs();
    }
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::WarpingProfile;
    use std::f64::consts::PI;

    fn flat() -> WarpedSpace {
        WarpedSpace::standard_interval(WarpingProfile::constant(1.0).unwrap()).unwrap()
    }

    #[test]
    fn closed_fiber_loop_has_full_circumference() {
        let s = flat();
        let c = PolylineCurve::from_lifted(&s, &[(0.0, 0.0), (0.0, PI), (0.0, 2.0 * PI)]).unwrap();
        assert_eq!(c.wraps[1].fiber, 1);
        assert!((curve_length(&s, &c, 64) - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn euclidean_diagonal() {
        let s = flat();
        let c = PolylineCurve::from_lifted(&s, &[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert!((curve_length(&s, &c, 64) - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn constant_two_fiber_arc() {
        let s = WarpedSpace::standard_interval(WarpingProfile::constant(2.0).unwrap()).unwrap();
        let c = PolylineCurve::from_lifted(&s, &[(0.0, 0.0), (0.0, PI)]).unwrap();
        assert!((curve_length(&s, &c, 64) - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn lifted_round_trips_through_wraps() {
        let s = WarpedSpace::standard_circle(WarpingProfile::constant(1.0).unwrap()).unwrap();
        let pts = [(3.0, 6.0), (3.5, 6.5), (-2.5, -1.0)];
        let c = PolylineCurve::from_lifted(&s, &pts).unwrap();
        let back = c.lifted(&s);
        for (a, b) in pts.iter().zip(back.iter()) {
            assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
        }
    }

    #[test]
    fn theta_energy_examples() {
        let s = flat();
        let v = PolylineCurve::from_lifted(&s, &[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        assert_eq!(theta_energy(&s, &v).unwrap(), 0.0);
        let d = PolylineCurve::from_lifted(&s, &[(0.0, 0.0), (1.0, 2.0)]).unwrap();
        assert!((theta_energy(&s, &d).unwrap() - 2.0).abs() < 1e-15);
        let two = PolylineCurve::from_lifted(&s, &[(0.0, 0.0), (1.0, 1.0), (2.0, 1.0)]).unwrap();
        assert!((theta_energy(&s, &two).unwrap() - 1.0).abs() < 1e-15);
        let bad = PolylineCurve::from_lifted(&s, &[(0.0, 0.0), (1.0, 1.0), (0.5, 1.0)]).unwrap();
        assert!(theta_energy(&s, &bad).is_err());
    }

    #[test]
    fn rejects_degenerate_curves() {
        let s = flat();
        assert!(PolylineCurve::from_lifted(&s, &[(0.0, 0.0)]).is_err());
        assert!(PolylineCurve::from_lifted(&s, &[(0.0, 0.0), (0.0, 0.0)]).is_err());
        assert!(PolylineCurve::from_lifted(&s, &[(0.0, 0.0), (5.0, 0.0)]).is_err());
    }
}
