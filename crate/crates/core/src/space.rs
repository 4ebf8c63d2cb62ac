//! Base, fiber and warped product spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WarpError};
use crate::profile::WarpingProfile;

/// A circle fiber with arc-length distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSpace {
    pub circumference: f64,
}

impl FiberSpace {
    pub fn new(circumference: f64) -> Result<Self> {
        if !(circumference.is_finite() && circumference > 0.0) {
            return Err(WarpError::invalid(format!("fiber circumference must be positive, got {circumference}")));
        }
        Ok(FiberSpace { circumference })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.circumference).map(|_| ())
    }

    /// The standard fiber of length 2π.
    pub fn standard() -> Self {
        FiberSpace { circumference: std::f64::consts::TAU }
    }

    /// Reduces `theta` into `[0, circumference)`.
    #[inline]
    pub fn wrap(&self, theta: f64) -> f64 {
        let w = theta.rem_euclid(self.circumference);
        if w >= self.circumference {
            0.0
        } else {
            w
        }
    }

    /// Signed displacement from `a` to `b` of smallest magnitude, in `[-C/2, C/2]`.
    #[inline]
    pub fn delta(&self, a: f64, b: f64) -> f64 {
        let c = self.circumference;
        let d = (b - a).rem_euclid(c);
        if d > 0.5 * c {
            d - c
        } else {
            d
        }
    }

    /// Arc distance, computed from `|b − a|` so it is exactly symmetric.
    #[inline]
    pub fn dist(&self, a: f64, b: f64) -> f64 {
        let c = self.circumference;
        let d = (b - a).abs().rem_euclid(c);
        d.min(c - d)
    }

    pub fn diameter(&self) -> f64 {
        0.5 * self.circumference
    }
}

/// The base of the warped product: an interval, or a circle whose
/// coordinate runs over `[-length/2, length/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BaseSpace {
    Interval { r0: f64, r1: f64 },
    Circle { length: f64 },
}

impl BaseSpace {
    pub fn interval(r0: f64, r1: f64) -> Result<Self> {
        let b = BaseSpace::Interval { r0, r1 };
        b.validate()?;
        Ok(b)
    }

    pub fn circle(length: f64) -> Result<Self> {
        let b = BaseSpace::Circle { length };
        b.validate()?;
        Ok(b)
    }

    /// `[-π, π]`, the base used by every interval example.
    pub fn standard_interval() -> Self {
        BaseSpace::Interval { r0: -std::f64::consts::PI, r1: std::f64::consts::PI }
    }

    /// The circle of length 2π.
    pub fn standard_circle() -> Self {
        BaseSpace::Circle { length: std::f64::consts::TAU }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BaseSpace::Interval { r0, r1 } => {
                if !(r0.is_finite() && r1.is_finite() && r0 < r1) {
                    return Err(WarpError::invalid(format!("interval base needs r0 < r1, got [{r0}, {r1}]")));
                }
            }
            BaseSpace::Circle { length } => {
                if !(length.is_finite() && length > 0.0) {
                    return Err(WarpError::invalid(format!("circle base length must be positive, got {length}")));
                }
            }
        }
        Ok(())
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, BaseSpace::Circle { .. })
    }

    /// Coordinate range `(lo, hi)`.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            BaseSpace::Interval { r0, r1 } => (r0, r1),
            BaseSpace::Circle { length } => (-0.5 * length, 0.5 * length),
        }
    }

    pub fn length(&self) -> f64 {
        let (lo, hi) = self.bounds();
        hi - lo
    }

    pub fn diameter(&self) -> f64 {
        match self {
            BaseSpace::Interval { .. } => self.length(),
            BaseSpace::Circle { length } => 0.5 * length,
        }
    }

    /// Maps a coordinate into the canonical range. Identity on intervals.
    #[inline]
    pub fn wrap(&self, r: f64) -> f64 {
        match *self {
            BaseSpace::Interval { .. } => r,
            BaseSpace::Circle { length } => {
                let w = (r + 0.5 * length).rem_euclid(length) - 0.5 * length;
                if w >= 0.5 * length {
                    -0.5 * length
                } else {
                    w
                }
            }
        }
    }

    pub fn contains(&self, r: f64) -> bool {
        match *self {
            BaseSpace::Interval { r0, r1 } => r >= r0 && r <= r1,
            BaseSpace::Circle { .. } => r.is_finite(),
        }
    }

    /// Signed base displacement from `a` to `b`; minor arc on circles.
    #[inline]
    pub fn delta(&self, a: f64, b: f64) -> f64 {
        match *self {
            BaseSpace::Interval { .. } => b - a,
            BaseSpace::Circle { length } => {
                let d = (b - a).rem_euclid(length);
                if d > 0.5 * length {
                    d - length
                } else {
                    d
                }
            }
        }
    }

    #[inline]
    pub fn dist(&self, a: f64, b: f64) -> f64 {
        match *self {
            BaseSpace::Interval { .. } => (b - a).abs(),
            BaseSpace::Circle { length } => {
                let d = (b - a).abs().rem_euclid(length);
                d.min(length - d)
            }
        }
    }
}

/// A point `(r, θ)` of a warped product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfacePoint {
    pub r: f64,
    pub theta: f64,
}

impl SurfacePoint {
    pub fn new(r: f64, theta: f64) -> Self {
        SurfacePoint { r, theta }
    }
}

/// `[base] ×_f [fiber]` with metric `dr² + f(r)² dθ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedSpace {
    pub base: BaseSpace,
    pub fiber: FiberSpace,
    pub profile: WarpingProfile,
    breaks: Vec<f64>,
}

impl WarpedSpace {
    pub fn new(base: BaseSpace, fiber: FiberSpace, profile: WarpingProfile) -> Result<Self> {
        base.validate()?;
        FiberSpace::new(fiber.circumference)?;
        profile.validate()?;
        let (lo, hi) = base.bounds();
        if let WarpingProfile::Tabulated { r, .. } = &profile {
            if r[0] > lo || r[r.len() - 1] < hi {
                return Err(WarpError::invalid("tabulated profile does not cover the base"));
            }
        }
        if base.is_circle() {
            for b in profile.bumps() {
                let (a, c) = b.support();
                if a < lo || c > hi {
                    return Err(WarpError::invalid(format!(
                        "bump centered at {} crosses the seam of the circle base",
                        b.center
                    )));
                }
            }
        }
        if !(profile.min_on(lo, hi) > 0.0) {
            return Err(WarpError::invalid("warping profile must be positive on the base"));
        }
        let mut breaks: Vec<f64> = profile.breakpoints().into_iter().filter(|x| *x > lo && *x < hi).collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        Ok(WarpedSpace { base, fiber, profile, breaks })
    }

    /// `[-π, π] × S¹(2π)` with the given profile.
    pub fn standard_interval(profile: WarpingProfile) -> Result<Self> {
        Self::new(BaseSpace::standard_interval(), FiberSpace::standard(), profile)
    }

    /// `S¹(2π) × S¹(2π)` with the given profile.
    pub fn standard_circle(profile: WarpingProfile) -> Result<Self> {
        Self::new(BaseSpace::standard_circle(), FiberSpace::standard(), profile)
    }

    /// Warping factor at a (possibly lifted) base coordinate.
    #[inline]
    pub fn f(&self, r: f64) -> f64 {
        self.profile.value(self.base.wrap(r))
    }

    /// Sorted interior breakpoints of the profile within one copy of the base.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    /// Breakpoints strictly inside the lifted interval `(a, b)`, `a < b`,
    /// including periodic copies on a circle base.
    pub fn breakpoints_between(&self, a: f64, b: f64, out: &mut Vec<f64>) {
        out.clear();
        match self.base {
            BaseSpace::Interval { .. } => {
                let i = self.breaks.partition_point(|x| *x <= a);
                out.extend(self.breaks[i..].iter().take_while(|x| **x < b));
            }
            BaseSpace::Circle { length } => {
                let (lo, _) = self.base.bounds();
                let k0 = ((a - lo) / length).floor() as i64;
                let k1 = ((b - lo) / length).floor() as i64;
                for k in k0..=k1 {
                    let shift = k as f64 * length;
                    // the seam itself is a copy boundary, not a profile break
                    for x in self.breaks.iter().map(|x| x + shift) {
                        if x > a && x < b {
                            out.push(x);
                        }
                    }
                }
            }
        }
    }

    /// Checks `p` against the base and returns it with θ (and r on a circle
    /// base) reduced to canonical ranges.
    pub fn normalize(&self, p: SurfacePoint) -> Result<SurfacePoint> {
        if !(p.r.is_finite() && p.theta.is_finite()) {
            return Err(WarpError::domain(format!("point ({}, {}) is not finite", p.r, p.theta)));
        }
        if !self.base.contains(p.r) {
            let (lo, hi) = self.base.bounds();
            return Err(WarpError::domain(format!("r = {} outside base [{lo}, {hi}]", p.r)));
        }
        Ok(SurfacePoint { r: self.base.wrap(p.r), theta: self.fiber.wrap(p.theta) })
    }

    /// Minimum of the profile over the base segment between `a` and `b`
    /// (the minor arc on a circle base).
    pub fn min_between(&self, a: f64, b: f64) -> f64 {
        match self.base {
            BaseSpace::Interval { .. } => self.profile.min_on(a, b),
            BaseSpace::Circle { .. } => self.extreme_on_arc(a, b, true),
        }
    }

    pub fn max_between(&self, a: f64, b: f64) -> f64 {
        match self.base {
            BaseSpace::Interval { .. } => self.profile.max_on(a, b),
            BaseSpace::Circle { .. } => self.extreme_on_arc(a, b, false),
        }
    }

    fn extreme_on_arc(&self, a: f64, b: f64, min: bool) -> f64 {
        let a = self.base.wrap(a);
        let end = a + self.base.delta(a, b);
        let (lo, hi) = if a <= end { (a, end) } else { (end, a) };
        let (blo, bhi) = self.base.bounds();
        let pick = |x: f64, y: f64| if min { x.min(y) } else { x.max(y) };
        let on = |x: f64, y: f64| if min { self.profile.min_on(x, y) } else { self.profile.max_on(x, y) };
        if lo < blo {
            pick(on(blo, hi), on(lo + self.base.length(), bhi))
        } else if hi > bhi {
            pick(on(lo, bhi), on(blo, hi - self.base.length()))
        } else {
            on(lo, hi)
        }
    }

    pub fn f_min(&self) -> f64 {
        let (lo, hi) = self.base.bounds();
        self.profile.min_on(lo, hi)
    }

    pub fn f_max(&self) -> f64 {
        let (lo, hi) = self.base.bounds();
        self.profile.max_on(lo, hi)
    }

    /// Closed-form distance in the isometric product with constant warping
    /// `level`: `√(d_base² + level² d_σ²)`, minimized over wraps.
    pub fn product_distance(&self, level: f64, p: SurfacePoint, q: SurfacePoint) -> f64 {
        let dr = self.base.dist(p.r, q.r);
        let ds = self.fiber.dist(p.theta, q.theta);
        dr.hypot(level * ds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn fiber_arc_distance_and_wrap() {
        let s = FiberSpace::standard();
        assert!((s.dist(0.1, 2.0 * PI - 0.1) - 0.2).abs() < 1e-12);
        assert!((s.dist(0.0, PI) - PI).abs() < 1e-15);
        assert_eq!(s.wrap(-1e-20), 0.0);
        assert!(s.wrap(7.0) < 2.0 * PI);
        assert_eq!(s.diameter(), PI);
        assert!(FiberSpace::new(0.0).is_err());
    }

    #[test]
    fn circle_base_wraps_to_symmetric_range() {
        let b = BaseSpace::standard_circle();
        assert!((b.wrap(PI + 0.5) - (-PI + 0.5)).abs() < 1e-12);
        assert!((b.dist(-3.0, 3.0) - (2.0 * PI - 6.0)).abs() < 1e-12);
        assert_eq!(b.diameter(), PI);
        let i = BaseSpace::interval(0.0, 1.0).unwrap();
        assert_eq!(i.dist(0.0, 1.0), 1.0);
        assert!(BaseSpace::interval(1.0, 1.0).is_err());
    }

    #[test]
    fn warped_space_rejects_seam_crossing_bumps() {
        let p = WarpingProfile::ridge(2.0, 3.0, 0.5).unwrap();
        assert!(WarpedSpace::standard_circle(p.clone()).is_err());
        assert!(WarpedSpace::standard_interval(p).is_ok());
    }

    #[test]
    fn arc_extrema_follow_the_minor_arc() {
        let p = WarpingProfile::cinch(0.5, 0.0, 0.5).unwrap();
        let s = WarpedSpace::standard_circle(p).unwrap();
        // minor arc from 3 to -3 passes the seam, not the cinch
        assert_eq!(s.min_between(3.0, -3.0), 1.0);
        assert_eq!(s.min_between(-1.0, 1.0), 0.5);
    }

    #[test]
    fn periodic_breakpoints_are_listed() {
        let p = WarpingProfile::cinch(0.5, 0.0, 0.5).unwrap();
        let s = WarpedSpace::standard_circle(p).unwrap();
        let mut out = Vec::new();
        s.breakpoints_between(5.0, 7.0, &mut out);
        assert_eq!(out.len(), 3);
        assert!((out[0] - (2.0 * PI - 0.5)).abs() < 1e-12);
        assert!((out[1] - 2.0 * PI).abs() < 1e-12);
        s.breakpoints_between(5.0, 6.0, &mut out);
        assert_eq!(out.len(), 1);
    }
}
