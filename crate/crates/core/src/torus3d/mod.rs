//! The warped 3-torus `dx² + dy² + f(x, y)² dz²` on `[−π, π]³` with every
//! coordinate periodic.

mod experiment;
mod grid;

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Result, WarpError};
use crate::profile::canonical_bump;
use crate::quadrature::gauss;

pub use experiment::{
    build_plan3, run_torus3_experiment, MovingBump2D, Pair3Record, Plan3Spec, Sample3Plan, Torus3Config, Torus3Report,
    Torus3Row,
};
pub use grid::{grid3_distance, Geodesic3Result, Grid3, Grid3Spec, MAX_GRID3_NODES};

/// Wraps `v` into `[−π, π)`.
pub fn wrap(v: f64) -> f64 {
    let w = (v + PI).rem_euclid(TAU) - PI;
    // rem_euclid can round up to TAU
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

/// Shortest periodic separation of two coordinates, in `[0, π]`.
pub fn periodic_dist(a: f64, b: f64) -> f64 {
    wrap(b - a).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    /// Same point with coordinates in `[−π, π)`.
    pub fn wrapped(self) -> Result<Self> {
        if !(self.x.is_finite() && self.y.is_finite() && self.z.is_finite()) {
            return Err(WarpError::domain(format!("non-finite point {self:?}")));
        }
        Ok(Point3 { x: wrap(self.x), y: wrap(self.y), z: wrap(self.z) })
    }
}

/// A radially symmetric cosine bump on the `(x, y)` torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump2D {
    pub center: [f64; 2],
    pub half_width: f64,
    pub peak: f64,
}

impl Bump2D {
    fn radius(&self, x: f64, y: f64) -> f64 {
        periodic_dist(self.center[0], x).hypot(periodic_dist(self.center[1], y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantParams {
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpsParams {
    pub c: f64,
    pub bumps: Vec<Bump2D>,
}

/// Warping function `f(x, y)` of the 3-torus. JSON form
/// `{"family": "<kebab-name>", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Warp2DProfile {
    Constant(ConstantParams),
    /// Level `c` with one bump.
    #[serde(rename = "bump-2d")]
    Bump2D(BumpsParams),
    /// Level `c` with disjoint bumps.
    #[serde(rename = "sum-of-bumps-2d")]
    SumOfBumps2D(BumpsParams),
}

impl Warp2DProfile {
    pub fn constant(c: f64) -> Result<Self> {
        let p = Warp2DProfile::Constant(ConstantParams { c });
        p.validate()?;
        Ok(p)
    }

    pub fn bump(c: f64, peak: f64, center: [f64; 2], half_width: f64) -> Result<Self> {
        let p = Warp2DProfile::Bump2D(BumpsParams { c, bumps: vec![Bump2D { center, half_width, peak }] });
        p.validate()?;
        Ok(p)
    }

    pub fn sum_of_bumps(c: f64, bumps: Vec<Bump2D>) -> Result<Self> {
        let p = Warp2DProfile::SumOfBumps2D(BumpsParams { c, bumps });
        p.validate()?;
        Ok(p)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Warp2DProfile = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }

    /// Ambient level `c`.
    pub fn level(&self) -> f64 {
        match self {
            Warp2DProfile::Constant(p) => p.c,
            Warp2DProfile::Bump2D(p) | Warp2DProfile::SumOfBumps2D(p) => p.c,
        }
    }

    pub fn bumps(&self) -> &[Bump2D] {
        match self {
            Warp2DProfile::Constant(_) => &[],
            Warp2DProfile::Bump2D(p) | Warp2DProfile::SumOfBumps2D(p) => &p.bumps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.level();
        if !(c > 0.0 && c.is_finite()) {
            return Err(WarpError::invalid(format!("level c must be positive, got {c}")));
        }
        if let Warp2DProfile::Bump2D(p) = self {
            if p.bumps.len() != 1 {
                return Err(WarpError::invalid("bump-2d takes exactly one bump"));
            }
        }
        let bumps = self.bumps();
        for b in bumps {
            if !(b.peak > 0.0 && b.peak.is_finite()) {
                return Err(WarpError::invalid(format!("bump peak must be positive, got {}", b.peak)));
            }
            if !(b.half_width > 0.0 && b.half_width <= PI) {
                return Err(WarpError::invalid(format!("bump half-width must lie in (0, π], got {}", b.half_width)));
            }
            if !(b.center[0].is_finite() && b.center[1].is_finite()) {
                return Err(WarpError::invalid("bump center must be finite"));
            }
        }
        for (i, a) in bumps.iter().enumerate() {
            for b in &bumps[i + 1..] {
                if a.radius(b.center[0], b.center[1]) < a.half_width + b.half_width {
                    return Err(WarpError::invalid("bumps must have disjoint supports"));
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        let c = self.level();
        let mut f = c;
        for b in self.bumps() {
            let t = b.radius(x, y) / b.half_width;
            if t < 1.0 {
                f += canonical_bump(c, b.peak, t) - c;
            }
        }
        f
    }

    pub fn f_min(&self) -> f64 {
        self.bumps().iter().map(|b| b.peak).fold(self.level(), f64::min)
    }

    pub fn f_max(&self) -> f64 {
        self.bumps().iter().map(|b| b.peak).fold(self.level(), f64::max)
    }

    /// `∫∫ (f − c)^p dx dy` for `p ∈ {1, 2}` by radial quadrature.
    fn deviation_moment(&self, p: i32) -> f64 {
        let c = self.level();
        self.bumps()
            .iter()
            .map(|b| {
                let h = b.half_width;
                TAU * gauss(|rho| (canonical_bump(c, b.peak, rho / h) - c).powi(p) * rho, 0.0, h, 32)
            })
            .sum()
    }

    /// `‖f − c‖_{L²([−π, π]²)}`.
    pub fn l2_from_level(&self) -> f64 {
        self.deviation_moment(2).sqrt()
    }

    /// `∫∫ f dx dy`.
    pub fn integral(&self) -> f64 {
        TAU * TAU * self.level() + self.deviation_moment(1)
    }
}

/// Distance in the flat limit `dx² + dy² + c² dz²`, minimized over the
/// periodic images.
pub fn limit3_distance(c: f64, p: Point3, q: Point3) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(WarpError::invalid(format!("limit level must be positive, got {c}")));
    }
    let (p, q) = (p.wrapped()?, q.wrapped()?);
    let dx = periodic_dist(p.x, q.x);
    let dy = periodic_dist(p.y, q.y);
    let dz = periodic_dist(p.z, q.z);
    Ok((dx * dx + dy * dy + c * c * dz * dz).sqrt())
}

/// `4√2π + 2π(c_sup + δ/(2π))` bounding the diameter of a warped 3-torus
/// whose warping function is within `δ` in L² of a limit bounded by `c_sup`.
pub fn diameter3_upper_bound(delta_l2: f64, c_sup: f64) -> Result<f64> {
    if !(delta_l2 >= 0.0 && delta_l2.is_finite()) {
        return Err(WarpError::invalid(format!("L² deviation must be nonnegative, got {delta_l2}")));
    }
    if !(c_sup > 0.0 && c_sup.is_finite()) {
        return Err(WarpError::invalid(format!("limit sup must be positive, got {c_sup}")));
    }
    Ok(4.0 * 2f64.sqrt() * PI + TAU * (c_sup + delta_l2 / TAU))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapping() {
        assert_eq!(wrap(PI), -PI);
        assert_eq!(wrap(-PI), -PI);
        assert!((wrap(3.0 * PI + 0.5) - (-PI + 0.5)).abs() < 1e-12);
        assert!((periodic_dist(-3.0, 3.0) - (TAU - 6.0)).abs() < 1e-12);
    }

    #[test]
    fn limit_examples() {
        let o = Point3::new(0.0, 0.0, 0.0);
        assert!((limit3_distance(1.0, o, Point3::new(1.0, 1.0, 1.0)).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert!((limit3_distance(2.0, o, Point3::new(0.0, 0.0, PI)).unwrap() - TAU).abs() < 1e-15);
        let d = limit3_distance(1.0, o, Point3::new(0.0, 0.0, 1.9 * PI)).unwrap();
        assert!((d - 0.1 * PI).abs() < 1e-12);
        assert!(limit3_distance(0.0, o, o).is_err());
    }

    #[test]
    fn diameter_examples() {
        let base = 4.0 * 2f64.sqrt() * PI;
        assert!((diameter3_upper_bound(0.0, 1.0).unwrap() - (base + TAU)).abs() < 1e-12);
        assert!((diameter3_upper_bound(0.0, 5.0).unwrap() - (base + 10.0 * PI)).abs() < 1e-12);
        assert!(diameter3_upper_bound(TAU, 0.0).is_err());
        assert!(diameter3_upper_bound(-1.0, 1.0).is_err());
    }

    #[test]
    fn bump_profile() {
        let f = Warp2DProfile::bump(1.0, 2.0, [3.0, 3.0], 0.5).unwrap();
        assert_eq!(f.value(3.0, 3.0), 2.0);
        assert_eq!(f.value(0.0, 0.0), 1.0);
        // support wraps across the seam
        assert!(f.value(-3.1, 3.0) > 1.0);
        assert_eq!((f.f_min(), f.f_max()), (1.0, 2.0));
        assert!(Warp2DProfile::bump(1.0, 2.0, [0.0, 0.0], 4.0).is_err());
        let two = vec![
            Bump2D { center: [0.0, 0.0], half_width: 1.0, peak: 2.0 },
            Bump2D { center: [1.5, 0.0], half_width: 1.0, peak: 2.0 },
        ];
        assert!(Warp2DProfile::sum_of_bumps(1.0, two).is_err());
    }

    #[test]
    fn integrals_match_a_grid_sum() {
        let f = Warp2DProfile::bump(1.0, 3.0, [0.5, -2.9], 0.8).unwrap();
        let n = 800;
        let h = TAU / n as f64;
        let (mut s1, mut s2) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let v = f.value(-PI + (i as f64 + 0.5) * h, -PI + (j as f64 + 0.5) * h);
                s1 += v * h * h;
                s2 += (v - 1.0).powi(2) * h * h;
            }
        }
        assert!((f.integral() - s1).abs() < 1e-4, "{} {}", f.integral(), s1);
        assert!((f.l2_from_level() - s2.sqrt()).abs() < 1e-4);
        assert_eq!(Warp2DProfile::constant(2.0).unwrap().l2_from_level(), 0.0);
    }

    #[test]
    fn json_rejects_unknown_fields() {
        let ok =
            r#"{"family": "bump-2d", "params": {"c": 1, "bumps": [{"center": [0, 0], "half_width": 0.5, "peak": 2}]}}"#;
        assert!(Warp2DProfile::from_json(ok).is_ok());
        let bad = r#"{"family": "constant", "params": {"c": 1, "k": 2}}"#;
        assert!(Warp2DProfile::from_json(bad).is_err());
        let bad = r#"{"family": "constant", "params": {"c": 1}, "x": 0}"#;
        assert!(Warp2DProfile::from_json(bad).is_err());
    }
}
