//! The minimized R-stretched Euclidean taxi metric on `base × fiber`:
//!
//! ```text
//! d(x₁, x₂) = min_{Θ ∈ [0, d_σ]} √(Δs² + R²Θ²) + d_σ − Θ.
//! ```
//!
//! The minimand is convex in Θ with unconstrained minimizer
//! `Θ₀ = Δs / (R√(R² − 1))`, which gives the stretched-Euclidean value for
//! `d_σ ≤ Θ₀` and the stretched-taxi value otherwise.

use serde::{Deserialize, Serialize};

use crate::curve::PolylineCurve;
use crate::error::{Result, WarpError};
use crate::profile::WarpingProfile;
use crate::space::{BaseSpace, FiberSpace, SurfacePoint, WarpedSpace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RETParams {
    #[serde(rename = "R")]
    pub r: f64,
    pub base: BaseSpace,
    pub fiber: FiberSpace,
}

impl RETParams {
    pub fn new(r: f64, base: BaseSpace, fiber: FiberSpace) -> Result<Self> {
        let p = RETParams { r, base, fiber };
        p.validate()?;
        Ok(p)
    }

    pub fn standard_interval(r: f64) -> Result<Self> {
        Self::new(r, BaseSpace::standard_interval(), FiberSpace::standard())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 1.0 && self.r.is_finite()) {
            return Err(WarpError::invalid(format!("R must be a finite number > 1, got {}", self.r)));
        }
        self.base.validate()?;
        self.fiber.validate()
    }

    /// `Θ₀ = Δs / (R√(R² − 1))`.
    pub fn theta0(&self, ds: f64) -> f64 {
        ds / (self.r * (self.r * self.r - 1.0).sqrt())
    }

    fn separations(&self, x1: SurfacePoint, x2: SurfacePoint) -> Result<(f64, f64)> {
        for x in [x1, x2] {
            if !(x.r.is_finite() && x.theta.is_finite()) || !self.base.contains(x.r) {
                return Err(WarpError::domain(format!("point ({}, {}) outside the space", x.r, x.theta)));
            }
        }
        Ok((self.base.dist(x1.r, x2.r), self.fiber.dist(x1.theta, x2.theta)))
    }
}

/// Both branch values for base separation `ds` and fiber separation
/// `dsig`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RETBranches {
    pub euclidean: f64,
    pub taxi: f64,
    pub theta0: f64,
}

pub fn ret_branches(r: f64, ds: f64, dsig: f64) -> RETBranches {
    let k = (r * r - 1.0).sqrt();
    RETBranches { euclidean: ds.hypot(r * dsig), taxi: ds * k / r + dsig, theta0: ds / (r * k) }
}

/// Branch formula for separations `(ds, dsig)`; no domain checks.
pub fn ret_value(r: f64, ds: f64, dsig: f64) -> f64 {
    let b = ret_branches(r, ds, dsig);
    if dsig <= b.theta0 {
        b.euclidean
    } else {
        b.taxi
    }
}

pub fn ret_distance(params: &RETParams, x1: SurfacePoint, x2: SurfacePoint) -> Result<f64> {
    params.validate()?;
    let (ds, dsig) = params.separations(x1, x2)?;
    Ok(ret_value(params.r, ds, dsig))
}

const NEWTON_MAX: usize = 60;

/// Minimizes the defining expression over `grid_n + 1` uniform values of
/// Θ, then runs Newton's method from the best one until the step vanishes.
pub fn ret_distance_bruteforce(params: &RETParams, x1: SurfacePoint, x2: SurfacePoint, grid_n: usize) -> Result<f64> {
    params.validate()?;
    if grid_n < 1000 {
        return Err(WarpError::invalid(format!("grid_n must be ≥ 1000, got {grid_n}")));
    }
    let (ds, dsig) = params.separations(x1, x2)?;
    let r2 = params.r * params.r;
    let g = |t: f64| ds.hypot(params.r * t) + dsig - t;
    let mut best = (0.0, g(0.0));
    for i in 1..=grid_n {
        let t = dsig * i as f64 / grid_n as f64;
        let v = g(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    if ds == 0.0 {
        return Ok(best.1);
    }
    let mut t = best.0;
    for _ in 0..NEWTON_MAX {
        let q = (ds * ds + r2 * t * t).sqrt();
        let d1 = r2 * t / q - 1.0;
        let d2 = r2 * ds * ds / (q * q * q);
        let next = (t - d1 / d2).clamp(0.0, dsig);
        let done = (next - t).abs() <= 1e-16 * (1.0 + t);
        t = next;
        if done {
            break;
        }
    }
    Ok(best.1.min(g(t)))
}

/// Boundary of the ball of `radius` about `center`, traced over
/// `samples_n` directions in the `(s, θ)` plane.
///
/// Along a ray `center + t·u` the distance is `t·N(u)` until the ray
/// reaches half the fiber circumference (or half the base circle, or the
/// end of an interval base), so the boundary point is `t = radius / N(u)`
/// truncated at that cut. Vertices are lifted coordinates; the curve is
/// closed by repeating the first vertex.
pub fn ret_ball_boundary(
    params: &RETParams,
    center: SurfacePoint,
    radius: f64,
    samples_n: usize,
) -> Result<PolylineCurve> {
    params.validate()?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(WarpError::invalid(format!("radius must be positive, got {radius}")));
    }
    if samples_n < 4 {
        return Err(WarpError::invalid("at least 4 boundary samples are needed"));
    }
    params.separations(center, center)?;
    let half_fiber = 0.5 * params.fiber.circumference;
    let (b0, b1) = params.base.bounds();
    let mut lifted = Vec::with_capacity(samples_n + 1);
    for i in 0..samples_n {
        let phi = std::f64::consts::TAU * i as f64 / samples_n as f64;
        let (us, ut) = (phi.cos(), phi.sin());
        let n = ret_value(params.r, us.abs(), ut.abs());
        let mut t = radius / n;
        if ut != 0.0 {
            t = t.min(half_fiber / ut.abs());
        }
        if params.base.is_circle() {
            if us != 0.0 {
                t = t.min(0.5 * params.base.length() / us.abs());
            }
        } else if us > 0.0 {
            t = t.min((b1 - center.r) / us);
        } else if us < 0.0 {
            t = t.min((b0 - center.r) / us);
        }
        lifted.push((center.r + t * us, center.theta + t * ut));
    }
    lifted.push(lifted[0]);
    let carrier = WarpedSpace::new(params.base, params.fiber, WarpingProfile::constant(1.0)?)?;
    PolylineCurve::from_lifted(&carrier, &lifted)
}
