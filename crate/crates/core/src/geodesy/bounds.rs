//! Exact values and upper bounds available in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WarpError};
use crate::space::{BaseSpace, FiberSpace, SurfacePoint, WarpedSpace};

/// Distance between two points on a level where the profile attains its
/// global minimum: the fiber arc scaled by `f(r₀)`.
pub fn level_set_distance(space: &WarpedSpace, r0: f64, theta1: f64, theta2: f64) -> Result<f64> {
    let p = space.normalize(SurfacePoint::new(r0, theta1))?;
    let f0 = space.f(p.r);
    let fmin = space.f_min();
    if f0 > fmin + 1e-9 {
        return Err(WarpError::Hypothesis(format!("f({r0}) = {f0} is not the global minimum {fmin} of the profile")));
    }
    Ok(f0 * space.fiber.dist(theta1, theta2))
}

/// Length of the path that runs radially to the level of least warping
/// between the endpoints, around that level, and radially back.
pub fn taxi_upper_bound(space: &WarpedSpace, x1: SurfacePoint, x2: SurfacePoint) -> Result<f64> {
    let p = space.normalize(x1)?;
    let q = space.normalize(x2)?;
    let ds = space.fiber.dist(p.theta, q.theta);
    let base = space.base.dist(p.r, q.r);
    if ds == 0.0 {
        return Ok(base);
    }
    Ok(base + space.min_between(p.r, q.r) * ds)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RidgeBypass {
    /// `2|r̂ − r*| + f(r̂)·d_σ`.
    pub bound: f64,
    /// Whether the detour through `r̂` is strictly shorter than running
    /// along the level `r*`.
    pub improves: bool,
}

/// Upper bound for two points on the level `r_star` obtained by detouring
/// to the level `r_hat`.
pub fn ridge_bypass_bound(
    space: &WarpedSpace,
    r_star: f64,
    r_hat: f64,
    theta1: f64,
    theta2: f64,
) -> Result<RidgeBypass> {
    let rs = space.normalize(SurfacePoint::new(r_star, 0.0))?.r;
    let rh = space.normalize(SurfacePoint::new(r_hat, 0.0))?.r;
    let ds = space.fiber.dist(theta1, theta2);
    let radial = space.base.dist(rs, rh);
    let bound = 2.0 * radial + space.f(rh) * ds;
    let improves = ds > 0.0 && space.f(rh) < space.f(rs) - 2.0 * radial / ds;
    Ok(RidgeBypass { bound, improves })
}

/// Distance in the limit of narrowing cinches: warping 1 everywhere except
/// the single level `cinch_r` where it is `h0`.
///
/// Either the path avoids the cinch level (flat product distance), or it
/// runs straight to the level, along it, and straight out. With `a`, `b`
/// the base distances to the level and `Δ` the fiber separation travelled,
/// the legs `√(a² + x²) − h0·x` are minimized independently at
/// `x = a·h0/√(1 − h0²)`; when both fit inside `Δ` the total is
/// `h0·Δ + (a + b)√(1 − h0²)`, otherwise the cinch segment shrinks to a
/// point and the path is the straight line of length `√((a + b)² + Δ²)`.
pub fn cinch_limit_distance(
    h0: f64,
    cinch_r: f64,
    base: &BaseSpace,
    fiber: &FiberSpace,
    x1: SurfacePoint,
    x2: SurfacePoint,
) -> Result<f64> {
    if !(h0 > 0.0 && h0 <= 1.0) {
        return Err(WarpError::invalid(format!("cinch depth h0 must lie in (0, 1], got {h0}")));
    }
    for x in [x1, x2] {
        if !base.contains(x.r) || !base.contains(cinch_r) {
            return Err(WarpError::domain(format!("r = {} outside the base", x.r)));
        }
    }
    let dr = base.dist(x1.r, x2.r);
    let delta = fiber.dist(x1.theta, x2.theta);
    let flat = dr.hypot(delta);
    if h0 >= 1.0 {
        return Ok(flat);
    }
    let a = base.dist(x1.r, cinch_r);
    let b = base.dist(x2.r, cinch_r);
    let s = (1.0 - h0 * h0).sqrt();
    let via = |d: f64| {
        if (a + b) * h0 <= d * s {
            h0 * d + (a + b) * s
        } else {
            (a + b).hypot(d)
        }
    };
    // going the long way around the fiber can only help through the cinch
    let via_best = via(delta).min(via(fiber.circumference - delta));
    Ok(flat.min(via_best))
}
