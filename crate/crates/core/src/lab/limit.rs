//! Limit metrics of the example sequences.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geodesy::cinch_limit_distance;
use crate::ret::{ret_distance, RETParams};
use crate::space::{BaseSpace, FiberSpace, SurfacePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LimitMetric {
    /// Constant warping `level`.
    IsometricProduct { level: f64 },
    /// Warping 1 except at the single level `cinch_r`, where it is `h0`.
    CinchLimit { h0: f64, cinch_r: f64 },
    /// Minimized R-stretched Euclidean taxi metric.
    Ret { r: f64 },
}

pub fn limit_distance(
    limit: &LimitMetric,
    base: &BaseSpace,
    fiber: &FiberSpace,
    x1: SurfacePoint,
    x2: SurfacePoint,
) -> Result<f64> {
    match *limit {
        LimitMetric::IsometricProduct { level } => {
            Ok(base.dist(x1.r, x2.r).hypot(level * fiber.dist(x1.theta, x2.theta)))
        }
        LimitMetric::CinchLimit { h0, cinch_r } => cinch_limit_distance(h0, cinch_r, base, fiber, x1, x2),
        LimitMetric::Ret { r } => ret_distance(&RETParams::new(r, *base, *fiber)?, x1, x2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn examples() {
        let b = BaseSpace::standard_interval();
        let f = FiberSpace::standard();
        let p = |r, t| SurfacePoint::new(r, t);
        let v =
            limit_distance(&LimitMetric::IsometricProduct { level: 1.0 }, &b, &f, p(0.0, 0.0), p(1.0, 1.0)).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-15);
        let v = limit_distance(&LimitMetric::CinchLimit { h0: 0.5, cinch_r: 0.0 }, &b, &f, p(0.0, 0.0), p(0.0, PI))
            .unwrap();
        assert!((v - 0.5 * PI).abs() < 1e-15);
        let v = limit_distance(&LimitMetric::Ret { r: 5.0 }, &b, &f, p(-PI / 2.0, 0.0), p(PI / 2.0, PI)).unwrap();
        assert!((v - PI * (24f64.sqrt() / 5.0 + 1.0)).abs() < 1e-12);
    }
}
