//! Sampled estimates of the uniform discrepancy `sup |d_j − d_∞|`.
//!
//! Sample points are snapped to grid nodes and the limit is evaluated at
//! the node coordinates, so the only grid error left is the anisotropy
//! overestimate `c·d` plus edge quadrature. The sampled maximum is a lower
//! estimate of the true supremum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::families::SequenceFamily;
use super::limit::{limit_distance, LimitMetric};
use super::sampling::{PairKind, SamplePlan};
use crate::error::{Result, WarpError};
use crate::geodesy::{GridSpec, WarpGrid};
use crate::space::{SurfacePoint, WarpedSpace};

/// Relative allowance for the quadrature of edge weights.
const EDGE_QUADRATURE_TOL: f64 = 1e-6;

/// Grid distance between two snapped sample points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSample {
    pub p: SurfacePoint,
    pub q: SurfacePoint,
    pub kind: PairKind,
    pub d: f64,
    /// The true distance lies in `[d − err, d + quadrature slack]`.
    pub err: f64,
}

/// Runs one search per plan source, in parallel.
pub fn sample_grid_distances(grid: &WarpGrid, plan: &SamplePlan) -> Result<Vec<GridSample>> {
    if plan.is_empty() {
        return Err(WarpError::invalid("empty sample plan"));
    }
    let c = grid.anisotropy();
    let groups: Vec<Vec<GridSample>> = plan
        .groups
        .par_iter()
        .map(|(p, ts)| {
            let (np, _) = grid.snap(*p)?;
            let mut nodes = Vec::with_capacity(ts.len());
            for (q, _) in ts {
                nodes.push(grid.snap(*q)?.0);
            }
            let ds = grid.distances_from(np, &nodes);
            let pp = grid.node_point(np);
            Ok(ts
                .iter()
                .zip(nodes.iter().zip(ds))
                .map(|(&(_, kind), (&nq, d))| GridSample { p: pp, q: grid.node_point(nq), kind, d, err: c * d })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(groups.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub p: SurfacePoint,
    pub q: SurfacePoint,
    pub kind: PairKind,
    pub d_grid: f64,
    pub d_limit: f64,
    pub grid_err: f64,
    /// `|d_grid − d_limit|`.
    pub diff: f64,
    /// Smallest `|d_j − d_limit|` compatible with the grid error.
    pub lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    /// `max |d_grid − d_limit|` over the plan.
    pub eps_hat: f64,
    /// Grid-error-corrected lower estimate: `max` of the per-pair `lower`.
    pub eps_corrected: f64,
    /// Largest per-pair grid error.
    pub grid_err: f64,
    pub worst: PairRecord,
    pub records: Vec<PairRecord>,
}

pub fn compare_with_limit(samples: &[GridSample], space: &WarpedSpace, limit: &LimitMetric) -> Result<Discrepancy> {
    let mut records = Vec::with_capacity(samples.len());
    for s in samples {
        let dl = limit_distance(limit, &space.base, &space.fiber, s.p, s.q)?;
        let slack = EDGE_QUADRATURE_TOL * s.d;
        let lower = (s.d - s.err - slack - dl).max(dl - s.d - slack).max(0.0);
        records.push(PairRecord {
            p: s.p,
            q: s.q,
            kind: s.kind,
            d_grid: s.d,
            d_limit: dl,
            grid_err: s.err,
            diff: (s.d - dl).abs(),
            lower,
        });
    }
    let worst =
        *records.iter().max_by(|a, b| a.diff.total_cmp(&b.diff)).ok_or_else(|| WarpError::invalid("no samples"))?;
    Ok(Discrepancy {
        eps_hat: worst.diff,
        eps_corrected: records.iter().map(|r| r.lower).fold(0.0, f64::max),
        grid_err: records.iter().map(|r| r.grid_err).fold(0.0, f64::max),
        worst,
        records,
    })
}

/// `ε̂_j` of member `j` of `family` against `limit`.
pub fn discrepancy_estimate(
    family: &dyn SequenceFamily,
    j: usize,
    grid: GridSpec,
    plan: &SamplePlan,
    limit: &LimitMetric,
) -> Result<Discrepancy> {
    let space = family.space(j)?;
    let g = WarpGrid::build(&space, grid)?;
    compare_with_limit(&sample_grid_distances(&g, plan)?, &space, limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::families::{BaseShape, FamilyRegistry};
    use crate::lab::sampling::{build_plan, PlanSpec};

    fn small_plan(fam: &dyn SequenceFamily, j: usize) -> SamplePlan {
        let s = fam.space(j).unwrap();
        build_plan(
            PlanSpec { sources: 3, targets: 4, seed: 0, max_levels: 1 },
            &s.base,
            &s.fiber,
            &fam.special_levels(j),
        )
        .unwrap()
    }

    #[test]
    fn flat_grid_error_covers_the_difference() {
        let fam = FamilyRegistry::new().build("constant", Some(1.0), BaseShape::Interval).unwrap();
        let plan = small_plan(fam.as_ref(), 1);
        let limit = LimitMetric::IsometricProduct { level: 1.0 };
        let d = discrepancy_estimate(fam.as_ref(), 1, GridSpec::square(96, 2).unwrap(), &plan, &limit).unwrap();
        assert_eq!(d.records.len(), plan.len());
        assert_eq!(d.eps_corrected, 0.0);
        assert!(d.eps_hat > 0.0 && d.eps_hat <= d.grid_err);
        for r in &d.records {
            // the grid only overestimates
            assert!(r.d_grid >= r.d_limit * (1.0 - 1e-6));
            assert!(r.diff <= r.grid_err + 1e-6 * r.d_grid);
        }
    }

    #[test]
    fn wrong_limit_is_detected() {
        let fam = FamilyRegistry::new().build("cinched-torus", Some(0.5), BaseShape::Interval).unwrap();
        let plan = small_plan(fam.as_ref(), 8);
        let wrong = LimitMetric::IsometricProduct { level: 1.0 };
        let d = discrepancy_estimate(fam.as_ref(), 8, GridSpec::square(128, 3).unwrap(), &plan, &wrong).unwrap();
        // an antipodal pair on the cinch: h0·π against π
        assert!(d.eps_corrected >= 0.5 * std::f64::consts::PI - 0.05, "{}", d.eps_corrected);
        assert!(d.eps_hat >= d.eps_corrected);
    }

    #[test]
    fn lower_uses_the_safe_side() {
        let space = WarpedSpace::standard_interval(crate::profile::WarpingProfile::constant(1.0).unwrap()).unwrap();
        let p = SurfacePoint::new(0.0, 0.0);
        let q = SurfacePoint::new(1.0, 0.0);
        let lim = LimitMetric::IsometricProduct { level: 1.0 };
        let over = GridSample { p, q, kind: PairKind::LowDiscrepancy, d: 1.05, err: 0.1 };
        let under = GridSample { d: 0.8, ..over };
        let d = compare_with_limit(&[over, under], &space, &lim).unwrap();
        assert_eq!(d.records[0].lower, 0.0);
        assert!((d.records[1].lower - (0.2 - 0.8e-6)).abs() < 1e-12);
        assert!((d.eps_hat - 0.2).abs() < 1e-12);
        assert_eq!(d.worst.d_grid, 0.8);
    }
}
