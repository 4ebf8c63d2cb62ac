//! Convergence experiments on the warped 3-torus against the flat limit.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{Grid3, Grid3Spec};
use super::{diameter3_upper_bound, limit3_distance, wrap, Point3, Warp2DProfile};
use crate::error::{Result, WarpError};
use crate::functionals::lambda_from_bounds;
use crate::lab::families::moving_center;
use crate::lab::{flat_upper_bound, gh_upper_bound, PairKind};

const EDGE_QUADRATURE_TOL: f64 = 1e-6;
const DIM: u32 = 3;

/// Sequences of warping functions on the 3-torus with constant limit `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MovingBump2D {
    /// `f_j ≡ c`.
    Constant { c: f64 },
    /// Level `c` with a bump of height `h0` centered at `(s_j, s_j)` with
    /// half-width `δ_j`, following the moving-ridge enumeration.
    #[serde(rename = "moving-bump-2d")]
    MovingBump2d { c: f64, h0: f64 },
}

impl MovingBump2D {
    pub fn level(&self) -> f64 {
        match *self {
            MovingBump2D::Constant { c } | MovingBump2D::MovingBump2d { c, .. } => c,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MovingBump2D::Constant { .. } => "constant",
            MovingBump2D::MovingBump2d { .. } => "moving-bump-2d",
        }
    }

    pub fn profile(&self, j: usize) -> Result<Warp2DProfile> {
        match *self {
            MovingBump2D::Constant { c } => Warp2DProfile::constant(c),
            MovingBump2D::MovingBump2d { c, h0 } => {
                if !(h0 > c) {
                    return Err(WarpError::invalid(format!("bump height h0 = {h0} must exceed the level c = {c}")));
                }
                let (s, d) = moving_center(j)?;
                Warp2DProfile::bump(c, h0, [s, s], d)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plan3Spec {
    pub sources: usize,
    pub targets: usize,
    /// Offset into the Halton sequences.
    pub seed: u64,
}

impl Default for Plan3Spec {
    fn default() -> Self {
        Plan3Spec { sources: 6, targets: 12, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample3Plan {
    pub groups: Vec<(Point3, Vec<(Point3, PairKind)>)>,
}

impl Sample3Plan {
    pub fn len(&self) -> usize {
        self.groups.iter().map(|g| g.1.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn halton3(bases: [u8; 3], index: usize) -> Point3 {
    let c = |b| -PI + TAU * halton::number(b, index);
    Point3::new(c(bases[0]), c(bases[1]), c(bases[2]))
}

/// Low-discrepancy pairs plus pairs on and across each bump.
pub fn build_plan3(spec: Plan3Spec, profile: &Warp2DProfile) -> Result<Sample3Plan> {
    if spec.sources == 0 || spec.targets == 0 {
        return Err(WarpError::invalid("sample plan needs at least one source and one target"));
    }
    let off = spec.seed as usize;
    let mut groups = Vec::new();
    for s in 0..spec.sources {
        let p = halton3([2, 3, 5], off + s + 1);
        let ts = (0..spec.targets)
            .map(|t| (halton3([7, 11, 13], off + s * spec.targets + t + 1), PairKind::LowDiscrepancy))
            .collect();
        groups.push((p, ts));
    }
    for b in profile.bumps() {
        let [x, y] = b.center;
        let d = b.half_width;
        let pt = |x: f64, y: f64, z: f64| Point3::new(wrap(x), wrap(y), wrap(z));
        groups.push((
            pt(x, y, 0.0),
            vec![
                (pt(x, y, PI), PairKind::OnLevel),
                (pt(x, y, 0.5 * PI), PairKind::OnLevel),
                (pt(x + d, y, PI), PairKind::Straddle),
                (pt(x + 1.0, y + 1.0, 0.6 * PI), PairKind::Straddle),
            ],
        ));
        groups.push((pt(x - 0.5 * d, y, 0.0), vec![(pt(x + 0.5 * d, y, PI), PairKind::Straddle)]));
    }
    Ok(Sample3Plan { groups })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pair3Record {
    pub p: Point3,
    pub q: Point3,
    pub kind: PairKind,
    pub d_grid: f64,
    pub d_limit: f64,
    pub grid_err: f64,
    pub diff: f64,
    /// Smallest `|d_j − d_∞|` compatible with the grid error.
    pub lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Torus3Config {
    pub js: Vec<usize>,
    pub grid: Grid3Spec,
    #[serde(default)]
    pub plan: Plan3Spec,
    /// Tolerance of the lower-bound check.
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    1e-6
}

impl Default for Torus3Config {
    fn default() -> Self {
        Torus3Config {
            js: vec![2, 4, 8],
            grid: Grid3Spec { n: 64, k: 2 },
            plan: Plan3Spec::default(),
            tol: default_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Torus3Row {
    pub j: usize,
    pub grid: Grid3Spec,
    pub samples: usize,
    pub eps_hat: f64,
    pub eps_corrected: f64,
    pub grid_err: f64,
    /// `‖f_j − c‖_{L²}`.
    pub l2_norm: f64,
    pub lambda: f64,
    pub gh_bound: f64,
    pub flat_bound: f64,
    pub diameter_bound: f64,
    /// `min (d_j − d_∞) + √2 √c D / (min f_j √j)` over the pairs, using
    /// the low end of each grid interval; `None` when `f_j ≥ c − 1/j > 0`
    /// fails.
    pub lower_bound_slack: Option<f64>,
    pub worst: Pair3Record,
    pub records: Vec<Pair3Record>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Torus3Report {
    pub family: MovingBump2D,
    pub dimension: u32,
    pub plan: Plan3Spec,
    pub rows: Vec<Torus3Row>,
}

pub fn run_torus3_experiment(family: MovingBump2D, cfg: &Torus3Config) -> Result<Torus3Report> {
    if cfg.js.is_empty() {
        return Err(WarpError::invalid("experiment needs at least one j"));
    }
    cfg.grid.validate()?;
    let rows = cfg.js.iter().map(|&j| run_one(family, j, cfg)).collect::<Result<_>>()?;
    Ok(Torus3Report { family, dimension: DIM, plan: cfg.plan, rows })
}

fn run_one(family: MovingBump2D, j: usize, cfg: &Torus3Config) -> Result<Torus3Row> {
    if j == 0 {
        return Err(WarpError::invalid("sequence index j starts at 1"));
    }
    let c = family.level();
    let profile = family.profile(j)?;
    let plan = build_plan3(cfg.plan, &profile)?;
    let grid = Grid3::build(&profile, cfg.grid)?;
    let aniso = grid.anisotropy();
    let groups: Vec<Vec<Pair3Record>> = plan
        .groups
        .par_iter()
        .map(|(p, ts)| {
            let (np, _) = grid.snap(*p)?;
            let nodes = ts.iter().map(|(q, _)| grid.snap(*q).map(|s| s.0)).collect::<Result<Vec<_>>>()?;
            let ds = grid.distances_from(np, &nodes);
            let pp = grid.node_point(np);
            ts.iter()
                .zip(nodes.iter().zip(ds))
                .map(|(&(_, kind), (&nq, d))| {
                    let q = grid.node_point(nq);
                    let dl = limit3_distance(c, pp, q)?;
                    let err = aniso * d;
                    let slack = EDGE_QUADRATURE_TOL * d;
                    let lower = (d - err - slack - dl).max(dl - d - slack).max(0.0);
                    Ok(Pair3Record {
                        p: pp,
                        q,
                        kind,
                        d_grid: d,
                        d_limit: dl,
                        grid_err: err,
                        diff: (d - dl).abs(),
                        lower,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    drop(grid);
    let records: Vec<Pair3Record> = groups.into_iter().flatten().collect();
    let worst =
        *records.iter().max_by(|a, b| a.diff.total_cmp(&b.diff)).ok_or_else(|| WarpError::invalid("no samples"))?;
    let eps_hat = worst.diff;

    let l2 = profile.l2_from_level();
    let lambda = lambda_from_bounds(profile.f_min(), profile.f_max());
    let diameter = diameter3_upper_bound(l2, c)?;
    let floor = c - 1.0 / j as f64;
    let lower_bound_slack = if floor > 0.0 && profile.f_min() >= floor {
        let bound = 2f64.sqrt() * c.sqrt() * diameter / (profile.f_min() * (j as f64).sqrt());
        let worst_gap = records
            .iter()
            .map(|r| r.d_grid - r.grid_err - EDGE_QUADRATURE_TOL * r.d_grid - r.d_limit)
            .fold(f64::INFINITY, f64::min);
        Some(worst_gap + bound)
    } else {
        None
    };
    Ok(Torus3Row {
        j,
        grid: cfg.grid,
        samples: records.len(),
        eps_hat,
        eps_corrected: records.iter().map(|r| r.lower).fold(0.0, f64::max),
        grid_err: records.iter().map(|r| r.grid_err).fold(0.0, f64::max),
        l2_norm: l2,
        lambda,
        gh_bound: gh_upper_bound(eps_hat)?,
        // mass of the flat reference torus (2π)³
        flat_bound: flat_upper_bound(eps_hat, lambda, DIM, TAU.powi(3))?,
        diameter_bound: diameter,
        lower_bound_slack,
        worst,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Torus3Config {
        Torus3Config {
            js: vec![2],
            grid: Grid3Spec { n: 32, k: 1 },
            plan: Plan3Spec { sources: 2, targets: 4, seed: 0 },
            tol: 1e-6,
        }
    }

    #[test]
    fn constant_family_is_within_grid_error() {
        let rep = run_torus3_experiment(MovingBump2D::Constant { c: 1.0 }, &small()).unwrap();
        let row = &rep.rows[0];
        assert_eq!(rep.dimension, 3);
        assert_eq!(row.samples, 8);
        assert!(row.eps_hat <= row.grid_err);
        assert_eq!(row.eps_corrected, 0.0);
        assert_eq!(row.l2_norm, 0.0);
        assert!(row.lower_bound_slack.unwrap() >= 0.0);
    }

    #[test]
    fn bump_member_and_plan() {
        let fam = MovingBump2D::MovingBump2d { c: 1.0, h0: 2.0 };
        let f = fam.profile(4).unwrap();
        assert_eq!(f.bumps()[0].center, [0.5, 0.5]);
        assert_eq!(f.bumps()[0].half_width, 0.5);
        assert!(MovingBump2D::MovingBump2d { c: 1.0, h0: 0.5 }.profile(1).is_err());
        let plan = build_plan3(Plan3Spec { sources: 2, targets: 3, seed: 5 }, &f).unwrap();
        assert_eq!(plan.len(), 6 + 5);
        assert_eq!(plan, build_plan3(Plan3Spec { sources: 2, targets: 3, seed: 5 }, &f).unwrap());
    }

    #[test]
    fn on_bump_pair_exceeds_the_limit() {
        let rep = run_torus3_experiment(MovingBump2D::MovingBump2d { c: 1.0, h0: 2.0 }, &small()).unwrap();
        let row = &rep.rows[0];
        let on = row.records.iter().find(|r| r.kind == PairKind::OnLevel).unwrap();
        assert!(on.d_grid > on.d_limit + 0.1);
        assert!(row.eps_corrected > 0.1);
        assert!(row.lower_bound_slack.unwrap() >= 0.0);
    }
}
