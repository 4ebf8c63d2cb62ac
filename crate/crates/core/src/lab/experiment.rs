//! Convergence experiments over a list of sequence indices.

use serde::{Deserialize, Serialize};

use super::audit::{audit_theorem_bounds, AuditConfig, AuditRow};
use super::discrepancy::{compare_with_limit, sample_grid_distances, PairRecord};
use super::families::SequenceFamily;
use super::limit::LimitMetric;
use super::sampling::{build_plan, PlanSpec};
use super::{flat_upper_bound, gh_upper_bound};
use crate::error::{Result, WarpError};
use crate::functionals::{bilipschitz_lambda, lp_profile_distance};
use crate::geodesy::{GridSpec, WarpGrid};
use crate::profile::WarpingProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub js: Vec<usize>,
    /// Overrides the family's grid schedule.
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub plan: PlanSpec,
    #[serde(default)]
    pub audit: Option<AuditConfig>,
}

impl ExperimentConfig {
    pub fn for_family(family: &dyn SequenceFamily) -> Self {
        ExperimentConfig { js: family.default_js(), grid: None, plan: PlanSpec::default(), audit: None }
    }
}

/// Discrepancy against one candidate limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitColumn {
    pub label: String,
    pub limit: LimitMetric,
    /// Whether the sequence is expected to converge to this limit.
    pub expected: bool,
    pub eps_hat: f64,
    pub eps_corrected: f64,
    pub worst: PairRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub j: usize,
    pub grid: GridSpec,
    pub samples: usize,
    /// Sampled `max |d_j − d_∞|` against the primary limit; a lower
    /// estimate of the uniform discrepancy, up to grid error.
    pub eps_hat: f64,
    pub eps_corrected: f64,
    pub grid_err: f64,
    /// `‖f_j − f_∞‖_{L²}`.
    pub l2_norm: f64,
    pub lambda: f64,
    pub gh_bound: f64,
    pub flat_bound: f64,
    pub worst: PairRecord,
    pub limits: Vec<LimitColumn>,
    pub records: Vec<PairRecord>,
    pub audit: Vec<AuditRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub family: String,
    pub background: f64,
    pub plan: PlanSpec,
    pub rows: Vec<ConvergenceRow>,
}

/// Dimension used in the intrinsic flat bound for surfaces.
const SURFACE_DIM: u32 = 2;

pub fn run_family_experiment(family: &dyn SequenceFamily, cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    if cfg.js.is_empty() {
        return Err(WarpError::invalid("experiment needs at least one j"));
    }
    let mut rows = Vec::with_capacity(cfg.js.len());
    for &j in &cfg.js {
        rows.push(run_one(family, j, cfg)?);
    }
    Ok(ConvergenceReport { family: family.name().into(), background: family.background(), plan: cfg.plan, rows })
}

fn run_one(family: &dyn SequenceFamily, j: usize, cfg: &ExperimentConfig) -> Result<ConvergenceRow> {
    let space = family.space(j)?;
    let grid_spec = cfg.grid.unwrap_or_else(|| family.grid(j));
    let plan = build_plan(cfg.plan, &space.base, &space.fiber, &family.special_levels(j))?;
    let grid = WarpGrid::build(&space, grid_spec)?;
    let samples = sample_grid_distances(&grid, &plan)?;
    drop(grid);

    let mut limits = Vec::new();
    for (i, (label, limit)) in family.limits(j).into_iter().enumerate() {
        limits.push((label, limit, i == 0));
    }
    for (label, limit) in family.wrong_limits() {
        limits.push((label, limit, false));
    }
    let mut columns = Vec::with_capacity(limits.len());
    let mut primary = None;
    for (label, limit, expected) in limits {
        let d = compare_with_limit(&samples, &space, &limit)?;
        if primary.is_none() {
            primary = Some(d.clone());
        }
        columns.push(LimitColumn {
            label,
            limit,
            expected,
            eps_hat: d.eps_hat,
            eps_corrected: d.eps_corrected,
            worst: d.worst,
        });
    }
    let primary = primary.ok_or_else(|| WarpError::invalid("family has no limit"))?;

    let background = WarpingProfile::constant(family.background())?;
    let l2 = lp_profile_distance(&space.profile, &background, &space.base, 2.0, 64)?;
    let lambda = bilipschitz_lambda(&space);
    // mass of the f ≡ 1 product the biLipschitz bounds compare against
    let mass = space.base.length() * space.fiber.circumference;
    let audit = match &cfg.audit {
        Some(a) => audit_theorem_bounds(family, j, &samples, a)?,
        None => Vec::new(),
    };
    Ok(ConvergenceRow {
        j,
        grid: grid_spec,
        samples: samples.len(),
        eps_hat: primary.eps_hat,
        eps_corrected: primary.eps_corrected,
        grid_err: primary.grid_err,
        l2_norm: l2,
        lambda,
        gh_bound: gh_upper_bound(primary.eps_hat)?,
        flat_bound: flat_upper_bound(primary.eps_hat, lambda, SURFACE_DIM, mass)?,
        worst: primary.worst,
        limits: columns,
        records: primary.records,
        audit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::families::{BaseShape, FamilyRegistry};

    fn small(js: Vec<usize>) -> ExperimentConfig {
        ExperimentConfig {
            js,
            grid: Some(GridSpec::square(96, 3).unwrap()),
            plan: PlanSpec { sources: 3, targets: 4, seed: 1, max_levels: 1 },
            audit: None,
        }
    }

    #[test]
    fn moving_cinch_reports_both_limits() {
        let fam = FamilyRegistry::new().build("moving-cinch", Some(0.5), BaseShape::Interval).unwrap();
        let rep = run_family_experiment(fam.as_ref(), &small(vec![6, 10])).unwrap();
        assert_eq!(rep.rows.len(), 2);
        for row in &rep.rows {
            assert_eq!(row.limits.len(), 3);
            assert_eq!(row.limits.iter().filter(|c| c.expected).count(), 1);
            assert_eq!(row.gh_bound, 2.0 * row.eps_hat);
            assert_eq!(row.records.len(), row.samples);
        }
        // j = 6 has its cinch at 0, j = 10 at 1
        let near = |row: &ConvergenceRow, i: usize| row.limits[i].eps_corrected;
        assert!(near(&rep.rows[0], 0) < near(&rep.rows[0], 1));
        assert!(near(&rep.rows[1], 1) < near(&rep.rows[1], 0));
    }

    #[test]
    fn empty_index_list_is_rejected() {
        let fam = FamilyRegistry::new().build("constant", None, BaseShape::Interval).unwrap();
        assert!(run_family_experiment(fam.as_ref(), &small(vec![])).is_err());
    }
}
