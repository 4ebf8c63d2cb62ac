//! Convergence experiments on the example sequences: discrepancy
//! estimates, Gromov–Hausdorff and intrinsic flat upper bounds, and audits
//! of the quantitative lemmas behind them.

pub mod audit;
pub mod discrepancy;
pub mod experiment;
pub mod families;
pub mod limit;
pub mod sampling;

pub use audit::{audit_theorem_bounds, AuditConfig, AuditRow, AuditStatus};
pub use discrepancy::{
    compare_with_limit, discrepancy_estimate, sample_grid_distances, Discrepancy, GridSample, PairRecord,
};
pub use experiment::{run_family_experiment, ConvergenceReport, ConvergenceRow, ExperimentConfig, LimitColumn};
pub use families::{BaseShape, FamilyRegistry, SequenceFamily};
pub use limit::{limit_distance, LimitMetric};
pub use sampling::{build_plan, PairKind, PlanSpec, SamplePair, SamplePlan};

use crate::error::{Result, WarpError};

/// `d_GH((X, d_j), (X, d_∞)) ≤ 2ε`.
pub fn gh_upper_bound(eps: f64) -> Result<f64> {
    if !(eps >= 0.0) {
        return Err(WarpError::invalid(format!("ε must be ≥ 0, got {eps}")));
    }
    Ok(2.0 * eps)
}

/// `2^{(n+1)/2} λ^{n+1} · 2ε · mass`.
pub fn flat_upper_bound(eps: f64, lambda: f64, n: u32, mass: f64) -> Result<f64> {
    if !(eps >= 0.0) || !(lambda >= 1.0) || !(mass > 0.0) || n == 0 {
        return Err(WarpError::invalid(format!(
            "flat bound needs ε ≥ 0, λ ≥ 1, mass > 0, n ≥ 1; got ε={eps}, λ={lambda}, mass={mass}, n={n}"
        )));
    }
    let n = n as f64;
    Ok(2f64.powf(0.5 * (n + 1.0)) * lambda.powf(n + 1.0) * 2.0 * eps * mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bound_examples() {
        assert_eq!(gh_upper_bound(0.0).unwrap(), 0.0);
        assert_eq!(gh_upper_bound(0.05).unwrap(), 0.1);
        assert_eq!(gh_upper_bound(1.5).unwrap(), 3.0);
        assert!(gh_upper_bound(-1.0).is_err());
        assert_eq!(flat_upper_bound(0.0, 2.0, 2, 1.0).unwrap(), 0.0);
        let v = flat_upper_bound(0.1, 2.0, 2, 4.0 * PI * PI).unwrap();
        assert!((v - 2f64.powf(1.5) * 8.0 * 0.2 * 4.0 * PI * PI).abs() < 1e-9);
        assert!((v - 178.66).abs() < 0.01, "{v}");
        assert!((flat_upper_bound(1.0, 1.0, 1, 1.0).unwrap() - 4.0).abs() < 1e-15);
        assert!(flat_upper_bound(0.1, 0.5, 2, 1.0).is_err());
    }
}
