//! Scenario files: JSON records holding the parameters of one command.
//! Unknown fields are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::geodesy::GridSpec;
use crate::lab::{AuditConfig, BaseShape, PlanSpec};
use crate::torus3d::{Grid3Spec, MovingBump2D, Plan3Spec};

/// Parameters of `converge` and `audit`. Missing fields fall back to the
/// family defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeScenario {
    pub family: String,
    #[serde(default)]
    pub h0: Option<f64>,
    #[serde(default)]
    pub shape: Option<BaseShape>,
    #[serde(default)]
    pub js: Option<Vec<usize>>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub plan: Option<PlanSpec>,
    #[serde(default)]
    pub audit: Option<AuditConfig>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Torus3Scenario {
    pub family: MovingBump2D,
    #[serde(default)]
    pub js: Option<Vec<usize>>,
    #[serde(default)]
    pub grid: Option<Grid3Spec>,
    #[serde(default)]
    pub plan: Option<Plan3Spec>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub json: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::from_json;

    #[test]
    fn parse_and_reject() {
        let s: ConvergeScenario =
            from_json(r#"{"family": "single-ridge", "js": [4, 8], "plan": {"sources": 2, "targets": 3, "seed": 1, "max_levels": 1}}"#)
                .unwrap();
        assert_eq!(s.js, Some(vec![4, 8]));
        assert!(from_json::<ConvergeScenario>(r#"{"family": "single-ridge", "jz": [4]}"#).is_err());
        assert!(from_json::<ConvergeScenario>(
            r#"{"family": "x", "grid": {"n_r": 64, "n_theta": 64, "k": 2, "q": 1}}"#
        )
        .is_err());
        let t: Torus3Scenario = from_json(r#"{"family": {"family": "moving-bump-2d", "c": 1, "h0": 2}}"#).unwrap();
        assert_eq!(t.family, MovingBump2D::MovingBump2d { c: 1.0, h0: 2.0 });
        assert!(from_json::<Torus3Scenario>(r#"{"family": {"family": "constant", "c": 1, "h0": 2}}"#).is_err());
    }
}
