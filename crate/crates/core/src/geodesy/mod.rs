//! Distance computation on warped products by independent methods: a
//! weighted grid graph, Clairaut-reduced geodesics, and closed forms.

pub mod anisotropy;
pub mod bounds;
pub mod clairaut;
pub mod grid;
mod registry;

use serde::{Deserialize, Serialize};

use crate::curve::PolylineCurve;

pub use bounds::{cinch_limit_distance, level_set_distance, ridge_bypass_bound, taxi_upper_bound, RidgeBypass};
pub use clairaut::clairaut_distance;
pub use grid::{grid_distance, GridSpec, WarpGrid};
pub use registry::{ClairautMethod, ClosedFormMethod, DistanceMethod, GridMethod, MethodOptions, MethodRegistry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Grid,
    Clairaut,
    ClosedForm,
}

/// A distance value with a realizing path and an error estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicResult {
    pub distance: f64,
    pub method: Method,
    pub error_estimate: f64,
    pub path: PolylineCurve,
    /// False when an iterative method stopped before reaching its
    /// tolerance; `distance` is then the best candidate found.
    #[serde(default = "yes")]
    pub converged: bool,
}

fn yes() -> bool {
    true
}
