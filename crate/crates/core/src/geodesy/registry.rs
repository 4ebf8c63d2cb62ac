//! Distance methods behind a common trait, selectable by name.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use super::{clairaut_distance, level_set_distance, GeodesicResult, GridSpec, Method, WarpGrid};
use crate::curve::PolylineCurve;
use crate::error::{Result, WarpError};
use crate::space::{SurfacePoint, WarpedSpace};

pub trait DistanceMethod: Send + Sync {
    fn name(&self) -> &'static str;
    fn distance(&self, space: &WarpedSpace, p: SurfacePoint, q: SurfacePoint) -> Result<GeodesicResult>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodOptions {
    pub grid: GridSpec,
    pub tol: f64,
}

impl Default for MethodOptions {
    fn default() -> Self {
        MethodOptions { grid: GridSpec { n_r: 256, n_theta: 256, k: 2 }, tol: 1e-8 }
    }
}

/// Grid-graph shortest paths. The graph of the last space queried is kept
/// so repeated queries on one space build it once.
pub struct GridMethod {
    spec: GridSpec,
    cache: Mutex<Option<Arc<WarpGrid>>>,
}

impl GridMethod {
    pub fn new(spec: GridSpec) -> Self {
        GridMethod { spec, cache: Mutex::new(None) }
    }

    pub fn grid_for(&self, space: &WarpedSpace) -> Result<Arc<WarpGrid>> {
        let mut slot = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(g) = slot.as_ref() {
            if g.space() == space {
                return Ok(g.clone());
            }
        }
        let g = Arc::new(WarpGrid::build(space, self.spec)?);
        *slot = Some(g.clone());
        Ok(g)
    }
}

impl DistanceMethod for GridMethod {
    fn name(&self) -> &'static str {
        "grid"
    }

    fn distance(&self, space: &WarpedSpace, p: SurfacePoint, q: SurfacePoint) -> Result<GeodesicResult> {
        self.grid_for(space)?.distance(p, q)
    }
}

pub struct ClairautMethod {
    pub tol: f64,
}

impl DistanceMethod for ClairautMethod {
    fn name(&self) -> &'static str {
        "clairaut"
    }

    fn distance(&self, space: &WarpedSpace, p: SurfacePoint, q: SurfacePoint) -> Result<GeodesicResult> {
        clairaut_distance(space, p, q, self.tol)
    }
}

/// Exact values where one exists: constant profiles, and pairs on a level
/// where the profile attains its minimum.
pub struct ClosedFormMethod;

impl DistanceMethod for ClosedFormMethod {
    fn name(&self) -> &'static str {
        "closed-form"
    }

    fn distance(&self, space: &WarpedSpace, p: SurfacePoint, q: SurfacePoint) -> Result<GeodesicResult> {
        let p = space.normalize(p)?;
        let q = space.normalize(q)?;
        let done = |distance: f64, path: PolylineCurve| GeodesicResult {
            distance,
            method: Method::ClosedForm,
            error_estimate: 0.0,
            path,
            converged: true,
        };
        if let Some(c) = space.profile.constant_value() {
            return Ok(done(space.product_distance(c, p, q), PolylineCurve::straight(space, p, q)?));
        }
        if p.r == q.r {
            let d = level_set_distance(space, p.r, p.theta, q.theta)?;
            return Ok(done(d, PolylineCurve::straight(space, p, q)?));
        }
        Err(WarpError::Hypothesis(
            "no closed form: profile is not constant and the points are not on a common minimal level".into(),
        ))
    }
}

/// Methods registered by name.
pub struct MethodRegistry {
    methods: BTreeMap<&'static str, Box<dyn DistanceMethod>>,
}

impl MethodRegistry {
    pub fn empty() -> Self {
        MethodRegistry { methods: BTreeMap::new() }
    }

    /// Registry holding the grid, Clairaut and closed-form methods.
    pub fn with_defaults(opts: MethodOptions) -> Self {
        let mut r = Self::empty();
        r.register(Box::new(GridMethod::new(opts.grid)));
        r.register(Box::new(ClairautMethod { tol: opts.tol }));
        r.register(Box::new(ClosedFormMethod));
        r
    }

    /// Adds `method`, replacing any method registered under the same name.
    pub fn register(&mut self, method: Box<dyn DistanceMethod>) {
        self.methods.insert(method.name(), method);
    }

    pub fn get(&self, name: &str) -> Result<&dyn DistanceMethod> {
        self.methods
            .get(name)
            .map(|m| m.as_ref())
            .ok_or_else(|| WarpError::invalid(format!("unknown method {name:?}; known: {}", self.names().join(", "))))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.methods.keys().copied().collect()
    }
}

impl Default for MethodRegistry {
    fn default() -> Self {
        Self::with_defaults(MethodOptions::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::WarpingProfile;
    use std::f64::consts::PI;

    #[test]
    fn lookup_by_name() {
        let reg = MethodRegistry::default();
        assert_eq!(reg.names(), vec!["clairaut", "closed-form", "grid"]);
        assert!(matches!(reg.get("nope"), Err(WarpError::InvalidInput(_))));
    }

    #[test]
    fn methods_agree_on_flat_space() {
        let s = WarpedSpace::standard_interval(WarpingProfile::constant(1.0).unwrap()).unwrap();
        let reg = MethodRegistry::with_defaults(MethodOptions { grid: GridSpec::square(128, 3).unwrap(), tol: 1e-9 });
        let p = SurfacePoint::new(-1.0, 0.5);
        let q = SurfacePoint::new(1.5, 2.0);
        let exact = reg.get("closed-form").unwrap().distance(&s, p, q).unwrap().distance;
        assert!((exact - 2.5f64.hypot(1.5)).abs() < 1e-12);
        let c = reg.get("clairaut").unwrap().distance(&s, p, q).unwrap();
        assert!((c.distance - exact).abs() < 1e-8);
        let g = reg.get("grid").unwrap().distance(&s, p, q).unwrap();
        assert!((g.distance - exact).abs() <= g.error_estimate);
    }

    #[test]
    fn closed_form_rejects_generic_pairs() {
        let s = WarpedSpace::standard_interval(WarpingProfile::cinch(0.5, 0.0, 0.25).unwrap()).unwrap();
        let m = ClosedFormMethod;
        let v = m.distance(&s, SurfacePoint::new(0.0, 0.0), SurfacePoint::new(0.0, PI)).unwrap();
        assert!((v.distance - 0.5 * PI).abs() < 1e-15);
        assert!(matches!(
            m.distance(&s, SurfacePoint::new(0.0, 0.0), SurfacePoint::new(1.0, PI)),
            Err(WarpError::Hypothesis(_))
        ));
    }
}
