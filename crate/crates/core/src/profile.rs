//! Warping functions `f(r)` for warped products `dr^2 + f(r)^2 dθ^2`.
//!
//! Every bump-type family is built from one canonical even bump: on
//! `t ∈ [-1, 1]` it interpolates from the ambient `level` at `t = ±1` to the
//! `peak` value at `t = 0` with a raised cosine,
//!
//! ```text
//! h(t) = level + (peak - level) * (1 + cos(π t)) / 2
//! ```
//!
//! which is smooth inside the support, even, and has `h(±1) = level`,
//! `h'(±1) = 0`. Cinches have `peak < level`, ridges `peak > level`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WarpError};

/// One raised-cosine bump over an ambient level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
    /// Value taken at `center`.
    pub peak: f64,
}

impl Bump {
    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    /// Deviation from `level` at `r`; zero outside the support.
    #[inline]
    pub fn deviation(&self, level: f64, r: f64) -> f64 {
        let t = (r - self.center) / self.half_width;
        if t.abs() >= 1.0 {
            0.0
        } else {
            (self.peak - level) * 0.5 * (1.0 + (PI * t).cos())
        }
    }
}

/// Canonical bump profile `h(t)` on `[-1, 1]`, equal to `level` outside.
#[inline]
pub fn canonical_bump(level: f64, peak: f64, t: f64) -> f64 {
    if t.abs() >= 1.0 {
        level
    } else {
        // weighted form keeps h(0) = peak exact
        let w = 0.5 * (1.0 + (PI * t).cos());
        level * (1.0 - w) + peak * w
    }
}

/// A positive warping function, stored as a closed-form family descriptor.
///
/// The JSON form is `{"family": "<kebab-name>", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case")]
pub enum WarpingProfile {
    #[serde(rename_all = "snake_case")]
    Constant { c: f64 },
    /// Level 1 away from `[center - half_width, center + half_width]`, dipping to `h0 ∈ (0, 1]`.
    #[serde(rename_all = "snake_case")]
    CinchBump { h0: f64, center: f64, half_width: f64 },
    /// Level 1 away from the support, rising to `h0 ∈ (1, 2]`.
    #[serde(rename_all = "snake_case")]
    RidgeBump { h0: f64, center: f64, half_width: f64 },
    /// Disjoint bumps over a common ambient level.
    #[serde(rename_all = "snake_case")]
    SumOfBumps { level: f64, bumps: Vec<Bump> },
    /// Piecewise-linear interpolation through `(r[i], values[i])`.
    #[serde(rename_all = "snake_case")]
    Tabulated { r: Vec<f64>, values: Vec<f64> },
}

impl WarpingProfile {
    pub fn constant(c: f64) -> Result<Self> {
        let p = WarpingProfile::Constant { c };
        p.validate()?;
        Ok(p)
    }

    pub fn cinch(h0: f64, center: f64, half_width: f64) -> Result<Self> {
        let p = WarpingProfile::CinchBump { h0, center, half_width };
        p.validate()?;
        Ok(p)
    }

    pub fn ridge(h0: f64, center: f64, half_width: f64) -> Result<Self> {
        let p = WarpingProfile::RidgeBump { h0, center, half_width };
        p.validate()?;
        Ok(p)
    }

    pub fn sum_of_bumps(level: f64, mut bumps: Vec<Bump>) -> Result<Self> {
        bumps.sort_by(|a, b| a.center.total_cmp(&b.center));
        let p = WarpingProfile::SumOfBumps { level, bumps };
        p.validate()?;
        Ok(p)
    }

    pub fn tabulated(r: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let p = WarpingProfile::Tabulated { r, values };
        p.validate()?;
        Ok(p)
    }

    /// Parses and validates a JSON descriptor.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: serde_json::Value = serde_json::from_str(text)?;
        Self::from_value(raw)
    }

    /// Same as [`from_json`](Self::from_json) for an already parsed value.
    /// Unknown keys at either level are rejected.
    pub fn from_value(raw: serde_json::Value) -> Result<Self> {
        let p: WarpingProfile = serde_json::from_value(raw.clone())?;
        let canonical = serde_json::to_value(&p)?;
        let keys = |v: &serde_json::Value| -> Vec<String> {
            v.as_object().map(|o| o.keys().cloned().collect()).unwrap_or_default()
        };
        for k in keys(&raw) {
            if k != "family" && k != "params" {
                return Err(WarpError::Schema(format!("unknown profile field `{k}`")));
            }
        }
        let allowed = keys(&canonical["params"]);
        for k in keys(&raw["params"]) {
            if !allowed.contains(&k) {
                return Err(WarpError::Schema(format!("unknown profile parameter `{k}`")));
            }
        }
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let finite_pos = |x: f64, what: &str| -> Result<()> {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(WarpError::invalid(format!("{what} must be positive and finite, got {x}")))
            }
        };
        match self {
            WarpingProfile::Constant { c } => finite_pos(*c, "constant level"),
            WarpingProfile::CinchBump { h0, center, half_width } => {
                finite_pos(*half_width, "half_width")?;
                if !center.is_finite() {
                    return Err(WarpError::invalid("cinch center must be finite"));
                }
                if !(*h0 > 0.0 && *h0 <= 1.0) {
                    return Err(WarpError::invalid(format!("cinch depth h0 must lie in (0, 1], got {h0}")));
                }
                Ok(())
            }
            WarpingProfile::RidgeBump { h0, center, half_width } => {
                finite_pos(*half_width, "half_width")?;
                if !center.is_finite() {
                    return Err(WarpError::invalid("ridge center must be finite"));
                }
                if !(*h0 > 1.0 && *h0 <= 2.0) {
                    return Err(WarpError::invalid(format!("ridge height h0 must lie in (1, 2], got {h0}")));
                }
                Ok(())
            }
            WarpingProfile::SumOfBumps { level, bumps } => {
                finite_pos(*level, "level")?;
                for b in bumps {
                    finite_pos(b.half_width, "bump half_width")?;
                    finite_pos(b.peak, "bump peak")?;
                    if !b.center.is_finite() {
                        return Err(WarpError::invalid("bump center must be finite"));
                    }
                }
                for w in bumps.windows(2) {
                    if w[0].center > w[1].center {
                        return Err(WarpError::invalid("bumps must be sorted by center"));
                    }
                    if w[0].support().1 > w[1].support().0 {
                        return Err(WarpError::invalid(format!("bump supports overlap near r = {}", w[1].center)));
                    }
                }
                Ok(())
            }
            WarpingProfile::Tabulated { r, values } => {
                if r.len() < 2 || r.len() != values.len() {
                    return Err(WarpError::invalid(
                        "tabulated profile needs at least two (r, value) samples of equal length",
                    ));
                }
                if r.windows(2).any(|w| !(w[1] > w[0])) || r.iter().any(|x| !x.is_finite()) {
                    return Err(WarpError::invalid("tabulated r samples must be finite and strictly increasing"));
                }
                for v in values {
                    finite_pos(*v, "tabulated value")?;
                }
                Ok(())
            }
        }
    }

    /// Value at `r` without domain checks. Tabulated profiles are held
    /// constant beyond their first and last samples.
    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        match self {
            WarpingProfile::Constant { c } => *c,
            WarpingProfile::CinchBump { h0, center, half_width }
            | WarpingProfile::RidgeBump { h0, center, half_width } => {
                canonical_bump(1.0, *h0, (r - center) / half_width)
            }
            WarpingProfile::SumOfBumps { level, bumps } => {
                // bumps are sorted and disjoint: at most one is active
                let idx = bumps.partition_point(|b| b.center + b.half_width <= r);
                match bumps.get(idx) {
                    Some(b) => canonical_bump(*level, b.peak, (r - b.center) / b.half_width),
                    None => *level,
                }
            }
            WarpingProfile::Tabulated { r: xs, values } => {
                if r <= xs[0] {
                    return values[0];
                }
                let n = xs.len();
                if r >= xs[n - 1] {
                    return values[n - 1];
                }
                let i = xs.partition_point(|x| *x <= r) - 1;
                let w = (r - xs[i]) / (xs[i + 1] - xs[i]);
                values[i] + w * (values[i + 1] - values[i])
            }
        }
    }

    /// Checked evaluation: rejects non-finite `r` and, for tabulated
    /// profiles, points outside the sampled span.
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        if !r.is_finite() {
            return Err(WarpError::domain(format!("r = {r} is not finite")));
        }
        if let WarpingProfile::Tabulated { r: xs, .. } = self {
            let (lo, hi) = (xs[0], xs[xs.len() - 1]);
            if r < lo || r > hi {
                return Err(WarpError::domain(format!("r = {r} outside tabulated span [{lo}, {hi}]")));
            }
        }
        Ok(self.value(r))
    }

    /// Ambient level away from all bumps, if the family has one.
    /// The value of a profile that is constant everywhere.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            WarpingProfile::Constant { c } => Some(*c),
            WarpingProfile::SumOfBumps { level, bumps } if bumps.is_empty() => Some(*level),
            _ => None,
        }
    }

    pub fn level(&self) -> Option<f64> {
        match self {
            WarpingProfile::Constant { c } => Some(*c),
            WarpingProfile::CinchBump { .. } | WarpingProfile::RidgeBump { .. } => Some(1.0),
            WarpingProfile::SumOfBumps { level, .. } => Some(*level),
            WarpingProfile::Tabulated { .. } => None,
        }
    }

    /// Bumps of the family in a uniform representation.
    pub fn bumps(&self) -> Vec<Bump> {
        match self {
            WarpingProfile::CinchBump { h0, center, half_width }
            | WarpingProfile::RidgeBump { h0, center, half_width } => {
                vec![Bump { center: *center, half_width: *half_width, peak: *h0 }]
            }
            WarpingProfile::SumOfBumps { bumps, .. } => bumps.clone(),
            _ => Vec::new(),
        }
    }

    /// Points where the profile is not smooth, or where quadrature should
    /// split: bump support edges and centers, tabulated nodes.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            WarpingProfile::Constant { .. } => Vec::new(),
            WarpingProfile::Tabulated { r, .. } => r.clone(),
            _ => {
                let mut out = Vec::new();
                for b in self.bumps() {
                    let (lo, hi) = b.support();
                    out.extend([lo, b.center, hi]);
                }
                out
            }
        }
    }

    /// Candidate locations of extrema of the profile on `[a, b]`. The value
    /// at each candidate is exact, so min/max over the list are exact.
    fn extremum_candidates(&self, a: f64, b: f64) -> Vec<f64> {
        let mut cand = vec![a, b];
        cand.extend(self.breakpoints().into_iter().filter(|x| *x > a && *x < b));
        cand
    }

    /// Exact minimum over `[a, b]`.
    pub fn min_on(&self, a: f64, b: f64) -> f64 {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.extremum_candidates(a, b).into_iter().map(|r| self.value(r)).fold(f64::INFINITY, f64::min)
    }

    /// Exact maximum over `[a, b]`.
    pub fn max_on(&self, a: f64, b: f64) -> f64 {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.extremum_candidates(a, b).into_iter().map(|r| self.value(r)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Location of the minimum over `[a, b]` (first one in increasing `r`).
    pub fn argmin_on(&self, a: f64, b: f64) -> f64 {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let mut cand = self.extremum_candidates(a, b);
        cand.sort_by(f64::total_cmp);
        let mut best = (cand[0], self.value(cand[0]));
        for r in cand {
            let v = self.value(r);
            if v < best.1 {
                best = (r, v);
            }
        }
        best.0
    }

    /// True for the families whose restriction to any interval between
    /// breakpoints is `C^∞`.
    pub fn is_piecewise_smooth(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cinch_values_at_center_edge_and_midslope() {
        let p = WarpingProfile::cinch(0.5, 0.0, 0.1).unwrap();
        assert_eq!(p.evaluate(0.0).unwrap(), 0.5);
        assert_eq!(p.evaluate(1.0).unwrap(), 1.0);
        assert!((p.evaluate(0.05).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn bump_edges_are_continuous() {
        let p = WarpingProfile::ridge(2.0, 0.3, 0.25).unwrap();
        for edge in [0.05, 0.55] {
            let left = p.value(edge - 1e-13);
            let right = p.value(edge + 1e-13);
            assert!((left - 1.0).abs() < 1e-12 && (right - 1.0).abs() < 1e-12);
            assert_eq!(p.value(edge), 1.0);
        }
    }

    #[test]
    fn family_parameter_ranges_are_enforced() {
        assert!(WarpingProfile::cinch(0.0, 0.0, 0.1).is_err());
        assert!(WarpingProfile::cinch(1.2, 0.0, 0.1).is_err());
        assert!(WarpingProfile::ridge(1.0, 0.0, 0.1).is_err());
        assert!(WarpingProfile::ridge(2.5, 0.0, 0.1).is_err());
        assert!(WarpingProfile::constant(0.0).is_err());
        assert!(WarpingProfile::tabulated(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        let overlapping =
            vec![Bump { center: 0.0, half_width: 0.5, peak: 2.0 }, Bump { center: 0.8, half_width: 0.5, peak: 2.0 }];
        assert!(WarpingProfile::sum_of_bumps(1.0, overlapping).is_err());
    }

    #[test]
    fn sum_of_bumps_picks_the_active_bump() {
        let p = WarpingProfile::sum_of_bumps(
            5.0,
            vec![Bump { center: 1.0, half_width: 0.25, peak: 1.0 }, Bump { center: -1.0, half_width: 0.25, peak: 1.0 }],
        )
        .unwrap();
        assert_eq!(p.value(-1.0), 1.0);
        assert_eq!(p.value(1.0), 1.0);
        assert_eq!(p.value(0.0), 5.0);
        assert!((p.value(1.125) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn extrema_are_exact() {
        let p = WarpingProfile::cinch(0.3, 0.0, 0.5).unwrap();
        assert_eq!(p.min_on(-1.0, 1.0), 0.3);
        assert_eq!(p.min_on(0.5, 2.0), 1.0);
        assert!((p.min_on(0.25, 2.0) - 0.65).abs() < 1e-12);
        assert_eq!(p.argmin_on(-3.0, 3.0), 0.0);
        assert_eq!(p.max_on(-3.0, 3.0), 1.0);
    }

    #[test]
    fn tabulated_interpolates_and_checks_span() {
        let p = WarpingProfile::tabulated(vec![0.0, 1.0, 2.0], vec![1.0, 3.0, 2.0]).unwrap();
        assert_eq!(p.value(0.5), 2.0);
        assert_eq!(p.value(1.5), 2.5);
        assert!(p.evaluate(2.5).is_err());
        assert_eq!(p.max_on(0.0, 2.0), 3.0);
    }

    #[test]
    fn json_descriptor_round_trip_and_unknown_family() {
        let p = WarpingProfile::from_json(r#"{"family":"constant","params":{"c":1}}"#).unwrap();
        assert_eq!(p, WarpingProfile::Constant { c: 1.0 });
        let q = WarpingProfile::cinch(0.5, 0.0, 0.125).unwrap();
        assert_eq!(WarpingProfile::from_json(&q.to_json()).unwrap(), q);
        assert!(WarpingProfile::from_json(r#"{"family":"wobbly","params":{"c":1}}"#).is_err());
        assert!(WarpingProfile::from_json(r#"{"family":"constant","params":{"c":-1}}"#).is_err());
        assert!(WarpingProfile::from_json(r#"{"family":"constant","params":{"c":1,"d":2}}"#).is_err());
    }
}
