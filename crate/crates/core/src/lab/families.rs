//! The example sequences of warped products, indexed by `j ≥ 1`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::limit::LimitMetric;
use crate::error::{Result, WarpError};
use crate::geodesy::GridSpec;
use crate::profile::{Bump, WarpingProfile};
use crate::space::{BaseSpace, FiberSpace, WarpedSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseShape {
    Interval,
    Circle,
}

impl BaseShape {
    pub fn base(self) -> BaseSpace {
        match self {
            BaseShape::Interval => BaseSpace::standard_interval(),
            BaseShape::Circle => BaseSpace::standard_circle(),
        }
    }
}

/// Entry `j` (1-based) of the enumeration `0/1, 1/1, 0/2, 1/2, 2/2, 0/4, …`
/// together with its half-width `1/2^m` at level `m`.
pub fn moving_center(j: usize) -> Result<(f64, f64)> {
    if j == 0 {
        return Err(WarpError::invalid("sequence index j starts at 1"));
    }
    let mut k = j - 1;
    let mut m = 0u32;
    loop {
        let len = (1usize << m) + 1;
        if k < len {
            let d = 0.5f64.powi(m as i32);
            return Ok((k as f64 * d, d));
        }
        k -= len;
        m += 1;
        if m > 40 {
            return Err(WarpError::invalid(format!("index {j} beyond the enumeration")));
        }
    }
}

/// First index at level `m` of the moving enumeration whose center is `t`.
pub fn moving_index(m: u32, t_num: usize) -> usize {
    let before: usize = (0..m).map(|l| (1usize << l) + 1).sum();
    before + t_num + 1
}

/// Centers `−π + 2πi/2^j`, `i = 1..2^j − 1`, and half-width `4^{−j}`.
pub fn dyadic_centers(j: usize) -> Result<(Vec<f64>, f64)> {
    if j == 0 || j > 12 {
        return Err(WarpError::invalid(format!("dyadic families support 1 ≤ j ≤ 12, got {j}")));
    }
    let n = 1usize << j;
    let c = (1..n).map(|i| -PI + 2.0 * PI * i as f64 / n as f64).collect();
    Ok((c, 0.25f64.powi(j as i32)))
}

/// A sequence of warped products with its candidate limits.
pub trait SequenceFamily: Send + Sync {
    fn name(&self) -> &'static str;
    fn base(&self) -> BaseSpace;
    fn profile(&self, j: usize) -> Result<WarpingProfile>;
    /// Background warping level `f_∞` the profiles converge to in `L^p`.
    fn background(&self) -> f64;
    /// Limits the sequence (or a subsequence) converges to, first entry
    /// being the proven one.
    fn limits(&self, j: usize) -> Vec<(String, LimitMetric)>;
    /// Limits the sequence must not converge to.
    fn wrong_limits(&self) -> Vec<(String, LimitMetric)>;
    /// Levels in `r` where extremal pairs sit (cinch or ridge centers).
    fn special_levels(&self, j: usize) -> Vec<f64>;
    fn default_js(&self) -> Vec<usize>;

    /// Grid used for member `j`: `max(256, 32j)` nodes per side, rounded up
    /// to a multiple of 8 so that a row lies on `r = 0`.
    fn grid(&self, j: usize) -> GridSpec {
        let n = 256usize.max(32 * j).div_ceil(8) * 8;
        GridSpec { n_r: n, n_theta: n, k: 3 }
    }

    fn space(&self, j: usize) -> Result<WarpedSpace> {
        WarpedSpace::new(self.base(), FiberSpace::standard(), self.profile(j)?)
    }
}

fn check_h0(h0: f64, lo: f64, hi: f64, lo_open: bool) -> Result<()> {
    let ok = if lo_open { h0 > lo && h0 <= hi } else { h0 >= lo && h0 <= hi };
    if ok {
        Ok(())
    } else {
        Err(WarpError::invalid(format!("h0 = {h0} outside the family range ({lo}, {hi}]")))
    }
}

fn check_j(j: usize) -> Result<()> {
    if j == 0 {
        Err(WarpError::invalid("sequence index j starts at 1"))
    } else {
        Ok(())
    }
}

fn flat(level: f64) -> (String, LimitMetric) {
    (format!("isometric-product({level})"), LimitMetric::IsometricProduct { level })
}

fn cinch_at(h0: f64, r: f64) -> (String, LimitMetric) {
    (format!("cinch-limit({h0},{r})"), LimitMetric::CinchLimit { h0, cinch_r: r })
}

pub struct ConstantFamily {
    pub c: f64,
    pub shape: BaseShape,
}

impl SequenceFamily for ConstantFamily {
    fn name(&self) -> &'static str {
        "constant"
    }
    fn base(&self) -> BaseSpace {
        self.shape.base()
    }
    fn profile(&self, j: usize) -> Result<WarpingProfile> {
        check_j(j)?;
        WarpingProfile::constant(self.c)
    }
    fn background(&self) -> f64 {
        self.c
    }
    fn limits(&self, _: usize) -> Vec<(String, LimitMetric)> {
        vec![flat(self.c)]
    }
    fn wrong_limits(&self) -> Vec<(String, LimitMetric)> {
        Vec::new()
    }
    fn special_levels(&self, _: usize) -> Vec<f64> {
        vec![0.0]
    }
    fn default_js(&self) -> Vec<usize> {
        vec![1, 2]
    }
}

/// Cinch of depth `h0` on `[−1/j, 1/j]`.
pub struct CinchedTorus {
    pub h0: f64,
    pub shape: BaseShape,
}

impl SequenceFamily for CinchedTorus {
    fn name(&self) -> &'static str {
        "cinched-torus"
    }
    fn base(&self) -> BaseSpace {
        self.shape.base()
    }
    fn profile(&self, j: usize) -> Result<WarpingProfile> {
        check_j(j)?;
        check_h0(self.h0, 0.0, 1.0, true)?;
        WarpingProfile::cinch(self.h0, 0.0, 1.0 / j as f64)
    }
    fn background(&self) -> f64 {
        1.0
    }
    fn limits(&self, _: usize) -> Vec<(String, LimitMetric)> {
        vec![cinch_at(self.h0, 0.0)]
    }
    fn wrong_limits(&self) -> Vec<(String, LimitMetric)> {
        vec![flat(1.0)]
    }
    fn special_levels(&self, _: usize) -> Vec<f64> {
        vec![0.0]
    }
    fn default_js(&self) -> Vec<usize> {
        vec![4, 8, 16, 32]
    }
}

/// Cinches of depth `h0` wandering over `[0, 1]` with shrinking width.
pub struct MovingCinch {
    pub h0: f64,
    pub shape: BaseShape,
}

impl SequenceFamily for MovingCinch {
    fn grid(&self, j: usize) -> GridSpec {
        let d = moving_center(j).map(|x| x.1).unwrap_or(1.0);
        let n = 256usize.max((32.0 / d) as usize);
        GridSpec { n_r: n, n_theta: n, k: 3 }
    }

    fn name(&self) -> &'static str {
        "moving-cinch"
    }
    fn base(&self) -> BaseSpace {
        self.shape.base()
    }
    fn profile(&self, j: usize) -> Result<WarpingProfile> {
        check_h0(self.h0, 0.0, 1.0, true)?;
        let (t, d) = moving_center(j)?;
        WarpingProfile::cinch(self.h0, t, d)
    }
    fn background(&self) -> f64 {
        1.0
    }
    fn limits(&self, _: usize) -> Vec<(String, LimitMetric)> {
        vec![cinch_at(self.h0, 0.0), cinch_at(self.h0, 1.0)]
    }
    fn wrong_limits(&self) -> Vec<(String, LimitMetric)> {
        vec![flat(1.0)]
    }
    fn special_levels(&self, j: usize) -> Vec<f64> {
        let mut v = vec![0.0, 1.0];
        if let Ok((t, _)) = moving_center(j) {
            if t != 0.0 && t != 1.0 {
                v.push(t);
            }
        }
        v
    }
    fn default_js(&self) -> Vec<usize> {
        // alternate between centers 0 and 1 on levels 2..5
        let mut v = Vec::new();
        for m in 2..=5u32 {
            v.push(moving_index(m, 0));
            v.push(moving_index(m, 1usize << m));
        }
        v
    }
}

/// Ridge of height `h0` on `[−1/j, 1/j]`.
pub struct SingleRidge {
    pub h0: f64,
    pub shape: BaseShape,
}

impl SequenceFamily for SingleRidge {
    fn name(&self) -> &'static str {
        "single-ridge"
    }
    fn base(&self) -> BaseSpace {
        self.shape.base()
    }
    fn profile(&self, j: usize) -> Result<WarpingProfile> {
        check_j(j)?;
        check_h0(self.h0, 1.0, 2.0, true)?;
        WarpingProfile::ridge(self.h0, 0.0, 1.0 / j as f64)
    }
    fn background(&self) -> f64 {
        1.0
    }
    fn limits(&self, _: usize) -> Vec<(String, LimitMetric)> {
        vec![flat(1.0)]
    }
    fn wrong_limits(&self) -> Vec<(String, LimitMetric)> {
        Vec::new()
    }
    fn special_levels(&self, _: usize) -> Vec<f64> {
        vec![0.0]
    }
    fn default_js(&self) -> Vec<usize> {
        vec![4, 8, 16, 32]
    }
}

/// Ridges of height `h0` wandering over `[0, 1]` with shrinking width.
pub struct MovingRidges {
    pub h0: f64,
    pub shape: BaseShape,
}

impl SequenceFamily for MovingRidges {
    fn grid(&self, j: usize) -> GridSpec {
        let d = moving_center(j).map(|x| x.1).unwrap_or(1.0);
        let n = 256usize.max((32.0 / d) as usize);
        GridSpec { n_r: n, n_theta: n, k: 3 }
    }

    fn name(&self) -> &'static str {
        "moving-ridges"
    }
    fn base(&self) -> BaseSpace {
        self.shape.base()
    }
    fn profile(&self, j: usize) -> Result<WarpingProfile> {
        check_h0(self.h0, 1.0, 2.0, true)?;
        let (s, d) = moving_center(j)?;
        WarpingProfile::ridge(self.h0, s, d)
    }
    fn background(&self) -> f64 {
        1.0
    }
    fn limits(&self, _: usize) -> Vec<(String, LimitMetric)> {
        vec![flat(1.0)]
    }
    fn wrong_limits(&self) -> Vec<(String, LimitMetric)> {
        Vec::new()
    }
    fn special_levels(&self, j: usize) -> Vec<f64> {
        moving_center(j).map(|(s, _)| vec![s]).unwrap_or_default()
    }
    fn default_js(&self) -> Vec<usize> {
        // first index of levels 1..4: half-widths 1/2, 1/4, 1/8, 1/16
        (1..=4).map(|m| moving_index(m, 0)).collect()
    }
}

/// `2^j − 1` ridges of half-width `4^{−j}` at dyadic centers.
pub struct ManyRidges {
    pub h0: f64,
    pub shape: BaseShape,
}

impl SequenceFamily for ManyRidges {
    /// Rows land on every dyadic center up to `j = 10`.
    fn grid(&self, _: usize) -> GridSpec {
        GridSpec { n_r: 1024, n_theta: 1024, k: 3 }
    }

    fn name(&self) -> &'static str {
        "many-ridges"
    }
    fn base(&self) -> BaseSpace {
        self.shape.base()
    }
    fn profile(&self, j: usize) -> Result<WarpingProfile> {
        check_h0(self.h0, 1.0, 2.0, true)?;
        let (centers, d) = dyadic_centers(j)?;
        let bumps = centers.into_iter().map(|c| Bump { center: c, half_width: d, peak: self.h0 }).collect();
        WarpingProfile::sum_of_bumps(1.0, bumps)
    }
    fn background(&self) -> f64 {
        1.0
    }
    fn limits(&self, _: usize) -> Vec<(String, LimitMetric)> {
        vec![flat(1.0)]
    }
    fn wrong_limits(&self) -> Vec<(String, LimitMetric)> {
        Vec::new()
    }
    fn special_levels(&self, j: usize) -> Vec<f64> {
        dyadic_centers(j).map(|(c, _)| c).unwrap_or_default()
    }
    fn default_js(&self) -> Vec<usize> {
        vec![1, 2, 3, 4]
    }
}

/// Level-5 profile with `2^j − 1` valleys dipping to 1, half-width `4^{−j}`.
pub struct RETCinches {
    pub shape: BaseShape,
}

pub const RET_LEVEL: f64 = 5.0;

impl SequenceFamily for RETCinches {
    /// Rows land on every valley center up to `j = 10`; the fiber is
    /// resolved twice as finely to reduce the aspect of level-5 cells.
    fn grid(&self, _: usize) -> GridSpec {
        GridSpec { n_r: 1024, n_theta: 2048, k: 3 }
    }

    fn name(&self) -> &'static str {
        "ret-cinches"
    }
    fn base(&self) -> BaseSpace {
        self.shape.base()
    }
    fn profile(&self, j: usize) -> Result<WarpingProfile> {
        let (centers, d) = dyadic_centers(j)?;
        let bumps = centers.into_iter().map(|c| Bump { center: c, half_width: d, peak: 1.0 }).collect();
        WarpingProfile::sum_of_bumps(RET_LEVEL, bumps)
    }
    fn background(&self) -> f64 {
        RET_LEVEL
    }
    fn limits(&self, _: usize) -> Vec<(String, LimitMetric)> {
        vec![("ret(5)".into(), LimitMetric::Ret { r: RET_LEVEL })]
    }
    fn wrong_limits(&self) -> Vec<(String, LimitMetric)> {
        vec![flat(RET_LEVEL)]
    }
    fn special_levels(&self, j: usize) -> Vec<f64> {
        dyadic_centers(j).map(|(c, _)| c).unwrap_or_default()
    }
    fn default_js(&self) -> Vec<usize> {
        vec![2, 3, 4]
    }
}

type Constructor = fn(f64, BaseShape) -> Box<dyn SequenceFamily>;

/// Families registered by name; each constructor takes `h0` (ignored
/// where the family fixes it) and the base shape.
pub struct FamilyRegistry {
    entries: BTreeMap<&'static str, (Constructor, f64)>,
}

impl FamilyRegistry {
    pub fn new() -> Self {
        let mut entries: BTreeMap<&'static str, (Constructor, f64)> = BTreeMap::new();
        entries.insert("constant", (|c, s| Box::new(ConstantFamily { c, shape: s }), 1.0));
        entries.insert("cinched-torus", (|h0, s| Box::new(CinchedTorus { h0, shape: s }), 0.5));
        entries.insert("moving-cinch", (|h0, s| Box::new(MovingCinch { h0, shape: s }), 0.5));
        entries.insert("single-ridge", (|h0, s| Box::new(SingleRidge { h0, shape: s }), 2.0));
        entries.insert("moving-ridges", (|h0, s| Box::new(MovingRidges { h0, shape: s }), 2.0));
        entries.insert("many-ridges", (|h0, s| Box::new(ManyRidges { h0, shape: s }), 2.0));
        entries.insert("ret-cinches", (|_, s| Box::new(RETCinches { shape: s }), RET_LEVEL));
        FamilyRegistry { entries }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    /// Builds the family `name`; `h0 = None` picks the family default.
    pub fn build(&self, name: &str, h0: Option<f64>, shape: BaseShape) -> Result<Box<dyn SequenceFamily>> {
        let (ctor, default) = self.entries.get(name).ok_or_else(|| {
            WarpError::invalid(format!("unknown family {name:?}; known: {}", self.names().join(", ")))
        })?;
        let fam = ctor(h0.unwrap_or(*default), shape);
        // validates h0 against the family range
        fam.profile(fam.default_js()[0])?;
        Ok(fam)
    }
}

impl Default for FamilyRegistry {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moving_enumeration() {
        assert_eq!(moving_center(1).unwrap(), (0.0, 1.0));
        assert_eq!(moving_center(2).unwrap(), (1.0, 1.0));
        assert_eq!(moving_center(3).unwrap(), (0.0, 0.5));
        assert_eq!(moving_center(4).unwrap(), (0.5, 0.5));
        assert_eq!(moving_center(5).unwrap(), (1.0, 0.5));
        assert_eq!(moving_center(6).unwrap(), (0.0, 0.25));
        assert_eq!(moving_center(10).unwrap(), (1.0, 0.25));
        assert_eq!(moving_center(11).unwrap(), (0.0, 0.125));
        assert!(moving_center(0).is_err());
        for m in 0..6 {
            assert_eq!(moving_center(moving_index(m, 0)).unwrap().0, 0.0);
            assert_eq!(moving_center(moving_index(m, 1 << m)).unwrap().0, 1.0);
        }
    }

    #[test]
    fn family_members_match_definitions() {
        let reg = FamilyRegistry::new();
        let mc = reg.build("moving-cinch", None, BaseShape::Interval).unwrap();
        assert_eq!(mc.profile(3).unwrap(), WarpingProfile::cinch(0.5, 0.0, 0.5).unwrap());
        let mr = reg.build("many-ridges", Some(2.0), BaseShape::Interval).unwrap();
        let bumps = mr.profile(2).unwrap().bumps();
        assert_eq!(bumps.len(), 3);
        for (i, b) in bumps.iter().enumerate() {
            assert!((b.center - (-PI + PI / 2.0 * (i + 1) as f64)).abs() < 1e-15);
            assert_eq!(b.half_width, 1.0 / 16.0);
        }
        let ct = reg.build("cinched-torus", Some(0.3), BaseShape::Circle).unwrap();
        let p = ct.profile(1).unwrap();
        assert_eq!(p.value(1.0), 1.0);
        assert_eq!(p.value(0.0), 0.3);
        let ret = reg.build("ret-cinches", None, BaseShape::Interval).unwrap();
        let p = ret.profile(2).unwrap();
        assert_eq!(p.value(0.0), 1.0);
        assert_eq!(p.value(1.0), 5.0);
    }

    #[test]
    fn ranges_are_enforced() {
        let reg = FamilyRegistry::new();
        assert!(reg.build("cinched-torus", Some(1.5), BaseShape::Interval).is_err());
        assert!(reg.build("single-ridge", Some(0.5), BaseShape::Interval).is_err());
        assert!(reg.build("nope", None, BaseShape::Interval).is_err());
        assert!(reg.build("cinched-torus", None, BaseShape::Interval).unwrap().profile(0).is_err());
    }
}
