//! Sample pair plans for discrepancy estimates.
//!
//! Pairs are grouped by source point so one shortest-path search serves
//! many targets. Low-discrepancy pairs use Halton sequences; adversarial
//! pairs sit on the special levels of a family, where the worst cases of
//! the convergence arguments live.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WarpError};
use crate::space::{BaseSpace, FiberSpace, SurfacePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairKind {
    LowDiscrepancy,
    /// Both points on a special level, fiber-antipodal or at a quarter turn.
    OnLevel,
    /// Points on opposite sides of a special level.
    Straddle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePair {
    pub p: SurfacePoint,
    pub q: SurfacePoint,
    pub kind: PairKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSpec {
    pub sources: usize,
    pub targets: usize,
    /// Offset into the Halton sequences.
    pub seed: u64,
    /// At most this many special levels receive adversarial pairs.
    pub max_levels: usize,
}

impl Default for PlanSpec {
    fn default() -> Self {
        PlanSpec { sources: 8, targets: 16, seed: 0, max_levels: 4 }
    }
}

/// Source points with their targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub groups: Vec<(SurfacePoint, Vec<(SurfacePoint, PairKind)>)>,
}

impl SamplePlan {
    pub fn len(&self) -> usize {
        self.groups.iter().map(|g| g.1.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pairs(&self) -> Vec<SamplePair> {
        self.groups.iter().flat_map(|(p, ts)| ts.iter().map(move |&(q, kind)| SamplePair { p: *p, q, kind })).collect()
    }

    pub fn count(&self, kind: PairKind) -> usize {
        self.groups.iter().map(|g| g.1.iter().filter(|t| t.1 == kind).count()).sum()
    }
}

fn halton_point(base: &BaseSpace, fiber: &FiberSpace, bases: (u8, u8), index: usize) -> SurfacePoint {
    let (lo, hi) = base.bounds();
    let u = halton::number(bases.0, index);
    let v = halton::number(bases.1, index);
    SurfacePoint::new(lo + (hi - lo) * u, fiber.circumference * v)
}

/// Evenly spread choice of at most `k` entries, always including the middle one.
fn spread(levels: &[f64], k: usize) -> Vec<f64> {
    if levels.len() <= k {
        return levels.to_vec();
    }
    let n = levels.len();
    let mut idx: Vec<usize> = (0..k).map(|i| (2 * i + 1) * n / (2 * k)).collect();
    idx.push(n / 2);
    idx.sort_unstable();
    idx.dedup();
    idx.into_iter().map(|i| levels[i]).collect()
}

pub fn build_plan(spec: PlanSpec, base: &BaseSpace, fiber: &FiberSpace, special_levels: &[f64]) -> Result<SamplePlan> {
    if spec.sources == 0 || spec.targets == 0 {
        return Err(WarpError::invalid("sample plan needs at least one source and one target"));
    }
    let off = spec.seed as usize;
    let mut groups = Vec::new();
    for s in 0..spec.sources {
        let p = halton_point(base, fiber, (2, 3), off + s + 1);
        let ts = (0..spec.targets)
            .map(|t| (halton_point(base, fiber, (5, 7), off + s * spec.targets + t + 1), PairKind::LowDiscrepancy))
            .collect();
        groups.push((p, ts));
    }
    let c = fiber.circumference;
    let (lo, hi) = base.bounds();
    let clamp = |r: f64| if base.is_circle() { base.wrap(r) } else { r.clamp(lo, hi) };
    for &r in &spread(special_levels, spec.max_levels) {
        groups.push((
            SurfacePoint::new(r, 0.0),
            vec![
                (SurfacePoint::new(r, 0.5 * c), PairKind::OnLevel),
                (SurfacePoint::new(r, 0.25 * c), PairKind::OnLevel),
                (SurfacePoint::new(clamp(r + 0.5), 0.5 * c), PairKind::Straddle),
                (SurfacePoint::new(clamp(r + 1.0), 0.4 * c), PairKind::Straddle),
            ],
        ));
        groups.push((
            SurfacePoint::new(clamp(r - 0.5), 0.0),
            vec![
                (SurfacePoint::new(clamp(r + 0.5), 0.5 * c), PairKind::Straddle),
                (SurfacePoint::new(clamp(r + 0.25), 0.3 * c), PairKind::Straddle),
            ],
        ));
    }
    Ok(SamplePlan { groups })
}
