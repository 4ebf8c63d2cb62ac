//! Integral functionals of profiles and the coarse bounds built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WarpError};
use crate::profile::WarpingProfile;
use crate::quadrature::gauss_split;
use crate::space::{BaseSpace, WarpedSpace};

/// Default number of midpoint nodes per smooth piece.
pub const DEFAULT_QUADRATURE_N: usize = 64;

fn merged_breaks(a: &WarpingProfile, b: &WarpingProfile, lo: f64, hi: f64) -> Vec<f64> {
    let mut br: Vec<f64> = a.breakpoints().into_iter().chain(b.breakpoints()).filter(|x| *x > lo && *x < hi).collect();
    br.sort_by(f64::total_cmp);
    br.dedup();
    br
}

/// `(∫_base |a − b|^p dr)^{1/p}`, split at the breakpoints of both profiles.
pub fn lp_profile_distance(
    a: &WarpingProfile,
    b: &WarpingProfile,
    base: &BaseSpace,
    p: f64,
    quadrature_n: usize,
) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(WarpError::invalid(format!("L^p exponent must be finite and ≥ 1, got {p}")));
    }
    let (lo, hi) = base.bounds();
    let br = merged_breaks(a, b, lo, hi);
    let v = gauss_split(|r| (a.value(r) - b.value(r)).abs().powf(p), lo, hi, quadrature_n, &br);
    Ok(v.powf(1.0 / p))
}

/// `‖f‖_{L²}` over the base.
pub fn l2_norm(profile: &WarpingProfile, base: &BaseSpace) -> f64 {
    let (lo, hi) = base.bounds();
    let mut br = profile.breakpoints();
    br.sort_by(f64::total_cmp);
    gauss_split(|r| profile.value(r).powi(2), lo, hi, DEFAULT_QUADRATURE_N, &br).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiameterBound {
    pub value: f64,
    /// Set when the base is a circle and the interval formula was adapted by
    /// using the circle length for `|r₁ − r₀|`.
    pub circle_base_modified: bool,
}

/// `2|r₁ − r₀| + (‖f_∞‖_{C⁰} + δ/√(r₁ − r₀))·Diam(Σ)` where `space` carries
/// `f_∞` and `delta_l2 = ‖f_j − f_∞‖_{L²}`.
pub fn diameter_upper_bound(space: &WarpedSpace, delta_l2: f64) -> Result<DiameterBound> {
    if !(delta_l2 >= 0.0) {
        return Err(WarpError::invalid("L² deviation must be nonnegative"));
    }
    let len = space.base.length();
    let value = 2.0 * len + (space.f_max() + delta_l2 / len.sqrt()) * space.fiber.diameter();
    Ok(DiameterBound { value, circle_base_modified: space.base.is_circle() })
}

/// `λ = max(1/min(a, 1), max(1, b))` for `a ≤ f ≤ b`: the factor comparing
/// the warped metric with the `f ≡ 1` product in both directions.
pub fn bilipschitz_lambda(space: &WarpedSpace) -> f64 {
    lambda_from_bounds(space.f_min(), space.f_max())
}

pub fn lambda_from_bounds(a: f64, b: f64) -> f64 {
    (1.0 / a.min(1.0)).max(b.max(1.0))
}

/// Riemannian area `C·∫ f dr`.
pub fn mass_estimate(space: &WarpedSpace) -> f64 {
    let (lo, hi) = space.base.bounds();
    let integral = gauss_split(|r| space.profile.value(r), lo, hi, DEFAULT_QUADRATURE_N, space.breakpoints());
    space.fiber.circumference * integral
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cosine_bump_l2_matches_closed_form() {
        // ∫ ((1-h0)(1+cos πt)/2)² δ dt over [-1,1] = (1-h0)² · 3δ/4
        let base = BaseSpace::standard_interval();
        let one = WarpingProfile::constant(1.0).unwrap();
        for (h0, d) in [(0.5, 0.125), (0.3, 0.25), (0.9, 1.0)] {
            let f = WarpingProfile::cinch(h0, 0.0, d).unwrap();
            let v = lp_profile_distance(&f, &one, &base, 2.0, 64).unwrap();
            let exact = (1.0 - h0) * (0.75 * d).sqrt();
            assert!((v - exact).abs() < 1e-12, "{v} vs {exact}");
        }
    }

    #[test]
    fn lp_rejects_small_exponent() {
        let base = BaseSpace::standard_interval();
        let one = WarpingProfile::constant(1.0).unwrap();
        assert!(lp_profile_distance(&one, &one, &base, 0.5, 8).is_err());
        assert_eq!(lp_profile_distance(&one, &one, &base, 2.0, 8).unwrap(), 0.0);
    }

    #[test]
    fn diameter_examples() {
        let s = WarpedSpace::standard_interval(WarpingProfile::constant(1.0).unwrap()).unwrap();
        let d = diameter_upper_bound(&s, 0.0).unwrap();
        assert!((d.value - 5.0 * PI).abs() < 1e-12);
        assert!(!d.circle_base_modified);
        let s2 = WarpedSpace::new(
            BaseSpace::interval(0.0, 1.0).unwrap(),
            crate::space::FiberSpace::standard(),
            WarpingProfile::constant(2.0).unwrap(),
        )
        .unwrap();
        assert!((diameter_upper_bound(&s2, 1.0).unwrap().value - (2.0 + 3.0 * PI)).abs() < 1e-12);
        assert!(WarpingProfile::constant(0.0).is_err());
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_from_bounds(0.5, 2.0), 2.0);
        assert_eq!(lambda_from_bounds(1.0, 1.0), 1.0);
        assert_eq!(lambda_from_bounds(1.0, 5.0), 5.0);
        assert_eq!(lambda_from_bounds(0.25, 2.0), 4.0);
    }

    #[test]
    fn mass_examples() {
        let s = WarpedSpace::standard_interval(WarpingProfile::constant(2.0).unwrap()).unwrap();
        assert!((mass_estimate(&s) - 8.0 * PI * PI).abs() < 1e-10);
        let c = WarpedSpace::standard_interval(WarpingProfile::cinch(0.5, 0.0, 0.125).unwrap()).unwrap();
        let exact = 4.0 * PI * PI - 2.0 * PI * 0.125 * 0.5;
        assert!((mass_estimate(&c) - exact).abs() < 1e-10);
    }
}
