//! Geodesics through the Clairaut reduction.
//!
//! Along a unit-speed geodesic of `dr² + f(r)² dθ²` the quantity
//! `c = f² θ'` is conserved, so a geodesic is determined by `c` and the
//! sequence of monotone legs in `r`. Rather than shoot on `c` and bisect on
//! the arrival angle, the shortest curve with prescribed legs and total
//! fiber travel `Δ` is found through its concave dual
//!
//! ```text
//! G(c) = c·Δ + Σ_legs ∫ √(1 − c²/f(r)²) dr,   0 ≤ c ≤ min f over the legs,
//! ```
//!
//! whose maximizer is the conserved constant of the geodesic and whose
//! maximum is its length. Where the maximizer sits at `min f` the geodesic
//! follows that level for part of the way. Candidates are the direct leg
//! and one-turn excursions beyond either endpoint, over fiber windings
//! `−2..=2` and, on a circle base, neighbouring base lifts.

use super::{GeodesicResult, Method};
use crate::curve::{curve_length, PolylineCurve};
use crate::error::{Result, WarpError};
use crate::quadrature::{cosine_gauss, cosine_gauss_split, golden_min, scan_min};
use crate::space::{SurfacePoint, WarpedSpace};

const QUAD_N: usize = 32;
const GOLDEN_ITERS: usize = 90;
const EXCURSION_SCAN: usize = 48;
const PATH_NODES_PER_PIECE: usize = 96;

/// A family of curves: monotone legs in lifted `r` plus the signed fiber
/// travel.
#[derive(Debug, Clone)]
struct Candidate {
    legs: Vec<(f64, f64)>,
    dtheta: f64,
    value: f64,
    c: f64,
}

fn min_lifted(space: &WarpedSpace, a: f64, b: f64, buf: &mut Vec<f64>) -> (f64, f64) {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    space.breakpoints_between(lo, hi, buf);
    let mut best = (lo, space.f(lo));
    for r in buf.iter().copied().chain(std::iter::once(hi)) {
        let v = space.f(r);
        if v < best.1 {
            best = (r, v);
        }
    }
    best
}

fn leg_integral(space: &WarpedSpace, a: f64, b: f64, g: impl Fn(f64) -> f64, n: usize, buf: &mut Vec<f64>) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if hi == lo {
        return 0.0;
    }
    space.breakpoints_between(lo, hi, buf);
    cosine_gauss_split(g, lo, hi, n, buf)
}

/// Maximizes the dual over `c`; returns `(c*, value)`.
fn dual(space: &WarpedSpace, legs: &[(f64, f64)], delta: f64, n: usize) -> (f64, f64) {
    let mut buf = Vec::new();
    let radial: f64 = legs.iter().map(|(a, b)| (b - a).abs()).sum();
    if delta == 0.0 {
        return (0.0, radial);
    }
    let mut m = f64::INFINITY;
    for &(a, b) in legs {
        m = m.min(min_lifted(space, a, b, &mut buf).1);
    }
    if radial == 0.0 {
        return (m, m * delta);
    }
    let g = |c: f64| {
        let mut buf = Vec::new();
        let mut s = c * delta;
        for &(a, b) in legs {
            s += leg_integral(
                space,
                a,
                b,
                |r| {
                    let q = c / space.f(r);
                    (1.0 - q * q).max(0.0).sqrt()
                },
                n,
                &mut buf,
            );
        }
        s
    };
    let (c, neg) = golden_min(|c| -g(c), 0.0, m, GOLDEN_ITERS);
    (c, -neg)
}

fn evaluate(space: &WarpedSpace, legs: Vec<(f64, f64)>, dtheta: f64) -> Candidate {
    let (c, value) = dual(space, &legs, dtheta.abs(), QUAD_N);
    Candidate { legs, dtheta, value, c }
}

/// Best one-turn excursion from `r1` to `r2` turning at `r*` in `[lo, hi]`.
fn best_excursion(space: &WarpedSpace, r1: f64, r2: f64, dtheta: f64, lo: f64, hi: f64) -> Option<Candidate> {
    if !(hi > lo) {
        return None;
    }
    let legs_at = |rs: f64| vec![(r1, rs), (rs, r2)];
    let (rs, _) = scan_min(|rs| dual(space, &legs_at(rs), dtheta.abs(), QUAD_N / 2).1, lo, hi, EXCURSION_SCAN, 40);
    Some(evaluate(space, legs_at(rs), dtheta))
}

fn candidates_for(space: &WarpedSpace, r1: f64, r2: f64, dtheta: f64, best: f64, out: &mut Vec<Candidate>) {
    let radial = (r2 - r1).abs();
    let delta = dtheta.abs();
    // no curve with this fiber travel can beat the current best
    if radial.max(space.f_min() * delta) > best {
        return;
    }
    out.push(evaluate(space, vec![(r1, r2)], dtheta));
    if delta == 0.0 {
        return;
    }
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    let (below, above) = if space.base.is_circle() {
        let l = space.base.length();
        ((hi - l, lo), (hi, lo + l))
    } else {
        let (b0, b1) = space.base.bounds();
        ((b0, lo), (hi, b1))
    };
    out.extend(best_excursion(space, r1, r2, dtheta, below.0, below.1));
    out.extend(best_excursion(space, r1, r2, dtheta, above.0, above.1));
}

/// θ increments along one leg at the conserved constant `c`, with vertex
/// positions in `r`. Vertices are cosine-clustered toward breakpoints and
/// leg ends, where turning points make `θ'(r)` blow up.
fn leg_vertices(space: &WarpedSpace, a: f64, b: f64, c: f64) -> Vec<(f64, f64)> {
    let mut buf = Vec::new();
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    space.breakpoints_between(lo, hi, &mut buf);
    let mut knots = vec![lo];
    knots.extend(buf.iter().copied());
    knots.push(hi);
    let dtheta_dr = |r: f64| {
        let f = space.f(r);
        let s = f * f - c * c;
        if s <= 0.0 {
            0.0
        } else {
            c / (f * s.sqrt())
        }
    };
    let mut out = Vec::new();
    for w in knots.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let n = PATH_NODES_PER_PIECE;
        for i in 0..n {
            let u0 = std::f64::consts::PI * i as f64 / n as f64;
            let u1 = std::f64::consts::PI * (i + 1) as f64 / n as f64;
            let s0 = x0 + 0.5 * (x1 - x0) * (1.0 - u0.cos());
            let s1 = x0 + 0.5 * (x1 - x0) * (1.0 - u1.cos());
            let inc = cosine_gauss(dtheta_dr, s0, s1, 16);
            out.push((s1, inc));
        }
    }
    if a > b {
        // walk the leg downward: same increments in reverse order
        let incs: Vec<f64> = out.iter().map(|x| x.1).collect();
        let mut rs: Vec<f64> = out.iter().map(|x| x.0).collect();
        rs.pop();
        rs.reverse();
        rs.push(lo);
        out = rs.into_iter().zip(incs.into_iter().rev()).collect();
    }
    out
}

fn build_path(space: &WarpedSpace, p: SurfacePoint, cand: &Candidate) -> Result<PolylineCurve> {
    let sign = if cand.dtheta < 0.0 { -1.0 } else { 1.0 };
    let delta = cand.dtheta.abs();
    let mut rs = vec![p.r];
    let mut incs = vec![0.0];
    for &(a, b) in &cand.legs {
        if a == b {
            continue;
        }
        for (r, inc) in leg_vertices(space, a, b, cand.c) {
            rs.push(r);
            incs.push(inc);
        }
    }
    let total: f64 = incs.iter().sum();
    let mut level_insert = None;
    if total > delta && total > 0.0 {
        let k = delta / total;
        incs.iter_mut().for_each(|x| *x *= k);
    } else if total < delta {
        // the remainder is travelled along the least-warped level visited
        let mut buf = Vec::new();
        let mut best = (0usize, f64::INFINITY);
        for (i, &r) in rs.iter().enumerate() {
            let v = space.f(r);
            if v < best.1 {
                best = (i, v);
            }
        }
        for &(a, b) in &cand.legs {
            let (r, v) = min_lifted(space, a, b, &mut buf);
            if v < best.1 - 1e-15 {
                // the minimizing level is not a vertex yet: find its slot
                let i = rs.iter().position(|x| (*x - r).abs() < 1e-12).unwrap_or(best.0);
                best = (i, v);
            }
        }
        level_insert = Some((best.0, delta - total));
    }
    let mut lifted = Vec::with_capacity(rs.len() + 1);
    let mut theta = p.theta;
    for (i, (&r, &inc)) in rs.iter().zip(incs.iter()).enumerate() {
        theta += sign * inc;
        lifted.push((r, theta));
        if let Some((at, extra)) = level_insert {
            if at == i && extra > 0.0 {
                theta += sign * extra;
                lifted.push((r, theta));
            }
        }
    }
    lifted.dedup_by(|b, a| a.0 == b.0 && a.1 == b.1);
    if lifted.len() < 2 {
        lifted.push((p.r, p.theta + cand.dtheta));
    }
    PolylineCurve::from_lifted(space, &lifted)
}

/// Geodesic distance by the Clairaut reduction. `tol` bounds the
/// quadrature error of the winning candidate; when it is not met the
/// result is returned with `converged = false`.
pub fn clairaut_distance(space: &WarpedSpace, p: SurfacePoint, q: SurfacePoint, tol: f64) -> Result<GeodesicResult> {
    let p = space.normalize(p)?;
    let q = space.normalize(q)?;
    if p == q {
        return Err(WarpError::invalid("clairaut distance needs distinct endpoints"));
    }
    if !(tol > 0.0) {
        return Err(WarpError::invalid("tolerance must be positive"));
    }
    let c = space.fiber.circumference;
    let d0 = space.fiber.delta(p.theta, q.theta);
    let r2s: Vec<f64> = if space.base.is_circle() {
        let r2 = p.r + space.base.delta(p.r, q.r);
        let l = space.base.length();
        vec![r2, r2 - l, r2 + l]
    } else {
        vec![q.r]
    };
    let mut cands: Vec<Candidate> = Vec::new();
    let mut best = f64::INFINITY;
    for m in [0i32, 1, -1, 2, -2] {
        for &r2 in &r2s {
            let start = cands.len();
            candidates_for(space, p.r, r2, d0 + m as f64 * c, best, &mut cands);
            for cand in &cands[start..] {
                best = best.min(cand.value);
            }
        }
    }
    let win = cands
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .cloned()
        .expect("the direct candidate is always evaluated");
    let refined = dual(space, &win.legs, win.dtheta.abs(), 2 * QUAD_N).1;
    let quad_err = (refined - win.value).abs();
    let path = build_path(space, p, &win)?;
    let path_gap = (curve_length(space, &path, 16) - win.value).abs();
    Ok(GeodesicResult {
        distance: refined,
        method: Method::Clairaut,
        error_estimate: quad_err.max(path_gap),
        path,
        converged: quad_err <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::WarpingProfile;
    use std::f64::consts::PI;

    fn flat() -> WarpedSpace {
        WarpedSpace::standard_interval(WarpingProfile::constant(1.0).unwrap()).unwrap()
    }

    #[test]
    fn flat_base_segment() {
        let r = clairaut_distance(&flat(), SurfacePoint::new(0.0, 0.0), SurfacePoint::new(3.0, 0.0), 1e-9).unwrap();
        assert!((r.distance - 3.0).abs() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn flat_diagonal() {
        let r = clairaut_distance(&flat(), SurfacePoint::new(0.0, 0.0), SurfacePoint::new(1.0, 1.0), 1e-9).unwrap();
        assert!((r.distance - 2f64.sqrt()).abs() < 1e-9, "{}", r.distance);
        assert!(r.error_estimate < 1e-6);
    }

    #[test]
    fn flat_wraps_the_short_way() {
        let r = clairaut_distance(&flat(), SurfacePoint::new(0.0, 0.1), SurfacePoint::new(0.5, 2.0 * PI - 0.1), 1e-9)
            .unwrap();
        assert!((r.distance - 0.5f64.hypot(0.2)).abs() < 1e-9);
    }

    #[test]
    fn ridge_points_avoid_the_crest() {
        let s = WarpedSpace::standard_interval(WarpingProfile::ridge(2.0, 0.0, 0.125).unwrap()).unwrap();
        let r = clairaut_distance(&s, SurfacePoint::new(0.0, 0.0), SurfacePoint::new(0.0, PI), 1e-8).unwrap();
        assert!(r.distance < 2.0 * PI);
        assert!(r.distance < 0.25 + PI + 1e-9);
        assert!(r.distance > PI);
        let l = curve_length(&s, &r.path, 64);
        assert!((l - r.distance).abs() < 1e-4, "{l} vs {}", r.distance);
    }

    #[test]
    fn cinch_level_is_used() {
        let s = WarpedSpace::standard_interval(WarpingProfile::cinch(0.5, 0.0, 0.25).unwrap()).unwrap();
        let r = clairaut_distance(&s, SurfacePoint::new(0.0, 0.0), SurfacePoint::new(0.0, PI), 1e-8).unwrap();
        assert!((r.distance - 0.5 * PI).abs() < 1e-9);
        let r = clairaut_distance(&s, SurfacePoint::new(-1.0, 0.0), SurfacePoint::new(1.0, PI), 1e-8).unwrap();
        assert!(r.distance <= 2.0 + 0.5 * PI);
        let l = curve_length(&s, &r.path, 64);
        assert!((l - r.distance).abs() < 1e-4, "{l} vs {}", r.distance);
    }

    #[test]
    fn circle_base_takes_the_short_arc() {
        let s = WarpedSpace::standard_circle(WarpingProfile::constant(1.0).unwrap()).unwrap();
        let r = clairaut_distance(&s, SurfacePoint::new(3.0, 0.0), SurfacePoint::new(-3.0, 0.3), 1e-9).unwrap();
        let dr = 2.0 * PI - 6.0;
        assert!((r.distance - dr.hypot(0.3)).abs() < 1e-9);
    }

    #[test]
    fn equal_points_are_rejected() {
        assert!(clairaut_distance(&flat(), SurfacePoint::new(0.0, 0.0), SurfacePoint::new(0.0, 0.0), 1e-9).is_err());
    }
}
