//! Neighborhood stencils for grid graphs and their anisotropy constants.
//!
//! A grid path built from a finite set of steps `s_i` can follow a
//! direction `w` only by mixing steps. The cheapest mix costs
//! `|w| / ρ(w)` where `ρ(w)` is the radial extent of the convex hull of the
//! normalized steps `s_i/|s_i|` in direction `w`. The worst relative
//! overestimate over all directions is therefore `1/inradius − 1`.

/// Lattice offsets with Chebyshev radius `≤ k` whose components are
/// coprime, so that no direction appears twice.
pub fn coprime_offsets_2d(k: u32) -> Vec<(i32, i32)> {
    let k = k as i32;
    let mut out = Vec::new();
    for di in -k..=k {
        for dj in -k..=k {
            if (di, dj) != (0, 0) && gcd(di.unsigned_abs(), dj.unsigned_abs()) == 1 {
                out.push((di, dj));
            }
        }
    }
    out
}

pub fn coprime_offsets_3d(k: u32) -> Vec<(i32, i32, i32)> {
    let k = k as i32;
    let mut out = Vec::new();
    for dx in -k..=k {
        for dy in -k..=k {
            for dz in -k..=k {
                let g = gcd(gcd(dx.unsigned_abs(), dy.unsigned_abs()), dz.unsigned_abs());
                if (dx, dy, dz) != (0, 0, 0) && g == 1 {
                    out.push((dx, dy, dz));
                }
            }
        }
    }
    out
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Worst relative overestimate of Euclidean length by paths using the 2D
/// `offsets`, where one step in the second coordinate has physical length
/// `aspect` relative to a step in the first.
pub fn overestimate_2d(offsets: &[(i32, i32)], aspect: f64) -> f64 {
    let mut angles: Vec<f64> = offsets.iter().map(|&(a, b)| (aspect * b as f64).atan2(a as f64)).collect();
    angles.sort_by(f64::total_cmp);
    let mut gap: f64 = angles[0] + std::f64::consts::TAU - angles[angles.len() - 1];
    for w in angles.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    if gap >= std::f64::consts::PI {
        return f64::INFINITY;
    }
    1.0 / (0.5 * gap).cos() - 1.0
}

/// Maximum of [`overestimate_2d`] over aspects in `[lo, hi]`.
pub fn overestimate_2d_range(offsets: &[(i32, i32)], lo: f64, hi: f64) -> f64 {
    const SAMPLES: usize = 256;
    if lo == hi {
        return overestimate_2d(offsets, lo);
    }
    let mut worst: f64 = 0.0;
    for i in 0..=SAMPLES {
        let a = lo + (hi - lo) * i as f64 / SAMPLES as f64;
        worst = worst.max(overestimate_2d(offsets, a));
    }
    // the gap is piecewise monotone in the aspect; a margin covers the
    // part of each piece between two samples
    worst * (1.0 + 1.0 / SAMPLES as f64)
}

/// 3D analogue of [`overestimate_2d`]; `scale` gives the physical length of
/// a unit step along each axis. Computed exactly from the facets of the
/// convex hull of the normalized steps.
pub fn overestimate_3d(offsets: &[(i32, i32, i32)], scale: [f64; 3]) -> f64 {
    let u: Vec<[f64; 3]> = offsets
        .iter()
        .map(|&(a, b, c)| {
            let v = [a as f64 * scale[0], b as f64 * scale[1], c as f64 * scale[2]];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            [v[0] / n, v[1] / n, v[2] / n]
        })
        .collect();
    let sub = |a: [f64; 3], b: [f64; 3]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let mut inradius = f64::INFINITY;
    let n = u.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let e1 = sub(u[j], u[i]);
                let e2 = sub(u[k], u[i]);
                let mut nrm =
                    [e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2], e1[0] * e2[1] - e1[1] * e2[0]];
                let len = dot(nrm, nrm).sqrt();
                if len < 1e-12 {
                    continue;
                }
                nrm = [nrm[0] / len, nrm[1] / len, nrm[2] / len];
                let mut d = dot(nrm, u[i]);
                if d < 0.0 {
                    nrm = [-nrm[0], -nrm[1], -nrm[2]];
                    d = -d;
                }
                if d >= inradius {
                    continue;
                }
                if u.iter().all(|p| dot(nrm, *p) <= d + 1e-12) {
                    inradius = d;
                }
            }
        }
    }
    if inradius <= 0.0 {
        return f64::INFINITY;
    }
    1.0 / inradius - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    #[test]
    fn offset_counts() {
        assert_eq!(coprime_offsets_2d(1).len(), 8);
        assert_eq!(coprime_offsets_2d(2).len(), 16);
        assert_eq!(coprime_offsets_2d(3).len(), 32);
        assert_eq!(coprime_offsets_3d(1).len(), 26);
        assert_eq!(coprime_offsets_3d(2).len(), 98);
    }

    #[test]
    fn square_grid_constants() {
        let c1 = overestimate_2d(&coprime_offsets_2d(1), 1.0);
        let c2 = overestimate_2d(&coprime_offsets_2d(2), 1.0);
        let c3 = overestimate_2d(&coprime_offsets_2d(3), 1.0);
        assert!((c1 - ((4.0 - 2.0 * 2f64.sqrt()).sqrt() - 1.0)).abs() < 1e-12);
        assert!((c1 - 0.083).abs() < 1e-3, "{c1}");
        // worst direction bisects the widest gap between adjacent steps
        let gap = |a: f64| 1.0 / (a / 2.0).cos() - 1.0;
        assert!((c2 - gap(0.5f64.atan())).abs() < 1e-12, "{c2}");
        assert!((c3 - gap((1.0f64 / 3.0).atan())).abs() < 1e-12, "{c3}");
        assert!((c2 - 0.027).abs() < 1e-3 && (c3 - 0.013).abs() < 1e-3);
    }

    /// Best lattice path cost to `(x, y)` using only `offsets`, by Dijkstra
    /// on a fine lattice.
    fn lattice_ratio(offsets: &[(i32, i32)], target: (i32, i32)) -> f64 {
        let n = 2 * target.0.abs().max(target.1.abs()) + 8;
        let idx = |x: i32, y: i32| ((x + n) * (2 * n + 1) + (y + n)) as usize;
        let mut dist = vec![f64::INFINITY; ((2 * n + 1) * (2 * n + 1)) as usize];
        let mut heap = BinaryHeap::new();
        dist[idx(0, 0)] = 0.0;
        heap.push((Reverse(0u64), 0i32, 0i32));
        while let Some((Reverse(dbits), x, y)) = heap.pop() {
            let d = f64::from_bits(dbits);
            if d > dist[idx(x, y)] {
                continue;
            }
            if (x, y) == target {
                break;
            }
            for &(a, b) in offsets {
                let (nx, ny) = (x + a, y + b);
                if nx.abs() > n || ny.abs() > n {
                    continue;
                }
                let nd = d + ((a * a + b * b) as f64).sqrt();
                if nd < dist[idx(nx, ny)] {
                    dist[idx(nx, ny)] = nd;
                    heap.push((Reverse(nd.to_bits()), nx, ny));
                }
            }
        }
        let e = ((target.0 * target.0 + target.1 * target.1) as f64).sqrt();
        dist[idx(target.0, target.1)] / e
    }

    #[test]
    fn constants_bound_brute_force_lattice_paths() {
        // sweep directions; the worst observed ratio approaches the constant
        for k in 1..=3u32 {
            let offs = coprime_offsets_2d(k);
            let c = overestimate_2d(&offs, 1.0);
            let mut worst: f64 = 0.0;
            let m = 60;
            for i in 0..=60 {
                let phi = std::f64::consts::FRAC_PI_4 * i as f64 / 60.0;
                let t = ((m as f64 * phi.cos()).round() as i32, (m as f64 * phi.sin()).round() as i32);
                worst = worst.max(lattice_ratio(&offs, t) - 1.0);
            }
            assert!(worst <= c + 1e-12, "k={k}: {worst} > {c}");
            assert!(worst >= 0.8 * c, "k={k}: {worst} far below {c}");
        }
    }

    #[test]
    fn three_d_constant_reduces_to_planar_cases() {
        let c = overestimate_3d(&coprime_offsets_3d(1), [1.0, 1.0, 1.0]);
        // the cube-diagonal stencil is worse than the planar square stencil
        assert!(c > overestimate_2d(&coprime_offsets_2d(1), 1.0));
        assert!(c < 0.2, "{c}");
        let c2 = overestimate_3d(&coprime_offsets_3d(2), [1.0, 1.0, 1.0]);
        assert!(c2 < c);
    }

    #[test]
    fn aspect_range_covers_endpoints() {
        let offs = coprime_offsets_2d(2);
        let r = overestimate_2d_range(&offs, 1.0, 2.0);
        assert!(r >= overestimate_2d(&offs, 1.0));
        assert!(r >= overestimate_2d(&offs, 2.0));
    }
}
