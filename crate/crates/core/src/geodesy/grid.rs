//! Shortest paths on a weighted grid graph over a warped product.
//!
//! Nodes sit on a regular `(r, θ)` lattice. Each node connects to the nodes
//! reached by the coprime offsets of Chebyshev radius `≤ k`; an edge weighs
//! the length of the straight parameter-space segment it spans. Since the
//! metric depends on `r` only, weights are tabulated once per
//! `(row, offset)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::anisotropy::{coprime_offsets_2d, overestimate_2d_range};
use super::{GeodesicResult, Method};
use crate::curve::{segment_length, PolylineCurve, SegmentWrap};
use crate::error::{Result, WarpError};
use crate::space::{SurfacePoint, WarpedSpace};

/// Largest number of nodes a grid may have.
pub const MAX_GRID_NODES: usize = 1 << 24;

/// Midpoint nodes per smooth piece when tabulating edge weights.
const EDGE_QUADRATURE_N: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Base subdivisions.
    pub n_r: usize,
    /// Fiber subdivisions.
    pub n_theta: usize,
    /// Chebyshev radius of the neighborhood stencil.
    pub k: u32,
}

impl GridSpec {
    pub fn new(n_r: usize, n_theta: usize, k: u32) -> Result<Self> {
        let g = GridSpec { n_r, n_theta, k };
        g.validate()?;
        Ok(g)
    }

    pub fn square(n: usize, k: u32) -> Result<Self> {
        Self::new(n, n, k)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_r < 8 || self.n_theta < 8 {
            return Err(WarpError::invalid(format!(
                "grid needs n_r, n_theta ≥ 8, got {} × {}",
                self.n_r, self.n_theta
            )));
        }
        if !(1..=3).contains(&self.k) {
            return Err(WarpError::invalid(format!("neighborhood k must be 1, 2 or 3, got {}", self.k)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    d: f64,
    node: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then on node index
        other.d.total_cmp(&self.d).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const NO_PRED: u8 = u8::MAX;

/// Rounds every weight up to a multiple of the power of two `q` for which
/// all multiples of `q` below `2·bound` are exact doubles. With `bound` at
/// least the graph diameter, no sum formed during a search is rounded, so
/// the graph metric satisfies the triangle inequality exactly.
pub(crate) fn quantize_weights(weights: &mut [f64], bound: f64) {
    let e = (2.0 * bound).log2().ceil() as i32;
    let q = 2f64.powi(e - 52);
    for w in weights.iter_mut().filter(|w| w.is_finite()) {
        *w = (*w / q).ceil() * q;
    }
}

/// Result of a single-source search.
pub struct Search {
    pub dist: Vec<f64>,
    pred: Vec<u8>,
}

/// A grid graph over a fixed space, immutable after construction.
#[derive(Debug, Clone)]
pub struct WarpGrid {
    space: WarpedSpace,
    spec: GridSpec,
    rows: usize,
    cols: usize,
    periodic: bool,
    r_lo: f64,
    dr: f64,
    dtheta: f64,
    offsets: Vec<(i32, i32)>,
    weights: Vec<f64>,
    anisotropy: f64,
}

impl WarpGrid {
    pub fn build(space: &WarpedSpace, spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let periodic = space.base.is_circle();
        let rows = if periodic { spec.n_r } else { spec.n_r + 1 };
        let cols = spec.n_theta;
        let nodes = rows
            .checked_mul(cols)
            .filter(|n| *n <= MAX_GRID_NODES)
            .ok_or_else(|| WarpError::MemoryGuard(format!("grid of {rows} × {cols} nodes exceeds {MAX_GRID_NODES}")))?;
        let _ = nodes;
        let (r_lo, _) = space.base.bounds();
        let dr = space.base.length() / spec.n_r as f64;
        let dtheta = space.fiber.circumference / cols as f64;
        let offsets = coprime_offsets_2d(spec.k);
        let m = offsets.len();

        // canonical orientation: di > 0, or di = 0 and dj > 0
        let canonical: Vec<bool> = offsets.iter().map(|&(a, b)| a > 0 || (a == 0 && b > 0)).collect();
        let reverse: Vec<usize> = offsets
            .iter()
            .map(|&(a, b)| offsets.iter().position(|&o| o == (-a, -b)).expect("stencil is symmetric"))
            .collect();

        let mut weights = vec![f64::NAN; rows * m];
        weights.par_chunks_mut(m).enumerate().for_each(|(i, row_w)| {
            let mut scratch = Vec::new();
            let r = r_lo + i as f64 * dr;
            for (o, &(di, dj)) in offsets.iter().enumerate() {
                if !canonical[o] {
                    continue;
                }
                let target = i as i64 + di as i64;
                if !periodic && target >= rows as i64 {
                    continue;
                }
                row_w[o] = segment_length(
                    space,
                    (r, 0.0),
                    (r + di as f64 * dr, dj as f64 * dtheta),
                    EDGE_QUADRATURE_N,
                    &mut scratch,
                );
            }
        });
        // reverse edges reuse the canonical weight of the same segment
        for i in 0..rows {
            for o in 0..m {
                if canonical[o] {
                    continue;
                }
                let (di, _) = offsets[o];
                let src = i as i64 + di as i64;
                let src = if periodic {
                    src.rem_euclid(rows as i64)
                } else if src < 0 || src >= rows as i64 {
                    continue;
                } else {
                    src
                };
                weights[i * m + o] = weights[src as usize * m + reverse[o]];
            }
        }

        // a path along the axes bounds every shortest path
        quantize_weights(&mut weights, space.base.length() + space.f_max() * space.fiber.circumference);

        let aspect = dtheta / dr;
        let anisotropy = overestimate_2d_range(&offsets, space.f_min() * aspect, space.f_max() * aspect);
        Ok(WarpGrid {
            space: space.clone(),
            spec,
            rows,
            cols,
            periodic,
            r_lo,
            dr,
            dtheta,
            offsets,
            weights,
            anisotropy,
        })
    }

    pub fn space(&self) -> &WarpedSpace {
        &self.space
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn node_count(&self) -> usize {
        self.rows * self.cols
    }

    /// Relative overestimate bound `c` of grid lengths over true lengths.
    pub fn anisotropy(&self) -> f64 {
        self.anisotropy
    }

    pub fn node(&self, row: usize, col: usize) -> u32 {
        (row * self.cols + col) as u32
    }

    pub fn node_point(&self, node: u32) -> SurfacePoint {
        let row = node as usize / self.cols;
        let col = node as usize % self.cols;
        SurfacePoint { r: self.r_lo + row as f64 * self.dr, theta: col as f64 * self.dtheta }
    }

    /// Nearest node to `p` and a bound on the distance from `p` to it.
    pub fn snap(&self, p: SurfacePoint) -> Result<(u32, f64)> {
        let p = self.space.normalize(p)?;
        let fi = ((p.r - self.r_lo) / self.dr).round() as i64;
        let row =
            if self.periodic { fi.rem_euclid(self.rows as i64) } else { fi.clamp(0, self.rows as i64 - 1) } as usize;
        let col = ((p.theta / self.dtheta).round() as i64).rem_euclid(self.cols as i64) as usize;
        let node = self.node(row, col);
        let q = self.node_point(node);
        let dr = self.space.base.dist(p.r, q.r);
        let dt = self.space.fiber.dist(p.theta, q.theta);
        let err = if dt == 0.0 { dr } else { dr + self.space.max_between(p.r, q.r) * dt };
        Ok((node, err))
    }

    #[inline]
    fn for_each_neighbor(&self, node: u32, mut visit: impl FnMut(u32, f64, u8)) {
        let row = node as usize / self.cols;
        let col = node as usize % self.cols;
        let m = self.offsets.len();
        let w = &self.weights[row * m..(row + 1) * m];
        for (o, &(di, dj)) in self.offsets.iter().enumerate() {
            let nr = row as i64 + di as i64;
            let nr = if self.periodic {
                nr.rem_euclid(self.rows as i64)
            } else if nr < 0 || nr >= self.rows as i64 {
                continue;
            } else {
                nr
            } as usize;
            let nc = (col as i64 + dj as i64).rem_euclid(self.cols as i64) as usize;
            visit((nr * self.cols + nc) as u32, w[o], o as u8);
        }
    }

    /// Dijkstra from `src`, stopping once every node in `targets` is settled
    /// (or exploring everything when `targets` is empty).
    pub fn search(&self, src: u32, targets: &[u32]) -> Search {
        let n = self.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![NO_PRED; n];
        let mut pending: Vec<u32> = targets.to_vec();
        pending.sort_unstable();
        pending.dedup();
        let mut remaining = pending.len();
        let mut settled = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[src as usize] = 0.0;
        heap.push(Entry { d: 0.0, node: src });
        while let Some(Entry { d, node }) = heap.pop() {
            if settled[node as usize] {
                continue;
            }
            settled[node as usize] = true;
            if remaining > 0 && pending.binary_search(&node).is_ok() {
                remaining -= 1;
                if remaining == 0 {
                    break;
                }
            }
            self.for_each_neighbor(node, |nb, w, o| {
                let nd = d + w;
                if nd < dist[nb as usize] {
                    dist[nb as usize] = nd;
                    pred[nb as usize] = o;
                    heap.push(Entry { d: nd, node: nb });
                }
            });
        }
        Search { dist, pred }
    }

    /// Graph distance between two nodes. Always searched from the smaller
    /// index so the result is exactly symmetric.
    pub fn node_distance(&self, a: u32, b: u32) -> f64 {
        let (s, t) = if a <= b { (a, b) } else { (b, a) };
        self.search(s, &[t]).dist[t as usize]
    }

    /// Distances from `src` to each of `targets`, in order.
    pub fn distances_from(&self, src: u32, targets: &[u32]) -> Vec<f64> {
        let s = self.search(src, targets);
        targets.iter().map(|t| s.dist[*t as usize]).collect()
    }

    /// Lifted node path from `src` to `t` recovered from a search, with
    /// runs of equal steps merged into single segments.
    fn lifted_path(&self, search: &Search, src: u32, t: u32) -> Vec<(f64, f64)> {
        let mut steps = Vec::new();
        let mut cur = t;
        while cur != src {
            let o = search.pred[cur as usize];
            debug_assert!(o != NO_PRED);
            let (di, dj) = self.offsets[o as usize];
            steps.push((di, dj));
            let row = cur as usize / self.cols;
            let col = cur as usize % self.cols;
            let pr = (row as i64 - di as i64).rem_euclid(self.rows as i64) as usize;
            let pc = (col as i64 - dj as i64).rem_euclid(self.cols as i64) as usize;
            cur = self.node(pr, pc);
        }
        steps.reverse();
        let start = self.node_point(src);
        let mut out = vec![(start.r, start.theta)];
        let mut last: Option<(i32, i32)> = None;
        for (di, dj) in steps {
            let (r, th) = *out.last().unwrap();
            let next = (r + di as f64 * self.dr, th + dj as f64 * self.dtheta);
            if last == Some((di, dj)) {
                *out.last_mut().unwrap() = next;
            } else {
                out.push(next);
            }
            last = Some((di, dj));
        }
        out
    }

    /// Shortest grid path between the nodes nearest to `p` and `q`.
    pub fn distance(&self, p: SurfacePoint, q: SurfacePoint) -> Result<GeodesicResult> {
        let p = self.space.normalize(p)?;
        let q = self.space.normalize(q)?;
        let (np, ep) = self.snap(p)?;
        let (nq, eq) = self.snap(q)?;
        let (s, t) = if np <= nq { (np, nq) } else { (nq, np) };
        let search = self.search(s, &[t]);
        let d = search.dist[t as usize];
        let mut lifted = self.lifted_path(&search, s, t);
        if s != np {
            lifted.reverse();
        }
        // attach the exact endpoints when they are off the lattice
        let first = lifted[0];
        if self.node_point(np) != p {
            let lp =
                (first.0 + self.space.base.delta(first.0, p.r), first.1 + self.space.fiber.delta(first.1, p.theta));
            lifted.insert(0, lp);
        }
        let last = *lifted.last().unwrap();
        if self.node_point(nq) != q || lifted.len() == 1 {
            let lq = (last.0 + self.space.base.delta(last.0, q.r), last.1 + self.space.fiber.delta(last.1, q.theta));
            if lq != last {
                lifted.push(lq);
            }
        }
        let path = if lifted.len() >= 2 {
            let mut c = PolylineCurve::from_lifted(&self.space, &lifted)?;
            // undo rounding from lifting and re-wrapping
            let n = c.vertices.len();
            c.vertices[0] = p;
            c.vertices[n - 1] = q;
            c
        } else {
            PolylineCurve { vertices: vec![p, q], wraps: vec![SegmentWrap::default()] }
        };
        Ok(GeodesicResult {
            distance: d,
            method: Method::Grid,
            error_estimate: ep + eq + self.anisotropy * d,
            path,
            converged: true,
        })
    }
}

/// One grid query; builds the graph for `(space, grid)` and discards it.
pub fn grid_distance(space: &WarpedSpace, grid: GridSpec, p: SurfacePoint, q: SurfacePoint) -> Result<GeodesicResult> {
    WarpGrid::build(space, grid)?.distance(p, q)
}
