//! Shortest paths on a periodic 3D grid graph. Weights depend on `(x, y)`
//! only and are tabulated per `(ix, iy, offset)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Point3, Warp2DProfile};
use crate::error::{Result, WarpError};
use crate::geodesy::anisotropy::{coprime_offsets_3d, overestimate_3d};
use crate::geodesy::grid::quantize_weights;
use crate::geodesy::Method;
use crate::quadrature::gauss;

/// Largest number of nodes a 3D grid may have.
pub const MAX_GRID3_NODES: usize = 1 << 24;

const EDGE_QUADRATURE_N: usize = 6;
const ANISOTROPY_SAMPLES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid3Spec {
    /// Subdivisions per axis.
    pub n: usize,
    /// Chebyshev radius of the stencil: 1 (26 neighbors) or 2 (98).
    pub k: u32,
}

impl Grid3Spec {
    pub fn new(n: usize, k: u32) -> Result<Self> {
        let g = Grid3Spec { n, k };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 32 {
            return Err(WarpError::invalid(format!("3D grid needs n ≥ 32 per axis, got {}", self.n)));
        }
        if !(1..=2).contains(&self.k) {
            return Err(WarpError::invalid(format!("3D neighborhood k must be 1 or 2, got {}", self.k)));
        }
        match self.n.checked_pow(3) {
            Some(v) if v <= MAX_GRID3_NODES => Ok(()),
            _ => Err(WarpError::MemoryGuard(format!("3D grid of {}³ nodes exceeds {MAX_GRID3_NODES}", self.n))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geodesic3Result {
    pub distance: f64,
    pub method: Method,
    pub error_estimate: f64,
    /// Lifted vertices; consecutive vertices are joined by straight
    /// coordinate segments.
    pub path: Vec<Point3>,
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    d: f64,
    node: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.d.total_cmp(&self.d).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const NO_PRED: u8 = u8::MAX;

#[derive(Debug, Clone)]
pub struct Grid3 {
    profile: Warp2DProfile,
    spec: Grid3Spec,
    h: f64,
    offsets: Vec<(i32, i32, i32)>,
    weights: Vec<f64>,
    anisotropy: f64,
}

impl Grid3 {
    pub fn build(profile: &Warp2DProfile, spec: Grid3Spec) -> Result<Self> {
        spec.validate()?;
        profile.validate()?;
        let n = spec.n;
        let h = TAU / n as f64;
        let offsets = coprime_offsets_3d(spec.k);
        let m = offsets.len();
        let canonical: Vec<bool> =
            offsets.iter().map(|&(a, b, c)| a > 0 || (a == 0 && (b > 0 || (b == 0 && c > 0)))).collect();
        let reverse: Vec<usize> = offsets
            .iter()
            .map(|&(a, b, c)| offsets.iter().position(|&o| o == (-a, -b, -c)).expect("stencil is symmetric"))
            .collect();

        let mut weights = vec![f64::NAN; n * n * m];
        weights.par_chunks_mut(m).enumerate().for_each(|(cell, w)| {
            let x = -PI + (cell / n) as f64 * h;
            let y = -PI + (cell % n) as f64 * h;
            for (o, &(dx, dy, dz)) in offsets.iter().enumerate() {
                if !canonical[o] {
                    continue;
                }
                let flat = h * ((dx * dx + dy * dy) as f64).sqrt();
                w[o] = if dz == 0 {
                    flat
                } else {
                    let (ex, ey, ez) = (dx as f64 * h, dy as f64 * h, dz as f64 * h);
                    gauss(|t| flat.hypot(profile.value(x + t * ex, y + t * ey) * ez), 0.0, 1.0, EDGE_QUADRATURE_N)
                };
            }
        });
        // a reverse edge is the canonical edge of the cell it starts from
        for cell in 0..n * n {
            let (ix, iy) = ((cell / n) as i64, (cell % n) as i64);
            for o in 0..m {
                if canonical[o] {
                    continue;
                }
                let (dx, dy, _) = offsets[o];
                let sx = (ix + dx as i64).rem_euclid(n as i64) as usize;
                let sy = (iy + dy as i64).rem_euclid(n as i64) as usize;
                weights[cell * m + o] = weights[(sx * n + sy) * m + reverse[o]];
            }
        }

        let (lo, hi) = (profile.f_min(), profile.f_max());
        quantize_weights(&mut weights, TAU * (2.0 + hi));
        let anisotropy = if lo == hi {
            overestimate_3d(&offsets, [h, h, lo * h])
        } else {
            let worst = (0..=ANISOTROPY_SAMPLES)
                .map(|i| {
                    let f = lo + (hi - lo) * i as f64 / ANISOTROPY_SAMPLES as f64;
                    overestimate_3d(&offsets, [h, h, f * h])
                })
                .fold(0.0, f64::max);
            worst * (1.0 + 1.0 / ANISOTROPY_SAMPLES as f64)
        };
        Ok(Grid3 { profile: profile.clone(), spec, h, offsets, weights, anisotropy })
    }

    pub fn profile(&self) -> &Warp2DProfile {
        &self.profile
    }

    pub fn spec(&self) -> Grid3Spec {
        self.spec
    }

    pub fn node_count(&self) -> usize {
        self.spec.n.pow(3)
    }

    /// Relative overestimate bound of grid lengths over true lengths.
    pub fn anisotropy(&self) -> f64 {
        self.anisotropy
    }

    fn index(&self, i: usize, j: usize, k: usize) -> u32 {
        let n = self.spec.n;
        ((i * n + j) * n + k) as u32
    }

    fn coords(&self, node: u32) -> (usize, usize, usize) {
        let n = self.spec.n;
        let node = node as usize;
        (node / (n * n), (node / n) % n, node % n)
    }

    pub fn node_point(&self, node: u32) -> Point3 {
        let (i, j, k) = self.coords(node);
        Point3::new(-PI + i as f64 * self.h, -PI + j as f64 * self.h, -PI + k as f64 * self.h)
    }

    /// Nearest node and a bound on the distance from `p` to it.
    pub fn snap(&self, p: Point3) -> Result<(u32, f64)> {
        let p = p.wrapped()?;
        let n = self.spec.n as i64;
        let idx = |v: f64| (((v + PI) / self.h).round() as i64).rem_euclid(n) as usize;
        let node = self.index(idx(p.x), idx(p.y), idx(p.z));
        let q = self.node_point(node);
        let d = |a: f64, b: f64| super::periodic_dist(a, b);
        let err = d(p.x, q.x).hypot(d(p.y, q.y)) + self.profile.f_max() * d(p.z, q.z);
        Ok((node, err))
    }

    /// Dijkstra from `src`, stopping once every target is settled.
    fn search(&self, src: u32, targets: &[u32]) -> (Vec<f64>, Vec<u8>) {
        let n = self.spec.n;
        let total = self.node_count();
        let m = self.offsets.len();
        let mut dist = vec![f64::INFINITY; total];
        let mut pred = vec![NO_PRED; total];
        let mut settled = vec![false; total];
        let mut pending: Vec<u32> = targets.to_vec();
        pending.sort_unstable();
        pending.dedup();
        let mut remaining = pending.len();
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
            let (i, j, k) = self.coords(node);
            let w = &self.weights[(i * n + j) * m..(i * n + j + 1) * m];
            for (o, &(dx, dy, dz)) in self.offsets.iter().enumerate() {
                let wrap = |a: usize, b: i32| (a as i64 + b as i64).rem_euclid(n as i64) as usize;
                let nb = self.index(wrap(i, dx), wrap(j, dy), wrap(k, dz));
                let nd = d + w[o];
                if nd < dist[nb as usize] {
                    dist[nb as usize] = nd;
                    pred[nb as usize] = o as u8;
                    heap.push(Entry { d: nd, node: nb });
                }
            }
        }
        (dist, pred)
    }

    /// Graph distance between two nodes, searched from the smaller index
    /// so the value is exactly symmetric.
    pub fn node_distance(&self, a: u32, b: u32) -> f64 {
        let (s, t) = if a <= b { (a, b) } else { (b, a) };
        self.search(s, &[t]).0[t as usize]
    }

    /// Distances from `src` to each of `targets`, in order.
    pub fn distances_from(&self, src: u32, targets: &[u32]) -> Vec<f64> {
        let (dist, _) = self.search(src, targets);
        targets.iter().map(|t| dist[*t as usize]).collect()
    }

    /// Shortest grid path between the nodes nearest to `p` and `q`.
    pub fn distance(&self, p: Point3, q: Point3) -> Result<Geodesic3Result> {
        let (np, ep) = self.snap(p)?;
        let (nq, eq) = self.snap(q)?;
        let (s, t) = if np <= nq { (np, nq) } else { (nq, np) };
        let (dist, pred) = self.search(s, &[t]);
        let n = self.spec.n as i64;
        let mut steps = Vec::new();
        let mut cur = t;
        while cur != s {
            let (dx, dy, dz) = self.offsets[pred[cur as usize] as usize];
            steps.push((dx, dy, dz));
            let (i, j, k) = self.coords(cur);
            let back = |a: usize, b: i32| (a as i64 - b as i64).rem_euclid(n) as usize;
            cur = self.index(back(i, dx), back(j, dy), back(k, dz));
        }
        steps.reverse();
        let start = self.node_point(s);
        let mut path = vec![start];
        let mut last = None;
        for st in steps {
            let v = *path.last().unwrap();
            let next = Point3::new(v.x + st.0 as f64 * self.h, v.y + st.1 as f64 * self.h, v.z + st.2 as f64 * self.h);
            if last == Some(st) {
                *path.last_mut().unwrap() = next;
            } else {
                path.push(next);
            }
            last = Some(st);
        }
        if s != np {
            path.reverse();
        }
        let d = dist[t as usize];
        Ok(Geodesic3Result { distance: d, method: Method::Grid, error_estimate: ep + eq + self.anisotropy * d, path })
    }
}

/// One query; builds the graph and discards it.
pub fn grid3_distance(profile: &Warp2DProfile, spec: Grid3Spec, p: Point3, q: Point3) -> Result<Geodesic3Result> {
    Grid3::build(profile, spec)?.distance(p, q)
}
