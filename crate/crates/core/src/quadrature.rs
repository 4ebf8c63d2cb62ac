//! Composite quadrature rules for piecewise-smooth integrands.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::rc::Rc;

use gauss_quad::legendre::GaussLegendre;

/// Composite midpoint rule with `n` subintervals on `[a, b]`.
#[inline]
pub fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    let mut s = 0.0;
    for i in 0..n {
        s += f(a + (i as f64 + 0.5) * h);
    }
    s * h
}

/// Midpoint rule applied separately on each piece of `[a, b]` cut at the
/// sorted `breaks` lying strictly inside.
pub fn midpoint_split(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize, breaks: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut left = a;
    for &x in breaks.iter().filter(|x| **x > a && **x < b) {
        s += midpoint(&f, left, x, n);
        left = x;
    }
    s + midpoint(&f, left, b, n)
}

thread_local! {
    static RULES: RefCell<HashMap<usize, Rc<GaussLegendre>>> = RefCell::new(HashMap::new());
}

fn rule(n: usize) -> Rc<GaussLegendre> {
    let n = NonZeroUsize::new(n.max(1)).expect("n ≥ 1");
    RULES.with(|r| r.borrow_mut().entry(n.get()).or_insert_with(|| Rc::new(GaussLegendre::new(n))).clone())
}

/// `n`-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    rule(n).integrate(a, b, f)
}

/// [`gauss`] on each piece of `[a, b]` cut at the sorted `breaks` lying
/// strictly inside.
pub fn gauss_split(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize, breaks: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut left = a;
    for &x in breaks.iter().filter(|x| **x > a && **x < b) {
        s += gauss(&f, left, x, n);
        left = x;
    }
    s + gauss(&f, left, b, n)
}

/// Gauss–Legendre rule after the substitution `x = a + (b - a)(1 - cos u)/2`.
///
/// The Jacobian vanishes at both ends, which turns inverse square-root
/// endpoint singularities into smooth integrands.
pub fn cosine_gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let half = 0.5 * (b - a);
    gauss(
        |u| {
            let x = a + half * (1.0 - u.cos());
            f(x) * half * u.sin()
        },
        0.0,
        PI,
        n,
    )
}

/// [`cosine_gauss`] on each piece between breakpoints.
pub fn cosine_gauss_split(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize, breaks: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut left = a;
    for &x in breaks.iter().filter(|x| **x > a && **x < b) {
        s += cosine_gauss(&f, left, x, n);
        left = x;
    }
    s + cosine_gauss(&f, left, b, n)
}

/// Minimizes a unimodal function on `[a, b]` by golden-section search.
/// Returns `(argmin, min)`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let fa = f(a);
    let fb = f(b);
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    if fa < best.1 {
        best = (a, fa);
    }
    if fb < best.1 {
        best = (b, fb);
    }
    best
}

/// Scans `[a, b]` at `samples + 1` points, then refines the best bracket
/// with golden-section search. For functions that may have several local
/// minima.
pub fn scan_min(f: impl Fn(f64) -> f64, a: f64, b: f64, samples: usize, iters: usize) -> (f64, f64) {
    let samples = samples.max(2);
    let h = (b - a) / samples as f64;
    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    for i in 0..=samples {
        let v = f(a + i as f64 * h);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = a + (best_i.saturating_sub(1)) as f64 * h;
    let hi = (a + (best_i + 1) as f64 * h).min(b);
    let (x, v) = golden_min(&f, lo, hi, iters);
    if v <= best_v {
        (x, v)
    } else {
        (a + best_i as f64 * h, best_v)
    }
}
