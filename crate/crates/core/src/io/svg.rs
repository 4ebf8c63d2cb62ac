//! Static SVG figures with inline styles and no scripts.

use std::fmt::Write;

use super::fmt_num;
use crate::curve::PolylineCurve;
use crate::error::{Result, WarpError};
use crate::lab::ConvergenceReport;
use crate::profile::WarpingProfile;
use crate::ret::{ret_ball_boundary, RETParams};
use crate::space::{BaseSpace, SurfacePoint, WarpedSpace};
use crate::torus3d::Torus3Report;

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: (f64, f64, f64, f64) = (64.0, 24.0, 40.0, 52.0); // left, right, top, bottom
const BAND: &str = "#eeeeee";
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"];

struct Series {
    label: String,
    /// Polylines; a series may be drawn in several pieces.
    pieces: Vec<Vec<(f64, f64)>>,
    markers: bool,
    dashed: bool,
}

struct Figure {
    title: String,
    xlabel: String,
    ylabel: String,
    x: (f64, f64),
    y: (f64, f64),
    /// Equal scale on both axes.
    equal: bool,
    series: Vec<Series>,
    bands: Vec<(f64, f64)>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn px(v: f64) -> String {
    format!("{:.2}", v)
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(hi > lo) {
        let m = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        return (lo - m, hi + m);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

impl Figure {
    fn new(title: &str, xlabel: &str, ylabel: &str) -> Self {
        Figure {
            title: title.into(),
            xlabel: xlabel.into(),
            ylabel: ylabel.into(),
            x: (0.0, 1.0),
            y: (0.0, 1.0),
            equal: false,
            series: Vec::new(),
            bands: Vec::new(),
        }
    }

    fn fit(&mut self) {
        let pts = || {
            self.series.iter().flat_map(|s| s.pieces.iter().flatten()).filter(|p| p.0.is_finite() && p.1.is_finite())
        };
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts() {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            return;
        }
        self.x = padded(x0, x1);
        self.y = padded(y0, y1);
    }

    fn render(&self) -> String {
        let (mut ml, mr, mut mt, mb) = MARGIN;
        let (mut pw, mut ph) = (W - ml - mr, H - mt - mb);
        let (mut sx, mut sy) = (pw / (self.x.1 - self.x.0), ph / (self.y.1 - self.y.0));
        if self.equal {
            let s = sx.min(sy);
            sx = s;
            sy = s;
            let (w, h) = (s * (self.x.1 - self.x.0), s * (self.y.1 - self.y.0));
            ml += 0.5 * (pw - w);
            mt += 0.5 * (ph - h);
            pw = w;
            ph = h;
        }
        let label_w = self.series.iter().map(|s| s.label.chars().count()).max().unwrap_or(0) as f64 * 7.0;
        let tx = |x: f64| ml + (x - self.x.0) * sx;
        let ty = |y: f64| mt + ph - (y - self.y.0) * sy;
        let mut o = String::new();
        let _ = writeln!(
            o,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(o, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            o,
            r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
            px(W / 2.0),
            esc(&self.title)
        );
        for &(a, b) in &self.bands {
            let (a, b) = (tx(a.max(self.x.0)), tx(b.min(self.x.1)));
            if b > a {
                let _ = writeln!(
                    o,
                    r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{BAND}"/>"#,
                    px(a),
                    px(mt),
                    px(b - a),
                    px(ph)
                );
            }
        }
        let _ = writeln!(
            o,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            px(ml),
            px(mt),
            px(pw),
            px(ph)
        );
        for t in ticks(self.x.0, self.x.1) {
            let x = tx(t);
            if x > ml + pw + 0.5 {
                continue;
            }
            let _ = writeln!(
                o,
                r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/>"#,
                px(x),
                px(mt + ph),
                px(mt + ph + 4.0)
            );
            let _ = writeln!(
                o,
                r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                px(x),
                px(mt + ph + 17.0),
                fmt_num((t * 1e6).round() / 1e6)
            );
        }
        for t in ticks(self.y.0, self.y.1) {
            let y = ty(t);
            if y < mt - 0.5 {
                continue;
            }
            let _ = writeln!(
                o,
                r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/>"#,
                px(ml - 4.0),
                px(y),
                px(ml)
            );
            let _ = writeln!(
                o,
                r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
                px(ml - 7.0),
                px(y + 4.0),
                fmt_num((t * 1e6).round() / 1e6)
            );
        }
        let _ = writeln!(
            o,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            px(ml + pw / 2.0),
            px(H - 12.0),
            esc(&self.xlabel)
        );
        let _ = writeln!(
            o,
            r#"<text x="{0}" y="{1}" text-anchor="middle" transform="rotate(-90 {0} {1})">{2}</text>"#,
            px(ml - 48.0),
            px(mt + ph / 2.0),
            esc(&self.ylabel)
        );
        let _ = writeln!(
            o,
            r#"<clipPath id="plot"><rect x="{}" y="{}" width="{}" height="{}"/></clipPath>"#,
            px(ml),
            px(mt),
            px(pw),
            px(ph)
        );
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            for piece in &s.pieces {
                let pts: Vec<String> = piece
                    .iter()
                    .filter(|p| p.0.is_finite() && p.1.is_finite())
                    .map(|&(x, y)| format!("{},{}", px(tx(x)), px(ty(y))))
                    .collect();
                if pts.is_empty() {
                    continue;
                }
                let _ = writeln!(
                    o,
                    r#"<polyline clip-path="url(#plot)" fill="none" stroke="{color}" stroke-width="1.6"{dash} points="{}"/>"#,
                    pts.join(" ")
                );
                if s.markers {
                    for p in piece.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
                        let _ =
                            writeln!(o, r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#, px(tx(p.0)), px(ty(p.1)));
                    }
                }
            }
            let ly = mt + 14.0 + 16.0 * i as f64;
            let lx = ml + pw - label_w - 40.0;
            let _ = writeln!(
                o,
                r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="{color}" stroke-width="2"{dash}/>"#,
                px(lx),
                px(ly - 4.0),
                px(lx + 22.0)
            );
            let _ = writeln!(o, r#"<text x="{}" y="{}">{}</text>"#, px(lx + 28.0), px(ly), esc(&s.label));
        }
        o.push_str("</svg>\n");
        o
    }
}

/// Warping functions over the base.
pub fn profile_figure(profiles: &[(String, WarpingProfile)], base: &BaseSpace, samples: usize) -> Result<String> {
    if profiles.is_empty() || samples < 2 {
        return Err(WarpError::invalid("profile figure needs at least one profile and two samples"));
    }
    let (a, b) = base.bounds();
    let mut fig = Figure::new("warping functions", "r", "f(r)");
    for (label, p) in profiles {
        // sample breakpoints too so narrow bumps are drawn at their true height
        let mut rs: Vec<f64> = (0..samples).map(|i| a + (b - a) * i as f64 / (samples - 1) as f64).collect();
        for bump in p.bumps() {
            rs.extend([bump.center, bump.center - bump.half_width, bump.center + bump.half_width]);
        }
        rs.extend(p.breakpoints());
        rs.retain(|r| *r >= a && *r <= b);
        rs.sort_by(f64::total_cmp);
        rs.dedup();
        fig.series.push(Series {
            label: label.clone(),
            pieces: vec![rs.iter().map(|&r| (r, p.value(r))).collect()],
            markers: false,
            dashed: false,
        });
    }
    fig.fit();
    fig.y.0 = fig.y.0.min(0.0);
    Ok(fig.render())
}

/// `ε̂_j` against each candidate limit, with the corrected estimate dashed.
pub fn convergence_figure(report: &ConvergenceReport) -> Result<String> {
    if report.rows.is_empty() {
        return Err(WarpError::invalid("report has no rows"));
    }
    let mut fig = Figure::new(&format!("{}: sampled discrepancy", report.family), "j", "ε̂_j");
    let n = report.rows[0].limits.len();
    for i in 0..n {
        let label = &report.rows[0].limits[i].label;
        let col = |f: fn(&crate::lab::LimitColumn) -> f64| -> Vec<(f64, f64)> {
            report.rows.iter().filter_map(|r| r.limits.get(i).map(|c| (r.j as f64, f(c)))).collect()
        };
        fig.series.push(Series {
            label: label.clone(),
            pieces: vec![col(|c| c.eps_hat)],
            markers: true,
            dashed: false,
        });
        fig.series.push(Series {
            label: format!("{label}, corrected"),
            pieces: vec![col(|c| c.eps_corrected)],
            markers: false,
            dashed: true,
        });
    }
    fig.fit();
    fig.y.0 = fig.y.0.min(0.0);
    Ok(fig.render())
}

pub fn torus3_figure(report: &Torus3Report) -> Result<String> {
    if report.rows.is_empty() {
        return Err(WarpError::invalid("report has no rows"));
    }
    let mut fig = Figure::new(&format!("3-torus {}: sampled discrepancy", report.family.name()), "j", "ε̂_j");
    let pts = |f: fn(&crate::torus3d::Torus3Row) -> f64| vec![report.rows.iter().map(|r| (r.j as f64, f(r))).collect()];
    fig.series.push(Series { label: "ε̂".into(), pieces: pts(|r| r.eps_hat), markers: true, dashed: false });
    fig.series.push(Series {
        label: "corrected".into(),
        pieces: pts(|r| r.eps_corrected),
        markers: false,
        dashed: true,
    });
    fig.fit();
    fig.y.0 = fig.y.0.min(0.0);
    Ok(fig.render())
}

/// Balls of the given radii about `center` in the `(s, θ)` plane.
pub fn ret_balls_figure(params: &RETParams, center: SurfacePoint, radii: &[f64], samples: usize) -> Result<String> {
    if radii.is_empty() {
        return Err(WarpError::invalid("at least one radius is needed"));
    }
    let mut fig = Figure::new(&format!("balls of the R-ET metric, R = {}", fmt_num(params.r)), "s", "θ");
    fig.equal = true;
    for &r in radii {
        let curve = ret_ball_boundary(params, center, r, samples)?;
        let pts = curve.vertices.iter().map(|v| (v.r, v.theta)).collect();
        fig.series.push(Series {
            label: format!("radius {}", fmt_num(r)),
            pieces: vec![pts],
            markers: false,
            dashed: false,
        });
    }
    fig.fit();
    Ok(fig.render())
}

/// Paths in the `(r, θ)` rectangle; bump supports are shaded.
pub fn geodesic_figure(space: &WarpedSpace, paths: &[(String, PolylineCurve)]) -> Result<String> {
    if paths.is_empty() {
        return Err(WarpError::invalid("no paths to draw"));
    }
    let c = space.fiber.circumference;
    let (a, b) = space.base.bounds();
    let mut fig = Figure::new("geodesics", "r", "θ");
    fig.equal = true;
    fig.bands = space.profile.bumps().iter().map(|bp| (bp.center - bp.half_width, bp.center + bp.half_width)).collect();
    for (label, path) in paths {
        let lifted = path.lifted(space);
        // cut the lifted polyline where it crosses θ ≡ 0 or the base seam
        let mut pieces = vec![Vec::new()];
        for w in lifted.windows(2) {
            let (p, q) = (w[0], w[1]);
            let k = (p.1 / c).floor();
            let shift = |v: (f64, f64)| (v.0, v.1 - k * c);
            let cur = pieces.last_mut().unwrap();
            if cur.is_empty() {
                cur.push(shift(p));
            }
            let kq = (q.1 / c).floor();
            if kq == k {
                cur.push(shift(q));
            } else {
                let edge = if kq > k { (k + 1.0) * c } else { k * c };
                let t = (edge - p.1) / (q.1 - p.1);
                let x = p.0 + t * (q.0 - p.0);
                cur.push((x, edge - k * c));
                pieces.push(vec![(x, edge - kq * c), (q.0, q.1 - kq * c)]);
            }
        }
        let wrap_base = |v: (f64, f64)| if space.base.is_circle() { (space.base.wrap(v.0), v.1) } else { v };
        let pieces = pieces.into_iter().map(|pc| pc.into_iter().map(wrap_base).collect()).collect();
        fig.series.push(Series { label: label.clone(), pieces, markers: false, dashed: false });
    }
    fig.x = (a, b);
    fig.y = (0.0, c);
    Ok(fig.render())
}
