use super::fmt_num;
use crate::error::{Result, WarpError};
use crate::lab::{AuditStatus, ConvergenceReport};
use crate::space::SurfacePoint;
use crate::torus3d::{Point3, Torus3Report};

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| WarpError::InvalidInput(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| WarpError::InvalidInput(format!("csv: {e}")))
}

fn csv_err(e: csv::Error) -> WarpError {
    WarpError::InvalidInput(format!("csv: {e}"))
}

fn pair2(p: SurfacePoint, q: SurfacePoint) -> String {
    format!("({} {})-({} {})", fmt_num(p.r), fmt_num(p.theta), fmt_num(q.r), fmt_num(q.theta))
}

fn pair3(p: Point3, q: Point3) -> String {
    format!("({} {} {})-({} {} {})", fmt_num(p.x), fmt_num(p.y), fmt_num(p.z), fmt_num(q.x), fmt_num(q.y), fmt_num(q.z))
}

/// One row per `j`. After the fixed columns come `eps_hat` and
/// `eps_corrected` against every further candidate limit, labelled by
/// the limit.
pub fn convergence_csv(report: &ConvergenceReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head: Vec<String> = [
        "j",
        "n_r",
        "n_theta",
        "k",
        "samples",
        "eps_hat",
        "eps_corrected",
        "grid_err",
        "l2_norm",
        "lambda",
        "gh_bound",
        "flat_bound",
        "worst_pair",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let extra: Vec<String> =
        report.rows.first().map(|r| r.limits.iter().skip(1).map(|c| c.label.clone()).collect()).unwrap_or_default();
    for label in &extra {
        head.push(format!("eps_hat[{label}]"));
        head.push(format!("eps_corrected[{label}]"));
    }
    w.write_record(&head).map_err(csv_err)?;
    for r in &report.rows {
        let mut rec = vec![
            r.j.to_string(),
            r.grid.n_r.to_string(),
            r.grid.n_theta.to_string(),
            r.grid.k.to_string(),
            r.samples.to_string(),
            fmt_num(r.eps_hat),
            fmt_num(r.eps_corrected),
            fmt_num(r.grid_err),
            fmt_num(r.l2_norm),
            fmt_num(r.lambda),
            fmt_num(r.gh_bound),
            fmt_num(r.flat_bound),
            pair2(r.worst.p, r.worst.q),
        ];
        for c in r.limits.iter().skip(1) {
            rec.push(fmt_num(c.eps_hat));
            rec.push(fmt_num(c.eps_corrected));
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    finish(w)
}

/// One row per `(j, check)`.
pub fn audit_csv(report: &ConvergenceReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["j", "check", "status", "checks", "worst_slack", "tol", "detail"]).map_err(csv_err)?;
    for r in &report.rows {
        for a in &r.audit {
            let status = match a.status {
                AuditStatus::Pass => "pass",
                AuditStatus::Fail => "fail",
                AuditStatus::Skipped => "skipped",
            };
            w.write_record([
                r.j.to_string(),
                a.check.clone(),
                status.to_string(),
                a.checks.to_string(),
                a.worst_slack.map(fmt_num).unwrap_or_default(),
                fmt_num(a.tol),
                a.detail.clone(),
            ])
            .map_err(csv_err)?;
        }
    }
    finish(w)
}

pub fn torus3_csv(report: &Torus3Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "j",
        "n",
        "k",
        "samples",
        "eps_hat",
        "eps_corrected",
        "grid_err",
        "l2_norm",
        "lambda",
        "gh_bound",
        "flat_bound",
        "diameter_bound",
        "lower_bound_slack",
        "worst_pair",
    ])
    .map_err(csv_err)?;
    for r in &report.rows {
        w.write_record([
            r.j.to_string(),
            r.grid.n.to_string(),
            r.grid.k.to_string(),
            r.samples.to_string(),
            fmt_num(r.eps_hat),
            fmt_num(r.eps_corrected),
            fmt_num(r.grid_err),
            fmt_num(r.l2_norm),
            fmt_num(r.lambda),
            fmt_num(r.gh_bound),
            fmt_num(r.flat_bound),
            fmt_num(r.diameter_bound),
            r.lower_bound_slack.map(fmt_num).unwrap_or_default(),
            pair3(r.worst.p, r.worst.q),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}
