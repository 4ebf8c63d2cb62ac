use std::f64::consts::PI;
use std::process::{Command, Output};

use warpconv_core::lab::ConvergenceReport;
use warpconv_core::torus3d::Torus3Report;

fn warpconv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warpconv")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn ret_example() {
    let o = warpconv(&["ret", "--R", "5", "--ds", "3.14159", "--dsigma", "3.14159"]);
    assert_eq!(code(&o), 0);
    let d: f64 = stdout(&o).trim().parse().unwrap();
    assert!((d - 6.2197).abs() < 1e-3, "{d}");
    let o = warpconv(&["ret", "--R", "5", "--p", "-1,0", "--q", "1,0"]);
    assert_eq!(stdout(&o).trim(), "2");
    assert_eq!(code(&warpconv(&["ret", "--R", "0.5", "--ds", "1", "--dsigma", "1"])), 2);
    assert_eq!(code(&warpconv(&["ret", "--R", "5", "--ds", "1"])), 2);
}

#[test]
fn ret_ball_points() {
    let o = warpconv(&["ret", "--R", "2", "--p", "0,3", "--ball", "0.5,1", "--samples", "16"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("radius,s,theta"));
    assert_eq!(lines.count(), 2 * 17);
}

#[test]
fn distance_example() {
    for method in ["clairaut", "grid", "closed-form"] {
        let o = warpconv(&[
            "distance",
            "--profile",
            r#"{"family":"constant","params":{"c":1}}"#,
            "--p",
            "0,0",
            "--q",
            "0,3.14159",
            "--method",
            method,
        ]);
        assert_eq!(code(&o), 0, "{method}: {}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        let d = v["distance"].as_f64().unwrap();
        let err = v["error_estimate"].as_f64().unwrap();
        assert!((d - PI).abs() <= err + 1e-5, "{method}: {d} ± {err}");
        assert!(v["path"]["vertices"].as_array().unwrap().len() >= 2);
    }
}

#[test]
fn exit_codes() {
    let bad_schema = warpconv(&[
        "distance",
        "--profile",
        r#"{"family":"constant","params":{"c":1,"x":2}}"#,
        "--p",
        "0,0",
        "--q",
        "0,1",
    ]);
    assert_eq!(code(&bad_schema), 2);
    let unknown_method = warpconv(&[
        "distance",
        "--profile",
        r#"{"family":"constant","params":{"c":1}}"#,
        "--p",
        "0,0",
        "--q",
        "0,1",
        "--method",
        "fmm",
    ]);
    assert_eq!(code(&unknown_method), 2);
    let too_big = warpconv(&[
        "distance",
        "--profile",
        r#"{"family":"constant","params":{"c":1}}"#,
        "--p",
        "0,0",
        "--q",
        "0,1",
        "--method",
        "grid",
        "--grid",
        "8192",
    ]);
    assert_eq!(code(&too_big), 3);
    assert_eq!(code(&warpconv(&["converge", "--family", "no-such-family"])), 2);
    assert_eq!(code(&warpconv(&["frobnicate"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_warpconv"))
        .args(["ret", "--R", "2", "--ds", "1", "--dsigma", "1"])
        .env("WARPCONV_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn converge_example_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let o = warpconv(&[
        "converge",
        "--family",
        "single-ridge",
        "--j",
        "4,8,16,32",
        "--sources",
        "3",
        "--targets",
        "4",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = stdout(&o);
    let mut rdr = csv::Reader::from_reader(csv.as_bytes());
    let head = rdr.headers().unwrap().clone();
    for col in ["j", "eps_hat", "grid_err", "l2_norm", "lambda", "gh_bound", "flat_bound", "worst_pair"] {
        assert!(head.iter().any(|h| h == col), "missing column {col}");
    }
    let gh_col = head.iter().position(|h| h == "gh_bound").unwrap();
    let gh: Vec<f64> = rdr.records().map(|r| r.unwrap()[gh_col].parse().unwrap()).collect();
    assert_eq!(gh.len(), 4);
    assert!(gh.windows(2).all(|w| w[1] < w[0]), "{gh:?}");

    let text = std::fs::read_to_string(&json).unwrap();
    let report: ConvergenceReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.rows.len(), 4);
    assert_eq!(warpconv_core::io::to_json(&report).unwrap(), text);

    let svg = dir.path().join("c.svg");
    let o = warpconv(&["plot", "convergence", "--report", json.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn scenario_files() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.json");
    let csv_a = dir.path().join("a.csv");
    std::fs::write(
        &scenario,
        format!(
            r#"{{"family": "cinched-torus", "h0": 0.3, "js": [4], "grid": {{"n_r": 64, "n_theta": 64, "k": 2}},
                "plan": {{"sources": 2, "targets": 3, "seed": 5, "max_levels": 1}}, "csv": {:?}}}"#,
            csv_a.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = warpconv(&["converge", "--scenario", scenario.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv_a).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("4,64,64,2,"));

    // flags override the scenario
    let csv_b = dir.path().join("b.csv");
    let o =
        warpconv(&["converge", "--scenario", scenario.to_str().unwrap(), "--j", "5", "--csv", csv_b.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(std::fs::read_to_string(&csv_b).unwrap().lines().nth(1).unwrap().starts_with("5,"));

    std::fs::write(&scenario, r#"{"family": "cinched-torus", "jay": [4]}"#).unwrap();
    assert_eq!(code(&warpconv(&["converge", "--scenario", scenario.to_str().unwrap()])), 2);
    std::fs::write(&scenario, "not json").unwrap();
    assert_eq!(code(&warpconv(&["audit", "--scenario", scenario.to_str().unwrap()])), 2);
}

#[test]
fn audit_reports_every_check() {
    let o = warpconv(&["audit", "--family", "single-ridge", "--j", "8", "--sources", "3", "--targets", "4"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "j,check,status,checks,worst_slack,tol,detail");
    assert_eq!(text.lines().count(), 1 + 7);
    assert!(!text.contains(",fail,"));
}

#[test]
fn audit_exit_code_on_failure() {
    let o = warpconv(&["audit", "--family", "cinched-torus", "--j", "4"]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("theta-estimate,fail"));
}

#[test]
fn torus3_small_run() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("t.json");
    let o = warpconv(&[
        "torus3",
        "--j",
        "2",
        "--n",
        "32",
        "--k",
        "1",
        "--sources",
        "2",
        "--targets",
        "3",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("j,n,k,samples,eps_hat"));
    assert!(text.lines().nth(1).unwrap().starts_with("2,32,1,"));
    let report: Torus3Report = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report.dimension, 3);
    assert_eq!(code(&warpconv(&["torus3", "--n", "16"])), 2);
    assert_eq!(code(&warpconv(&["torus3", "--n", "512"])), 3);
    let o =
        warpconv(&["torus3", "--constant", "--j", "1", "--n", "32", "--k", "1", "--sources", "1", "--targets", "2"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn plots_are_self_contained_svg() {
    let runs: [&[&str]; 3] = [
        &["plot", "profile", "--profile", r#"{"family":"ridge-bump","params":{"h0":2,"center":0,"half_width":0.3}}"#],
        &["plot", "ret-balls", "--R", "2", "--radii", "0.5,1"],
        &[
            "plot",
            "geodesics",
            "--profile",
            r#"{"family":"cinch-bump","params":{"h0":0.5,"center":0,"half_width":0.25}}"#,
            "--p",
            "-1,0.5",
            "--q",
            "1,4",
        ],
    ];
    for args in runs {
        let o = warpconv(args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let svg = stdout(&o);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("<script") && !svg.contains("href"));
    }
    let o = warpconv(&[
        "plot",
        "geodesics",
        "--profile",
        r#"{"family":"constant","params":{"c":1}}"#,
        "--p",
        "0,0",
        "--p",
        "1,1",
        "--q",
        "0,1",
    ]);
    assert_eq!(code(&o), 2);
}
