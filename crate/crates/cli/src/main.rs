use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use warpconv_core::geodesy::{GridSpec, MethodOptions, MethodRegistry};
use warpconv_core::io::{self, fmt_num, ConvergeScenario, Torus3Scenario};
use warpconv_core::lab::{
    run_family_experiment, AuditConfig, AuditStatus, BaseShape, ConvergenceReport, ExperimentConfig, FamilyRegistry,
    PlanSpec,
};
use warpconv_core::profile::WarpingProfile;
use warpconv_core::ret::{ret_ball_boundary, ret_distance, ret_value, RETParams};
use warpconv_core::space::{FiberSpace, SurfacePoint, WarpedSpace};
use warpconv_core::torus3d::{run_torus3_experiment, Grid3Spec, MovingBump2D, Plan3Spec, Torus3Config, Torus3Report};
use warpconv_core::{Result, WarpError};

#[derive(Parser)]
#[command(name = "warpconv", version, about = "Distances and convergence experiments on warped product spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two points; prints the result as JSON.
    Distance(DistanceArgs),
    /// Distance, or ball boundaries, of the R-stretched Euclidean taxi metric.
    Ret(RetArgs),
    /// Discrepancy and bounds for a sequence family; writes CSV and JSON.
    Converge(ConvergeArgs),
    /// Checks the quantitative bounds on a sequence family. Exits 1 on any failure.
    Audit(ConvergeArgs),
    /// Convergence experiment on the warped 3-torus.
    Torus3(Torus3Args),
    /// SVG figures.
    #[command(subcommand)]
    Plot(PlotCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Interval,
    Circle,
}

impl From<Shape> for BaseShape {
    fn from(s: Shape) -> Self {
        match s {
            Shape::Interval => BaseShape::Interval,
            Shape::Circle => BaseShape::Circle,
        }
    }
}

fn parse_point(s: &str) -> std::result::Result<SurfacePoint, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected r,θ but got {s:?}"))?;
    let r = a.trim().parse::<f64>().map_err(|e| format!("{a:?}: {e}"))?;
    let t = b.trim().parse::<f64>().map_err(|e| format!("{b:?}: {e}"))?;
    Ok(SurfacePoint::new(r, t))
}

#[derive(Args)]
struct DistanceArgs {
    /// Profile JSON, or @path to a file holding it.
    #[arg(long)]
    profile: String,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    p: SurfacePoint,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    q: SurfacePoint,
    /// grid, clairaut or closed-form.
    #[arg(long, default_value = "clairaut")]
    method: String,
    #[arg(long, value_enum, default_value = "interval")]
    base: Shape,
    /// Grid nodes per axis.
    #[arg(long, default_value_t = 256)]
    grid: usize,
    /// Neighborhood radius of the grid stencil.
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args)]
struct RetArgs {
    #[arg(long = "R")]
    r: f64,
    /// Base separation.
    #[arg(long)]
    ds: Option<f64>,
    /// Fiber separation.
    #[arg(long)]
    dsigma: Option<f64>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    p: Option<SurfacePoint>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    q: Option<SurfacePoint>,
    /// Radii of balls about --p; prints their boundaries as CSV.
    #[arg(long, value_delimiter = ',')]
    ball: Vec<f64>,
    #[arg(long, default_value_t = 256)]
    samples: usize,
}

#[derive(Args)]
struct ConvergeArgs {
    /// Scenario JSON; flags given on the command line take precedence.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    h0: Option<f64>,
    /// Sequence indices, comma separated.
    #[arg(long = "j", value_delimiter = ',')]
    js: Vec<usize>,
    #[arg(long, value_enum)]
    shape: Option<Shape>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sources: Option<usize>,
    #[arg(long)]
    targets: Option<usize>,
    /// Overrides the family grid schedule with an n×n grid.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, requires = "grid")]
    k: Option<u32>,
    /// CSV output path; standard output when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct Torus3Args {
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    h0: Option<f64>,
    /// Use the constant sequence f ≡ c.
    #[arg(long)]
    constant: bool,
    #[arg(long = "j", value_delimiter = ',')]
    js: Vec<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sources: Option<usize>,
    #[arg(long)]
    targets: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PlotCommand {
    /// Warping functions; --profile may repeat.
    Profile {
        #[arg(long, required = true)]
        profile: Vec<String>,
        #[arg(long, value_enum, default_value = "interval")]
        base: Shape,
        #[arg(long, default_value_t = 512)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discrepancy against j from a JSON report of converge or torus3.
    Convergence {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Balls of the R-ET metric.
    RetBalls {
        #[arg(long = "R")]
        r: f64,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0,3.141592653589793")]
        center: SurfacePoint,
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimizing paths between pairs; --p and --q repeat together.
    Geodesics {
        #[arg(long)]
        profile: String,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true, required = true)]
        p: Vec<SurfacePoint>,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true, required = true)]
        q: Vec<SurfacePoint>,
        #[arg(long, default_value = "clairaut")]
        method: String,
        #[arg(long, value_enum, default_value = "interval")]
        base: Shape,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_profile(arg: &str) -> Result<WarpingProfile> {
    match arg.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| WarpError::InvalidInput(format!("cannot read {path}: {e}")))?;
            WarpingProfile::from_json(&text)
        }
        None => WarpingProfile::from_json(arg),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| WarpError::InvalidInput(format!("cannot write {}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn registry(grid: usize, k: u32, tol: f64) -> Result<MethodRegistry> {
    Ok(MethodRegistry::with_defaults(MethodOptions { grid: GridSpec::square(grid, k)?, tol }))
}

fn distance(a: DistanceArgs) -> Result<ExitCode> {
    let profile = read_profile(&a.profile)?;
    let space = WarpedSpace::new(BaseShape::from(a.base).base(), FiberSpace::standard(), profile)?;
    let reg = registry(a.grid, a.k, a.tol)?;
    let g = reg.get(&a.method)?.distance(&space, a.p, a.q)?;
    print!("{}", io::to_json(&g)?);
    Ok(ExitCode::SUCCESS)
}

fn ret(a: RetArgs) -> Result<ExitCode> {
    let params = RETParams::standard_interval(a.r)?;
    if !a.ball.is_empty() {
        let center = a.p.ok_or_else(|| WarpError::InvalidInput("--ball needs the center as --p".into()))?;
        let mut out = String::from("radius,s,theta\n");
        for &radius in &a.ball {
            let curve = ret_ball_boundary(&params, center, radius, a.samples)?;
            for v in &curve.vertices {
                out.push_str(&format!("{},{},{}\n", fmt_num(radius), fmt_num(v.r), fmt_num(v.theta)));
            }
        }
        print!("{out}");
        return Ok(ExitCode::SUCCESS);
    }
    let d = match (a.ds, a.dsigma, a.p, a.q) {
        (Some(ds), Some(dsig), None, None) => {
            if !(ds >= 0.0 && dsig >= 0.0 && ds.is_finite() && dsig.is_finite()) {
                return Err(WarpError::InvalidInput(format!(
                    "separations must be finite and nonnegative: {ds}, {dsig}"
                )));
            }
            ret_value(a.r, ds, dsig)
        }
        (None, None, Some(p), Some(q)) => ret_distance(&params, p, q)?,
        _ => return Err(WarpError::InvalidInput("give either --ds and --dsigma, or --p and --q".into())),
    };
    println!("{}", fmt_num(d));
    Ok(ExitCode::SUCCESS)
}

struct Experiment {
    report: ConvergenceReport,
    csv: Option<PathBuf>,
    json: Option<PathBuf>,
}

fn run_converge(a: ConvergeArgs, audit: bool) -> Result<Experiment> {
    let sc = match &a.scenario {
        Some(p) => Some(io::read_json::<ConvergeScenario>(p)?),
        None => None,
    };
    let sc_ref = sc.as_ref();
    let name = a
        .family
        .clone()
        .or_else(|| sc_ref.map(|s| s.family.clone()))
        .ok_or_else(|| WarpError::InvalidInput("--family or a scenario is required".into()))?;
    let shape = a.shape.map(BaseShape::from).or_else(|| sc_ref.and_then(|s| s.shape)).unwrap_or(BaseShape::Interval);
    let family = FamilyRegistry::new().build(&name, a.h0.or_else(|| sc_ref.and_then(|s| s.h0)), shape)?;

    let mut cfg = ExperimentConfig::for_family(family.as_ref());
    if let Some(js) = sc_ref.and_then(|s| s.js.clone()) {
        cfg.js = js;
    }
    if !a.js.is_empty() {
        cfg.js = a.js.clone();
    }
    cfg.grid = sc_ref.and_then(|s| s.grid);
    if let Some(n) = a.grid {
        cfg.grid = Some(GridSpec::square(n, a.k.unwrap_or(2))?);
    }
    let mut plan: PlanSpec = sc_ref.and_then(|s| s.plan).unwrap_or_default();
    plan.seed = a.seed.unwrap_or(plan.seed);
    plan.sources = a.sources.unwrap_or(plan.sources);
    plan.targets = a.targets.unwrap_or(plan.targets);
    cfg.plan = plan;
    if audit {
        cfg.audit = Some(sc_ref.and_then(|s| s.audit.clone()).unwrap_or_else(AuditConfig::default));
    }
    let report = run_family_experiment(family.as_ref(), &cfg)?;
    Ok(Experiment {
        report,
        csv: a.csv.or_else(|| sc_ref.and_then(|s| s.csv.clone())),
        json: a.json.or_else(|| sc_ref.and_then(|s| s.json.clone())),
    })
}

fn converge(a: ConvergeArgs) -> Result<ExitCode> {
    let e = run_converge(a, false)?;
    let csv = io::convergence_csv(&e.report)?;
    let json = io::to_json(&e.report)?;
    write_out(e.csv.as_deref(), &csv)?;
    if let Some(p) = &e.json {
        write_out(Some(p), &json)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn audit(a: ConvergeArgs) -> Result<ExitCode> {
    let e = run_converge(a, true)?;
    let csv = io::audit_csv(&e.report)?;
    let json = io::to_json(&e.report)?;
    write_out(e.csv.as_deref(), &csv)?;
    if let Some(p) = &e.json {
        write_out(Some(p), &json)?;
    }
    let failed = e.report.rows.iter().flat_map(|r| &r.audit).filter(|a| a.status == AuditStatus::Fail).count();
    if failed > 0 {
        eprintln!("{failed} audit check(s) failed");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn torus3(a: Torus3Args) -> Result<ExitCode> {
    let sc = match &a.scenario {
        Some(p) => Some(io::read_json::<Torus3Scenario>(p)?),
        None => None,
    };
    let sc_ref = sc.as_ref();
    let family = match (sc_ref.map(|s| s.family), a.constant) {
        (_, true) => MovingBump2D::Constant { c: a.c.unwrap_or(1.0) },
        (Some(f), false) if a.c.is_none() && a.h0.is_none() => f,
        (Some(MovingBump2D::MovingBump2d { c, h0 }), false) => {
            MovingBump2D::MovingBump2d { c: a.c.unwrap_or(c), h0: a.h0.unwrap_or(h0) }
        }
        (Some(MovingBump2D::Constant { c }), false) => MovingBump2D::Constant { c: a.c.unwrap_or(c) },
        (None, false) => MovingBump2D::MovingBump2d { c: a.c.unwrap_or(1.0), h0: a.h0.unwrap_or(2.0) },
    };
    let mut cfg = Torus3Config::default();
    if let Some(js) = sc_ref.and_then(|s| s.js.clone()) {
        cfg.js = js;
    }
    if !a.js.is_empty() {
        cfg.js = a.js;
    }
    let grid = sc_ref.and_then(|s| s.grid).unwrap_or(cfg.grid);
    cfg.grid = Grid3Spec { n: a.n.unwrap_or(grid.n), k: a.k.unwrap_or(grid.k) };
    let mut plan: Plan3Spec = sc_ref.and_then(|s| s.plan).unwrap_or_default();
    plan.seed = a.seed.unwrap_or(plan.seed);
    plan.sources = a.sources.unwrap_or(plan.sources);
    plan.targets = a.targets.unwrap_or(plan.targets);
    cfg.plan = plan;
    let report = run_torus3_experiment(family, &cfg)?;
    let csv = io::torus3_csv(&report)?;
    let json = io::to_json(&report)?;
    write_out(a.csv.or_else(|| sc_ref.and_then(|s| s.csv.clone())).as_deref(), &csv)?;
    if let Some(p) = a.json.or_else(|| sc_ref.and_then(|s| s.json.clone())) {
        write_out(Some(&p), &json)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn plot(cmd: PlotCommand) -> Result<ExitCode> {
    let (svg, out) = match cmd {
        PlotCommand::Profile { profile, base, samples, out } => {
            let mut profiles = Vec::with_capacity(profile.len());
            for (i, p) in profile.iter().enumerate() {
                let wp = read_profile(p)?;
                let label = match p.strip_prefix('@') {
                    Some(path) => path.to_string(),
                    None => format!("profile {}", i + 1),
                };
                profiles.push((label, wp));
            }
            (io::profile_figure(&profiles, &BaseShape::from(base).base(), samples)?, out)
        }
        PlotCommand::Convergence { report, out } => {
            let text = std::fs::read_to_string(&report)
                .map_err(|e| WarpError::InvalidInput(format!("cannot read {}: {e}", report.display())))?;
            let svg = match io::from_json::<ConvergenceReport>(&text) {
                Ok(r) => io::convergence_figure(&r)?,
                Err(first) => match io::from_json::<Torus3Report>(&text) {
                    Ok(r) => io::torus3_figure(&r)?,
                    Err(_) => return Err(first),
                },
            };
            (svg, out)
        }
        PlotCommand::RetBalls { r, center, radii, samples, out } => {
            let params = RETParams::standard_interval(r)?;
            (io::ret_balls_figure(&params, center, &radii, samples)?, out)
        }
        PlotCommand::Geodesics { profile, p, q, method, base, grid, k, out } => {
            if p.len() != q.len() {
                return Err(WarpError::InvalidInput(format!("{} --p values but {} --q values", p.len(), q.len())));
            }
            let space =
                WarpedSpace::new(BaseShape::from(base).base(), FiberSpace::standard(), read_profile(&profile)?)?;
            let reg = registry(grid, k, 1e-8)?;
            let m = reg.get(&method)?;
            let mut paths = Vec::with_capacity(p.len());
            for (a, b) in p.iter().zip(&q) {
                let g = m.distance(&space, *a, *b)?;
                paths.push((format!("d = {}", fmt_num((g.distance * 1e4).round() / 1e4)), g.path));
            }
            (io::geodesic_figure(&space, &paths)?, out)
        }
    };
    write_out(out.as_deref(), &svg)?;
    Ok(ExitCode::SUCCESS)
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("WARPCONV_THREADS") else {
        return Ok(());
    };
    let n: usize =
        v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
            WarpError::InvalidInput(format!("WARPCONV_THREADS must be a positive integer, got {v:?}"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| WarpError::InvalidInput(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<ExitCode> {
    init_threads()?;
    match cli.command {
        Command::Distance(a) => distance(a),
        Command::Ret(a) => ret(a),
        Command::Converge(a) => converge(a),
        Command::Audit(a) => audit(a),
        Command::Torus3(a) => torus3(a),
        Command::Plot(c) => plot(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical_guard() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
