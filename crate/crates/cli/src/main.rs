//! `slc-lab`: command-line frontend for the curvature library.
//!
//! Commands: curv | bounds | solve | foliate | kp | verify. Every output
//! carries a header with the command, a hash of the loaded config, the RNG
//! seed and the library tolerance constants; identical config + seed yields
//! byte-identical output.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use slc_core::barriers::{coverage_depth, delta_lower, dist_upper};
use slc_core::error::Error as CoreError;
use slc_core::foliation::sweep;
use slc_core::graphsolve::{
    field_csv, newton_solve, perron_solve, GraphField, SolveReport, SolvedBundle,
    SolverConfig,
};
use slc_core::kpmetric::{kp_metric, SamplerConfig, SphericalDomain};
use slc_core::symcurv::{
    r_theta, round_trip_residual, sin_inequality_margin, sl_r, zeroth_coeff,
    AngleParams, SymMatrix,
};
use slc_core::tolerances::{CMP_TOL, FOOT_STEP, NEWTON_TOL, SOLVE_TOL};

#[derive(Parser)]
#[command(name = "slc-lab", version, about = "curvature lab for convex hypersurfaces in hyperbolic space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct IoArgs {
    /// JSON config file (object; unknown keys are rejected)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// RNG seed (sampling commands); recorded in every header
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Pointwise curvature quantities of one symmetric matrix
    Curv {
        #[command(flatten)]
        io: IoArgs,
        /// Matrix spec: "diag:a,b,..." or "full:row-major entries"
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        theta: Option<f64>,
        /// r: solve the angle-sum equation; sl: angle sum at --r;
        /// zeroth: zeroth-order operator coefficient at --r
        #[arg(long)]
        mode: Option<String>,
        /// Scaling parameter for modes sl and zeroth
        #[arg(long)]
        r: Option<f64>,
    },
    /// Closed-form height bounds for one (n, theta, r)
    Bounds {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
    },
    /// Constant-curvature graph solve (config-driven)
    Solve {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Continuation sweep over a list of curvature values (config-driven)
    Foliate {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Sampled infimum metric of a spherical domain (config-driven)
    Kp {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Run the built-in inequality suite
    Verify {
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurvConfig {
    matrix: Option<String>,
    theta: Option<f64>,
    mode: Option<String>,
    r: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsConfig {
    n: Option<usize>,
    theta: Option<f64>,
    r: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveConfig {
    /// fuchsian | rotsym | disk
    mode: String,
    theta: f64,
    r: f64,
    /// newton (default) | perron
    solver: Option<String>,
    /// Hypersurface dimension (fuchsian mode; default 2)
    n: Option<usize>,
    nr: Option<usize>,
    nphi: Option<usize>,
    h: Option<f64>,
    /// Interior start height
    interior: Option<f64>,
    /// Dirichlet boundary height (grid modes); defaults to `interior`
    boundary: Option<f64>,
    /// Relative cos(2*phi) modulation of the boundary height (disk mode)
    boundary_cos2: Option<f64>,
    max_iter: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FoliateConfig {
    /// fuchsian | disk
    mode: String,
    theta: f64,
    r_values: Vec<f64>,
    n: Option<usize>,
    nr: Option<usize>,
    nphi: Option<usize>,
    h: Option<f64>,
    /// Relative cos(2*phi) modulation of each leaf's boundary height
    boundary_cos2: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KpConfig {
    domain: SphericalDomain,
    points: Vec<Vec<f64>>,
    random_samples: Option<usize>,
    arc_steps: Option<usize>,
}

/// 12 significant digits for all numeric output.
fn sig(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.11e}")
    }
}

struct RunError {
    code: u8,
    message: String,
}

impl RunError {
    fn domain(message: impl Into<String>) -> Self {
        RunError { code: 2, message: message.into() }
    }
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::NonConvergence { .. } => 3,
            _ => 2,
        };
        RunError { code, message: e.to_string() }
    }
}

struct Context {
    command: &'static str,
    config_hash: String,
    seed: u64,
    format: Format,
    out: Option<PathBuf>,
}

impl Context {
    fn new(command: &'static str, io: &IoArgs, raw_config: Option<&str>) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(raw_config.unwrap_or("{}").as_bytes());
        Context {
            command,
            config_hash: format!("{:x}", hasher.finalize()),
            seed: io.seed,
            format: io.format,
            out: io.out.clone(),
        }
    }

    fn header_lines(&self) -> String {
        format!(
            "# command: {}\n# config-hash: {}\n# seed: {}\n# tolerances: cmp={CMP_TOL:e} solve={SOLVE_TOL:e} newton={NEWTON_TOL:e} foot-step={FOOT_STEP:e}\n",
            self.command, self.config_hash, self.seed
        )
    }

    fn header_json(&self) -> serde_json::Value {
        json!({
            "command": self.command,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "tolerances": {
                "cmp": CMP_TOL,
                "solve": SOLVE_TOL,
                "newton": NEWTON_TOL,
                "foot_step": FOOT_STEP,
            },
        })
    }

    fn emit_csv(&self, body: &str) -> Result<(), RunError> {
        self.write_out(&format!("{}{}", self.header_lines(), body))
    }

    fn emit_json(&self, data: serde_json::Value) -> Result<(), RunError> {
        let doc = json!({ "header": self.header_json(), "data": data });
        let mut text = serde_json::to_string_pretty(&doc)
            .map_err(|e| RunError::domain(format!("serialization failed: {e}")))?;
        text.push('\n');
        self.write_out(&text)
    }

    fn write_out(&self, text: &str) -> Result<(), RunError> {
        match &self.out {
            Some(path) => fs::write(path, text).map_err(|e| {
                RunError::domain(format!("cannot write {}: {e}", path.display()))
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn read_config(path: &Option<PathBuf>) -> Result<Option<String>, RunError> {
    match path {
        None => Ok(None),
        Some(p) => fs::read_to_string(p).map(Some).map_err(|e| {
            RunError::domain(format!("cannot read config {}: {e}", p.display()))
        }),
    }
}

fn parse_config<T: for<'de> Deserialize<'de>>(raw: &str) -> Result<T, RunError> {
    serde_json::from_str(raw)
        .map_err(|e| RunError::domain(format!("malformed config: {e}")))
}

fn parse_matrix(spec: &str) -> Result<SymMatrix, RunError> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| RunError::domain(format!("matrix spec '{spec}' lacks a 'diag:' or 'full:' prefix")))?;
    let values: Vec<f64> = rest
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| RunError::domain(format!("bad matrix entry in '{spec}': {e}")))?;
    match kind {
        "diag" => Ok(SymMatrix::diagonal(&values)?),
        "full" => {
            let n = (values.len() as f64).sqrt().round() as usize;
            if n * n != values.len() {
                return Err(RunError::domain(format!(
                    "full matrix needs a square number of entries, got {}",
                    values.len()
                )));
            }
            Ok(SymMatrix::new(n, &values)?)
        }
        other => Err(RunError::domain(format!("unknown matrix kind '{other}'"))),
    }
}

fn require<T>(v: Option<T>, field: &str) -> Result<T, RunError> {
    v.ok_or_else(|| RunError::domain(format!("missing required field `{field}`")))
}

fn run_curv(
    io: &IoArgs,
    matrix: Option<String>,
    theta: Option<f64>,
    mode: Option<String>,
    r: Option<f64>,
) -> Result<(), RunError> {
    let raw = read_config(&io.config)?;
    let cfg: CurvConfig = match &raw {
        Some(text) => parse_config(text)?,
        None => CurvConfig::default(),
    };
    let ctx = Context::new("curv", io, raw.as_deref());
    let a = parse_matrix(&require(matrix.or(cfg.matrix), "matrix")?)?;
    let theta = require(theta.or(cfg.theta), "theta")?;
    let mode = mode.or(cfg.mode).unwrap_or_else(|| "r".into());
    let r = r.or(cfg.r);
    let p = AngleParams::new(theta, a.dim())?;
    let (label, value) = match mode.as_str() {
        "r" => ("r_theta", r_theta(&a, &p)?),
        "sl" => ("angle_sum", sl_r(&a, require(r, "r")?)?),
        "zeroth" => ("zeroth_coeff", zeroth_coeff(&a, require(r, "r")?)?),
        other => return Err(RunError::domain(format!("unknown mode '{other}'"))),
    };
    match ctx.format {
        Format::Csv => ctx.emit_csv(&format!("quantity,value\n{label},{}\n", sig(value))),
        Format::Json => ctx.emit_json(json!({ "quantity": label, "value": value })),
    }
}

fn run_bounds(
    io: &IoArgs,
    n: Option<usize>,
    theta: Option<f64>,
    r: Option<f64>,
) -> Result<(), RunError> {
    let raw = read_config(&io.config)?;
    let cfg: BoundsConfig = match &raw {
        Some(text) => parse_config(text)?,
        None => BoundsConfig::default(),
    };
    let ctx = Context::new("bounds", io, raw.as_deref());
    let n = require(n.or(cfg.n), "n")?;
    let theta = require(theta.or(cfg.theta), "theta")?;
    let r = require(r.or(cfg.r), "r")?;
    let p = AngleParams::new(theta, n)?;
    let du = dist_upper(&p, r)?;
    let dl = delta_lower(&p, r)?;
    let cd = coverage_depth(&p, r)?;
    match ctx.format {
        Format::Csv => ctx.emit_csv(&format!(
            "theta,r,n,dist_upper,delta_lower,coverage_depth\n{},{},{n},{},{},{}\n",
            sig(theta),
            sig(r),
            sig(du),
            sig(dl),
            sig(cd)
        )),
        Format::Json => ctx.emit_json(json!({
            "theta": theta,
            "r": r,
            "n": n,
            "dist_upper": du,
            "delta_lower": dl,
            "coverage_depth": cd,
        })),
    }
}

fn build_field(cfg: &SolveConfig) -> Result<GraphField, RunError> {
    match cfg.mode.as_str() {
        "fuchsian" => {
            let n = cfg.n.unwrap_or(2);
            Ok(GraphField::fuchsian(n, require(cfg.interior, "interior")?)?)
        }
        "rotsym" => {
            let nr = require(cfg.nr, "nr")?;
            let h = require(cfg.h, "h")?;
            let interior = require(cfg.interior, "interior")?;
            let boundary = cfg.boundary.unwrap_or(interior);
            let mut u = vec![interior; nr];
            u[nr - 1] = boundary;
            Ok(GraphField::rot_sym(h, u)?)
        }
        "disk" => {
            let nr = require(cfg.nr, "nr")?;
            let nphi = require(cfg.nphi, "nphi")?;
            let h = require(cfg.h, "h")?;
            let interior = require(cfg.interior, "interior")?;
            let base = cfg.boundary.unwrap_or(interior);
            let amp = cfg.boundary_cos2.unwrap_or(0.0);
            Ok(GraphField::disk_with_boundary(nr, nphi, h, interior, |phi| {
                base * (1.0 + amp * (2.0 * phi).cos())
            })?)
        }
        other => Err(RunError::domain(format!("unknown solve mode '{other}'"))),
    }
}

fn field_csv_12(g: &GraphField, p: &AngleParams) -> Result<String, RunError> {
    // re-render the library CSV at the CLI's 12-significant-digit format
    let raw = field_csv(g, p)?;
    let mut out = String::from("rho,phi,u,r\n");
    for line in raw.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let row: Vec<String> = cells
            .iter()
            .map(|c| sig(c.parse::<f64>().unwrap_or(f64::NAN)))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

fn run_solve(io: &IoArgs) -> Result<(), RunError> {
    let raw = read_config(&io.config)?
        .ok_or_else(|| RunError::domain("solve requires --config"))?;
    let cfg: SolveConfig = parse_config(&raw)?;
    let ctx = Context::new("solve", io, Some(&raw));
    let g0 = build_field(&cfg)?;
    let mut solver = SolverConfig::new(cfg.theta, cfg.r);
    if let Some(mi) = cfg.max_iter {
        solver.max_iter = mi;
    }
    let (solved, report): (GraphField, SolveReport) =
        match cfg.solver.as_deref().unwrap_or("newton") {
            "newton" => newton_solve(&g0, &solver)?,
            "perron" => perron_solve(&g0, &solver)?,
            other => {
                return Err(RunError::domain(format!("unknown solver '{other}'")))
            }
        };
    let p = AngleParams::new(cfg.theta, solved.dim_n())?;
    match ctx.format {
        Format::Csv => ctx.emit_csv(&field_csv_12(&solved, &p)?),
        Format::Json => {
            let bundle = SolvedBundle::new(&solved, &solver, &report);
            let value = serde_json::to_value(&bundle)
                .map_err(|e| RunError::domain(format!("serialization failed: {e}")))?;
            ctx.emit_json(value)
        }
    }
}

fn run_foliate(io: &IoArgs) -> Result<(), RunError> {
    let raw = read_config(&io.config)?
        .ok_or_else(|| RunError::domain("foliate requires --config"))?;
    let cfg: FoliateConfig = parse_config(&raw)?;
    let ctx = Context::new("foliate", io, Some(&raw));
    let p = AngleParams::new(cfg.theta, cfg.n.unwrap_or(2))?;
    if cfg.r_values.is_empty() {
        return Err(RunError::domain("missing required field `r_values`"));
    }
    let result = match cfg.mode.as_str() {
        "fuchsian" => {
            let template = GraphField::fuchsian(cfg.n.unwrap_or(2), 0.5)?;
            sweep(&template, cfg.theta, &cfg.r_values, None::<fn(f64, f64) -> f64>)?
        }
        "disk" => {
            let nr = require(cfg.nr, "nr")?;
            let nphi = require(cfg.nphi, "nphi")?;
            let h = require(cfg.h, "h")?;
            let amp = cfg.boundary_cos2.unwrap_or(0.0);
            let threshold = p.threshold();
            let boundary = move |r: f64, phi: f64| {
                (threshold / r).atanh() * (1.0 + amp * (2.0 * phi).cos())
            };
            let first = (threshold / cfg.r_values[0]).atanh();
            let template = GraphField::disk_with_boundary(nr, nphi, h, first, |phi| {
                boundary(cfg.r_values[0], phi)
            })?;
            sweep(&template, cfg.theta, &cfg.r_values, Some(boundary))?
        }
        other => {
            return Err(RunError::domain(format!("unknown foliate mode '{other}'")))
        }
    };
    if result.truncated {
        return Err(RunError {
            code: 3,
            message: format!(
                "sweep truncated after {} leaves: {}",
                result.records.len(),
                result.failure.unwrap_or_default()
            ),
        });
    }
    match ctx.format {
        Format::Csv => {
            let mut body = String::from(
                "r,theta,max_height,min_height,dist_upper,coverage_depth,converged\n",
            );
            for rec in &result.records {
                body.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    sig(rec.r),
                    sig(cfg.theta),
                    sig(rec.max_height),
                    sig(rec.min_height),
                    sig(rec.dist_upper),
                    rec.coverage_depth.map(sig).unwrap_or_default(),
                    rec.report.converged
                ));
            }
            ctx.emit_csv(&body)
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = result
                .records
                .iter()
                .map(|rec| {
                    json!({
                        "r": rec.r,
                        "theta": cfg.theta,
                        "max_height": rec.max_height,
                        "min_height": rec.min_height,
                        "dist_upper": rec.dist_upper,
                        "coverage_depth": rec.coverage_depth,
                        "converged": rec.report.converged,
                        "warm_iterations": rec.warm_iterations,
                    })
                })
                .collect();
            ctx.emit_json(json!(rows))
        }
    }
}

fn run_kp(io: &IoArgs) -> Result<(), RunError> {
    let raw = read_config(&io.config)?
        .ok_or_else(|| RunError::domain("kp requires --config"))?;
    let cfg: KpConfig = parse_config(&raw)?;
    let ctx = Context::new("kp", io, Some(&raw));
    let mut sampler = SamplerConfig { seed: io.seed, ..SamplerConfig::default() };
    if let Some(rs) = cfg.random_samples {
        sampler.random_samples = rs;
    }
    if let Some(steps) = cfg.arc_steps {
        sampler.arc_steps = steps;
    }
    let n = cfg.domain.sphere_dim();
    let mut rows_csv = String::new();
    let mut rows_json = Vec::new();
    // fixed column layout: point, tensor (row-major), factors, minimizing ball
    let mut head: Vec<String> = (1..=n).map(|k| format!("q{k}")).collect();
    for i in 1..=n {
        for j in 1..=n {
            head.push(format!("g{i}{j}"));
        }
    }
    head.extend([
        "chart_factor".into(),
        "round_factor".into(),
        "round_factor_lo".into(),
        "round_factor_hi".into(),
    ]);
    head.extend((1..=n + 1).map(|k| format!("ball_c{k}")));
    head.push("ball_alpha".into());
    for q in &cfg.points {
        let est = kp_metric(&cfg.domain, q, &sampler)?;
        let mut cells: Vec<String> = q.iter().map(|v| sig(*v)).collect();
        cells.extend(est.tensor.iter().map(|v| sig(*v)));
        cells.push(sig(est.chart_factor));
        cells.push(sig(est.round_factor));
        cells.push(sig(est.round_factor_interval.0));
        cells.push(sig(est.round_factor_interval.1));
        cells.extend(est.ball.center().iter().map(|v| sig(*v)));
        cells.push(sig(est.ball.alpha()));
        rows_csv.push_str(&cells.join(","));
        rows_csv.push('\n');
        rows_json.push(json!({
            "q": q,
            "tensor": est.tensor,
            "chart_factor": est.chart_factor,
            "round_factor": est.round_factor,
            "round_factor_interval": [
                est.round_factor_interval.0,
                est.round_factor_interval.1,
            ],
            "ball_center": est.ball.center(),
            "ball_alpha": est.ball.alpha(),
            "samples_used": est.samples_used,
        }));
    }
    match ctx.format {
        Format::Csv => ctx.emit_csv(&format!("{}\n{rows_csv}", head.join(","))),
        Format::Json => ctx.emit_json(json!(rows_json)),
    }
}

fn run_verify(io: &IoArgs) -> Result<(), RunError> {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    let raw = read_config(&io.config)?;
    let ctx = Context::new("verify", io, raw.as_deref());
    let mut rng = ChaCha8Rng::seed_from_u64(io.seed);
    let mut results: Vec<(String, bool)> = Vec::new();

    // curvature defining equation on random matrices
    let mut ok = true;
    for _ in 0..200 {
        let n = rng.gen_range(2..=4usize);
        let mut e = vec![0.0; n * n];
        let b: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += b[i * n + k] * b[j * n + k];
                }
                e[i * n + j] = s + if i == j { 0.05 } else { 0.0 };
            }
        }
        let a = SymMatrix::new(n, &e).unwrap();
        let theta = rng.gen_range(0.2..n as f64 * FRAC_PI_2 - 0.2);
        let p = AngleParams::new(theta, n).unwrap();
        if round_trip_residual(&a, &p).unwrap() > 1e-10 {
            ok = false;
        }
    }
    results.push(("curvature round trip".into(), ok));

    // sine comparison margins
    let mut ok = true;
    for n in 1..8usize {
        for m in (n + 1)..=8usize {
            for k in 1..=100 {
                let t = FRAC_PI_2 * k as f64 / 100.0;
                if sin_inequality_margin(n, m, t).unwrap() < -1e-12 {
                    ok = false;
                }
            }
        }
    }
    results.push(("sine comparison margins".into(), ok));

    // bound ordering: depth <= lower bound <= upper bound
    let mut ok = true;
    for kt in 1..=15 {
        let theta = FRAC_PI_2 * (1.0 + 0.06 * kt as f64);
        let p = AngleParams::new(theta, 2).unwrap();
        for kr in 1..=15 {
            let r = p.threshold() * (1.0 + 0.3 * kr as f64);
            let cd = coverage_depth(&p, r).unwrap();
            let dl = delta_lower(&p, r).unwrap();
            let du = dist_upper(&p, r).unwrap();
            if cd > dl + 1e-10 || dl > du + 1e-10 {
                ok = false;
            }
        }
    }
    results.push(("bound ordering".into(), ok));

    // constant-mode solver against the closed form
    let mut ok = true;
    for _ in 0..20 {
        let theta = rng.gen_range(FRAC_PI_2 * 1.05..FRAC_PI_2 * 1.95);
        let p = AngleParams::new(theta, 2).unwrap();
        let r = p.threshold() * rng.gen_range(1.1..20.0);
        let g0 = GraphField::fuchsian(2, rng.gen_range(0.1..1.5)).unwrap();
        match newton_solve(&g0, &SolverConfig::new(theta, r)) {
            Ok((solved, _)) => {
                let want = (p.threshold() / r).atanh();
                if (solved.heights()[0] - want).abs() > 1e-9 {
                    ok = false;
                }
            }
            Err(_) => ok = false,
        }
    }
    results.push(("constant-mode solves".into(), ok));

    // sampled infimum metric on the hemisphere = disk metric
    let mut ok = true;
    let hemi = SphericalDomain::Ball(
        slc_core::kpmetric::RoundBall::new(vec![0.0, 0.0, 1.0], FRAC_PI_2).unwrap(),
    );
    let sampler = SamplerConfig { seed: io.seed, ..SamplerConfig::default() };
    for _ in 0..10 {
        let rr: f64 = rng.gen_range(0.0..0.8);
        let ang: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let q = [rr * ang.cos(), rr * ang.sin()];
        let est = kp_metric(&hemi, &q, &sampler).unwrap();
        let want = 4.0 / ((1.0 - rr * rr) * (1.0 - rr * rr));
        if (est.chart_factor - want).abs() > 1e-6 * want {
            ok = false;
        }
    }
    results.push(("infimum metric on the hemisphere".into(), ok));

    let failures = results.iter().filter(|(_, ok)| !ok).count();
    match ctx.format {
        Format::Csv => {
            let mut body = String::from("check,status\n");
            for (name, ok) in &results {
                body.push_str(&format!(
                    "{name},{}\n",
                    if *ok { "ok" } else { "FAIL" }
                ));
            }
            body.push_str(&format!("failures,{failures}\n"));
            ctx.emit_csv(&body)?;
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = results
                .iter()
                .map(|(name, ok)| json!({ "check": name, "ok": ok }))
                .collect();
            ctx.emit_json(json!({ "checks": rows, "failures": failures }))?;
        }
    }
    if failures > 0 {
        return Err(RunError::domain(format!("{failures} check(s) failed")));
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Curv { io, matrix, theta, mode, r } => {
            run_curv(&io, matrix, theta, mode, r)
        }
        Command::Bounds { io, n, theta, r } => run_bounds(&io, n, theta, r),
        Command::Solve { io } => run_solve(&io),
        Command::Foliate { io } => run_foliate(&io),
        Command::Kp { io } => run_kp(&io),
        Command::Verify { io } => run_verify(&io),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
