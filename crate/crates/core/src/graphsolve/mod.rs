//! Discretized constant-curvature graphs: pointwise curvature fields, the
//! curvature linearization, a damped Newton solver and a monotone
//! Perron-style solver, plus barrier diagnostics against the model-surface
//! bounds.

mod newton;
mod operator;
mod perron;
mod stencil;

pub use operator::{GridSpec, LinOp};

use serde::{Deserialize, Serialize};

use crate::barriers;
use crate::error::{Error, Result};
use crate::symcurv::AngleParams;
use crate::tolerances::NEWTON_TOL;

/// Height field of a graph over its base, in one of three geometries.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum GraphField {
    /// Single constant height over a totally geodesic Hⁿ (flat cross-section
    /// quotient: one degree of freedom).
    FuchsianConstant { n: usize, u: f64 },
    /// Rotationally symmetric radial profile over a geodesic disk in H²;
    /// offset nodes ρᵢ = (i+1/2)h, last node Dirichlet.
    RotSymProfile { h: f64, u: Vec<f64> },
    /// Full polar grid over a geodesic disk in H² (n = 2); node (i,j) at
    /// (ρᵢ, φⱼ) with index i·nphi + j, outer ring Dirichlet.
    Disk2D { h: f64, nphi: usize, u: Vec<f64> },
}

impl GraphField {
    pub fn fuchsian(n: usize, u: f64) -> Result<Self> {
        if !(2..=8).contains(&n) {
            return Err(Error::Config(format!("dimension {n} outside [2,8]")));
        }
        if !(u > 0.0) {
            return Err(Error::Config(format!("height {u} must be > 0")));
        }
        Ok(GraphField::FuchsianConstant { n, u })
    }

    pub fn rot_sym(h: f64, u: Vec<f64>) -> Result<Self> {
        let spec = GridSpec { nr: u.len(), nphi: 1, h };
        spec.validate()?;
        Self::check_heights(&u)?;
        Ok(GraphField::RotSymProfile { h, u })
    }

    pub fn rot_sym_constant(nr: usize, h: f64, d: f64) -> Result<Self> {
        Self::rot_sym(h, vec![d; nr])
    }

    pub fn disk(nr: usize, nphi: usize, h: f64, u: Vec<f64>) -> Result<Self> {
        let spec = GridSpec { nr, nphi, h };
        spec.validate()?;
        if u.len() != spec.n_nodes() {
            return Err(Error::Config(format!(
                "height vector length {} does not match grid {nr}x{nphi}",
                u.len()
            )));
        }
        Self::check_heights(&u)?;
        Ok(GraphField::Disk2D { h, nphi, u })
    }

    pub fn disk_constant(nr: usize, nphi: usize, h: f64, d: f64) -> Result<Self> {
        Self::disk(nr, nphi, h, vec![d; nr * nphi])
    }

    /// Disk with interior initialized to a constant and the outer Dirichlet
    /// ring set from a boundary height function of the angle.
    pub fn disk_with_boundary<F>(
        nr: usize,
        nphi: usize,
        h: f64,
        interior: f64,
        boundary: F,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64,
    {
        let spec = GridSpec { nr, nphi, h };
        spec.validate()?;
        let mut u = vec![interior; spec.n_nodes()];
        for j in 0..nphi {
            u[spec.idx(nr - 1, j)] = boundary(spec.phi(j));
        }
        Self::check_heights(&u)?;
        Ok(GraphField::Disk2D { h, nphi, u })
    }

    fn check_heights(u: &[f64]) -> Result<()> {
        if let Some(bad) = u.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::Config(format!("invalid height {bad}")));
        }
        Ok(())
    }

    pub fn mode_name(&self) -> &'static str {
        match self {
            GraphField::FuchsianConstant { .. } => "fuchsian-constant",
            GraphField::RotSymProfile { .. } => "rotsym-profile",
            GraphField::Disk2D { .. } => "disk2d",
        }
    }

    /// Hypersurface dimension.
    pub fn dim_n(&self) -> usize {
        match self {
            GraphField::FuchsianConstant { n, .. } => *n,
            _ => 2,
        }
    }

    pub fn heights(&self) -> Vec<f64> {
        match self {
            GraphField::FuchsianConstant { u, .. } => vec![*u],
            GraphField::RotSymProfile { u, .. } => u.clone(),
            GraphField::Disk2D { u, .. } => u.clone(),
        }
    }

    /// Grid step; zero for the constant mode (no discretization error).
    pub fn grid_step(&self) -> f64 {
        match self {
            GraphField::FuchsianConstant { .. } => 0.0,
            GraphField::RotSymProfile { h, .. } => *h,
            GraphField::Disk2D { h, .. } => *h,
        }
    }

    pub fn grid_spec(&self) -> Option<GridSpec> {
        match self {
            GraphField::FuchsianConstant { .. } => None,
            GraphField::RotSymProfile { h, u } => {
                Some(GridSpec { nr: u.len(), nphi: 1, h: *h })
            }
            GraphField::Disk2D { h, nphi, u } => {
                Some(GridSpec { nr: u.len() / nphi, nphi: *nphi, h: *h })
            }
        }
    }

    /// (ρ, φ) of each node; (0, 0) for the constant mode.
    pub fn node_coords(&self) -> Vec<(f64, f64)> {
        match self.grid_spec() {
            None => vec![(0.0, 0.0)],
            Some(spec) => (0..spec.n_nodes())
                .map(|q| (spec.rho(q / spec.nphi), spec.phi(q % spec.nphi)))
                .collect(),
        }
    }

    fn with_heights(&self, u: Vec<f64>) -> GraphField {
        match self {
            GraphField::FuchsianConstant { n, .. } => {
                GraphField::FuchsianConstant { n: *n, u: u[0] }
            }
            GraphField::RotSymProfile { h, .. } => {
                GraphField::RotSymProfile { h: *h, u }
            }
            GraphField::Disk2D { h, nphi, .. } => {
                GraphField::Disk2D { h: *h, nphi: *nphi, u }
            }
        }
    }

}

/// Solver parameters; `new` fills the documented defaults.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SolverConfig {
    pub theta: f64,
    pub target_r: f64,
    /// Tolerance on the max pointwise curvature residual.
    pub newton_tol: f64,
    pub max_iter: usize,
    /// Initial step fraction in (0, 1].
    pub damping: f64,
}

impl SolverConfig {
    pub fn new(theta: f64, target_r: f64) -> Self {
        SolverConfig {
            theta,
            target_r,
            newton_tol: NEWTON_TOL,
            max_iter: 50,
            damping: 1.0,
        }
    }

    fn validate(&self, n: usize) -> Result<AngleParams> {
        let p = AngleParams::new(self.theta, n)?;
        if self.target_r <= p.threshold() {
            return Err(Error::Domain(format!(
                "target curvature {} below threshold tan(theta/n) = {}",
                self.target_r,
                p.threshold()
            )));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Config(format!(
                "damping {} outside (0, 1]",
                self.damping
            )));
        }
        Ok(p)
    }
}

/// Outcome summary of a solve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    /// Max-residual history, including the initial residual.
    pub residuals: Vec<f64>,
    pub min_height: f64,
    pub max_height: f64,
    pub min_principal_curvature: f64,
    /// Nodes above the closed-form upper height bound (with grid slack).
    pub upper_flags: usize,
    /// Nodes below the coverage depth (compact mode only).
    pub lower_flags: usize,
}

/// Barrier comparison of a height field against the closed-form bounds.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BarrierDiagnostics {
    pub dist_upper: f64,
    pub coverage_depth: Option<f64>,
    pub upper_flags: usize,
    pub lower_flags: usize,
    pub min_height: f64,
    pub max_height: f64,
}

/// Pointwise curvature of the embedded graph at every node; Dirichlet-ring
/// entries are NaN (no interior stencil there).
pub fn curvature_field(g: &GraphField, p: &AngleParams) -> Result<Vec<f64>> {
    if p.n != g.dim_n() {
        return Err(Error::Config(format!(
            "angle dimension {} does not match graph dimension {}",
            p.n,
            g.dim_n()
        )));
    }
    match g {
        GraphField::FuchsianConstant { u, .. } => {
            if !(*u > 0.0) {
                return Err(Error::NotStrictlyConvex { node: Some(0) });
            }
            Ok(vec![p.threshold() / u.tanh()])
        }
        _ => {
            let spec = g.grid_spec().unwrap();
            let asm = operator::assemble(&spec, &g.heights(), p)?;
            Ok(operator::curvature_values(&asm))
        }
    }
}

/// Angle sum Σᵢ arctan(r·λᵢ) of the embedded graph at every node, for a
/// fixed scaling r; Dirichlet-ring entries are NaN.
pub fn angle_sum_field(g: &GraphField, p: &AngleParams, r: f64) -> Result<Vec<f64>> {
    if r <= 0.0 {
        return Err(Error::Domain(format!("r = {r} must be positive")));
    }
    match g {
        GraphField::FuchsianConstant { n, u } => {
            Ok(vec![*n as f64 * (r * u.tanh()).atan()])
        }
        _ => {
            let spec = g.grid_spec().unwrap();
            let asm = operator::assemble(&spec, &g.heights(), p)?;
            Ok(asm
                .geoms
                .iter()
                .map(|ng| {
                    ng.as_ref()
                        .map(|ng| {
                            (r * ng.lambda[0]).atan() + (r * ng.lambda[1]).atan()
                        })
                        .unwrap_or(f64::NAN)
                })
                .collect())
        }
    }
}

/// Normal component ⟨∂_w, N⟩ of the unit vertical field at every node: the
/// factor converting height perturbations into normal perturbations.
/// Dirichlet-ring entries are NaN; the constant mode is exactly 1.
pub fn normal_components(g: &GraphField, p: &AngleParams) -> Result<Vec<f64>> {
    match g {
        GraphField::FuchsianConstant { .. } => Ok(vec![1.0]),
        _ => {
            let spec = g.grid_spec().unwrap();
            let asm = operator::assemble(&spec, &g.heights(), p)?;
            Ok(asm
                .geoms
                .iter()
                .map(|ng| ng.as_ref().map(|ng| ng.c_v).unwrap_or(f64::NAN))
                .collect())
        }
    }
}

/// The linearized curvature density at fixed r, as sparse stencil rows
/// (Dirichlet rows identity). Acts on normal perturbation functions.
pub fn linearized_operator(g: &GraphField, p: &AngleParams, r: f64) -> Result<LinOp> {
    if r <= 0.0 {
        return Err(Error::Domain(format!("r = {r} must be positive")));
    }
    match g {
        GraphField::FuchsianConstant { n, u } => {
            if p.n != *n {
                return Err(Error::Config("dimension mismatch".into()));
            }
            let l = u.tanh();
            let z = *n as f64 * (1.0 - l * l) / (1.0 + r * r * l * l);
            Ok(LinOp { n: 1, rows: vec![vec![(0, z)]], bandwidth: 1 })
        }
        _ => {
            let spec = g.grid_spec().unwrap();
            let asm = operator::assemble(&spec, &g.heights(), p)?;
            Ok(operator::lin_rows(&asm, Some(r), None))
        }
    }
}

/// Damped Newton solve for pointwise curvature equal to `cfg.target_r`.
pub fn newton_solve(g0: &GraphField, cfg: &SolverConfig) -> Result<(GraphField, SolveReport)> {
    let p = cfg.validate(g0.dim_n())?;
    let (u, mut report) = match g0 {
        GraphField::FuchsianConstant { u, .. } => {
            let (u, report) = fuchsian_newton(p, *u, cfg)?;
            (vec![u], report)
        }
        _ => {
            let spec = g0.grid_spec().unwrap();
            newton::newton_grid(&spec, &g0.heights(), cfg, &p, None)?
        }
    };
    let solved = g0.with_heights(u);
    let diag = barrier_check(&solved, &p, cfg.target_r)?;
    report.upper_flags = diag.upper_flags;
    report.lower_flags = diag.lower_flags;
    Ok((solved, report))
}

/// Perron iteration (rotationally symmetric profiles only): monotone descent
/// from a supersolution to the constant-curvature profile.
pub fn perron_solve(g0: &GraphField, cfg: &SolverConfig) -> Result<(GraphField, SolveReport)> {
    let p = cfg.validate(g0.dim_n())?;
    let (spec, u0) = perron::require_rotsym(g0)?;
    let (u, mut report) = perron::perron_profile(&spec, &u0, cfg, &p)?;
    let solved = g0.with_heights(u);
    let diag = barrier_check(&solved, &p, cfg.target_r)?;
    report.upper_flags = diag.upper_flags;
    report.lower_flags = diag.lower_flags;
    Ok((solved, report))
}

/// Compares heights against the closed-form bounds: flags nodes above
/// dist_upper + 2h², and (compact constant mode only) below
/// coverage_depth − 2h².
pub fn barrier_check(g: &GraphField, p: &AngleParams, r: f64) -> Result<BarrierDiagnostics> {
    let du = barriers::dist_upper(p, r)?;
    let cd = barriers::coverage_depth(p, r).ok();
    let h = g.grid_step();
    // 2h² discretization slack plus a rounding margin: the constant-section
    // solution sits exactly on the upper bound
    let slack = 2.0 * h * h + 1e-9 * (1.0 + du);
    let heights = g.heights();
    let upper_flags = heights.iter().filter(|u| **u > du + slack).count();
    let lower_flags = match (g, cd) {
        (GraphField::FuchsianConstant { .. }, Some(cd)) => {
            heights.iter().filter(|u| **u < cd - slack).count()
        }
        _ => 0,
    };
    Ok(BarrierDiagnostics {
        dist_upper: du,
        coverage_depth: cd,
        upper_flags,
        lower_flags,
        min_height: heights.iter().cloned().fold(f64::INFINITY, f64::min),
        max_height: heights.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// CSV rows "rho,phi,u,r" of a height field and its curvature.
pub fn field_csv(g: &GraphField, p: &AngleParams) -> Result<String> {
    let field = curvature_field(g, p)?;
    let coords = g.node_coords();
    let heights = g.heights();
    let mut out = String::from("rho,phi,u,r\n");
    for ((c, u), r) in coords.iter().zip(&heights).zip(&field) {
        out.push_str(&format!("{:.12e},{:.12e},{:.12e},{:.12e}\n", c.0, c.1, u, r));
    }
    Ok(out)
}

/// Serializable bundle of a solved field.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolvedBundle {
    pub mode: String,
    pub theta: f64,
    pub r: f64,
    pub grid_nr: usize,
    pub grid_nphi: usize,
    pub grid_h: f64,
    pub heights: Vec<f64>,
    pub report: SolveReport,
}

impl SolvedBundle {
    pub fn new(g: &GraphField, cfg: &SolverConfig, report: &SolveReport) -> Self {
        let spec = g.grid_spec();
        SolvedBundle {
            mode: g.mode_name().to_string(),
            theta: cfg.theta,
            r: cfg.target_r,
            grid_nr: spec.map(|s| s.nr).unwrap_or(1),
            grid_nphi: spec.map(|s| s.nphi).unwrap_or(1),
            grid_h: g.grid_step(),
            heights: g.heights(),
            report: report.clone(),
        }
    }
}

fn fuchsian_newton(p: AngleParams, u0: f64, cfg: &SolverConfig) -> Result<(f64, SolveReport)> {
    let t = p.threshold();
    let target = cfg.target_r;
    let mut u = u0;
    let mut residuals = Vec::new();
    let r_of = |u: f64| t / u.tanh();
    let mut res = (r_of(u) - target).abs();
    residuals.push(res);
    let mut iterations = 0;
    while res > cfg.newton_tol {
        if iterations >= cfg.max_iter {
            return Err(Error::NonConvergence { iterations, residual: res });
        }
        iterations += 1;
        let l = u.tanh();
        let r = r_of(u);
        let deriv = -r * (1.0 - l * l) / l;
        let delta = -(r - target) / deriv;
        let mut step = cfg.damping;
        let mut accepted = false;
        for _ in 0..=8 {
            let trial = u + step * delta;
            if trial > 0.0 {
                let trial_res = (r_of(trial) - target).abs();
                if trial_res < res || trial_res <= cfg.newton_tol {
                    u = trial;
                    res = trial_res;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::NonConvergence { iterations, residual: res });
        }
        residuals.push(res);
    }
    let report = SolveReport {
        converged: true,
        iterations,
        residuals,
        min_height: u,
        max_height: u,
        min_principal_curvature: u.tanh(),
        upper_flags: 0,
        lower_flags: 0,
    };
    Ok((u, report))
}
