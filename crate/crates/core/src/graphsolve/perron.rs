//! Monotone Perron-style iteration for rotationally symmetric profiles.
//!
//! Starting from a supersolution (pointwise curvature ≤ target), the solver
//! repeatedly (A) replaces the heights on small overlapping radial windows by
//! the local Dirichlet solution with the current values frozen on the window
//! boundary, and (B) takes the pointwise minimum with the current iterate.
//! Both operations preserve the supersolution property and produce a
//! pointwise non-increasing height sequence whose limit has constant
//! curvature.

use crate::error::{Error, Result};
use crate::symcurv::AngleParams;

use super::newton::newton_grid;
use super::operator::{assemble, curvature_values, GridSpec};
use super::{GraphField, SolveReport, SolverConfig};

const WINDOW_CELLS: usize = 8;
const WINDOW_STRIDE: usize = WINDOW_CELLS / 2; // 50% overlap
const MAX_SWEEPS: usize = 400;

pub(super) fn perron_profile(
    spec: &GridSpec,
    u0: &[f64],
    cfg: &SolverConfig,
    p: &AngleParams,
) -> Result<(Vec<f64>, SolveReport)> {
    let target = cfg.target_r;
    let stop_tol = 10.0 * cfg.newton_tol;
    // supersolution precondition at interior nodes
    let asm = assemble(spec, u0, p)?;
    let fields = curvature_values(&asm);
    for (q, r) in fields.iter().enumerate() {
        if r.is_finite() && *r > target + stop_tol {
            return Err(Error::Precondition(format!(
                "start is not a supersolution: curvature {r} > target {target} at node {q}"
            )));
        }
    }
    let nr = spec.nr;
    let mut u = u0.to_vec();
    let mut residuals = Vec::new();
    let mut res = max_interior_residual(spec, &u, p, target)?;
    residuals.push(res);
    let mut sweeps = 0;
    while res > stop_tol {
        if sweeps >= MAX_SWEEPS {
            return Err(Error::NonConvergence { iterations: sweeps, residual: res });
        }
        sweeps += 1;
        let mut start = 0usize;
        loop {
            let end = (start + WINDOW_CELLS).min(nr - 1);
            // operation A: local Dirichlet replacement on the window.
            // active nodes: strictly inside (start, end), plus the center
            // node when the window touches it.
            let mut active = vec![false; nr];
            let lo = if start == 0 { 0 } else { start + 1 };
            for (i, a) in active.iter_mut().enumerate() {
                *a = i >= lo && i < end;
            }
            if active.iter().any(|a| *a) {
                let local_cfg = SolverConfig {
                    max_iter: 30,
                    ..*cfg
                };
                if let Ok((solved, _)) =
                    newton_grid(spec, &u, &local_cfg, p, Some(&active))
                {
                    // operation B: pointwise minimum with the iterate
                    let candidate: Vec<f64> = u
                        .iter()
                        .zip(&solved)
                        .map(|(a, b)| a.min(*b))
                        .collect();
                    if assemble(spec, &candidate, p).is_ok() {
                        debug_assert!(candidate
                            .iter()
                            .zip(&u)
                            .all(|(c, old)| c <= old));
                        u = candidate;
                    }
                }
            }
            if end >= nr - 1 {
                break;
            }
            start += WINDOW_STRIDE;
        }
        res = max_interior_residual(spec, &u, p, target)?;
        residuals.push(res);
    }
    let asm = assemble(spec, &u, p)?;
    let min_pc = asm
        .geoms
        .iter()
        .flatten()
        .map(|g| g.lambda[0])
        .fold(f64::INFINITY, f64::min);
    let report = SolveReport {
        converged: true,
        iterations: sweeps,
        residuals,
        min_height: u.iter().cloned().fold(f64::INFINITY, f64::min),
        max_height: u.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        min_principal_curvature: min_pc,
        upper_flags: 0,
        lower_flags: 0,
    };
    Ok((u, report))
}

fn max_interior_residual(
    spec: &GridSpec,
    u: &[f64],
    p: &AngleParams,
    target: f64,
) -> Result<f64> {
    let asm = assemble(spec, u, p)?;
    Ok(asm
        .geoms
        .iter()
        .flatten()
        .map(|g| (g.r_local - target).abs())
        .fold(0.0_f64, f64::max))
}

pub(super) fn require_rotsym(g: &GraphField) -> Result<(GridSpec, Vec<f64>)> {
    match g {
        GraphField::RotSymProfile { h, u } => {
            let spec = GridSpec { nr: u.len(), nphi: 1, h: *h };
            spec.validate()?;
            Ok((spec, u.clone()))
        }
        other => Err(Error::Config(format!(
            "Perron iteration requires a rotationally symmetric profile, got {}",
            other.mode_name()
        ))),
    }
}
