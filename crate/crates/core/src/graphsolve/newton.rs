//! Damped Newton iteration for constant-curvature height fields.
//!
//! The main phase updates the heights by solving, in the unknown normal
//! perturbation v = c·δw,
//!
//! ```text
//! r_q · (L v)_q = (R_q − r_target) · Tr(A(Id + r²A²)⁻¹)_q
//! ```
//!
//! which is the exact derivative of the pointwise curvature at a solution
//! (where the curvature gradient along the surface vanishes); away from a
//! solution it is a Gauss–Newton-style approximation that the damping
//! schedule keeps safe.
//!
//! When an iterate leaves the strictly convex cone — typical for constant
//! starts against a non-constant Dirichlet ring — the pointwise curvature is
//! undefined there, so a continuation phase iterates on the fixed-r angle-sum
//! residual Σᵢ arctan(r·λᵢ) − θ instead, which is smooth in the shape
//! operator without any convexity requirement. Once the iterate re-enters
//! the cone the main phase resumes.

use crate::error::{Error, Result};
use crate::linalg::Banded;
use crate::symcurv::AngleParams;

use super::operator::{assemble, assemble_relaxed, lin_rows, Assembled, GridSpec};
use super::{SolveReport, SolverConfig};

fn max_residual(asm: &Assembled, target: f64, active: Option<&[bool]>) -> f64 {
    let mut res = 0.0_f64;
    for (q, g) in asm.geoms.iter().enumerate() {
        if let Some(g) = g {
            if active.map(|m| m[q]).unwrap_or(true) {
                res = res.max((g.r_local - target).abs());
            }
        }
    }
    res
}

fn l2_residual(asm: &Assembled, target: f64, active: Option<&[bool]>) -> f64 {
    let mut res = 0.0_f64;
    for (q, g) in asm.geoms.iter().enumerate() {
        if let Some(g) = g {
            if active.map(|m| m[q]).unwrap_or(true) {
                res += (g.r_local - target).powi(2);
            }
        }
    }
    res.sqrt()
}

/// Angle-sum residual (max, l2) over active nodes; defined for non-convex
/// nodes.
fn sl_residual(asm: &Assembled, r: f64, theta: f64, active: Option<&[bool]>) -> (f64, f64) {
    let mut res = 0.0_f64;
    let mut l2 = 0.0_f64;
    for (q, g) in asm.geoms.iter().enumerate() {
        if let Some(g) = g {
            if active.map(|m| m[q]).unwrap_or(true) {
                let sl = (r * g.lambda[0]).atan() + (r * g.lambda[1]).atan();
                res = res.max((sl - theta).abs());
                l2 += (sl - theta).powi(2);
            }
        }
    }
    (res, l2.sqrt())
}

fn min_curvature(asm: &Assembled) -> f64 {
    asm.geoms
        .iter()
        .flatten()
        .map(|g| g.lambda[0])
        .fold(f64::INFINITY, f64::min)
}

/// One damped linear-solve update. `fixed_r` selects the continuation phase
/// (angle-sum residual at the target r); otherwise the local-curvature
/// Jacobian is used. Returns the accepted iterate or None on a stall.
#[allow(clippy::too_many_arguments)]
fn damped_step(
    spec: &GridSpec,
    u: &[f64],
    asm: &Assembled,
    cfg: &SolverConfig,
    p: &AngleParams,
    active: Option<&[bool]>,
    continuation: bool,
) -> Result<Option<(Vec<f64>, Assembled)>> {
    let target = cfg.target_r;
    let op = lin_rows(asm, continuation.then_some(target), active);
    let n = op.n;
    let bw = op.bandwidth;
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut rhs = vec![0.0; n];
    let mut diag_scale = 0.0_f64;
    for q in 0..n {
        match (&asm.geoms[q], active.map(|m| m[q]).unwrap_or(true)) {
            (Some(g), true) => {
                let r_row = if continuation { target } else { g.r_local };
                for (col, v) in &op.rows[q] {
                    let cscale = asm.geoms[*col]
                        .as_ref()
                        .map(|gg| gg.c_v)
                        .unwrap_or(1.0);
                    let e = r_row * v * cscale;
                    if *col == q {
                        diag_scale = diag_scale.max(e.abs());
                    }
                    entries.push((q, *col, e));
                }
                rhs[q] = if continuation {
                    let sl = (target * g.lambda[0]).atan()
                        + (target * g.lambda[1]).atan();
                    p.theta - sl
                } else {
                    let co = super::stencil::operator_coeffs(g, g.r_local);
                    (g.r_local - target) * co.trace_am
                };
            }
            _ => {
                entries.push((q, q, 1.0));
            }
        }
    }
    let (res, l2) = if continuation {
        sl_residual(asm, target, p.theta, active)
    } else {
        (
            max_residual(asm, target, active),
            l2_residual(asm, target, active),
        )
    };
    // projection ceiling: the solution obeys the closed-form height bound
    // artanh(tan(θ/n)/r) away from the boundary data, so clamping trials
    // there keeps iterates off the flat large-height tail where the
    // curvature saturates at the threshold and the residual goes blind
    let mut ceiling = (p.threshold() / target).atanh();
    for q in 0..n {
        if asm.geoms[q].is_none() || !active.map(|m| m[q]).unwrap_or(true) {
            ceiling = ceiling.max(u[q]);
        }
    }
    ceiling += 0.1 + 2.0 * spec.h * spec.h;
    // Levenberg-Marquardt escalation: a plain Gauss-Newton step first; when
    // it fails even damped (the Jacobian drops tangential-variation terms,
    // which matters at kinks and on the flat large-height tail where the
    // curvature saturates), re-solve with growing diagonal regularization,
    // which bends the step toward plain residual descent and shortens it.
    for mu_rel in [0.0, 1e-2, 1e-1, 1.0, 1e1, 1e2] {
        let mu = mu_rel * diag_scale.max(1.0);
        let mut mat = Banded::zeros(n, bw, bw);
        for (q, col, e) in &entries {
            mat.add(*q, *col, *e);
        }
        if mu > 0.0 {
            for q in 0..n {
                if asm.geoms[q].is_some() && active.map(|m| m[q]).unwrap_or(true) {
                    mat.add(q, q, mu);
                }
            }
        }
        let dw = match mat.solve(&rhs) {
            Ok(dw) => dw,
            Err(_) => continue,
        };
        // damping within each regularization level
        let mut step = cfg.damping;
        for _ in 0..6 {
            let trial: Vec<f64> = u
                .iter()
                .zip(&dw)
                .map(|(a, d)| (a + step * d).min(ceiling))
                .collect();
            if trial.iter().any(|v| *v <= 0.0) {
                step *= 0.5;
                continue;
            }
            let trial_asm = if continuation {
                assemble_relaxed(spec, &trial, p)
            } else {
                assemble(spec, &trial, p)
            };
            match trial_asm {
                Ok(trial_asm) => {
                    let accept = if continuation {
                        let (tr, tl2) =
                            sl_residual(&trial_asm, target, p.theta, active);
                        tr < res || tl2 < 0.999 * l2
                    } else {
                        let trial_res = max_residual(&trial_asm, target, active);
                        trial_res < res
                            || trial_res <= cfg.newton_tol
                            || l2_residual(&trial_asm, target, active) < 0.999 * l2
                    };
                    if accept {
                        return Ok(Some((trial, trial_asm)));
                    }
                    step *= 0.5;
                }
                Err(Error::NotStrictlyConvex { .. })
                | Err(Error::NotImmersed { .. }) => {
                    step *= 0.5;
                }
                Err(other) => return Err(other),
            }
        }
    }
    Ok(None)
}

pub(super) fn newton_grid(
    spec: &GridSpec,
    u0: &[f64],
    cfg: &SolverConfig,
    p: &AngleParams,
    active: Option<&[bool]>,
) -> Result<(Vec<f64>, SolveReport)> {
    let target = cfg.target_r;
    let mut u = u0.to_vec();
    let mut residuals = Vec::new();
    let mut iterations = 0;
    loop {
        match assemble(spec, &u, p) {
            Ok(asm) => {
                let res = max_residual(&asm, target, active);
                residuals.push(res);
                if res <= cfg.newton_tol {
                    let report = SolveReport {
                        converged: true,
                        iterations,
                        residuals,
                        min_height: u.iter().cloned().fold(f64::INFINITY, f64::min),
                        max_height: u
                            .iter()
                            .cloned()
                            .fold(f64::NEG_INFINITY, f64::max),
                        min_principal_curvature: min_curvature(&asm),
                        upper_flags: 0,
                        lower_flags: 0,
                    };
                    return Ok((u, report));
                }
                if iterations >= cfg.max_iter {
                    return Err(Error::NonConvergence { iterations, residual: res });
                }
                iterations += 1;
                match damped_step(spec, &u, &asm, cfg, p, active, false)? {
                    Some((nu, _)) => u = nu,
                    None => {
                        return Err(Error::NonConvergence { iterations, residual: res })
                    }
                }
            }
            Err(Error::NotStrictlyConvex { .. }) => {
                // continuation phase on the angle-sum equation
                let asm = assemble_relaxed(spec, &u, p)?;
                let (res, _) = sl_residual(&asm, target, p.theta, active);
                if iterations >= cfg.max_iter {
                    return Err(Error::NonConvergence { iterations, residual: res });
                }
                iterations += 1;
                match damped_step(spec, &u, &asm, cfg, p, active, true)? {
                    Some((nu, _)) => u = nu,
                    None => {
                        return Err(Error::NonConvergence { iterations, residual: res })
                    }
                }
            }
            Err(other) => return Err(other),
        }
    }
}
