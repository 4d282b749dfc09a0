//! Continuation sweeps of constant-curvature leaves: descending (or
//! ascending) the curvature parameter r with warm starts, checking leaf
//! ordering and the closed-form height bounds, plus coverage tables along a
//! θ-schedule.

use serde::{Deserialize, Serialize};

use crate::barriers::{coverage_depth, dist_upper};
use crate::error::{Error, Result};
use crate::graphsolve::{newton_solve, GraphField, SolveReport, SolverConfig};
use crate::symcurv::AngleParams;

/// One solved leaf of a sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRecord {
    pub r: f64,
    pub solved: GraphField,
    pub report: SolveReport,
    pub max_height: f64,
    pub min_height: f64,
    pub dist_upper: f64,
    pub coverage_depth: Option<f64>,
    /// Newton iterations used from the warm start.
    pub warm_iterations: usize,
    /// True when the leaf tripped a barrier flag.
    pub degraded: bool,
}

impl SweepRecord {
    pub fn csv_header() -> &'static str {
        "r,theta,max_height,min_height,dist_upper,coverage_depth,converged"
    }

    pub fn csv_row(&self, theta: f64) -> String {
        format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{},{}",
            self.r,
            theta,
            self.max_height,
            self.min_height,
            self.dist_upper,
            self.coverage_depth
                .map(|v| format!("{v:.12e}"))
                .unwrap_or_else(|| "".into()),
            self.report.converged
        )
    }
}

/// Whole-sweep outcome; `truncated` marks a member solve failure, with the
/// successful prefix retained.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepResult {
    pub theta: f64,
    pub records: Vec<SweepRecord>,
    pub truncated: bool,
    pub failure: Option<String>,
}

/// Solves one leaf per r value, warm-starting each solve from the previous
/// leaf. `boundary`, when given, sets the Dirichlet ring of disk leaves as a
/// function (r, φ) ↦ height before each member solve.
pub fn sweep<F>(
    template: &GraphField,
    theta: f64,
    r_values: &[f64],
    boundary: Option<F>,
) -> Result<SweepResult>
where
    F: Fn(f64, f64) -> f64,
{
    let p = AngleParams::new(theta, template.dim_n())?;
    let mut current = template.clone();
    let mut records = Vec::with_capacity(r_values.len());
    for &r in r_values {
        if let (Some(b), GraphField::Disk2D { h, nphi, u }) = (&boundary, &mut current) {
            let nr = u.len() / *nphi;
            let hp = std::f64::consts::TAU / *nphi as f64;
            for j in 0..*nphi {
                u[(nr - 1) * *nphi + j] = b(r, j as f64 * hp);
            }
            let _ = h;
        }
        let cfg = SolverConfig::new(theta, r);
        match newton_solve(&current, &cfg) {
            Ok((solved, report)) => {
                let heights = solved.heights();
                let record = SweepRecord {
                    r,
                    max_height: heights.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                    min_height: heights.iter().cloned().fold(f64::INFINITY, f64::min),
                    dist_upper: dist_upper(&p, r)?,
                    coverage_depth: coverage_depth(&p, r).ok(),
                    warm_iterations: report.iterations,
                    degraded: report.upper_flags + report.lower_flags > 0,
                    solved: solved.clone(),
                    report,
                };
                current = solved;
                records.push(record);
            }
            Err(e) => {
                return Ok(SweepResult {
                    theta,
                    records,
                    truncated: true,
                    failure: Some(e.to_string()),
                });
            }
        }
    }
    Ok(SweepResult { theta, records, truncated: false, failure: None })
}

/// Minimum pointwise height gap between two leaves (same grid); positive iff
/// leaf `a` lies strictly above leaf `b`.
pub fn min_gap(a: &GraphField, b: &GraphField) -> Result<f64> {
    let ua = a.heights();
    let ub = b.heights();
    if ua.len() != ub.len() {
        return Err(Error::Config("leaf grids differ".into()));
    }
    Ok(ua
        .iter()
        .zip(&ub)
        .map(|(x, y)| x - y)
        .fold(f64::INFINITY, f64::min))
}

/// One row of a coverage table.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CoverageRow {
    pub theta: f64,
    pub r: f64,
    pub coverage_depth: f64,
}

/// Coverage depths along a θ-schedule r(θ). When the schedule sits at the
/// threshold r = tan(θ/n), the depths must increase monotonically in θ
/// (up to the limit artanh(1/n) at θ = nπ/2); a violation is reported as an
/// error.
pub fn theta_sweep<F>(n: usize, thetas: &[f64], schedule: F) -> Result<Vec<CoverageRow>>
where
    F: Fn(f64) -> f64,
{
    let mut rows = Vec::with_capacity(thetas.len());
    let mut at_threshold = true;
    for &theta in thetas {
        let p = AngleParams::new(theta, n)?;
        let r = schedule(theta);
        if (r - p.threshold()).abs() > 1e-12 * (1.0 + r.abs()) {
            at_threshold = false;
        }
        rows.push(CoverageRow { theta, r, coverage_depth: coverage_depth(&p, r)? });
    }
    if at_threshold {
        let ascending = thetas.windows(2).all(|w| w[0] < w[1]);
        if ascending {
            for w in rows.windows(2) {
                if w[1].coverage_depth < w[0].coverage_depth - 1e-12 {
                    return Err(Error::Precondition(format!(
                        "coverage depth decreased along the threshold schedule at theta = {}",
                        w[1].theta
                    )));
                }
            }
        }
    }
    Ok(rows)
}

/// Closed-form height of the flat-cross-section constant-curvature leaf:
/// artanh(tan(θ/n)/r). The solver reproduces this exactly (see tests), which
/// certifies the Newton route against the formula.
pub fn fuchsian_exact(p: &AngleParams, r: f64) -> Result<f64> {
    dist_upper(p, r)
}
