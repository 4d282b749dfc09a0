//! Exactly-solvable model hypersurfaces and the quantitative distance bounds
//! they induce on constant-curvature graphs.
//!
//! The umbilic equidistant at distance d has shape operator tanh(d)·Id, so its
//! curvature is the closed form tan(θ/n)/tanh(d); the tube of radius d around
//! a geodesic has shape operator A₀(d) = diag(tanh d, coth d, …, coth d) and
//! supplies the upper comparison κ(d). Sandwiching a solution between the two
//! gives explicit upper and lower height bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symcurv::{r_theta_spectrum, AngleParams, Spectrum};
use crate::tolerances::SOLVE_TOL;

/// Descriptor of a model hypersurface with closed-form principal curvatures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    /// Level set at distance d > 0 from a totally geodesic hyperplane.
    EquidistantPlane { d: f64 },
    /// Geodesic sphere of radius ρ > 0.
    GeodesicSphere { rho: f64 },
    Horosphere,
    /// Cylinder at distance d > 0 from a geodesic.
    TubeAroundGeodesic { d: f64 },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ModelSurface {
    pub kind: ModelKind,
    /// Hypersurface dimension n (ambient H^{n+1}).
    pub n: usize,
}

impl ModelSurface {
    pub fn new(kind: ModelKind, n: usize) -> Result<Self> {
        let param = match kind {
            ModelKind::EquidistantPlane { d } => Some(d),
            ModelKind::GeodesicSphere { rho } => Some(rho),
            ModelKind::Horosphere => None,
            ModelKind::TubeAroundGeodesic { d } => Some(d),
        };
        if let Some(p) = param {
            if p <= 0.0 {
                return Err(Error::Config(format!(
                    "model parameter {p} must be strictly positive"
                )));
            }
        }
        if !(2..=8).contains(&n) {
            return Err(Error::Config(format!("dimension {n} outside [2,8]")));
        }
        Ok(ModelSurface { kind, n })
    }
}

/// Quantitative bound summary for one (θ, r, n) triple.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub theta: f64,
    pub r: f64,
    pub n: usize,
    /// Upper height bound artanh(tan(θ/n)/r).
    pub dist_upper: f64,
    /// Lower height bound: the tube radius whose comparison curvature is r.
    pub delta_lower: f64,
    /// Depth below which the leaf family covers every compact set.
    pub coverage_depth: f64,
}

impl BoundReport {
    pub fn csv_header() -> &'static str {
        "theta,r,n,dist_upper,delta_lower,coverage_depth"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{:.12e},{:.12e},{},{:.12e},{:.12e},{:.12e}",
            self.theta, self.r, self.n, self.dist_upper, self.delta_lower, self.coverage_depth
        )
    }
}

/// Principal curvatures of a model hypersurface.
pub fn shape_of(m: &ModelSurface) -> Spectrum {
    let n = m.n;
    match m.kind {
        ModelKind::EquidistantPlane { d } => Spectrum::new(vec![d.tanh(); n]),
        ModelKind::GeodesicSphere { rho } => {
            Spectrum::new(vec![1.0 / rho.tanh(); n])
        }
        ModelKind::Horosphere => Spectrum::new(vec![1.0; n]),
        ModelKind::TubeAroundGeodesic { d } => {
            let mut v = vec![1.0 / d.tanh(); n];
            v[0] = d.tanh();
            Spectrum::new(v)
        }
    }
}

/// Curvature of the equidistant at distance d: tan(θ/n)/tanh(d).
pub fn level_curvature(p: &AngleParams, d: f64) -> Result<f64> {
    if d <= 0.0 {
        return Err(Error::Domain(format!("distance d = {d} must be > 0")));
    }
    Ok(p.threshold() / d.tanh())
}

/// Curvature of the tube of radius d: the unique r with
/// arctan(r·tanh d) + (n−1)·arctan(r·coth d) = θ. Requires θ ≥ (n−1)π/2;
/// strictly decreasing in d for θ strictly above that bound.
pub fn kappa(p: &AngleParams, d: f64) -> Result<f64> {
    if d <= 0.0 {
        return Err(Error::Domain(format!("tube radius d = {d} must be > 0")));
    }
    if !p.hyperbolic_regime() {
        return Err(Error::Domain(format!(
            "theta = {} below (n-1)pi/2: tube comparison not applicable",
            p.theta
        )));
    }
    let m = ModelSurface::new(ModelKind::TubeAroundGeodesic { d }, p.n)?;
    r_theta_spectrum(shape_of(&m).values(), p)
}

/// Inverse of [`kappa`]: the unique d with kappa(p, d) = R, by bisection.
pub fn delta_lower(p: &AngleParams, big_r: f64) -> Result<f64> {
    if big_r <= p.threshold() {
        return Err(Error::Domain(format!(
            "R = {big_r} at or below threshold tan(theta/n) = {}",
            p.threshold()
        )));
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    if p.theta <= (p.n as f64 - 1.0) * half_pi + 1e-12 {
        return Err(Error::Domain(
            "theta at the degenerate bound (n-1)pi/2: kappa is constant".into(),
        ));
    }
    // kappa decreases from +infinity (d→0) to tan(theta/n) (d→infinity)
    let mut lo = 1e-8;
    let mut hi = 1.0;
    while kappa(p, hi)? > big_r {
        hi *= 2.0;
        if hi > 1e4 {
            return Err(Error::Domain(format!(
                "R = {big_r} unreachable by tube comparison"
            )));
        }
    }
    while kappa(p, lo)? < big_r {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::Domain("bound inversion bracket failed".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kappa(p, mid)? > big_r {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < SOLVE_TOL * (1.0 + hi) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Upper height bound artanh(tan(θ/n)/r) for a graph of curvature r.
pub fn dist_upper(p: &AngleParams, r: f64) -> Result<f64> {
    let t = p.threshold();
    if r <= t {
        return Err(Error::Domain(format!(
            "foliation parameter r = {r} below threshold tan(theta/n) = {t}"
        )));
    }
    Ok((t / r).atanh())
}

/// Depth artanh(tan(θ−(n−1)π/2)/r) below which the leaf family covers every
/// compact set. At r = tan(θ/n) the value increases to artanh(1/n) as
/// θ → nπ/2; unbounded depth is reached instead by sending r to the
/// threshold at fixed θ, where [`delta_lower`] diverges.
pub fn coverage_depth(p: &AngleParams, r: f64) -> Result<f64> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    if p.theta <= (p.n as f64 - 1.0) * half_pi {
        return Err(Error::Domain(format!(
            "theta = {} not above (n-1)pi/2",
            p.theta
        )));
    }
    if r < p.threshold() - 1e-12 {
        return Err(Error::Domain(format!(
            "r = {r} below threshold tan(theta/n) = {}",
            p.threshold()
        )));
    }
    let arg = (p.theta - (p.n as f64 - 1.0) * half_pi).tan() / r;
    if arg >= 1.0 {
        return Err(Error::Domain(format!(
            "coverage argument {arg} >= 1: depth undefined"
        )));
    }
    Ok(arg.atanh())
}

/// Full bound summary; requires θ > (n−1)π/2 and r > tan(θ/n).
pub fn bound_report(p: &AngleParams, r: f64) -> Result<BoundReport> {
    let du = dist_upper(p, r)?;
    let dl = delta_lower(p, r)?;
    let cd = coverage_depth(p, r)?;
    debug_assert!(dl <= du + 1e-10);
    debug_assert!(cd <= dl + 1e-10);
    Ok(BoundReport { theta: p.theta, r, n: p.n, dist_upper: du, delta_lower: dl, coverage_depth: cd })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcurv::{r_theta, SymMatrix};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn shape_of_examples() {
        let horo = ModelSurface::new(ModelKind::Horosphere, 2).unwrap();
        assert_eq!(shape_of(&horo).values(), &[1.0, 1.0]);
        let eq = ModelSurface::new(ModelKind::EquidistantPlane { d: 40.0 }, 3).unwrap();
        for v in shape_of(&eq).values() {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-10);
        }
        let tube = ModelSurface::new(ModelKind::TubeAroundGeodesic { d: 1.0 }, 2).unwrap();
        let s = shape_of(&tube);
        assert_abs_diff_eq!(s.values()[0], 0.76159, epsilon = 1e-5);
        assert_abs_diff_eq!(s.values()[1], 1.31304, epsilon = 1e-5);
        assert!(ModelSurface::new(ModelKind::GeodesicSphere { rho: 0.0 }, 2).is_err());
    }

    #[test]
    fn level_curvature_examples() {
        let p = AngleParams::new(FRAC_PI_2, 2).unwrap();
        assert_abs_diff_eq!(
            level_curvature(&p, 0.5_f64.atanh()).unwrap(),
            2.0,
            epsilon = 1e-13
        );
        // d large → tan(theta/n)
        assert_abs_diff_eq!(
            level_curvature(&p, 50.0).unwrap(),
            FRAC_PI_4.tan(),
            epsilon = 1e-12
        );
        // agreement with the general curvature solve on a grid
        for &theta in &[FRAC_PI_2 * 1.2, 3.0 * FRAC_PI_4, FRAC_PI_2 * 1.9] {
            let p = AngleParams::new(theta, 2).unwrap();
            for &d in &[0.2_f64, 0.7, 1.5, 3.0] {
                let a = SymMatrix::identity(2).unwrap().scale(d.tanh());
                assert_abs_diff_eq!(
                    level_curvature(&p, d).unwrap(),
                    r_theta(&a, &p).unwrap(),
                    epsilon = 1e-12
                );
            }
        }
    }

    fn kappa_bisect_oracle(theta: f64, n: usize, d: f64) -> f64 {
        let f = |r: f64| {
            (r * d.tanh()).atan() + (n as f64 - 1.0) * (r / d.tanh()).atan() - theta
        };
        let (mut lo, mut hi) = (1e-9, 1e9);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn kappa_examples() {
        // theta = pi/2, n=2: arctan x + arctan 1/x = pi/2 forces r = 1 for all d
        let p = AngleParams::new(FRAC_PI_2, 2).unwrap();
        for &d in &[0.1, 0.5, 1.0, 2.0] {
            assert_abs_diff_eq!(kappa(&p, d).unwrap(), 1.0, epsilon = 1e-10);
        }
        let p = AngleParams::new(3.0 * FRAC_PI_4, 2).unwrap();
        let k1 = kappa(&p, 1.0).unwrap();
        assert_abs_diff_eq!(k1, kappa_bisect_oracle(3.0 * FRAC_PI_4, 2, 1.0), epsilon = 1e-9);
        assert_abs_diff_eq!(k1, 2.478155, epsilon = 1e-5);
        // small-radius divergence kappa ~ tan(theta - (n-1)pi/2)/tanh(d)
        let k_small = kappa(&p, 0.01).unwrap();
        assert_abs_diff_eq!(k_small, FRAC_PI_4.tan() / 0.01_f64.tanh(), epsilon = 1.0);
        assert!(k_small > 90.0);
        // strictly decreasing in d
        let mut prev = f64::INFINITY;
        for k in 1..40 {
            let v = kappa(&p, k as f64 * 0.1).unwrap();
            assert!(v < prev);
            prev = v;
        }
        // below the regime: rejected
        let p = AngleParams::new(0.5, 2).unwrap();
        assert!(kappa(&p, 1.0).is_err());
    }

    #[test]
    fn delta_lower_examples() {
        let p = AngleParams::new(3.0 * FRAC_PI_4, 2).unwrap();
        for &d0 in &[0.3, 1.0, 2.0] {
            let r = kappa(&p, d0).unwrap();
            assert_abs_diff_eq!(delta_lower(&p, r).unwrap(), d0, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(delta_lower(&p, 2.478155).unwrap(), 1.0, epsilon = 1e-4);
        // decreasing in R
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let r = 2.5 + k as f64 * 0.5;
            let d = delta_lower(&p, r).unwrap();
            assert!(d < prev);
            prev = d;
        }
        assert!(delta_lower(&p, 0.5).is_err()); // below threshold
    }

    #[test]
    fn dist_upper_examples() {
        let p = AngleParams::new(3.0 * FRAC_PI_4, 2).unwrap();
        let v = dist_upper(&p, 3.0).unwrap();
        assert_abs_diff_eq!(v, ((3.0 * PI / 8.0).tan() / 3.0).atanh(), epsilon = 1e-14);
        assert_abs_diff_eq!(v, 1.1119, epsilon = 1e-4);
        assert!(dist_upper(&p, 1e9).unwrap() < 1e-8);
        assert!(dist_upper(&p, p.threshold() * 1.0000001).unwrap() > 5.0);
        assert!(dist_upper(&p, p.threshold()).is_err());
    }

    #[test]
    fn coverage_depth_examples() {
        let p = AngleParams::new(3.0 * FRAC_PI_4, 2).unwrap();
        let r0 = p.threshold();
        let v = coverage_depth(&p, r0).unwrap();
        assert_abs_diff_eq!(v, (FRAC_PI_4.tan() / r0).atanh(), epsilon = 1e-14);
        assert_abs_diff_eq!(v, 0.44069, epsilon = 1e-5);
        // limit artanh(1/n) near theta = n pi/2 along the threshold schedule
        let p = AngleParams::new(PI - 1e-4, 2).unwrap();
        assert_abs_diff_eq!(
            coverage_depth(&p, p.threshold()).unwrap(),
            0.5_f64.atanh(),
            epsilon = 1e-6
        );
        // unbounded depth comes from the tube bound as r -> threshold
        let p = AngleParams::new(PI - 1e-3, 2).unwrap();
        assert!(delta_lower(&p, p.threshold() * (1.0 + 1e-9)).unwrap() > 5.0);
        // vanishing near theta = (n-1) pi/2
        let p = AngleParams::new(FRAC_PI_2 + 1e-6, 2).unwrap();
        assert!(coverage_depth(&p, p.threshold()).unwrap() < 1e-5);
    }

    #[test]
    fn bound_sandwich_consistency() {
        for &theta in &[FRAC_PI_2 * 1.1, 3.0 * FRAC_PI_4, FRAC_PI_2 * 1.95] {
            let p = AngleParams::new(theta, 2).unwrap();
            for k in 1..20 {
                let r = p.threshold() * (1.0 + 0.3 * k as f64);
                let rep = bound_report(&p, r).unwrap();
                assert!(rep.delta_lower <= rep.dist_upper + 1e-10);
                assert!(rep.coverage_depth <= rep.delta_lower + 1e-10);
            }
        }
    }

    #[test]
    fn tube_dominates_equidistant() {
        // the tube has everywhere-larger shape operator than the equidistant
        // of the same parameter; the curvature solve is decreasing under
        // shape domination, so kappa <= level_curvature pointwise — this is
        // exactly what makes delta_lower <= dist_upper.
        for &theta in &[FRAC_PI_2 * 1.2, 3.0 * FRAC_PI_4, FRAC_PI_2 * 1.8] {
            let p = AngleParams::new(theta, 2).unwrap();
            for &d in &[0.2_f64, 0.6, 1.0, 2.5] {
                assert!(kappa(&p, d).unwrap() <= level_curvature(&p, d).unwrap() + 1e-12);
            }
        }
    }
}
