//! Conformal domain metric by orthogonal projection onto geodesic
//! hyperplanes: per-ball metric g_B and its infimum over a sampled family of
//! inscribed balls.
//!
//! A round ball B(c, α) ⊂ Sⁿ spans the totally geodesic hyperplane
//! P = w⊥ ∩ H^{n+1} with w = (cot α, c/sin α) (spacelike, ⟨w,w⟩ = 1). The
//! geodesic through the ideal point ν = (1, x), x ∈ B, orthogonal to P meets
//! it at the closed-form foot point ν/⟨ν,w⟩ − w; g_B is the pullback of P's
//! hyperbolic metric under x ↦ foot(x). Points of Sⁿ are handled in the
//! global stereographic chart y ↦ (2y, 1 − |y|²)/(1 + |y|²).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::symcurv::{eigenvalues, SymMatrix};
use crate::tolerances::FOOT_STEP;

/// Round ball on Sⁿ: spherical center and angular radius in (0, π).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoundBall {
    center: Vec<f64>,
    alpha: f64,
}

impl RoundBall {
    pub fn new(center: Vec<f64>, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < std::f64::consts::PI) {
            return Err(Error::Config(format!(
                "angular radius {alpha} outside (0, pi)"
            )));
        }
        let norm: f64 = center.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Config(format!(
                "ball center has norm {norm}, expected a unit vector"
            )));
        }
        let center = center.iter().map(|v| v / norm).collect();
        Ok(RoundBall { center, alpha })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Dimension n of the sphere carrying the ball.
    pub fn sphere_dim(&self) -> usize {
        self.center.len() - 1
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        sphere_distance(&self.center, x) < self.alpha
    }

    /// Spacelike unit vector whose Minkowski-orthogonal hyperplane in
    /// H^{n+1} spans ∂B.
    fn plane_vector(&self) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.center.len() + 1);
        w.push(1.0 / self.alpha.tan());
        let s = self.alpha.sin();
        w.extend(self.center.iter().map(|v| v / s));
        w
    }
}

fn sphere_distance(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    dot.clamp(-1.0, 1.0).acos()
}

/// Inverse stereographic chart ℝⁿ → Sⁿ ⊂ ℝ^{n+1} (pole −e_{n+1}).
pub fn chart_to_sphere(y: &[f64]) -> Vec<f64> {
    let n2: f64 = y.iter().map(|v| v * v).sum();
    let s = 1.0 / (1.0 + n2);
    let mut x: Vec<f64> = y.iter().map(|v| 2.0 * v * s).collect();
    x.push((1.0 - n2) * s);
    x
}

/// Chart coordinates of a sphere point with x_{n+1} > −1.
pub fn sphere_to_chart(x: &[f64]) -> Result<Vec<f64>> {
    let last = *x.last().unwrap();
    if last <= -1.0 + 1e-12 {
        return Err(Error::Domain("point at the chart pole".into()));
    }
    Ok(x[..x.len() - 1].iter().map(|v| v / (1.0 + last)).collect())
}

/// Round metric factor (2/(1+|y|²))² of the chart at y.
pub fn round_chart_factor(y: &[f64]) -> f64 {
    let n2: f64 = y.iter().map(|v| v * v).sum();
    (2.0 / (1.0 + n2)).powi(2)
}

fn mink_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = -a[0] * b[0];
    for k in 1..a.len() {
        s += a[k] * b[k];
    }
    s
}

/// Foot point in H^{n+1} of the geodesic through the ideal point over x ∈ Sⁿ
/// orthogonal to the hyperplane of the ball.
fn foot_point(b: &RoundBall, x: &[f64]) -> Result<Vec<f64>> {
    let w = b.plane_vector();
    let mut nu = Vec::with_capacity(x.len() + 1);
    nu.push(1.0);
    nu.extend_from_slice(x);
    let d = mink_dot(&nu, &w);
    if d <= 1e-12 {
        return Err(Error::Domain(
            "point not strictly inside the ball: projection undefined".into(),
        ));
    }
    Ok(nu
        .iter()
        .zip(&w)
        .map(|(nv, wv)| nv / d - wv)
        .collect())
}

/// Pullback metric tensor of g_B at the chart point q, as an n×n matrix in
/// chart coordinates, by central differencing of the foot-point map.
pub fn ball_metric(b: &RoundBall, q: &[f64]) -> Result<Mat> {
    let n = b.sphere_dim();
    if q.len() != n {
        return Err(Error::Config(format!(
            "chart point has {} coordinates, ball lives on S^{n}",
            q.len()
        )));
    }
    if !b.contains(&chart_to_sphere(q)) {
        return Err(Error::Domain("chart point not inside the ball".into()));
    }
    let h = FOOT_STEP;
    // feet at q ± h e_i
    let mut dfeet = Vec::with_capacity(n);
    for i in 0..n {
        let mut yp = q.to_vec();
        yp[i] += h;
        let mut ym = q.to_vec();
        ym[i] -= h;
        let fp = foot_point(b, &chart_to_sphere(&yp))?;
        let fm = foot_point(b, &chart_to_sphere(&ym))?;
        let df: Vec<f64> =
            fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        dfeet.push(df);
    }
    let mut g = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = mink_dot(&dfeet[i], &dfeet[j]);
        }
    }
    // exact symmetry
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (g[(i, j)] + g[(j, i)]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// Domain on Sⁿ described by round balls or a complement of points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum SphericalDomain {
    Ball(RoundBall),
    /// Intersection of finitely many round balls (a lens for two).
    Intersection(Vec<RoundBall>),
    /// Sⁿ minus a finite point set (unit vectors); hyperbolic type requires
    /// at least two removed points.
    Complement { points: Vec<Vec<f64>>, n: usize },
}

impl SphericalDomain {
    pub fn sphere_dim(&self) -> usize {
        match self {
            SphericalDomain::Ball(b) => b.sphere_dim(),
            SphericalDomain::Intersection(bs) => bs[0].sphere_dim(),
            SphericalDomain::Complement { n, .. } => *n,
        }
    }

    /// Verifies the complement contains at least two points (the other two
    /// conformal types carry no comparable hyperbolic metric).
    pub fn require_hyperbolic_type(&self) -> Result<()> {
        match self {
            SphericalDomain::Ball(_) | SphericalDomain::Intersection(_) => Ok(()),
            SphericalDomain::Complement { points, .. } => {
                if points.len() >= 2 {
                    Ok(())
                } else {
                    Err(Error::NotHyperbolicType(format!(
                        "complement of {} point(s) is elliptic or parabolic",
                        points.len()
                    )))
                }
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            SphericalDomain::Ball(b) => b.contains(x),
            SphericalDomain::Intersection(bs) => bs.iter().all(|b| b.contains(x)),
            SphericalDomain::Complement { points, .. } => {
                points.iter().all(|p| sphere_distance(p, x) > 1e-9)
            }
        }
    }

    /// Largest admissible radius of an inscribed ball centered at m.
    fn max_radius_at(&self, m: &[f64]) -> f64 {
        match self {
            SphericalDomain::Ball(b) => b.alpha - sphere_distance(&b.center, m),
            SphericalDomain::Intersection(bs) => bs
                .iter()
                .map(|b| b.alpha - sphere_distance(&b.center, m))
                .fold(f64::INFINITY, f64::min),
            SphericalDomain::Complement { points, .. } => points
                .iter()
                .map(|p| sphere_distance(p, m))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Sphere points steering the center-walk sampler (constraint centers or
    /// removed points).
    fn steering_points(&self) -> Vec<Vec<f64>> {
        match self {
            SphericalDomain::Ball(b) => vec![b.center.clone()],
            SphericalDomain::Intersection(bs) => {
                bs.iter().map(|b| b.center.clone()).collect()
            }
            SphericalDomain::Complement { points, .. } => points.clone(),
        }
    }
}

/// Sampler configuration for the inscribed-ball family.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub random_samples: usize,
    pub arc_steps: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { random_samples: 64, arc_steps: 16, seed: 0x5c1ab }
    }
}

/// Result of the sampled infimum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KpEstimate {
    /// Minimizing tensor in chart coordinates (row-major n×n).
    pub tensor: Vec<f64>,
    pub ball: RoundBall,
    /// Scalar conformal factor relative to the flat chart (geometric mean of
    /// the eigenvalues).
    pub chart_factor: f64,
    /// Scalar factor relative to the round chart metric.
    pub round_factor: f64,
    /// Eigenvalue spread [min, max] of the minimizer relative to the round
    /// metric — a bracketing interval for the sampled infimum.
    pub round_factor_interval: (f64, f64),
    pub samples_used: usize,
}

fn tensor_det(g: &Mat) -> f64 {
    let n = g.rows;
    match n {
        1 => g[(0, 0)],
        2 => g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)],
        _ => {
            let sm = SymMatrix::new(n, &g.data).expect("tensor dims");
            eigenvalues(&sm).values().iter().product()
        }
    }
}

fn unit_tangent_at(x: &[f64], toward: &[f64]) -> Option<Vec<f64>> {
    let dot: f64 = x.iter().zip(toward).map(|(a, b)| a * b).sum();
    let mut v: Vec<f64> =
        toward.iter().zip(x).map(|(t, xv)| t - dot * xv).collect();
    let n: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if n < 1e-12 {
        return None;
    }
    v.iter_mut().for_each(|a| *a /= n);
    Some(v)
}

fn geodesic(x: &[f64], v: &[f64], t: f64) -> Vec<f64> {
    x.iter()
        .zip(v)
        .map(|(xv, vv)| t.cos() * xv + t.sin() * vv)
        .collect()
}

/// Sampled infimum of g_B over inscribed balls through the chart point q:
/// the center of a candidate ball walks along arcs from the point toward
/// each steering point (plus random directions), always taking the largest
/// radius that keeps the ball inside the domain. The reported tensor is the
/// candidate minimizing the volume density (for conformal families this is
/// the Loewner minimum).
pub fn kp_metric(
    domain: &SphericalDomain,
    q: &[f64],
    sampler: &SamplerConfig,
) -> Result<KpEstimate> {
    domain.require_hyperbolic_type()?;
    let n = domain.sphere_dim();
    if q.len() != n {
        return Err(Error::Config(format!(
            "chart point has {} coordinates, domain lives on S^{n}",
            q.len()
        )));
    }
    let x = chart_to_sphere(q);
    if !domain.contains(&x) {
        return Err(Error::Domain("point not inside the domain".into()));
    }
    let mut candidates: Vec<RoundBall> = Vec::new();
    let mut push_center = |m: Vec<f64>| {
        let beta = domain.max_radius_at(&m);
        let need = sphere_distance(&m, &x);
        if beta > need + 1e-12 && beta < std::f64::consts::PI {
            if let Ok(b) = RoundBall::new(m, beta) {
                candidates.push(b);
            }
        }
    };
    // the ball centered at the point itself
    push_center(x.clone());
    // deterministic walks toward (and away from) each steering point
    for s in domain.steering_points() {
        if let Some(v) = unit_tangent_at(&x, &s) {
            let reach = sphere_distance(&x, &s);
            for k in 1..=sampler.arc_steps {
                let t = reach * k as f64 / sampler.arc_steps as f64;
                push_center(geodesic(&x, &v, t));
                push_center(geodesic(&x, &v, -t * 0.25));
            }
        }
    }
    // seeded random directions and step lengths
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    for _ in 0..sampler.random_samples {
        let raw: Vec<f64> = (0..n + 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if let Some(v) = unit_tangent_at(&x, &raw) {
            let t = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
            push_center(geodesic(&x, &v, t));
        }
    }
    if candidates.is_empty() {
        return Err(Error::Domain(
            "no admissible inscribed ball found through the point".into(),
        ));
    }
    let mut best: Option<(f64, Mat, RoundBall)> = None;
    let samples_used = candidates.len();
    for b in candidates {
        let g = ball_metric(&b, q)?;
        let det = tensor_det(&g);
        let better = match &best {
            None => true,
            Some((bd, _, _)) => det < *bd,
        };
        if better {
            best = Some((det, g, b));
        }
    }
    let (det, g, ball) = best.unwrap();
    let chart_factor = det.powf(1.0 / n as f64);
    let round = round_chart_factor(q);
    let sm = SymMatrix::new(n.max(2), &pad_tensor(&g)).expect("tensor dims");
    let ev = eigenvalues(&sm);
    let (emin, emax) = if n == 1 {
        (g[(0, 0)], g[(0, 0)])
    } else {
        (ev.min(), ev.max())
    };
    Ok(KpEstimate {
        tensor: g.data.clone(),
        ball,
        chart_factor,
        round_factor: chart_factor / round,
        round_factor_interval: (emin / round, emax / round),
        samples_used,
    })
}

// SymMatrix supports n >= 2 only; embed a 1×1 tensor as diag(t, t).
fn pad_tensor(g: &Mat) -> Vec<f64> {
    if g.rows >= 2 {
        g.data.clone()
    } else {
        vec![g[(0, 0)], 0.0, 0.0, g[(0, 0)]]
    }
}
