//! Symmetric-matrix algebra and the special Lagrangian curvature functions.
//!
//! For a symmetric matrix `A` with eigenvalues `λ_1 ≤ … ≤ λ_n` we work with
//!
//! ```text
//! arctan(A) = Σ arctan(λ_i),        SL_r(A) = arctan(r A),
//! R_θ(A)    = the unique r > 0 with SL_r(A) = θ   (A positive definite),
//! ```
//!
//! together with the zeroth-order coefficient `Tr((Id − A²)(Id + r²A²)⁻¹)`
//! of the linearized curvature operator and the scalar inequalities that
//! control its sign.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{det_complex, Mat};
use crate::tolerances::CMP_TOL;

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 8;

/// Symmetric n x n matrix, 2 <= n <= 8. Construction symmetrizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    entries: Vec<f64>, // row-major
}

impl SymMatrix {
    pub fn new(n: usize, entries: &[f64]) -> Result<Self> {
        if !(MIN_DIM..=MAX_DIM).contains(&n) {
            return Err(Error::Config(format!(
                "dimension {n} outside supported range [{MIN_DIM},{MAX_DIM}]"
            )));
        }
        if entries.len() != n * n {
            return Err(Error::Config(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                e[i * n + j] = 0.5 * (entries[i * n + j] + entries[j * n + i]);
            }
        }
        Ok(SymMatrix { n, entries: e })
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let mut e = vec![0.0; n * n];
        for (i, v) in values.iter().enumerate() {
            e[i * n + i] = *v;
        }
        SymMatrix::new(n, &e)
    }

    pub fn identity(n: usize) -> Result<Self> {
        SymMatrix::diagonal(&vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        let mut out = self.clone();
        out.entries.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.n != other.n {
            return Err(Error::Config("dimension mismatch in subtraction".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a -= b;
        }
        Ok(out)
    }

    /// Conjugation Q A Qᵀ by an arbitrary square matrix Q.
    pub fn conjugate(&self, q: &Mat) -> Result<SymMatrix> {
        if q.rows != self.n || q.cols != self.n {
            return Err(Error::Config("conjugation dimension mismatch".into()));
        }
        let a = self.to_mat();
        let qa = q.matmul(&a);
        let qaqt = qa.matmul(&q.transpose());
        SymMatrix::new(self.n, &qaqt.data)
    }

    pub fn to_mat(&self) -> Mat {
        Mat { rows: self.n, cols: self.n, data: self.entries.clone() }
    }
}

/// Sorted principal curvatures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| a.partial_cmp(b).expect("non-finite eigenvalue"));
        Spectrum { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.values[0] > 0.0
    }
}

/// Angle parameter θ ∈ (0, nπ/2) for the curvature operator R_θ.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AngleParams {
    pub theta: f64,
    pub n: usize,
}

impl AngleParams {
    pub fn new(theta: f64, n: usize) -> Result<Self> {
        if !(MIN_DIM..=MAX_DIM).contains(&n) {
            return Err(Error::Config(format!(
                "dimension {n} outside supported range [{MIN_DIM},{MAX_DIM}]"
            )));
        }
        let upper = n as f64 * std::f64::consts::FRAC_PI_2;
        if !(theta > 0.0 && theta < upper) {
            return Err(Error::Domain(format!(
                "theta = {theta} outside (0, n*pi/2) = (0, {upper})"
            )));
        }
        Ok(AngleParams { theta, n })
    }

    /// θ ≥ (n-1)π/2, the regime where the zeroth-order coefficient is
    /// controlled.
    pub fn hyperbolic_regime(&self) -> bool {
        self.theta >= (self.n as f64 - 1.0) * std::f64::consts::FRAC_PI_2 - 1e-15
    }

    /// Umbilic threshold tan(θ/n).
    pub fn threshold(&self) -> f64 {
        (self.theta / self.n as f64).tan()
    }
}

/// Eigendecomposition by cyclic Jacobi rotations. Returns (spectrum, Q) with
/// A = Q diag(λ) Qᵀ, eigenvalues ascending, columns of Q the matching
/// eigenvectors.
pub fn eigen_decomposition(a: &SymMatrix) -> (Spectrum, Mat) {
    let n = a.n;
    let mut m = a.entries.clone();
    let mut q = Mat::identity(n);
    const MAX_SWEEPS: usize = 50;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0_f64;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(m[i * n + j].abs());
            }
        }
        if off < 1e-15 {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                let apr = m[p * n + r];
                if apr.abs() < 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let arr = m[r * n + r];
                let tau = (arr - app) / (2.0 * apr);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rows/cols p and r
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkr = m[k * n + r];
                    m[k * n + p] = c * mkp - s * mkr;
                    m[k * n + r] = s * mkp + c * mkr;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mrk = m[r * n + k];
                    m[p * n + k] = c * mpk - s * mrk;
                    m[r * n + k] = s * mpk + c * mrk;
                }
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - s * qkr;
                    q[(k, r)] = s * qkp + c * qkr;
                }
            }
        }
    }
    let mut pairs: Vec<(f64, usize)> =
        (0..n).map(|i| (m[i * n + i], i)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let values: Vec<f64> = pairs.iter().map(|(v, _)| *v).collect();
    let mut qs = Mat::zeros(n, n);
    for (newcol, (_, oldcol)) in pairs.iter().enumerate() {
        for k in 0..n {
            qs[(k, newcol)] = q[(k, *oldcol)];
        }
    }
    (Spectrum { values }, qs)
}

/// All eigenvalues of a symmetric matrix, ascending.
pub fn eigenvalues(a: &SymMatrix) -> Spectrum {
    eigen_decomposition(a).0
}

/// arctan(A) = Σ arctan(λ_i) ∈ (-nπ/2, nπ/2).
pub fn arctan_matrix(a: &SymMatrix) -> f64 {
    eigenvalues(a).values().iter().map(|l| l.atan()).sum()
}

fn sl_of_spectrum(lambda: &[f64], r: f64) -> f64 {
    lambda.iter().map(|l| (r * l).atan()).sum()
}

fn sl_derivative(lambda: &[f64], r: f64) -> f64 {
    lambda.iter().map(|l| l / (1.0 + r * r * l * l)).sum()
}

/// SL_r(A) = arctan(rA).
pub fn sl_r(a: &SymMatrix, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::Domain(format!("r = {r} must be positive")));
    }
    Ok(sl_of_spectrum(eigenvalues(a).values(), r))
}

/// R_θ on a spectrum of principal curvatures: the unique r > 0 with
/// Σ arctan(r λ_i) = θ. All λ_i must be positive.
pub fn r_theta_spectrum(lambda: &[f64], p: &AngleParams) -> Result<f64> {
    if lambda.len() != p.n {
        return Err(Error::Config(format!(
            "spectrum length {} does not match n = {}",
            lambda.len(),
            p.n
        )));
    }
    if lambda.iter().any(|l| *l <= 0.0) {
        return Err(Error::NotStrictlyConvex { node: None });
    }
    let theta = p.theta;
    // Bracket: SL is strictly increasing in r from 0 to n*pi/2.
    let lam_max = lambda.iter().cloned().fold(f64::MIN, f64::max);
    let mut lo = 1e-12;
    let mut hi = (p.n as f64 * (theta / p.n as f64).tan() / lam_max).max(1.0);
    while sl_of_spectrum(lambda, hi) < theta {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Domain("curvature bracket expansion failed".into()));
        }
    }
    while sl_of_spectrum(lambda, lo) > theta {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::Domain("curvature bracket expansion failed".into()));
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if sl_of_spectrum(lambda, mid) < theta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut r = 0.5 * (lo + hi);
    for _ in 0..5 {
        let f = sl_of_spectrum(lambda, r) - theta;
        let d = sl_derivative(lambda, r);
        if d <= 0.0 {
            break;
        }
        let step = f / d;
        r -= step;
        if r <= lo || r >= hi {
            r = r.clamp(lo, hi);
        }
    }
    debug_assert!((sl_of_spectrum(lambda, r) - theta).abs() <= 1e-11);
    Ok(r)
}

/// R_θ(A): the unique r > 0 with SL_r(A) = θ, for positive definite A.
pub fn r_theta(a: &SymMatrix, p: &AngleParams) -> Result<f64> {
    if a.dim() != p.n {
        return Err(Error::Config(format!(
            "matrix dimension {} does not match n = {}",
            a.dim(),
            p.n
        )));
    }
    r_theta_spectrum(eigenvalues(a).values(), p)
}

/// Zeroth-order coefficient Tr((Id − A²)(Id + r²A²)⁻¹), computed in the
/// eigenbasis as Σ (1 − λ_i²)/(1 + r²λ_i²).
pub fn zeroth_coeff(a: &SymMatrix, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::Domain(format!("r = {r} must be positive")));
    }
    Ok(eigenvalues(a)
        .values()
        .iter()
        .map(|l| (1.0 - l * l) / (1.0 + r * r * l * l))
        .sum())
}

/// Search configuration for [`min_zeroth_coeff`].
#[derive(Clone, Copy, Debug)]
pub struct MinSearch {
    /// Random restarts of the projected descent.
    pub restarts: usize,
    /// Descent iterations per restart.
    pub iterations: usize,
    /// RNG seed.
    pub seed: u64,
}

impl Default for MinSearch {
    fn default() -> Self {
        MinSearch { restarts: 24, iterations: 400, seed: 0x5c1ab }
    }
}

/// Minimum of Φ_m(x) = Σ (1 − x_i²)/(1 + r²x_i²) over the constraint set
/// Θ_m(x) = Σ arctan(r x_i) = θ, x ≥ 0.
///
/// In the angle variables t_i = arctan(r x_i) ∈ [0, π/2] the objective is
/// Σ ((1 + r⁻²) cos² t_i − r⁻²), smooth on the closed simplex slice, so the
/// search combines the two-level critical-point family (t_i ∈ {η, π/2 − η})
/// with random-restart projected gradient descent.
pub fn min_zeroth_coeff(p: &AngleParams, r: f64, search: &MinSearch) -> Result<f64> {
    use rand::{Rng, SeedableRng};
    if !p.hyperbolic_regime() {
        return Err(Error::Domain(format!(
            "theta = {} below (n-1)pi/2; outside hyperbolic regime",
            p.theta
        )));
    }
    if r < p.threshold() - 1e-12 {
        return Err(Error::Domain(format!(
            "r = {r} below threshold tan(theta/n) = {}",
            p.threshold()
        )));
    }
    let m = p.n;
    let theta = p.theta;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let rinv2 = 1.0 / (r * r);
    let phi = |t: &[f64]| -> f64 {
        t.iter().map(|ti| (1.0 + rinv2) * ti.cos().powi(2) - rinv2).sum()
    };

    let mut best = f64::INFINITY;

    // Two-level critical points: k coordinates at η ≥ π/4, m-k at π/2-η.
    for k in 0..=m {
        let denom = 2.0 * k as f64 - m as f64;
        if denom.abs() < 1e-12 {
            continue;
        }
        let eta = (theta - (m - k) as f64 * half_pi) / denom;
        if !(0.0..=half_pi).contains(&eta) {
            continue;
        }
        let mut t = vec![half_pi - eta; m];
        t.iter_mut().take(k).for_each(|v| *v = eta);
        best = best.min(phi(&t));
    }
    // Boundary candidates: j coordinates pinned at π/2, the rest equal.
    for j in 0..m {
        let rest = m - j;
        let share = (theta - j as f64 * half_pi) / rest as f64;
        if !(0.0..=half_pi).contains(&share) {
            continue;
        }
        let mut t = vec![half_pi; m];
        t.iter_mut().take(rest).for_each(|v| *v = share);
        best = best.min(phi(&t));
    }

    // Projected gradient descent on { t : Σ t_i = θ, 0 ≤ t_i ≤ π/2 }.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(search.seed);
    for _ in 0..search.restarts {
        // Random feasible start by rescaling a random positive vector.
        let mut t: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
        let mut sum: f64 = t.iter().sum();
        for v in t.iter_mut() {
            *v *= theta / sum;
        }
        // Clamp and re-balance into the box.
        for _ in 0..50 {
            let mut clamped = false;
            for v in t.iter_mut() {
                if *v > half_pi {
                    *v = half_pi;
                    clamped = true;
                }
            }
            sum = t.iter().sum();
            let free: Vec<usize> =
                (0..m).filter(|&i| t[i] < half_pi - 1e-12).collect();
            if (sum - theta).abs() < 1e-14 || free.is_empty() {
                break;
            }
            let corr = (theta - sum) / free.len() as f64;
            for i in free {
                t[i] += corr;
            }
            if !clamped && (t.iter().sum::<f64>() - theta).abs() < 1e-14 {
                break;
            }
        }
        let mut step = 0.1;
        let mut val = phi(&t);
        for _ in 0..search.iterations {
            // Gradient of Σ (1+r⁻²)cos²t_i projected on Σ t_i = const.
            let g: Vec<f64> =
                t.iter().map(|ti| -(1.0 + rinv2) * (2.0 * ti).sin()).collect();
            let active: Vec<usize> = (0..m)
                .filter(|&i| {
                    !(t[i] <= 1e-14 && g[i] > 0.0)
                        && !(t[i] >= half_pi - 1e-14 && g[i] < 0.0)
                })
                .collect();
            if active.is_empty() {
                break;
            }
            let mean: f64 =
                active.iter().map(|&i| g[i]).sum::<f64>() / active.len() as f64;
            let mut trial = t.clone();
            for &i in &active {
                trial[i] = (t[i] - step * (g[i] - mean)).clamp(0.0, half_pi);
            }
            // Restore the sum constraint over free coordinates.
            let sum: f64 = trial.iter().sum();
            let free: Vec<usize> = (0..m)
                .filter(|&i| trial[i] > 1e-14 && trial[i] < half_pi - 1e-14)
                .collect();
            if !free.is_empty() {
                let corr = (theta - sum) / free.len() as f64;
                for i in free {
                    trial[i] = (trial[i] + corr).clamp(0.0, half_pi);
                }
            }
            if (trial.iter().sum::<f64>() - theta).abs() > 1e-9 {
                step *= 0.5;
                continue;
            }
            let tv = phi(&trial);
            if tv < val {
                t = trial;
                val = tv;
                step *= 1.2;
            } else {
                step *= 0.5;
                if step < 1e-12 {
                    break;
                }
            }
        }
        best = best.min(val);
    }
    Ok(best)
}

/// n sin²(t/n) − m sin²(t/m) for 0 < n < m, t ∈ (0, π/2].
pub fn sin_inequality_margin(n: usize, m: usize, t: f64) -> Result<f64> {
    if n == 0 || n >= m {
        return Err(Error::Domain(format!(
            "need 0 < n < m, got n = {n}, m = {m}"
        )));
    }
    if !(t > 0.0 && t <= std::f64::consts::FRAC_PI_2 + 1e-15) {
        return Err(Error::Domain(format!("t = {t} outside (0, pi/2]")));
    }
    let nf = n as f64;
    let mf = m as f64;
    Ok(nf * (t / nf).sin().powi(2) - mf * (t / mf).sin().powi(2))
}

/// Checks λ_k(A2) ≤ λ_k(A) for all k, given A2 ≤ A in quadratic-form order.
pub fn eigen_monotonicity_check(a: &SymMatrix, a2: &SymMatrix) -> Result<bool> {
    let diff = a.sub(a2)?;
    let dmin = eigenvalues(&diff).min();
    if dmin < -1e-12 {
        return Err(Error::Precondition(format!(
            "A - A2 has eigenvalue {dmin:.3e} < 0: A2 does not lie below A"
        )));
    }
    let la = eigenvalues(a);
    let lb = eigenvalues(a2);
    Ok(lb
        .values()
        .iter()
        .zip(la.values())
        .all(|(b, a)| *b <= *a + CMP_TOL))
}

/// Cross-check route for arctan(A) via the complex determinant Det(I + iA),
/// tracking the continuous branch along t ↦ Det(I + itA). Supported for
/// n ≤ 4 only; used by tests to validate the eigenvalue route.
pub fn arctan_via_determinant(a: &SymMatrix) -> Result<f64> {
    let n = a.dim();
    if n > 4 {
        return Err(Error::Config(
            "determinant cross-check only supported for n <= 4".into(),
        ));
    }
    let norm = a.to_mat().max_abs();
    let steps = (200.0 * (1.0 + norm)).min(20000.0) as usize;
    let mut total = 0.0;
    let mut prev_arg = 0.0; // Det(I) = 1
    for s in 1..=steps {
        let t = s as f64 / steps as f64;
        let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            for j in 0..n {
                m[i][j] = Complex64::new(
                    if i == j { 1.0 } else { 0.0 },
                    t * a.get(i, j),
                );
            }
        }
        let d = det_complex(&m);
        let arg = d.arg();
        let mut delta = arg - prev_arg;
        while delta > std::f64::consts::PI {
            delta -= 2.0 * std::f64::consts::PI;
        }
        while delta < -std::f64::consts::PI {
            delta += 2.0 * std::f64::consts::PI;
        }
        total += delta;
        prev_arg = arg;
    }
    Ok(total)
}

/// Verifies |SL_{R_θ(A)}(A) − θ| ≤ tol as a self-check; exposed for the CLI
/// verify command.
pub fn round_trip_residual(a: &SymMatrix, p: &AngleParams) -> Result<f64> {
    let r = r_theta(a, p)?;
    Ok((sl_r(a, r)? - p.theta).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    pub(crate) fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Mat {
        // QR by Gram-Schmidt on a random Gaussian-ish matrix.
        let mut cols: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0_f64)).collect())
            .collect();
        for j in 0..n {
            for k in 0..j {
                let dot: f64 =
                    (0..n).map(|i| cols[j][i] * cols[k][i]).sum();
                for i in 0..n {
                    cols[j][i] -= dot * cols[k][i];
                }
            }
            let nrm: f64 =
                (0..n).map(|i| cols[j][i] * cols[j][i]).sum::<f64>().sqrt();
            for i in 0..n {
                cols[j][i] /= nrm;
            }
        }
        let mut q = Mat::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                q[(i, j)] = cols[j][i];
            }
        }
        q
    }

    pub(crate) fn random_pd(
        n: usize,
        lo: f64,
        hi: f64,
        rng: &mut ChaCha8Rng,
    ) -> SymMatrix {
        let q = random_orthogonal(n, rng);
        let lambda: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
        SymMatrix::diagonal(&lambda).unwrap().conjugate(&q).unwrap()
    }

    #[test]
    fn eigenvalues_diagonal_and_identity() {
        let a = SymMatrix::diagonal(&[3.0, 1.0, 2.0]).unwrap();
        let s = eigenvalues(&a);
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
        let id = SymMatrix::identity(3).unwrap();
        assert_eq!(eigenvalues(&id).values(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn eigenvalues_2x2_characteristic_roots() {
        // [[2,1],[1,2]]: roots of λ² − 4λ + 3.
        let a = SymMatrix::new(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let s = eigenvalues(&a);
        assert_abs_diff_eq!(s.values()[0], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(s.values()[1], 3.0, epsilon = 1e-13);
    }

    #[test]
    fn eigen_reconstruction_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=8 {
            for _ in 0..20 {
                let a = random_pd(n, -2.0, 3.0, &mut rng);
                let (s, q) = eigen_decomposition(&a);
                let d = SymMatrix::diagonal(s.values()).unwrap();
                let rec = d.conjugate(&q).unwrap();
                let err = rec.sub(&a).unwrap().to_mat().max_abs();
                assert!(err <= 1e-12, "reconstruction error {err} for n = {n}");
            }
        }
    }

    #[test]
    fn dimension_out_of_range_rejected() {
        assert!(SymMatrix::new(1, &[1.0]).is_err());
        assert!(SymMatrix::diagonal(&vec![1.0; 9]).is_err());
    }

    #[test]
    fn arctan_matrix_examples() {
        let zero = SymMatrix::new(2, &[0.0; 4]).unwrap();
        assert_abs_diff_eq!(arctan_matrix(&zero), 0.0, epsilon = 1e-15);
        for n in 2..=8 {
            let id = SymMatrix::identity(n).unwrap();
            assert_abs_diff_eq!(
                arctan_matrix(&id),
                n as f64 * FRAC_PI_4,
                epsilon = 1e-13
            );
        }
        let a = SymMatrix::diagonal(&[1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(
            arctan_matrix(&a),
            FRAC_PI_4 + 2.0_f64.atan(),
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(arctan_matrix(&a), 1.892547, epsilon = 1e-6);
    }

    #[test]
    fn arctan_determinant_route_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=4 {
            for _ in 0..10 {
                let a = random_pd(n, -3.0, 3.0, &mut rng);
                let via_eigen = arctan_matrix(&a);
                let via_det = arctan_via_determinant(&a).unwrap();
                assert_abs_diff_eq!(via_eigen, via_det, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn sl_r_examples() {
        let id = SymMatrix::identity(2).unwrap();
        assert_abs_diff_eq!(sl_r(&id, 1.0).unwrap(), FRAC_PI_2, epsilon = 1e-13);
        let a = SymMatrix::diagonal(&[2.0, 0.5]).unwrap();
        // arctan 2 + arctan 1/2 = pi/2 (tangents multiply to 1)
        assert_abs_diff_eq!(sl_r(&a, 1.0).unwrap(), FRAC_PI_2, epsilon = 1e-13);
        // SL_r -> 0 as r -> 0+
        assert!(sl_r(&a, 1e-9).unwrap() < 1e-8);
        assert!(sl_r(&a, 0.0).is_err());
        assert!(sl_r(&a, -1.0).is_err());
    }

    #[test]
    fn r_theta_examples() {
        let id = SymMatrix::identity(2).unwrap();
        let p = AngleParams::new(FRAC_PI_2, 2).unwrap();
        assert_abs_diff_eq!(r_theta(&id, &p).unwrap(), 1.0, epsilon = 1e-12);

        // lambda * Id -> tan(theta/n)/lambda
        for n in [2usize, 3, 5] {
            let lam = 0.7;
            let a = SymMatrix::identity(n).unwrap().scale(lam);
            let theta = 0.8 * n as f64 * FRAC_PI_2;
            let p = AngleParams::new(theta, n).unwrap();
            assert_abs_diff_eq!(
                r_theta(&a, &p).unwrap(),
                (theta / n as f64).tan() / lam,
                epsilon = 1e-11
            );
        }

        let a = SymMatrix::diagonal(&[2.0, 0.5]).unwrap();
        let p = AngleParams::new(FRAC_PI_2, 2).unwrap();
        assert_abs_diff_eq!(r_theta(&a, &p).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn r_theta_rejects_non_pd_and_bad_theta() {
        let a = SymMatrix::diagonal(&[1.0, -0.1]).unwrap();
        let p = AngleParams::new(FRAC_PI_2, 2).unwrap();
        assert!(matches!(
            r_theta(&a, &p),
            Err(Error::NotStrictlyConvex { .. })
        ));
        assert!(AngleParams::new(PI + 0.1, 2).is_err());
        assert!(AngleParams::new(0.0, 2).is_err());
    }

    #[test]
    fn zeroth_coeff_examples() {
        let id = SymMatrix::identity(3).unwrap();
        assert_abs_diff_eq!(zeroth_coeff(&id, 2.0).unwrap(), 0.0, epsilon = 1e-14);
        let zero = SymMatrix::new(4, &[0.0; 16]).unwrap();
        assert_abs_diff_eq!(zeroth_coeff(&zero, 3.0).unwrap(), 4.0, epsilon = 1e-14);
        let a = SymMatrix::diagonal(&[2.0, 0.5]).unwrap();
        // (1-4)/5 + (1-1/4)/(5/4) = -0.6 + 0.6
        assert_abs_diff_eq!(zeroth_coeff(&a, 1.0).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn min_zeroth_coeff_examples() {
        let search = MinSearch::default();
        // At r = tan(theta/n) the minimum vanishes.
        let p = AngleParams::new(3.0 * FRAC_PI_4, 2).unwrap();
        let r0 = (3.0 * FRAC_PI_4 / 2.0).tan();
        let v = min_zeroth_coeff(&p, r0, &search).unwrap();
        assert!(v.abs() <= 1e-9, "minimum at threshold should vanish, got {v}");

        // Closed form m r^-2 ((1+r^2) cos^2(theta/m) - 1) for r = 2 tan(3pi/8).
        let r = 2.0 * r0;
        let expect = 2.0 / (r * r) * ((1.0 + r * r) * (3.0 * FRAC_PI_4 / 2.0).cos().powi(2) - 1.0);
        let v = min_zeroth_coeff(&p, r, &search).unwrap();
        assert_abs_diff_eq!(v, expect, epsilon = 1e-8);
        assert_abs_diff_eq!(v, 0.2197, epsilon = 1e-3);

        // Boundary case theta = pi/2 (n = 2), r = 1: minimum 0.
        let p = AngleParams::new(FRAC_PI_2, 2).unwrap();
        let v = min_zeroth_coeff(&p, 1.0, &search).unwrap();
        assert!(v.abs() <= 1e-9, "boundary minimum should vanish, got {v}");

        // Outside the hyperbolic regime: error.
        let p = AngleParams::new(0.3, 2).unwrap();
        assert!(min_zeroth_coeff(&p, 1.0, &search).is_err());
    }

    #[test]
    fn sin_inequality_examples() {
        assert_abs_diff_eq!(
            sin_inequality_margin(1, 2, FRAC_PI_2).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            sin_inequality_margin(2, 3, FRAC_PI_2).unwrap(),
            0.25,
            epsilon = 1e-14
        );
        let v = sin_inequality_margin(1, 2, FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(v, 0.2071, epsilon = 1e-4);
        assert!(sin_inequality_margin(3, 2, 1.0).is_err());
        assert!(sin_inequality_margin(2, 2, 1.0).is_err());
    }

    #[test]
    fn eigen_monotonicity_examples() {
        let a = SymMatrix::diagonal(&[3.0, 1.0]).unwrap();
        assert!(eigen_monotonicity_check(&a, &a).unwrap());
        let id = SymMatrix::identity(2).unwrap();
        let zero = SymMatrix::new(2, &[0.0; 4]).unwrap();
        assert!(eigen_monotonicity_check(&id, &zero).unwrap());
        // rank-one downdate by v vᵀ, v = (1,1)
        let down = SymMatrix::new(2, &[3.0 - 1.0, -1.0, -1.0, 1.0 - 1.0]).unwrap();
        assert!(eigen_monotonicity_check(&a, &down).unwrap());
        // violated hypothesis: A2 above A
        let above = SymMatrix::diagonal(&[4.0, 2.0]).unwrap();
        assert!(matches!(
            eigen_monotonicity_check(&a, &above),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sl_monotone_in_r_and_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let n = rng.gen_range(2..=4);
            let a = random_pd(n, 0.05, 4.0, &mut rng);
            let r1: f64 = rng.gen_range(0.01..2.0);
            let r2 = r1 + rng.gen_range(0.01..2.0);
            assert!(sl_r(&a, r1).unwrap() < sl_r(&a, r2).unwrap());
            let lo = (n as f64 - 1.0) * FRAC_PI_2;
            let hi = n as f64 * FRAC_PI_2;
            let theta = rng.gen_range(lo..hi * 0.999);
            let p = AngleParams::new(theta, n).unwrap();
            let r = r_theta(&a, &p).unwrap();
            assert!((sl_r(&a, r).unwrap() - theta).abs() <= 1e-10);
        }
    }

    #[test]
    fn r_theta_orthogonal_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.gen_range(2..=5);
            let a = random_pd(n, 0.1, 3.0, &mut rng);
            let q = random_orthogonal(n, &mut rng);
            let theta = rng.gen_range(0.5..n as f64 * FRAC_PI_2 * 0.98);
            let p = AngleParams::new(theta, n).unwrap();
            let r1 = r_theta(&a, &p).unwrap();
            let r2 = r_theta(&a.conjugate(&q).unwrap(), &p).unwrap();
            assert!((r1 - r2).abs() <= 1e-10);
        }
    }
}
