//! Hyperboloid-model primitives for hyperbolic space H^{n+1}.
//!
//! Points live on the upper sheet {⟨v,v⟩ = −1, v₀ > 0} of the hyperboloid in
//! Minkowski space R^{1,n+1} with ⟨x,y⟩ = −x₀y₀ + Σ_{i≥1} xᵢyᵢ. Geodesics,
//! Fermi coordinates over a totally geodesic Hⁿ and tube coordinates around a
//! geodesic are all closed-form in cosh/sinh, so there are no chart
//! singularities anywhere we work.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::symcurv::{eigenvalues, Spectrum, SymMatrix};

/// Raw ambient Minkowski vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinkVec {
    pub coords: Vec<f64>,
}

impl MinkVec {
    pub fn new(coords: Vec<f64>) -> Self {
        MinkVec { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        MinkVec { coords: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Minkowski inner product −x₀y₀ + Σ xᵢyᵢ.
    pub fn dot(&self, other: &MinkVec) -> f64 {
        let mut s = -self.coords[0] * other.coords[0];
        for i in 1..self.coords.len() {
            s += self.coords[i] * other.coords[i];
        }
        s
    }

    pub fn scale(&self, s: f64) -> MinkVec {
        MinkVec { coords: self.coords.iter().map(|v| v * s).collect() }
    }

    pub fn add(&self, other: &MinkVec) -> MinkVec {
        MinkVec {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &MinkVec) -> MinkVec {
        MinkVec {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn axis(dim: usize, k: usize) -> Self {
        let mut v = MinkVec::zeros(dim);
        v.coords[k] = 1.0;
        v
    }
}

/// Point on the upper hyperboloid sheet; renormalized on construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    v: MinkVec,
}

impl HPoint {
    pub fn new(v: MinkVec) -> Result<Self> {
        let q = v.dot(&v);
        if q >= 0.0 || v.coords[0] <= 0.0 {
            return Err(Error::Domain(format!(
                "vector with ⟨v,v⟩ = {q} not on the upper hyperboloid sheet"
            )));
        }
        if (q + 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!(
                "vector too far off the hyperboloid: ⟨v,v⟩ = {q}"
            )));
        }
        Ok(HPoint { v: v.scale(1.0 / (-q).sqrt()) })
    }

    /// Normalizes any timelike, future-pointing vector onto the sheet.
    pub fn project(v: MinkVec) -> Result<Self> {
        let q = v.dot(&v);
        if q >= 0.0 || v.coords[0] <= 0.0 {
            return Err(Error::Domain(
                "cannot project a non-timelike vector to the hyperboloid".into(),
            ));
        }
        Ok(HPoint { v: v.scale(1.0 / (-q).sqrt()) })
    }

    pub fn origin(dim: usize) -> Self {
        HPoint { v: MinkVec::axis(dim, 0) }
    }

    pub fn vec(&self) -> &MinkVec {
        &self.v
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }

    /// Hyperbolic distance arccosh(−⟨x,y⟩), evaluated through the chord
    /// ⟨x−y, x−y⟩ = 2(cosh d − 1) to stay accurate for nearby points.
    pub fn distance(&self, other: &HPoint) -> f64 {
        let diff = self.v.sub(&other.v);
        let chord2 = diff.dot(&diff).max(0.0);
        2.0 * (0.5 * chord2.sqrt()).asinh()
    }
}

/// Unit tangent vector: spacelike unit direction orthogonal to the base point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnitTangent {
    pub base: HPoint,
    pub dir: MinkVec,
}

impl UnitTangent {
    pub fn new(base: HPoint, dir: MinkVec) -> Result<Self> {
        let n = dir.dot(&dir);
        let orth = base.vec().dot(&dir);
        if (n - 1.0).abs() > 1e-10 || orth.abs() > 1e-10 {
            return Err(Error::Domain(format!(
                "not a unit tangent: |dir|² = {n}, ⟨base,dir⟩ = {orth}"
            )));
        }
        // exact re-orthonormalization to stop drift
        let dir = dir.add(&base.vec().scale(orth));
        let dir = dir.scale(1.0 / dir.dot(&dir).sqrt());
        Ok(UnitTangent { base, dir })
    }
}

/// Geodesic point cosh(t)·base + sinh(t)·dir.
pub fn exp_point(u: &UnitTangent, t: f64) -> HPoint {
    let v = u.base.vec().scale(t.cosh()).add(&u.dir.scale(t.sinh()));
    HPoint::project(v).expect("geodesic left the hyperboloid")
}

/// Velocity of the geodesic s ↦ exp_point(u, s) at parameter s, i.e. the
/// parallel transport of `u` along its own geodesic.
pub fn geodesic_velocity(u: &UnitTangent, s: f64) -> UnitTangent {
    let base = exp_point(u, s);
    let dir = u.base.vec().scale(s.sinh()).add(&u.dir.scale(s.cosh()));
    UnitTangent::new(base, dir).expect("transported velocity degenerated")
}

/// Parallel transport of a tangent vector `v` at `u.base` along the geodesic
/// of `u` to distance `t`: the component along `u.dir` rotates with the
/// velocity, the orthogonal component is carried unchanged.
pub fn parallel_transport(u: &UnitTangent, v: &MinkVec, t: f64) -> MinkVec {
    let a = v.dot(&u.dir);
    let perp = v.sub(&u.dir.scale(a));
    let rotated = u.base.vec().scale(t.sinh()).add(&u.dir.scale(t.cosh()));
    perp.add(&rotated.scale(a))
}

/// Point at height u ≥ 0 over x in the totally geodesic Hⁿ = {last coord 0},
/// along the global unit normal e_{n+1}: cosh(u)·x + sinh(u)·e_{n+1}.
pub fn fermi_embed(x: &HPoint, u: f64) -> Result<HPoint> {
    if u < 0.0 {
        return Err(Error::Domain(format!("height u = {u} must be >= 0")));
    }
    let dim = x.dim();
    let last = x.vec().coords[dim - 1];
    if last.abs() > 1e-10 {
        return Err(Error::Domain(format!(
            "base point has last coordinate {last}; not on the totally geodesic Hⁿ"
        )));
    }
    let v = x
        .vec()
        .scale(u.cosh())
        .add(&MinkVec::axis(dim, dim - 1).scale(u.sinh()));
    HPoint::project(v)
}

/// Point at distance d > 0 from the axis geodesic γ(s) = (cosh s, sinh s, 0…)
/// in the parallel normal direction w ∈ S^{n−1} (coordinates along
/// e₂,…,e_{n+1}): cosh(d)·γ(s) + sinh(d)·W.
pub fn tube_embed(s: f64, w: &[f64], d: f64, dim: usize) -> Result<HPoint> {
    if d <= 0.0 {
        return Err(Error::Domain(format!("tube radius d = {d} must be > 0")));
    }
    if w.len() != dim - 2 {
        return Err(Error::Config(format!(
            "normal direction has {} components, expected {}",
            w.len(),
            dim - 2
        )));
    }
    let nrm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (nrm - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("|w| = {nrm}, expected a unit vector")));
    }
    let mut v = MinkVec::zeros(dim);
    v.coords[0] = d.cosh() * s.cosh();
    v.coords[1] = d.cosh() * s.sinh();
    for (k, wk) in w.iter().enumerate() {
        v.coords[k + 2] = d.sinh() * wk;
    }
    HPoint::project(v)
}

/// Distance from a point to the axis geodesic of [`tube_embed`]:
/// arccosh(sqrt(x₀² − x₁²)).
pub fn distance_to_axis(p: &HPoint) -> f64 {
    let c = p.vec().coords[0];
    let s = p.vec().coords[1];
    (c * c - s * s).max(1.0).sqrt().acosh()
}

/// Evolution of principal curvatures under unit-speed normal flow: each
/// eigenvalue solves λ' = 1 − λ², so
///
/// ```text
/// λ(d) = tanh(d + artanh λ₀)   for |λ₀| < 1,
/// λ(d) = ±1                    for λ₀ = ±1,
/// λ(d) = coth(d + arcoth λ₀)   for |λ₀| > 1,
/// ```
///
/// with blow-up in finite distance only for λ₀ < −1.
pub fn normal_flow_shape(lambda0: &Spectrum, d: f64) -> Result<Spectrum> {
    if d < 0.0 {
        return Err(Error::Domain(format!("flow distance d = {d} must be >= 0")));
    }
    let mut out = Vec::with_capacity(lambda0.len());
    for &l in lambda0.values() {
        if l < -1.0 {
            // coth(d + arccoth l) with arccoth l < 0: pole at d = −arccoth l.
            let critical = -0.5 * ((l + 1.0) / (l - 1.0)).ln();
            if d >= critical - 1e-12 {
                return Err(Error::FlowSingularity { critical, requested: d });
            }
            let a = 0.5 * ((l + 1.0) / (l - 1.0)).ln(); // arccoth(l)
            out.push(1.0 / (d + a).tanh());
        } else if (l + 1.0).abs() <= 1e-14 {
            out.push(-1.0);
        } else if l < 1.0 {
            out.push((d + l.atanh()).tanh());
        } else if (l - 1.0).abs() <= 1e-14 {
            out.push(1.0);
        } else {
            let a = 0.5 * ((l + 1.0) / (l - 1.0)).ln(); // arccoth(l) > 0
            out.push(1.0 / (d + a).tanh());
        }
    }
    Ok(Spectrum::new(out))
}

/// First and second fundamental forms plus the shape operator of a
/// parametrized patch at one node.
///
/// `A` is stored in I-orthonormalized form L⁻¹·II·L⁻ᵀ (I = L·Lᵀ Cholesky),
/// which is symmetric and shares the spectrum of the raw shape operator
/// I⁻¹·II; `shape_raw` carries the unsymmetrized operator for callers that
/// need the mixed tensor itself.
#[derive(Clone, Debug)]
pub struct FundamentalForms {
    pub first: SymMatrix,
    pub second: SymMatrix,
    pub shape: SymMatrix,
    pub shape_raw: Mat,
}

impl FundamentalForms {
    pub fn principal_curvatures(&self) -> Spectrum {
        eigenvalues(&self.shape)
    }
}

fn cholesky(i: &SymMatrix) -> Result<Mat> {
    let n = i.dim();
    let mut l = Mat::zeros(n, n);
    for r in 0..n {
        for c in 0..=r {
            let mut s = i.get(r, c);
            for k in 0..c {
                s -= l[(r, k)] * l[(c, k)];
            }
            if r == c {
                if s <= 0.0 {
                    return Err(Error::NotImmersed { cond: f64::INFINITY });
                }
                l[(r, c)] = s.sqrt();
            } else {
                l[(r, c)] = s / l[(c, c)];
            }
        }
    }
    Ok(l)
}

fn lower_solve(l: &Mat, b: &[f64]) -> Vec<f64> {
    let n = l.rows;
    let mut x = b.to_vec();
    for r in 0..n {
        for k in 0..r {
            let f = l[(r, k)] * x[k];
            x[r] -= f;
        }
        x[r] /= l[(r, r)];
    }
    x
}

/// Future-pointing-orthogonal unit normal of a frame {pos, X₁,…,X_d} in
/// Minkowski R^{1,d+1}, via the generalized cross product (cofactor
/// expansion of the frame matrix).
fn minkowski_normal(pos: &MinkVec, tangents: &[MinkVec]) -> Result<MinkVec> {
    let dim = pos.dim();
    let rows = 1 + tangents.len();
    debug_assert_eq!(rows + 1, dim);
    // Rows are J·pos, J·Xᵢ so that B·x = 0 ⇔ Minkowski-orthogonality.
    let mut b = Mat::zeros(rows, dim);
    for j in 0..dim {
        let sgn = if j == 0 { -1.0 } else { 1.0 };
        b[(0, j)] = sgn * pos.coords[j];
        for (r, t) in tangents.iter().enumerate() {
            b[(r + 1, j)] = sgn * t.coords[j];
        }
    }
    let mut x = MinkVec::zeros(dim);
    for k in 0..dim {
        // minor with column k deleted
        let mut m = Mat::zeros(rows, rows);
        for r in 0..rows {
            let mut cc = 0;
            for j in 0..dim {
                if j == k {
                    continue;
                }
                m[(r, cc)] = b[(r, j)];
                cc += 1;
            }
        }
        let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
        x.coords[k] = sgn * det_real(&m);
    }
    let q = x.dot(&x);
    if !(q > 0.0) {
        return Err(Error::NotImmersed { cond: f64::INFINITY });
    }
    Ok(x.scale(1.0 / q.sqrt()))
}

fn det_real(a: &Mat) -> f64 {
    let n = a.rows;
    let mut m = a.clone();
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[(r, col)].abs() > m[(piv, col)].abs() {
                piv = r;
            }
        }
        if m[(piv, col)] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..n {
                m.data.swap(col * n + j, piv * n + j);
            }
            det = -det;
        }
        let d = m[(col, col)];
        det *= d;
        for r in col + 1..n {
            let f = m[(r, col)] / d;
            for j in col..n {
                let v = m[(col, j)];
                m[(r, j)] -= f * v;
            }
        }
    }
    det
}

/// First/second fundamental forms and shape operator of `patch` at parameter
/// point `at`, by central differences with step `h`.
///
/// The normal is oriented so that the mean curvature (trace of the shape
/// operator) is positive, matching the convention that outward-parametrized
/// geodesic spheres are positively curved.
pub fn fundamental_forms<F>(patch: &F, at: &[f64], h: f64) -> Result<FundamentalForms>
where
    F: Fn(&[f64]) -> HPoint,
{
    let d = at.len();
    let center = patch(at);
    let dim = center.dim();
    if dim != d + 2 {
        return Err(Error::Config(format!(
            "patch into H^{} must have {} parameters, got {d}",
            dim - 1,
            dim - 2
        )));
    }
    let shift = |k: usize, s: f64| -> Vec<f64> {
        let mut p = at.to_vec();
        p[k] += s;
        p
    };
    // first derivatives
    let mut tangents = Vec::with_capacity(d);
    for k in 0..d {
        let plus = patch(&shift(k, h));
        let minus = patch(&shift(k, -h));
        tangents.push(plus.vec().sub(minus.vec()).scale(0.5 / h));
    }
    // second derivatives (ambient); the normal component is all we use, so
    // no Christoffel correction is needed.
    let mut second = vec![vec![MinkVec::zeros(dim); d]; d];
    for k in 0..d {
        let plus = patch(&shift(k, h));
        let minus = patch(&shift(k, -h));
        second[k][k] = plus
            .vec()
            .add(minus.vec())
            .sub(&center.vec().scale(2.0))
            .scale(1.0 / (h * h));
    }
    for k in 0..d {
        for l in k + 1..d {
            let mut pp = at.to_vec();
            pp[k] += h;
            pp[l] += h;
            let mut pm = at.to_vec();
            pm[k] += h;
            pm[l] -= h;
            let mut mp = at.to_vec();
            mp[k] -= h;
            mp[l] += h;
            let mut mm = at.to_vec();
            mm[k] -= h;
            mm[l] -= h;
            let v = patch(&pp)
                .vec()
                .sub(patch(&pm).vec())
                .sub(patch(&mp).vec())
                .add(patch(&mm).vec())
                .scale(0.25 / (h * h));
            second[k][l] = v.clone();
            second[l][k] = v;
        }
    }
    // induced metric and conditioning
    let mut ie = vec![0.0; d * d];
    for k in 0..d {
        for l in 0..d {
            ie[k * d + l] = tangents[k].dot(&tangents[l]);
        }
    }
    let first = SymMatrix::new(d, &ie)?;
    let ev = eigenvalues(&first);
    if ev.min() <= 0.0 {
        return Err(Error::NotImmersed { cond: f64::INFINITY });
    }
    let cond = ev.max() / ev.min();
    if cond > 1e8 {
        return Err(Error::NotImmersed { cond });
    }
    let normal = minkowski_normal(center.vec(), &tangents)?;
    // second fundamental form II_kl = −⟨∂²X, N⟩
    let mut iie = vec![0.0; d * d];
    for k in 0..d {
        for l in 0..d {
            iie[k * d + l] = -second[k][l].dot(&normal);
        }
    }
    // orientation: positive mean curvature
    let linv = cholesky(&first)?;
    let mut a_sym = Mat::zeros(d, d);
    // Â = L⁻¹ II L⁻ᵀ computed column-by-column
    let mut cols = Vec::with_capacity(d);
    for c in 0..d {
        let col: Vec<f64> = (0..d).map(|r| iie[r * d + c]).collect();
        cols.push(lower_solve(&linv, &col));
    }
    // now rows: Â = (L⁻¹ (L⁻¹ II)ᵀ)ᵀ
    for r in 0..d {
        let row: Vec<f64> = (0..d).map(|c| cols[c][r]).collect();
        let solved = lower_solve(&linv, &row);
        for c in 0..d {
            a_sym[(r, c)] = solved[c];
        }
    }
    let mut trace: f64 = (0..d).map(|i| a_sym[(i, i)]).sum();
    let mut flip = 1.0;
    if trace < 0.0 {
        flip = -1.0;
        trace = -trace;
        for v in a_sym.data.iter_mut() {
            *v = -*v;
        }
        for v in iie.iter_mut() {
            *v = -*v;
        }
    }
    let _ = trace;
    let second_form = SymMatrix::new(d, &iie)?;
    // raw shape operator I⁻¹ II
    let imat = first.to_mat();
    let iinv = crate::linalg::invert(&imat)?;
    let shape_raw = iinv.matmul(&second_form.to_mat());
    let shape = SymMatrix::new(d, &{
        // symmetrize exactly: Â already symmetric up to roundoff
        let mut e = vec![0.0; d * d];
        for r in 0..d {
            for c in 0..d {
                e[r * d + c] = 0.5 * (a_sym[(r, c)] + a_sym[(c, r)]);
            }
        }
        e
    })?;
    let _ = flip;
    Ok(FundamentalForms { first, second: second_form, shape, shape_raw })
}
