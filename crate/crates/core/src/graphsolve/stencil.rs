//! Pointwise geometry of height graphs over a geodesic polar chart of
//! H² ⊂ H³ (ambient Minkowski R^{1,3}).
//!
//! The base chart b(ρ,φ) = cosh ρ·c + sinh ρ·(cos φ·E₁ + sin φ·E₂) and the
//! vertical direction e₃ are closed-form, so all derivatives of the embedded
//! graph X = cosh(u)·b + sinh(u)·e₃ are exact in the base variables; only the
//! height u and its chart derivatives come from finite differences. A graph
//! with constant height therefore has *exactly* umbilic discrete geometry.

use crate::error::{Error, Result};
use crate::symcurv::{r_theta_spectrum, AngleParams};

pub type V4 = [f64; 4];
pub type M2 = [[f64; 2]; 2];

#[inline]
pub fn mdot(a: &V4, b: &V4) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

#[inline]
fn axpy(out: &mut V4, s: f64, v: &V4) {
    for k in 0..4 {
        out[k] += s * v[k];
    }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Unit spacelike vector Minkowski-orthogonal to the three given vectors,
/// by cofactor expansion of the frame matrix (rows J·a, J·b, J·c).
fn mink_cross(a: &V4, b: &V4, c: &V4) -> Result<V4> {
    let j = |v: &V4| [-v[0], v[1], v[2], v[3]];
    let rows = [j(a), j(b), j(c)];
    let mut n = [0.0; 4];
    for k in 0..4 {
        let mut m = [[0.0; 3]; 3];
        for r in 0..3 {
            let mut cc = 0;
            for col in 0..4 {
                if col == k {
                    continue;
                }
                m[r][cc] = rows[r][col];
                cc += 1;
            }
        }
        let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
        n[k] = sgn * det3(&m);
    }
    let q = mdot(&n, &n);
    if !(q > 1e-300) {
        return Err(Error::NotImmersed { cond: f64::INFINITY });
    }
    let s = 1.0 / q.sqrt();
    Ok([n[0] * s, n[1] * s, n[2] * s, n[3] * s])
}

pub fn inv2(m: &M2) -> M2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ]
}

pub fn mul2(a: &M2, b: &M2) -> M2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn tr2(m: &M2) -> f64 {
    m[0][0] + m[1][1]
}

/// Height and chart derivatives of u at one node.
#[derive(Clone, Copy, Debug)]
pub struct NodeInput {
    pub rho: f64,
    pub phi: f64,
    pub u: f64,
    pub ur: f64,
    pub up: f64,
    pub urr: f64,
    pub urp: f64,
    pub upp: f64,
}

/// Intrinsic data of the embedded graph at one node.
#[derive(Clone, Debug)]
pub struct NodeGeom {
    /// Inverse of the induced metric in (ρ,φ) coordinates.
    pub ginv: M2,
    /// Raw shape operator g⁻¹·II (normal pointing away from the base).
    pub shape: M2,
    /// Principal curvatures, ascending.
    pub lambda: [f64; 2],
    /// Pointwise curvature: the unique r with Σ arctan(r·λᵢ) = θ.
    pub r_local: f64,
    /// Normal component ⟨∂_w, N⟩ of the unit vertical field.
    pub c_v: f64,
}

/// Operator coefficients of the curvature linearization at a chosen r.
#[derive(Clone, Copy, Debug)]
pub struct NodeCoeffs {
    /// Symmetric coefficient matrix of the Hessian term,
    /// C = (g + r²·II·g⁻¹·II)⁻¹ = (Id + r²A²)⁻¹·g⁻¹.
    pub c: M2,
    /// Tr(A·(Id + r²A²)⁻¹) — the r-derivative of Σ arctan(rλ).
    pub trace_am: f64,
    /// Tr((Id − A²)(Id + r²A²)⁻¹) — zeroth-order coefficient.
    pub zeroth: f64,
}

/// Induced metric alone (needs only first derivatives of the height); used
/// for the Christoffel finite differences, including at Dirichlet nodes where
/// the full second-order geometry is not formed.
pub fn first_form(rho: f64, phi: f64, u: f64, ur: f64, up: f64) -> M2 {
    let (sr, cr) = (rho.sinh(), rho.cosh());
    let (sp, cp) = (phi.sin(), phi.cos());
    let b: V4 = [cr, sr * cp, sr * sp, 0.0];
    let br: V4 = [sr, cr * cp, cr * sp, 0.0];
    let bp: V4 = [0.0, -sr * sp, sr * cp, 0.0];
    let e3: V4 = [0.0, 0.0, 0.0, 1.0];
    let (su, cu) = (u.sinh(), u.cosh());
    let mut xr = [0.0; 4];
    axpy(&mut xr, su * ur, &b);
    axpy(&mut xr, cu, &br);
    axpy(&mut xr, cu * ur, &e3);
    let mut xp = [0.0; 4];
    axpy(&mut xp, su * up, &b);
    axpy(&mut xp, cu, &bp);
    axpy(&mut xp, cu * up, &e3);
    [
        [mdot(&xr, &xr), mdot(&xr, &xp)],
        [mdot(&xp, &xr), mdot(&xp, &xp)],
    ]
}

/// Full pointwise geometry from the closed-form base chart plus the node's
/// height derivatives. With `strict` set, a non-convex node is an error;
/// otherwise its geometry is returned with `r_local = NaN` so that a
/// continuation step on the fixed-r angle-sum equation (which is defined for
/// arbitrary shape operators) can move the iterate back into the convex cone.
pub fn node_geometry(
    inp: &NodeInput,
    p: &AngleParams,
    node: usize,
    strict: bool,
) -> Result<NodeGeom> {
    let (sr, cr) = (inp.rho.sinh(), inp.rho.cosh());
    let (sp, cp) = (inp.phi.sin(), inp.phi.cos());
    let b: V4 = [cr, sr * cp, sr * sp, 0.0];
    let br: V4 = [sr, cr * cp, cr * sp, 0.0];
    let bp: V4 = [0.0, -sr * sp, sr * cp, 0.0];
    let brr = b;
    let brp: V4 = [0.0, -cr * sp, cr * cp, 0.0];
    let bpp: V4 = [0.0, -sr * cp, -sr * sp, 0.0];
    let e3: V4 = [0.0, 0.0, 0.0, 1.0];

    let (su, cu) = (inp.u.sinh(), inp.u.cosh());
    let (ur, up, urr, urp, upp) = (inp.ur, inp.up, inp.urr, inp.urp, inp.upp);

    let mut x = [0.0; 4];
    axpy(&mut x, cu, &b);
    axpy(&mut x, su, &e3);
    // unit vertical field ∂_w at X
    let mut v = [0.0; 4];
    axpy(&mut v, su, &b);
    axpy(&mut v, cu, &e3);

    let mut xr = [0.0; 4];
    axpy(&mut xr, su * ur, &b);
    axpy(&mut xr, cu, &br);
    axpy(&mut xr, cu * ur, &e3);
    let mut xp = [0.0; 4];
    axpy(&mut xp, su * up, &b);
    axpy(&mut xp, cu, &bp);
    axpy(&mut xp, cu * up, &e3);

    let mut xrr = [0.0; 4];
    axpy(&mut xrr, cu * ur * ur + su * urr, &b);
    axpy(&mut xrr, 2.0 * su * ur, &br);
    axpy(&mut xrr, cu, &brr);
    axpy(&mut xrr, su * ur * ur + cu * urr, &e3);
    let mut xrp = [0.0; 4];
    axpy(&mut xrp, cu * ur * up + su * urp, &b);
    axpy(&mut xrp, su * ur, &bp);
    axpy(&mut xrp, su * up, &br);
    axpy(&mut xrp, cu, &brp);
    axpy(&mut xrp, su * ur * up + cu * urp, &e3);
    let mut xpp = [0.0; 4];
    axpy(&mut xpp, cu * up * up + su * upp, &b);
    axpy(&mut xpp, 2.0 * su * up, &bp);
    axpy(&mut xpp, cu, &bpp);
    axpy(&mut xpp, su * up * up + cu * upp, &e3);

    let g: M2 = [
        [mdot(&xr, &xr), mdot(&xr, &xp)],
        [mdot(&xp, &xr), mdot(&xp, &xp)],
    ];
    let detg = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if !(detg > 1e-300) || g[0][0] <= 0.0 {
        return Err(Error::NotImmersed { cond: f64::INFINITY });
    }
    let ginv = inv2(&g);

    let mut n = mink_cross(&x, &xr, &xp)?;
    let mut cv = mdot(&v, &n);
    if cv < 0.0 {
        for k in 0..4 {
            n[k] = -n[k];
        }
        cv = -cv;
    }
    if cv < 1e-10 {
        return Err(Error::NotImmersed { cond: f64::INFINITY });
    }

    let ii: M2 = [
        [-mdot(&xrr, &n), -mdot(&xrp, &n)],
        [-mdot(&xrp, &n), -mdot(&xpp, &n)],
    ];
    let shape = mul2(&ginv, &ii);
    let t = tr2(&shape);
    // discriminant in the cancellation-free form (a−d)² + 4bc, exact for
    // (numerically) umbilic nodes where t² − 4·det loses all digits
    let diff = shape[0][0] - shape[1][1];
    let disc = (diff * diff + 4.0 * shape[0][1] * shape[1][0]).max(0.0).sqrt();
    let lambda = [0.5 * (t - disc), 0.5 * (t + disc)];
    if lambda[0] <= 0.0 {
        if strict {
            return Err(Error::NotStrictlyConvex { node: Some(node) });
        }
        return Ok(NodeGeom { ginv, shape, lambda, r_local: f64::NAN, c_v: cv });
    }
    let r_local = r_theta_spectrum(&lambda, p).map_err(|e| match e {
        Error::NotStrictlyConvex { .. } => Error::NotStrictlyConvex { node: Some(node) },
        other => other,
    })?;
    Ok(NodeGeom { ginv, shape, lambda, r_local, c_v: cv })
}

/// Linearization coefficients at the given r (local or externally fixed).
pub fn operator_coeffs(geom: &NodeGeom, r: f64) -> NodeCoeffs {
    let s2 = mul2(&geom.shape, &geom.shape);
    let mut a = [[0.0; 2]; 2]; // Id + r² A²
    for i in 0..2 {
        for j in 0..2 {
            a[i][j] = r * r * s2[i][j] + if i == j { 1.0 } else { 0.0 };
        }
    }
    let m = inv2(&a);
    // C = M·g⁻¹ is symmetric; symmetrize to kill roundoff skew.
    let raw = mul2(&m, &geom.ginv);
    let c: M2 = [
        [raw[0][0], 0.5 * (raw[0][1] + raw[1][0])],
        [0.5 * (raw[0][1] + raw[1][0]), raw[1][1]],
    ];
    let am = mul2(&geom.shape, &m);
    let mut ims = [[0.0; 2]; 2]; // Id − A²
    for i in 0..2 {
        for j in 0..2 {
            ims[i][j] = -s2[i][j] + if i == j { 1.0 } else { 0.0 };
        }
    }
    let z = tr2(&mul2(&ims, &m));
    NodeCoeffs { c, trace_am: tr2(&am), zeroth: z }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn constant_height_is_exactly_umbilic() {
        let p = AngleParams::new(FRAC_PI_2, 2).unwrap();
        let d = 0.85;
        for &(rho, phi) in &[(0.1, 0.0), (0.7, 1.3), (1.4, 4.0)] {
            let inp = NodeInput {
                rho,
                phi,
                u: d,
                ur: 0.0,
                up: 0.0,
                urr: 0.0,
                urp: 0.0,
                upp: 0.0,
            };
            let g = node_geometry(&inp, &p, 0, true).unwrap();
            assert_abs_diff_eq!(g.lambda[0], d.tanh(), epsilon = 1e-13);
            assert_abs_diff_eq!(g.lambda[1], d.tanh(), epsilon = 1e-13);
            assert_abs_diff_eq!(g.c_v, 1.0, epsilon = 1e-13);
            assert_abs_diff_eq!(g.r_local, 1.0 / d.tanh(), epsilon = 1e-12);
        }
    }

    #[test]
    fn spherical_cap_profile_matches_sphere_curvature() {
        // sphere of radius s centered at the chart center:
        // cosh(u(ρ))·cosh(ρ) = cosh(s)
        let p = AngleParams::new(FRAC_PI_2, 2).unwrap();
        let s = 1.2_f64;
        let u = |rho: f64| (s.cosh() / rho.cosh()).acosh();
        let rho = 0.4;
        let h = 1e-5;
        let inp = NodeInput {
            rho,
            phi: 0.7,
            u: u(rho),
            ur: (u(rho + h) - u(rho - h)) / (2.0 * h),
            up: 0.0,
            urr: (u(rho + h) - 2.0 * u(rho) + u(rho - h)) / (h * h),
            urp: 0.0,
            upp: 0.0,
        };
        let g = node_geometry(&inp, &p, 0, true).unwrap();
        // geodesic sphere: both principal curvatures coth(s)
        assert_abs_diff_eq!(g.lambda[0], 1.0 / s.tanh(), epsilon = 1e-5);
        assert_abs_diff_eq!(g.lambda[1], 1.0 / s.tanh(), epsilon = 1e-5);
        assert_abs_diff_eq!(g.r_local, s.tanh(), epsilon = 1e-5);
    }

    #[test]
    fn umbilic_operator_coefficients() {
        let p = AngleParams::new(3.0 * std::f64::consts::FRAC_PI_4, 2).unwrap();
        let d = 0.9;
        let inp = NodeInput {
            rho: 0.5,
            phi: 0.2,
            u: d,
            ur: 0.0,
            up: 0.0,
            urr: 0.0,
            urp: 0.0,
            upp: 0.0,
        };
        let g = node_geometry(&inp, &p, 0, true).unwrap();
        let r = g.r_local;
        let co = operator_coeffs(&g, r);
        let l = d.tanh();
        let denom = 1.0 + r * r * l * l;
        assert_abs_diff_eq!(co.trace_am, 2.0 * l / denom, epsilon = 1e-12);
        assert_abs_diff_eq!(co.zeroth, 2.0 * (1.0 - l * l) / denom, epsilon = 1e-12);
        // C = (Id + r²A²)⁻¹ g⁻¹ = g⁻¹/denom for umbilic graphs
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(
                    co.c[i][j],
                    g.ginv[i][j] / denom,
                    epsilon = 1e-12
                );
            }
        }
    }
}
