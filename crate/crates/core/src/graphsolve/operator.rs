//! Grid-level assembly: height derivatives with the polar ghost conventions,
//! Christoffel symbols of the induced metric, pointwise geometry and the
//! stencil rows of the curvature linearization.
//!
//! Grid layout: offset radial nodes ρᵢ = (i + 1/2)h for i = 0..nr−1, periodic
//! angular nodes φⱼ = j·2π/nphi, node index q = i·nphi + j, Dirichlet ring at
//! i = nr−1. A rotationally symmetric profile is the same grid with nphi = 1;
//! all angular stencils then cancel identically. The inward ghost of the
//! center ring is the reflection (−h/2, φ) = (h/2, φ+π).

use crate::error::{Error, Result};
use crate::symcurv::AngleParams;

use super::stencil::{
    first_form, node_geometry, operator_coeffs, NodeGeom, NodeInput, M2,
};

#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    pub nr: usize,
    pub nphi: usize,
    pub h: f64,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nr < 4 {
            return Err(Error::Config(format!(
                "need at least 4 radial rings, got {}",
                self.nr
            )));
        }
        if self.nphi != 1 && (self.nphi < 4 || self.nphi % 2 != 0) {
            return Err(Error::Config(format!(
                "angular resolution must be 1 or an even number >= 4, got {}",
                self.nphi
            )));
        }
        if !(self.h > 0.0) {
            return Err(Error::Config(format!("grid step {} must be > 0", self.h)));
        }
        Ok(())
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.nr * self.nphi
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.nphi + j
    }

    #[inline]
    pub fn rho(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h
    }

    #[inline]
    pub fn phi(&self, j: usize) -> f64 {
        j as f64 * self.hp()
    }

    #[inline]
    pub fn hp(&self) -> f64 {
        std::f64::consts::TAU / self.nphi as f64
    }

    #[inline]
    pub fn is_dirichlet(&self, q: usize) -> bool {
        q / self.nphi == self.nr - 1
    }

    /// Maps an extended index (i possibly −1, j unwrapped) to a real node,
    /// applying the center reflection (−h/2, φ) ↦ (h/2, φ+π).
    #[inline]
    pub fn ghost(&self, i: isize, j: isize) -> (usize, usize) {
        let np = self.nphi as isize;
        let jw = j.rem_euclid(np) as usize;
        if i >= 0 {
            (i as usize, jw)
        } else {
            debug_assert_eq!(i, -1);
            ((-i - 1) as usize, (jw + self.nphi / 2) % self.nphi)
        }
    }

    #[inline]
    fn at(&self, u: &[f64], i: isize, j: isize) -> f64 {
        let (ii, jj) = self.ghost(i, j);
        u[self.idx(ii, jj)]
    }
}

/// Per-node geometry of a height field, plus metric Christoffel symbols at
/// interior nodes.
pub struct Assembled {
    pub spec: GridSpec,
    /// Some(..) at interior nodes, None on the Dirichlet ring.
    pub geoms: Vec<Option<NodeGeom>>,
    /// Γ^k_ab per interior node (k, a, b ∈ {ρ, φ}).
    pub gamma: Vec<[[[f64; 2]; 2]; 2]>,
}

fn node_input(spec: &GridSpec, u: &[f64], i: usize, j: usize) -> NodeInput {
    let h = spec.h;
    let hp = spec.hp();
    let (i, j) = (i as isize, j as isize);
    let uc = spec.at(u, i, j);
    NodeInput {
        rho: spec.rho(i as usize),
        phi: spec.phi(j as usize),
        u: uc,
        ur: (spec.at(u, i + 1, j) - spec.at(u, i - 1, j)) / (2.0 * h),
        up: (spec.at(u, i, j + 1) - spec.at(u, i, j - 1)) / (2.0 * hp),
        urr: (spec.at(u, i + 1, j) - 2.0 * uc + spec.at(u, i - 1, j)) / (h * h),
        urp: (spec.at(u, i + 1, j + 1) - spec.at(u, i + 1, j - 1)
            - spec.at(u, i - 1, j + 1)
            + spec.at(u, i - 1, j - 1))
            / (4.0 * h * hp),
        upp: (spec.at(u, i, j + 1) - 2.0 * uc + spec.at(u, i, j - 1)) / (hp * hp),
    }
}

/// Induced metric at every node. On the Dirichlet ring the radial height
/// derivative uses a 3-point one-sided difference, keeping the metric — and
/// hence the Christoffel symbols one ring in — second-order accurate.
fn metric_field(spec: &GridSpec, u: &[f64]) -> Vec<M2> {
    let h = spec.h;
    let hp = spec.hp();
    let mut out = Vec::with_capacity(spec.n_nodes());
    for i in 0..spec.nr {
        for j in 0..spec.nphi {
            let (ii, jj) = (i as isize, j as isize);
            let uc = u[spec.idx(i, j)];
            let ur = if i == spec.nr - 1 {
                (3.0 * uc - 4.0 * spec.at(u, ii - 1, jj) + spec.at(u, ii - 2, jj))
                    / (2.0 * h)
            } else {
                (spec.at(u, ii + 1, jj) - spec.at(u, ii - 1, jj)) / (2.0 * h)
            };
            let up = (spec.at(u, ii, jj + 1) - spec.at(u, ii, jj - 1)) / (2.0 * hp);
            out.push(first_form(spec.rho(i), spec.phi(j), uc, ur, up));
        }
    }
    out
}

/// Metric at an extended index, applying the reflection parity: g_ρρ and
/// g_φφ are even across the center, g_ρφ is odd.
fn metric_ghost(spec: &GridSpec, field: &[M2], i: isize, j: isize) -> M2 {
    let (ii, jj) = spec.ghost(i, j);
    let mut g = field[spec.idx(ii, jj)];
    if i < 0 {
        g[0][1] = -g[0][1];
        g[1][0] = -g[1][0];
    }
    g
}

pub fn assemble(spec: &GridSpec, u: &[f64], p: &AngleParams) -> Result<Assembled> {
    assemble_impl(spec, u, p, true)
}

/// Like [`assemble`] but tolerates non-convex nodes (their `r_local` is NaN);
/// used by the continuation phase of the Newton solver.
pub fn assemble_relaxed(spec: &GridSpec, u: &[f64], p: &AngleParams) -> Result<Assembled> {
    assemble_impl(spec, u, p, false)
}

fn assemble_impl(
    spec: &GridSpec,
    u: &[f64],
    p: &AngleParams,
    strict: bool,
) -> Result<Assembled> {
    spec.validate()?;
    if u.len() != spec.n_nodes() {
        return Err(Error::Config(format!(
            "height vector length {} does not match grid {}x{}",
            u.len(),
            spec.nr,
            spec.nphi
        )));
    }
    if let Some(bad) = u.iter().find(|v| **v < 0.0 || !v.is_finite()) {
        return Err(Error::Domain(format!("invalid height {bad}")));
    }
    let gfield = metric_field(spec, u);
    let h = spec.h;
    let hp = spec.hp();
    let mut geoms: Vec<Option<NodeGeom>> = vec![None; spec.n_nodes()];
    let mut gamma = vec![[[[0.0; 2]; 2]; 2]; spec.n_nodes()];
    for i in 0..spec.nr - 1 {
        for j in 0..spec.nphi {
            let q = spec.idx(i, j);
            let inp = node_input(spec, u, i, j);
            let geom = node_geometry(&inp, p, q, strict)?;
            // metric derivatives: ∂_ρ g and ∂_φ g by central differences
            let (ii, jj) = (i as isize, j as isize);
            let gp1 = metric_ghost(spec, &gfield, ii + 1, jj);
            let gm1 = metric_ghost(spec, &gfield, ii - 1, jj);
            let ga1 = metric_ghost(spec, &gfield, ii, jj + 1);
            let gb1 = metric_ghost(spec, &gfield, ii, jj - 1);
            let mut dg = [[[0.0; 2]; 2]; 2]; // dg[c][a][b] = ∂_c g_ab
            for a in 0..2 {
                for b in 0..2 {
                    dg[0][a][b] = (gp1[a][b] - gm1[a][b]) / (2.0 * h);
                    dg[1][a][b] = (ga1[a][b] - gb1[a][b]) / (2.0 * hp);
                }
            }
            let ginv = geom.ginv;
            let mut gam = [[[0.0; 2]; 2]; 2];
            for k in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        let mut s = 0.0;
                        for l in 0..2 {
                            s += ginv[k][l]
                                * (dg[a][b][l] + dg[b][a][l] - dg[l][a][b]);
                        }
                        gam[k][a][b] = 0.5 * s;
                    }
                }
            }
            gamma[q] = gam;
            geoms[q] = Some(geom);
        }
    }
    Ok(Assembled { spec: *spec, geoms, gamma })
}

/// Pointwise curvature values; NaN on the Dirichlet ring, where no
/// second-order interior stencil exists.
pub fn curvature_values(asm: &Assembled) -> Vec<f64> {
    asm.geoms
        .iter()
        .map(|g| g.as_ref().map(|g| g.r_local).unwrap_or(f64::NAN))
        .collect()
}

/// Sparse rows of the linearized curvature density
/// L f = −Tr((Id + r²A²)⁻¹·Hess f) + Tr((Id − A²)(Id + r²A²)⁻¹)·f
/// with the Hessian taken in the induced metric. Dirichlet rows are identity.
pub struct LinOp {
    pub n: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
    pub bandwidth: usize,
}

impl LinOp {
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.n);
        self.rows
            .iter()
            .map(|row| row.iter().map(|(c, v)| v * f[*c]).sum())
            .collect()
    }
}

/// Builds the stencil rows. `fixed_r`: Some(r) evaluates all coefficient
/// matrices at that r; None uses each node's local curvature (the Newton
/// Jacobian case). `active`: nodes outside the mask get identity rows.
pub fn lin_rows(asm: &Assembled, fixed_r: Option<f64>, active: Option<&[bool]>) -> LinOp {
    let spec = &asm.spec;
    let n = spec.n_nodes();
    let h = spec.h;
    let hp = spec.hp();
    let mut rows = Vec::with_capacity(n);
    let mut bandwidth = 0usize;
    for q in 0..n {
        let masked = active.map(|m| !m[q]).unwrap_or(false);
        let geom = match (&asm.geoms[q], masked) {
            (Some(g), false) => g,
            _ => {
                rows.push(vec![(q, 1.0)]);
                continue;
            }
        };
        let r = fixed_r.unwrap_or(geom.r_local);
        let co = operator_coeffs(geom, r);
        let gam = &asm.gamma[q];
        let i = (q / spec.nphi) as isize;
        let j = (q % spec.nphi) as isize;
        let mut acc: Vec<(usize, f64)> = Vec::with_capacity(12);
        let mut add = |ii: isize, jj: isize, v: f64| {
            let (a, b) = spec.ghost(ii, jj);
            let col = spec.idx(a, b);
            if let Some(slot) = acc.iter_mut().find(|(c, _)| *c == col) {
                slot.1 += v;
            } else {
                acc.push((col, v));
            }
        };
        // zeroth order
        add(i, j, co.zeroth);
        // −C_ab ∂²_ab f
        let crr = co.c[0][0];
        let crp = co.c[0][1];
        let cpp = co.c[1][1];
        add(i + 1, j, -crr / (h * h));
        add(i - 1, j, -crr / (h * h));
        add(i, j, 2.0 * crr / (h * h));
        add(i, j + 1, -cpp / (hp * hp));
        add(i, j - 1, -cpp / (hp * hp));
        add(i, j, 2.0 * cpp / (hp * hp));
        let cross = -2.0 * crp / (4.0 * h * hp);
        add(i + 1, j + 1, cross);
        add(i - 1, j - 1, cross);
        add(i + 1, j - 1, -cross);
        add(i - 1, j + 1, -cross);
        // +C_ab Γ^k_ab ∂_k f
        let mut grad = [0.0; 2];
        for k in 0..2 {
            let mut s = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    s += co.c[a][b] * gam[k][a][b];
                }
            }
            grad[k] = s;
        }
        add(i + 1, j, grad[0] / (2.0 * h));
        add(i - 1, j, -grad[0] / (2.0 * h));
        add(i, j + 1, grad[1] / (2.0 * hp));
        add(i, j - 1, -grad[1] / (2.0 * hp));
        acc.retain(|(_, v)| *v != 0.0);
        for (c, _) in &acc {
            bandwidth = bandwidth.max(c.abs_diff(q));
        }
        rows.push(acc);
    }
    LinOp { n, rows, bandwidth: bandwidth.max(1) }
}
