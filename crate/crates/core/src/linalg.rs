//! Small dense and banded linear algebra helpers.
//!
//! Everything here works on plain `Vec<f64>` row-major storage. Problem sizes
//! are tiny (matrix dimension at most 8 for the curvature algebra, a few
//! thousand unknowns for the banded graph systems), so simple pivoted
//! elimination is both fast enough and fully deterministic.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_dense(a: &Mat, b: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(a.rows, a.cols);
    assert_eq!(a.rows, b.len());
    let n = a.rows;
    let mut m = a.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[(r, col)].abs() > m[(piv, col)].abs() {
                piv = r;
            }
        }
        if m[(piv, col)].abs() < 1e-300 {
            return Err(Error::Domain("singular matrix in dense solve".into()));
        }
        if piv != col {
            for j in 0..n {
                m.data.swap(col * n + j, piv * n + j);
            }
            x.swap(col, piv);
        }
        let d = m[(col, col)];
        for r in col + 1..n {
            let f = m[(r, col)] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                let v = m[(col, j)];
                m[(r, j)] -= f * v;
            }
            x[r] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for j in col + 1..n {
            s -= m[(col, j)] * x[j];
        }
        x[col] = s / m[(col, col)];
    }
    Ok(x)
}

/// Inverse of a small dense matrix.
pub fn invert(a: &Mat) -> Result<Mat> {
    let n = a.rows;
    let mut out = Mat::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        let col = solve_dense(a, &e)?;
        for i in 0..n {
            out[(i, j)] = col[i];
        }
    }
    Ok(out)
}

/// Banded matrix with `kl` sub- and `ku` super-diagonals.
///
/// Storage follows the LAPACK general-band layout with `kl` extra
/// superdiagonal rows so that LU with partial pivoting can fill in place:
/// entry (i,j) lives at `ab[(kl + ku + i - j) * n + j]`.
pub struct Banded {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    ab: Vec<f64>,
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Banded { n, kl, ku, ab: vec![0.0; ldab * n] }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let r = (self.kl + self.ku) as isize + i as isize - j as isize;
        debug_assert!(
            i as isize - (j as isize) <= self.kl as isize
                && j as isize - (i as isize) <= self.ku as isize,
            "entry ({i},{j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        r as usize * self.n + j
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let at = self.idx(i, j);
        self.ab[at] += v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i >= self.n || j >= self.n {
            return 0.0;
        }
        if i as isize - (j as isize) > self.kl as isize
            || j as isize - (i as isize) > self.ku as isize
        {
            return 0.0;
        }
        let r = (self.kl + self.ku) as isize + i as isize - j as isize;
        self.ab[r as usize * self.n + j]
    }

    /// LU factorization with partial pivoting followed by a solve.
    pub fn solve(mut self, b: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        let kuf = ku + kl; // superdiagonals after pivot fill
        let mut x = b.to_vec();
        let idx = |i: usize, j: usize| -> usize {
            ((kl + ku) as isize + i as isize - j as isize) as usize * n + j
        };
        for col in 0..n {
            let last = (col + kl).min(n - 1);
            let mut piv = col;
            let mut best = self.ab[idx(col, col)].abs();
            for r in col + 1..=last {
                let v = self.ab[idx(r, col)].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-300 {
                return Err(Error::Domain("singular banded system".into()));
            }
            if piv != col {
                let jmax = (col + kuf).min(n - 1);
                for j in col..=jmax {
                    self.ab.swap(idx(col, j), idx(piv, j));
                }
                x.swap(col, piv);
            }
            let d = self.ab[idx(col, col)];
            let jmax = (col + kuf).min(n - 1);
            for r in col + 1..=last {
                let f = self.ab[idx(r, col)] / d;
                if f != 0.0 {
                    for j in col + 1..=jmax {
                        self.ab[idx(r, j)] -= f * self.ab[idx(col, j)];
                    }
                    x[r] -= f * x[col];
                }
            }
        }
        for col in (0..n).rev() {
            let jmax = (col + kuf).min(n - 1);
            let mut s = x[col];
            for j in col + 1..=jmax {
                s -= self.ab[idx(col, j)] * x[j];
            }
            x[col] = s / self.ab[idx(col, col)];
        }
        Ok(x)
    }
}

/// Determinant of a small complex matrix by Gaussian elimination.
pub fn det_complex(a: &[Vec<Complex64>]) -> Complex64 {
    let n = a.len();
    let mut m: Vec<Vec<Complex64>> = a.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r][col].norm_sqr() > m[piv][col].norm_sqr() {
                piv = r;
            }
        }
        if m[piv][col].norm_sqr() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let d = m[col][col];
        det *= d;
        for r in col + 1..n {
            let f = m[r][col] / d;
            for j in col..n {
                let v = m[col][j];
                m[r][j] -= f * v;
            }
        }
    }
    det
}
