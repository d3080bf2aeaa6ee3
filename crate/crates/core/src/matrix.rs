//! Dense matrices for the verification core.
//!
//! Verification is desk-scale by design (n up to a few hundred), so a plain
//! row-major `Vec` is the whole story. [`SymmetricMatrix`] guarantees exact
//! entrywise symmetry by construction, not merely within tolerance; the
//! approximation measures rely on that.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![S::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "ragged row");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix<S> {
        Matrix::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == S::zero() {
                    continue;
                }
                let row_k = other.row(k);
                let out_row = &mut out.data[i * n..(i + 1) * n];
                for j in 0..n {
                    out_row[j] += a * row_k[j];
                }
            }
        }
        out
    }

    /// `self^k` by binary exponentiation.
    pub fn pow(&self, k: u64) -> Matrix<S> {
        let mut result = Matrix::identity(self.n);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.matmul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }

    pub fn add(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, c: S) -> Matrix<S> {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).fold(S::zero(), |acc, (&a, &x)| acc + a * x))
            .collect()
    }

    pub fn max_abs(&self) -> S {
        self.data.iter().fold(S::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix<S>) -> S {
        assert_eq!(self.n, other.n);
        self.data.iter().zip(&other.data).fold(S::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> S {
        let mut worst = S::zero();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn column_sums(&self) -> Vec<S> {
        let mut sums = vec![S::zero(); self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                sums[j] += self[(i, j)];
            }
        }
        sums
    }

    pub fn row_sums(&self) -> Vec<S> {
        (0..self.n).map(|i| self.row(i).iter().fold(S::zero(), |acc, &x| acc + x)).collect()
    }

    /// Count of entries with `|a_ij| > 0`.
    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|&&x| x != S::zero()).count()
    }

    /// Exact symmetrization `(A + A^T) / 2`; both mirror entries are written
    /// from the same computed value.
    pub fn symmetrized(&self) -> SymmetricMatrix<S> {
        let half = S::from_f64(0.5);
        let mut m = Matrix::zeros(self.n);
        for i in 0..self.n {
            m[(i, i)] = self[(i, i)];
            for j in (i + 1)..self.n {
                let v = (self[(i, j)] + self[(j, i)]) * half;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymmetricMatrix(m)
    }

    pub fn quadratic_form(&self, v: &[S]) -> S {
        let mv = self.mul_vec(v);
        v.iter().zip(&mv).fold(S::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn bilinear_form(&self, x: &[S], y: &[S]) -> S {
        let my = self.mul_vec(y);
        x.iter().zip(&my).fold(S::zero(), |acc, (&a, &b)| acc + a * b)
    }
}

impl<S> std::ops::Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.n + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Matrix<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.n + j]
    }
}

/// A dense matrix with `m[i][j] == m[j][i]` exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix<S>(Matrix<S>);

impl<S: Scalar> SymmetricMatrix<S> {
    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix(Matrix::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        SymmetricMatrix(Matrix::identity(n))
    }

    /// Build from the upper triangle; the lower triangle mirrors it exactly.
    pub fn from_fn_upper(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymmetricMatrix(m)
    }

    /// Accept a matrix that is already exactly symmetric.
    pub fn try_new(m: Matrix<S>) -> Result<Self> {
        let asym = m.asymmetry();
        if asym > S::zero() {
            return Err(Error::NotSymmetric(asym.to_f64_lossy()));
        }
        Ok(SymmetricMatrix(m))
    }

    pub fn diagonal(diag: &[S]) -> Self {
        let mut m = Matrix::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        SymmetricMatrix(m)
    }

    pub fn as_matrix(&self) -> &Matrix<S> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.0
    }

    pub fn set_sym(&mut self, i: usize, j: usize, v: S) {
        self.0[(i, j)] = v;
        self.0[(j, i)] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        SymmetricMatrix(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        SymmetricMatrix(self.0.sub(&other.0))
    }

    pub fn scale(&self, c: S) -> Self {
        SymmetricMatrix(self.0.scale(c))
    }
}

impl<S: Scalar> std::ops::Deref for SymmetricMatrix<S> {
    type Target = Matrix<S>;
    fn deref(&self) -> &Matrix<S> {
        &self.0
    }
}
