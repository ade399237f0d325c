use std::ops::{Add, Mul, Neg, Sub};

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Storage tag carried by every [`Operator`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Storage {
    Dense,
    Sparse,
}

impl Storage {
    /// Result tag of a binary operation: sparse only if both sides are.
    pub fn join(self, other: Storage) -> Storage {
        if self == Storage::Sparse && other == Storage::Sparse {
            Storage::Sparse
        } else {
            Storage::Dense
        }
    }
}

/// A square complex matrix, stored densely or in CSR form.
///
/// Arithmetic between two sparse operators stays sparse; any dense operand
/// makes the result dense. Entry accessors use 0-based indices.
#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    Dense(Array2<C64>),
    Sparse(CsrMatrix),
}

impl Operator {
    pub fn from_dense(m: Array2<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::arg(format!(
                "operator must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Operator::Dense(m))
    }

    pub fn from_sparse(m: CsrMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::arg(format!(
                "operator must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Operator::Sparse(m))
    }

    /// Dense operator from real row-major rows. Handy for small literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::arg("rows must form a square matrix"));
        }
        Ok(Operator::Dense(Array2::from_shape_fn((n, n), |(i, j)| {
            C64::new(rows[i][j], 0.0)
        })))
    }

    pub fn zeros(n: usize, storage: Storage) -> Self {
        match storage {
            Storage::Dense => Operator::Dense(Array2::zeros((n, n))),
            Storage::Sparse => Operator::Sparse(CsrMatrix::zeros(n, n)),
        }
    }

    pub fn identity(n: usize, storage: Storage) -> Self {
        match storage {
            Storage::Dense => Operator::Dense(Array2::eye(n)),
            Storage::Sparse => Operator::Sparse(CsrMatrix::identity(n)),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Operator::Dense(m) => m.nrows(),
            Operator::Sparse(m) => m.nrows(),
        }
    }

    pub fn storage(&self) -> Storage {
        match self {
            Operator::Dense(_) => Storage::Dense,
            Operator::Sparse(_) => Storage::Sparse,
        }
    }

    pub fn is_sparse(&self) -> bool {
        self.storage() == Storage::Sparse
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        match self {
            Operator::Dense(m) => m[[row, col]],
            Operator::Sparse(m) => m.get(row, col),
        }
    }

    pub fn to_dense(&self) -> Array2<C64> {
        match self {
            Operator::Dense(m) => m.clone(),
            Operator::Sparse(m) => m.to_dense(),
        }
    }

    pub fn to_sparse(&self) -> CsrMatrix {
        match self {
            Operator::Dense(m) => CsrMatrix::from_dense(&m.view()),
            Operator::Sparse(m) => m.clone(),
        }
    }

    pub fn into_storage(self, storage: Storage) -> Operator {
        match (self, storage) {
            (Operator::Sparse(m), Storage::Dense) => Operator::Dense(m.to_dense()),
            (Operator::Dense(m), Storage::Sparse) => {
                Operator::Sparse(CsrMatrix::from_dense(&m.view()))
            }
            (op, _) => op,
        }
    }

    /// Number of stored entries (all `dim²` for dense storage).
    pub fn nnz(&self) -> usize {
        match self {
            Operator::Dense(m) => m.len(),
            Operator::Sparse(m) => m.nnz(),
        }
    }

    /// Non-zero entries as `(row, col, value)`, row-major.
    pub fn entries(&self) -> Vec<(usize, usize, C64)> {
        match self {
            Operator::Dense(m) => m
                .indexed_iter()
                .filter(|(_, v)| **v != C64::new(0.0, 0.0))
                .map(|((r, c), v)| (r, c, *v))
                .collect(),
            Operator::Sparse(m) => m.iter().collect(),
        }
    }

    pub fn adjoint(&self) -> Operator {
        match self {
            Operator::Dense(m) => Operator::Dense(m.t().mapv(|v| v.conj())),
            Operator::Sparse(m) => Operator::Sparse(m.adjoint()),
        }
    }

    pub fn transpose(&self) -> Operator {
        match self {
            Operator::Dense(m) => Operator::Dense(m.t().to_owned()),
            Operator::Sparse(m) => Operator::Sparse(m.transpose()),
        }
    }

    pub fn conj(&self) -> Operator {
        match self {
            Operator::Dense(m) => Operator::Dense(m.mapv(|v| v.conj())),
            Operator::Sparse(m) => Operator::Sparse(m.conj()),
        }
    }

    pub fn scale(&self, s: C64) -> Operator {
        match self {
            Operator::Dense(m) => Operator::Dense(m * s),
            Operator::Sparse(m) => Operator::Sparse(m.scale(s)),
        }
    }

    /// `self + s * other`, panicking on dimension mismatch.
    pub fn add_scaled(&self, other: &Operator, s: C64) -> Operator {
        assert_eq!(self.dim(), other.dim(), "operator dimension mismatch");
        match (self, other) {
            (Operator::Sparse(a), Operator::Sparse(b)) => Operator::Sparse(a.add_scaled(b, s)),
            (Operator::Dense(a), b) => {
                let mut out = a.clone();
                for (r, c, v) in b.entries() {
                    out[[r, c]] += s * v;
                }
                Operator::Dense(out)
            }
            (Operator::Sparse(a), Operator::Dense(b)) => {
                let mut out = b * s;
                for (r, c, v) in a.iter() {
                    out[[r, c]] += v;
                }
                Operator::Dense(out)
            }
        }
    }

    pub fn matmul(&self, other: &Operator) -> Operator {
        assert_eq!(self.dim(), other.dim(), "operator dimension mismatch");
        match (self, other) {
            (Operator::Sparse(a), Operator::Sparse(b)) => Operator::Sparse(a.matmul(b)),
            (Operator::Dense(a), Operator::Dense(b)) => Operator::Dense(a.dot(b)),
            (Operator::Sparse(a), Operator::Dense(b)) => {
                let mut out = Array2::zeros(b.dim());
                a.mul_dense_into(&b.view(), &mut out.view_mut());
                Operator::Dense(out)
            }
            (Operator::Dense(a), Operator::Sparse(b)) => {
                let mut out = Array2::zeros(a.dim());
                b.dense_mul_into(&a.view(), &mut out.view_mut());
                Operator::Dense(out)
            }
        }
    }

    /// Kronecker product; sparse only when both factors are sparse.
    pub fn kron(&self, other: &Operator) -> Operator {
        match (self, other) {
            (Operator::Sparse(a), Operator::Sparse(b)) => Operator::Sparse(a.kron(b)),
            _ => {
                let a = self.to_dense();
                let b = other.to_dense();
                let (n, m) = (a.nrows(), b.nrows());
                Operator::Dense(Array2::from_shape_fn((n * m, n * m), |(r, c)| {
                    a[[r / m, c / m]] * b[[r % m, c % m]]
                }))
            }
        }
    }

    pub fn matvec(&self, x: &Array1<C64>) -> Array1<C64> {
        match self {
            Operator::Dense(m) => m.dot(x),
            Operator::Sparse(m) => {
                let mut y = Array1::zeros(m.nrows());
                m.matvec(
                    x.as_slice().expect("contiguous vector"),
                    y.as_slice_mut().expect("contiguous vector"),
                );
                y
            }
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        let d = self.add_scaled(other, C64::new(-1.0, 0.0));
        d.entries()
            .iter()
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn norm_inf(&self) -> f64 {
        match self {
            Operator::Dense(m) => m
                .outer_iter()
                .map(|row| row.iter().map(|v| v.norm()).sum::<f64>())
                .fold(0.0, f64::max),
            Operator::Sparse(m) => m.norm_inf(),
        }
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.entries()
            .iter()
            .map(|(_, _, v)| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.entries()
            .iter()
            .all(|(_, _, v)| v.re.is_finite() && v.im.is_finite())
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.add_scaled(rhs, C64::new(1.0, 0.0))
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.add_scaled(rhs, C64::new(-1.0, 0.0))
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.matmul(rhs)
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(C64::new(-1.0, 0.0))
    }
}
