//! Thin bridge to faer for the dense factorizations we need.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

fn to_faer(m: &Array2<C64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> Array2<C64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Solves `a · x = b` by LU with partial pivoting.
pub fn solve(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let lu = to_faer(a).partial_piv_lu();
    let x = lu.solve(to_faer(b));
    from_faer(x.as_ref())
}

pub fn eigenvalues(m: &Array2<C64>) -> Result<Vec<C64>> {
    to_faer(m)
        .eigenvalues()
        .map_err(|e| Error::Numerical(format!("eigenvalue iteration failed: {e:?}")))
}

/// Eigenvalues and right eigenvectors (as columns).
pub fn eigen(m: &Array2<C64>) -> Result<(Vec<C64>, Array2<C64>)> {
    let evd = to_faer(m)
        .eigen()
        .map_err(|e| Error::Numerical(format!("eigendecomposition failed: {e:?}")))?;
    let s = evd.S();
    let values = (0..m.nrows()).map(|i| s[i]).collect();
    Ok((values, from_faer(evd.U())))
}

/// Ascending real eigenvalues of a Hermitian matrix (lower triangle is read).
pub fn hermitian_eigenvalues(m: &Array2<C64>) -> Result<Vec<f64>> {
    to_faer(m)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("Hermitian eigensolver failed: {e:?}")))
}
