//! Dirac-notation constructors, row-order vectorization and the Fourier
//! matrix. Basis indices are 1-based.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use super::operator::Operator;
use super::sparse::CsrMatrix;
use super::state::StateVector;
use crate::error::{Error, Result};

fn check_index(index: usize, size: usize) -> Result<()> {
    if index == 0 || index > size {
        return Err(Error::arg(format!(
            "basis index {index} outside 1..={size}"
        )));
    }
    Ok(())
}

pub fn ket(index: usize, size: usize) -> Result<StateVector> {
    check_index(index, size)?;
    let mut v = Array1::zeros(size);
    v[index - 1] = C64::new(1.0, 0.0);
    Ok(StateVector::new(v))
}

pub fn bra(index: usize, size: usize) -> Result<StateVector> {
    Ok(ket(index, size)?.adjoint())
}

/// `|irow⟩⟨icol|` as a sparse operator.
pub fn ketbra(irow: usize, icol: usize, size: usize) -> Result<Operator> {
    check_index(irow, size)?;
    check_index(icol, size)?;
    Ok(Operator::Sparse(CsrMatrix::from_triplets(
        size,
        size,
        [(irow - 1, icol - 1, C64::new(1.0, 0.0))],
    )))
}

pub fn proj(index: usize, size: usize) -> Result<Operator> {
    ketbra(index, index, size)
}

/// `|v⟩⟨v|` without normalization.
pub fn proj_vector(v: &StateVector) -> Operator {
    let d = v.data();
    Operator::Dense(Array2::from_shape_fn((d.len(), d.len()), |(i, j)| {
        d[i] * d[j].conj()
    }))
}

/// Row-order vectorization: rows are concatenated top to bottom.
pub fn res(m: &Operator) -> StateVector {
    let n = m.dim();
    match m {
        Operator::Dense(a) => StateVector::new(Array1::from_iter(a.iter().copied())),
        Operator::Sparse(s) => {
            let mut v = Array1::zeros(n * n);
            for (r, c, x) in s.iter() {
                v[r * n + c] = x;
            }
            StateVector::new(v)
        }
    }
}

/// Inverse of [`res`]; the length must be a perfect square.
pub fn unres(v: &StateVector) -> Result<Operator> {
    unres_slice(v.as_slice())
}

pub(crate) fn unres_slice(v: &[C64]) -> Result<Operator> {
    let n = exact_sqrt(v.len())
        .ok_or_else(|| Error::arg(format!("vector length {} is not a perfect square", v.len())))?;
    let m = Array2::from_shape_vec((n, n), v.to_vec()).expect("length checked above");
    Ok(Operator::Dense(m))
}

pub(crate) fn exact_sqrt(len: usize) -> Option<usize> {
    let n = (len as f64).sqrt().round() as usize;
    (n * n == len).then_some(n)
}

/// Unnormalized Fourier matrix, entry `(j, k) = exp(2πi·j·k/dim)` for
/// 0-based `j`, `k`.
pub fn fourier_matrix(dim: usize) -> Result<Operator> {
    if dim == 0 {
        return Err(Error::arg("Fourier matrix dimension must be positive"));
    }
    let mut m = Array2::zeros((dim, dim));
    for j in 0..dim {
        for k in 0..dim {
            // Reduce the exponent modulo dim so the roots stay exact at 1 and -1.
            let e = (j * k) % dim;
            m[[j, k]] = root_of_unity(e, dim);
        }
    }
    Ok(Operator::Dense(m))
}

fn root_of_unity(e: usize, dim: usize) -> C64 {
    if e == 0 {
        return C64::new(1.0, 0.0);
    }
    if 2 * e == dim {
        return C64::new(-1.0, 0.0);
    }
    C64::from_polar(1.0, 2.0 * PI * e as f64 / dim as f64)
}
