//! Compressed sparse row storage for complex matrices.
//!
//! Column indices inside each row are kept sorted and unique, and exact
//! zeros are never stored. Every constructor enforces this, so equality of
//! two `CsrMatrix` values is equality of the represented matrices.

use ndarray::{Array2, ArrayView2, ArrayViewMut2, Axis};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Row-parallel kernels only pay off once a product does this much work.
const PAR_WORK_THRESHOLD: usize = 1 << 18;

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            data: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: vec![C64::new(1.0, 0.0); n],
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed.
    ///
    /// Panics if an index is out of bounds.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Self {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); nrows];
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            rows[r].push((c, v));
        }
        let mut out = CsrMatrix::zeros(nrows, ncols);
        for (r, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|&(c, _)| c);
            let mut iter = row.into_iter().peekable();
            while let Some((c, mut v)) = iter.next() {
                while let Some(&(c2, v2)) = iter.peek() {
                    if c2 != c {
                        break;
                    }
                    v += v2;
                    iter.next();
                }
                if v != ZERO {
                    out.indices.push(c);
                    out.data.push(v);
                }
            }
            out.indptr[r + 1] = out.indices.len();
        }
        out
    }

    pub fn from_dense(m: &ArrayView2<C64>) -> Self {
        let (nrows, ncols) = m.dim();
        let mut out = CsrMatrix::zeros(nrows, ncols);
        for (r, row) in m.outer_iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v != ZERO {
                    out.indices.push(c);
                    out.data.push(v);
                }
            }
            out.indptr[r + 1] = out.indices.len();
        }
        out
    }

    pub fn to_dense(&self) -> Array2<C64> {
        let mut m = Array2::zeros((self.nrows, self.ncols));
        for (r, c, v) in self.iter() {
            m[[r, c]] = v;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.data[span].iter().copied())
    }

    /// All stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.indptr[r]..self.indptr[r + 1];
        match self.indices[span.clone()].binary_search(&c) {
            Ok(k) => self.data[span.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn transpose(&self) -> Self {
        CsrMatrix::from_triplets(
            self.ncols,
            self.nrows,
            self.iter().map(|(r, c, v)| (c, r, v)),
        )
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn adjoint(&self) -> Self {
        CsrMatrix::from_triplets(
            self.ncols,
            self.nrows,
            self.iter().map(|(r, c, v)| (c, r, v.conj())),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        if s == ZERO {
            return CsrMatrix::zeros(self.nrows, self.ncols);
        }
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out.prune();
        out
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &CsrMatrix, s: C64) -> Self {
        assert_eq!(
            (self.nrows, self.ncols),
            (other.nrows, other.ncols),
            "shape mismatch in sparse addition"
        );
        let mut out = CsrMatrix::zeros(self.nrows, self.ncols);
        out.indices.reserve(self.nnz() + other.nnz());
        out.data.reserve(self.nnz() + other.nnz());
        for r in 0..self.nrows {
            let mut a = self.row(r).peekable();
            let mut b = other.row(r).map(|(c, v)| (c, v * s)).peekable();
            loop {
                let (c, v) = match (a.peek(), b.peek()) {
                    (None, None) => break,
                    (Some(_), None) => a.next().unwrap(),
                    (None, Some(_)) => b.next().unwrap(),
                    (Some(&(ca, va)), Some(&(cb, vb))) => {
                        if ca < cb {
                            a.next();
                            (ca, va)
                        } else if cb < ca {
                            b.next();
                            (cb, vb)
                        } else {
                            a.next();
                            b.next();
                            (ca, va + vb)
                        }
                    }
                };
                if v != ZERO {
                    out.indices.push(c);
                    out.data.push(v);
                }
            }
            out.indptr[r + 1] = out.indices.len();
        }
        out
    }

    /// Sparse-sparse product using a dense row accumulator.
    pub fn matmul(&self, other: &CsrMatrix) -> Self {
        assert_eq!(self.ncols, other.nrows, "shape mismatch in sparse product");
        let mut out = CsrMatrix::zeros(self.nrows, other.ncols);
        let mut acc = vec![ZERO; other.ncols];
        let mut touched = vec![false; other.ncols];
        let mut cols = Vec::new();
        for r in 0..self.nrows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if !touched[c] {
                        touched[c] = true;
                        cols.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            cols.sort_unstable();
            for &c in &cols {
                if acc[c] != ZERO {
                    out.indices.push(c);
                    out.data.push(acc[c]);
                }
                acc[c] = ZERO;
                touched[c] = false;
            }
            cols.clear();
            out.indptr[r + 1] = out.indices.len();
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CsrMatrix) -> Self {
        let nrows = self.nrows * other.nrows;
        let ncols = self.ncols * other.ncols;
        let mut out = CsrMatrix::zeros(nrows, ncols);
        out.indices.reserve(self.nnz() * other.nnz());
        out.data.reserve(self.nnz() * other.nnz());
        for ra in 0..self.nrows {
            for rb in 0..other.nrows {
                for (ca, va) in self.row(ra) {
                    for (cb, vb) in other.row(rb) {
                        let v = va * vb;
                        if v != ZERO {
                            out.indices.push(ca * other.ncols + cb);
                            out.data.push(v);
                        }
                    }
                }
                out.indptr[ra * other.nrows + rb + 1] = out.indices.len();
            }
        }
        out
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        let row_dot = |r: usize| -> C64 {
            let mut s = ZERO;
            for k in self.indptr[r]..self.indptr[r + 1] {
                s += self.data[k] * x[self.indices[k]];
            }
            s
        };
        if self.nnz() >= PAR_WORK_THRESHOLD {
            y.par_iter_mut()
                .enumerate()
                .for_each(|(r, yr)| *yr = row_dot(r));
        } else {
            y.iter_mut()
                .enumerate()
                .for_each(|(r, yr)| *yr = row_dot(r));
        }
    }

    /// `out = self · dense`.
    pub fn mul_dense_into(&self, dense: &ArrayView2<C64>, out: &mut ArrayViewMut2<C64>) {
        assert_eq!(self.ncols, dense.nrows());
        assert_eq!(out.dim(), (self.nrows, dense.ncols()));
        let kernel = |r: usize, mut out_row: ndarray::ArrayViewMut1<C64>| {
            out_row.fill(ZERO);
            let out_row = out_row.as_slice_mut().expect("row-major output");
            for (k, a) in self.row(r) {
                let src = dense.row(k);
                for (o, &b) in out_row.iter_mut().zip(src.iter()) {
                    *o += a * b;
                }
            }
        };
        if self.nnz() * dense.ncols() >= PAR_WORK_THRESHOLD {
            out.axis_iter_mut(Axis(0))
                .into_par_iter()
                .enumerate()
                .for_each(|(r, row)| kernel(r, row));
        } else {
            out.axis_iter_mut(Axis(0))
                .enumerate()
                .for_each(|(r, row)| kernel(r, row));
        }
    }

    /// `out = dense · self`.
    pub fn dense_mul_into(&self, dense: &ArrayView2<C64>, out: &mut ArrayViewMut2<C64>) {
        assert_eq!(dense.ncols(), self.nrows);
        assert_eq!(out.dim(), (dense.nrows(), self.ncols));
        let kernel = |r: usize, mut out_row: ndarray::ArrayViewMut1<C64>| {
            out_row.fill(ZERO);
            let out_row = out_row.as_slice_mut().expect("row-major output");
            for (k, &a) in dense.row(r).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for idx in self.indptr[k]..self.indptr[k + 1] {
                    out_row[self.indices[idx]] += a * self.data[idx];
                }
            }
        };
        if self.nnz() * dense.nrows() >= PAR_WORK_THRESHOLD {
            out.axis_iter_mut(Axis(0))
                .into_par_iter()
                .enumerate()
                .for_each(|(r, row)| kernel(r, row));
        } else {
            out.axis_iter_mut(Axis(0))
                .enumerate()
                .for_each(|(r, row)| kernel(r, row));
        }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn prune(&mut self) {
        if self.data.iter().all(|&v| v != ZERO) {
            return;
        }
        *self = CsrMatrix::from_triplets(self.nrows, self.ncols, self.iter());
    }
}
