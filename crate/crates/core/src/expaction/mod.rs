//! Matrix-exponential engines: dense scaling-and-squaring and the Krylov
//! exponential action for sparse or matrix-free operators.

mod krylov;
mod pade;

pub use krylov::{expmv, KrylovConfig};
pub(crate) use pade::expm;
pub use pade::expm_dense;

use num_complex::Complex64 as C64;

use crate::linalg::{CsrMatrix, Operator};

/// A square linear map that can be applied to vectors.
pub trait LinearMap: Sync {
    fn dim(&self) -> usize;

    /// `y = A·x`; `y` is fully overwritten.
    fn apply(&self, x: &[C64], y: &mut [C64]);

    /// Any upper bound on the infinity norm. It seeds the initial Krylov
    /// step, so a loose bound only costs a few extra substeps.
    fn norm_inf_bound(&self) -> f64;
}

impl LinearMap for CsrMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.matvec(x, y);
    }

    fn norm_inf_bound(&self) -> f64 {
        self.norm_inf()
    }
}

impl LinearMap for Operator {
    fn dim(&self) -> usize {
        Operator::dim(self)
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        match self {
            Operator::Sparse(m) => m.matvec(x, y),
            Operator::Dense(m) => {
                for (yi, row) in y.iter_mut().zip(m.outer_iter()) {
                    *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
        }
    }

    fn norm_inf_bound(&self) -> f64 {
        self.norm_inf()
    }
}
