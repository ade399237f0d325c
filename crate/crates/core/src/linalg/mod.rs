//! Complex dense/sparse matrix primitives and Dirac-notation utilities.

pub mod dense;
mod dirac;
mod operator;
mod sparse;
mod state;

pub(crate) use dirac::unres_slice;
pub use dirac::{bra, fourier_matrix, ket, ketbra, proj, proj_vector, res, unres};
pub use operator::{Operator, Storage};
pub use sparse::CsrMatrix;
pub use state::{DensityState, StateVector, VectorRole};

pub use num_complex::Complex64 as C64;
