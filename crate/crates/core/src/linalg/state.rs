use ndarray::Array1;
use num_complex::Complex64 as C64;

use super::dense::hermitian_eigenvalues;
use super::operator::Operator;
use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const EIGENVALUE_FLOOR: f64 = -1e-8;

/// Whether a vector plays the ket (column) or bra (row) role.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorRole {
    Column,
    Row,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    data: Array1<C64>,
    role: VectorRole,
}

impl StateVector {
    pub fn new(data: Array1<C64>) -> Self {
        StateVector {
            data,
            role: VectorRole::Column,
        }
    }

    pub fn from_vec(data: Vec<C64>) -> Self {
        StateVector::new(Array1::from(data))
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn role(&self) -> VectorRole {
        self.role
    }

    pub fn data(&self) -> &Array1<C64> {
        &self.data
    }

    pub fn into_data(self) -> Array1<C64> {
        self.data
    }

    pub fn as_slice(&self) -> &[C64] {
        self.data.as_slice().expect("state vectors are contiguous")
    }

    /// Conjugate transpose: ket ↔ bra.
    pub fn adjoint(&self) -> StateVector {
        StateVector {
            data: self.data.mapv(|v| v.conj()),
            role: match self.role {
                VectorRole::Column => VectorRole::Row,
                VectorRole::Row => VectorRole::Column,
            },
        }
    }

    /// `⟨self|other⟩`, conjugating `self` regardless of role.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// A density matrix. Construct with [`DensityState::new`] to validate the
/// physical constraints, or [`DensityState::new_unchecked`] for states
/// produced by trusted numerics.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    matrix: Operator,
}

impl DensityState {
    /// Validates Hermiticity, unit trace and positive semidefiniteness.
    pub fn new(matrix: Operator) -> Result<Self> {
        let state = DensityState { matrix };
        state.validate()?;
        Ok(state)
    }

    pub fn new_unchecked(matrix: Operator) -> Self {
        DensityState { matrix }
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn into_operator(self) -> Operator {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.matrix.hermiticity_error()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let dense = self.matrix.to_dense();
        let herm = (&dense + &dense.t().mapv(|v| v.conj())) * C64::new(0.5, 0.0);
        let evs = hermitian_eigenvalues(&herm)?;
        Ok(evs.first().copied().unwrap_or(0.0))
    }

    /// Hermiticity and trace only; cheap enough to run on every evolution.
    pub fn check_basic(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::arg(format!(
                "density matrix is not Hermitian (max |ρ-ρ†| = {herm:.3e})"
            )));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::arg(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check_basic()?;
        let min = self.min_eigenvalue()?;
        if min < EIGENVALUE_FLOOR {
            return Err(Error::arg(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    /// Real parts of the diagonal: the canonical measurement.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|v| v.re).collect()
    }
}
