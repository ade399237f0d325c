//! Lindblad collections from graphs and the evolution generator acting on
//! row-order vectorized density matrices.
//!
//! The generator is kept in factored form
//!
//! ```text
//! F·vec ρ = vec( -i(Kρ - ρK†) + β Σ_L LρL† ),   K = H_eff - (i/2) β Σ_L L†L
//! ```
//!
//! with `H_eff = α H + β H_loc`. Dense generators are also assembled
//! explicitly; sparse ones are applied matrix-free so the `n²×n²` matrix never
//! has to exist, although [`EvolutionGenerator::to_operator`] can still build
//! it on request.

use std::sync::Mutex;

use ndarray::{Array2, ArrayView2, ArrayViewMut2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::expaction::LinearMap;
use crate::linalg::{CsrMatrix, Operator, Storage};

/// Threshold used when the caller does not supply one.
pub const DEFAULT_EPSILON: f64 = f64::EPSILON;

const HERMITIAN_TOL: f64 = 1e-10;
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Splits `a` into single-entry operators, one per entry with
/// `|a[i,j]| >= epsilon`, in row-major order.
pub fn local_lind(a: &Operator, epsilon: f64) -> Result<Vec<Operator>> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::arg("epsilon must be non-negative"));
    }
    let n = a.dim();
    Ok(a.entries()
        .into_iter()
        .filter(|(_, _, v)| v.norm() >= epsilon)
        .map(|(r, c, v)| Operator::Sparse(CsrMatrix::from_triplets(n, n, [(r, c, v)])))
        .collect())
}

/// Builds the evolution generator.
///
/// With `omega = Some(ω)` the Hamiltonian part is weighted by `1-ω` and the
/// local Hamiltonian plus dissipator by `ω`; with `None` both weights are 1.
/// The result is sparse only if every supplied operator is sparse.
pub fn evolve_generator(
    h: &Operator,
    lindblads: &[Operator],
    local_h: Option<&Operator>,
    omega: Option<f64>,
) -> Result<EvolutionGenerator> {
    let n = h.dim();
    for (k, l) in lindblads.iter().enumerate() {
        if l.dim() != n {
            return Err(Error::arg(format!(
                "Lindblad operator {k} has dimension {}, Hamiltonian has {n}",
                l.dim()
            )));
        }
    }
    if let Some(hl) = local_h {
        if hl.dim() != n {
            return Err(Error::arg(format!(
                "local Hamiltonian has dimension {}, Hamiltonian has {n}",
                hl.dim()
            )));
        }
        let err = hl.hermiticity_error();
        if err > HERMITIAN_TOL {
            return Err(Error::arg(format!(
                "local Hamiltonian is not Hermitian (max |H-H†| = {err:.3e})"
            )));
        }
    }
    let err = h.hermiticity_error();
    if err > HERMITIAN_TOL {
        return Err(Error::arg(format!(
            "Hamiltonian is not Hermitian (max |H-H†| = {err:.3e})"
        )));
    }
    let (alpha, beta) = match omega {
        None => (1.0, 1.0),
        Some(w) if (0.0..=1.0).contains(&w) => (1.0 - w, w),
        Some(w) => return Err(Error::arg(format!("omega = {w} outside [0, 1]"))),
    };

    let storage = lindblads
        .iter()
        .chain(local_h)
        .fold(h.storage(), |acc, op| acc.join(op.storage()));
    let cast = |op: &Operator| op.clone().into_storage(storage);

    let mut coherent = cast(h).scale(C64::new(alpha, 0.0));
    if let Some(hl) = local_h {
        coherent = coherent.add_scaled(&cast(hl), C64::new(beta, 0.0));
    }
    let lindblads: Vec<Operator> = lindblads.iter().map(cast).collect();
    let mut effective = coherent.clone();
    for l in &lindblads {
        let ll = &l.adjoint() * l;
        effective = effective.add_scaled(&ll, C64::new(0.0, -0.5 * beta));
    }
    let effective_adj = effective.adjoint();
    let lindblad_adj = lindblads.iter().map(Operator::adjoint).collect();
    let lindblad_entries = lindblads
        .iter()
        .map(|l| match l {
            Operator::Sparse(s) if s.nnz() <= n => Some(s.iter().collect()),
            _ => None,
        })
        .collect();

    let mut generator = EvolutionGenerator {
        n,
        storage,
        dissipation: beta,
        effective,
        effective_adj,
        lindblads,
        lindblad_adj,
        lindblad_entries,
        assembled: None,
        scratch: Mutex::new(None),
    };
    if storage == Storage::Dense {
        generator.assembled = Some(generator.assemble());
    }
    Ok(generator)
}

/// The `n²×n²` generator `F` with `vec ρ(t) = exp(tF) vec ρ(0)`.
#[derive(Debug)]
pub struct EvolutionGenerator {
    n: usize,
    storage: Storage,
    dissipation: f64,
    effective: Operator,
    effective_adj: Operator,
    lindblads: Vec<Operator>,
    lindblad_adj: Vec<Operator>,
    /// Triplets of Lindblad operators with at most `n` entries, whose
    /// `LρL†` is accumulated entrywise instead of through scratch matrices.
    lindblad_entries: Vec<Option<Vec<(usize, usize, C64)>>>,
    assembled: Option<Operator>,
    scratch: Mutex<Option<(Array2<C64>, Array2<C64>)>>,
}

impl Clone for EvolutionGenerator {
    fn clone(&self) -> Self {
        EvolutionGenerator {
            n: self.n,
            storage: self.storage,
            dissipation: self.dissipation,
            effective: self.effective.clone(),
            effective_adj: self.effective_adj.clone(),
            lindblads: self.lindblads.clone(),
            lindblad_adj: self.lindblad_adj.clone(),
            lindblad_entries: self.lindblad_entries.clone(),
            assembled: self.assembled.clone(),
            scratch: Mutex::new(None),
        }
    }
}

impl EvolutionGenerator {
    /// Side length of the superoperator, `n²`.
    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    /// Dimension `n` of the density matrices it acts on.
    pub fn state_dim(&self) -> usize {
        self.n
    }

    pub fn storage(&self) -> Storage {
        self.storage
    }

    pub fn is_sparse(&self) -> bool {
        self.storage == Storage::Sparse
    }

    /// The explicit `n²×n²` matrix, in the generator's storage.
    pub fn to_operator(&self) -> Operator {
        match &self.assembled {
            Some(op) => op.clone(),
            None => self.assemble(),
        }
    }

    fn assemble(&self) -> Operator {
        let id = Operator::identity(self.n, self.storage);
        let mut f = self
            .effective
            .kron(&id)
            .scale(-I)
            .add_scaled(&id.kron(&self.effective.conj()), I);
        for l in &self.lindblads {
            f = f.add_scaled(&l.kron(&l.conj()), C64::new(self.dissipation, 0.0));
        }
        f
    }

    /// Applies the generator to an `n×n` matrix: `out = F(rho)`.
    pub fn apply_matrix(&self, rho: &ArrayView2<C64>, out: &mut ArrayViewMut2<C64>) {
        let n = self.n;
        let mut guard = self.scratch.try_lock().ok();
        let mut local = None;
        let (t1, t2) = match guard.as_deref_mut() {
            Some(slot) => {
                let bufs =
                    slot.get_or_insert_with(|| (Array2::zeros((n, n)), Array2::zeros((n, n))));
                (&mut bufs.0, &mut bufs.1)
            }
            None => {
                let bufs = local.insert((Array2::zeros((n, n)), Array2::zeros((n, n))));
                (&mut bufs.0, &mut bufs.1)
            }
        };

        left_mul(&self.effective, rho, out);
        right_mul(&self.effective_adj, rho, &mut t1.view_mut());
        out.zip_mut_with(t1, |o, t| *o = -I * (*o - t));
        let beta = C64::new(self.dissipation, 0.0);
        for ((l, ld), few) in self
            .lindblads
            .iter()
            .zip(&self.lindblad_adj)
            .zip(&self.lindblad_entries)
        {
            if let Some(entries) = few {
                for &(i, a, v) in entries {
                    let bv = beta * v;
                    for &(j, b, w) in entries {
                        out[[i, j]] += bv * rho[[a, b]] * w.conj();
                    }
                }
                continue;
            }
            left_mul(l, rho, &mut t1.view_mut());
            right_mul(ld, &t1.view(), &mut t2.view_mut());
            out.zip_mut_with(t2, |o, t| *o += beta * t);
        }
    }
}

/// `out = a · x`.
fn left_mul(a: &Operator, x: &ArrayView2<C64>, out: &mut ArrayViewMut2<C64>) {
    match a {
        Operator::Sparse(s) => s.mul_dense_into(x, out),
        Operator::Dense(d) => out.assign(&d.dot(x)),
    }
}

/// `out = x · a`.
fn right_mul(a: &Operator, x: &ArrayView2<C64>, out: &mut ArrayViewMut2<C64>) {
    match a {
        Operator::Sparse(s) => s.dense_mul_into(x, out),
        Operator::Dense(d) => out.assign(&x.dot(d)),
    }
}

impl LinearMap for EvolutionGenerator {
    fn dim(&self) -> usize {
        EvolutionGenerator::dim(self)
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        if let Some(f) = &self.assembled {
            f.apply(x, y);
            return;
        }
        let n = self.n;
        let rho = ArrayView2::from_shape((n, n), x).expect("vector length is n²");
        let mut out = ArrayViewMut2::from_shape((n, n), y).expect("vector length is n²");
        self.apply_matrix(&rho, &mut out);
    }

    fn norm_inf_bound(&self) -> f64 {
        if let Some(f) = &self.assembled {
            return f.norm_inf();
        }
        2.0 * self.effective.norm_inf()
            + self.dissipation
                * self
                    .lindblads
                    .iter()
                    .map(|l| l.norm_inf().powi(2))
                    .sum::<f64>()
    }
}
