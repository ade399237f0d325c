//! Time evolution: `vec ρ(t) = exp(tF) vec ρ(0)`.
//!
//! Sparse generators go through the Krylov exponential action; dense ones are
//! exponentiated outright.

use std::collections::HashMap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::expaction::{expm, expmv, KrylovConfig};
use crate::generator::EvolutionGenerator;
use crate::linalg::{res, unres_slice, DensityState, Operator, Storage};

const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EvolveOptions {
    pub krylov: KrylovConfig,
    /// Reject initial states that are not Hermitian with unit trace instead
    /// of logging a warning.
    pub strict: bool,
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::arg(format!(
            "time must be finite and non-negative, got {t}"
        )));
    }
    Ok(())
}

fn check_state(f: &EvolutionGenerator, rho0: &DensityState, opts: &EvolveOptions) -> Result<()> {
    if rho0.dim() != f.state_dim() {
        return Err(Error::arg(format!(
            "state dimension {} does not match generator acting on dimension {}",
            rho0.dim(),
            f.state_dim()
        )));
    }
    if let Err(e) = rho0.check_basic() {
        if opts.strict {
            return Err(e);
        }
        log::warn!("initial state: {e}");
    }
    Ok(())
}

fn to_state(v: &[C64]) -> Result<DensityState> {
    Ok(DensityState::new_unchecked(unres_slice(v)?))
}

/// Advances a vectorized state by `dt`.
fn step(f: &EvolutionGenerator, v: &[C64], dt: f64, opts: &EvolveOptions) -> Result<Vec<C64>> {
    if dt == 0.0 {
        return Ok(v.to_vec());
    }
    match f.storage() {
        Storage::Sparse => expmv(dt, f, v, &opts.krylov),
        Storage::Dense => Ok(propagator(f, dt).apply_vec(v)),
    }
}

fn propagator(f: &EvolutionGenerator, t: f64) -> Superoperator {
    let scaled = f.to_operator().to_dense().mapv(|x| x * t);
    Superoperator {
        matrix: Operator::Dense(expm(&scaled)),
    }
}

pub fn evolve(f: &EvolutionGenerator, rho0: &DensityState, t: f64) -> Result<DensityState> {
    evolve_with_options(f, rho0, t, &EvolveOptions::default())
}

pub fn evolve_with_options(
    f: &EvolutionGenerator,
    rho0: &DensityState,
    t: f64,
    opts: &EvolveOptions,
) -> Result<DensityState> {
    check_time(t)?;
    check_state(f, rho0, opts)?;
    to_state(&step(f, res(rho0.matrix()).as_slice(), t, opts)?)
}

/// States at each of `tpoints`, in the given order.
///
/// Times are visited in increasing order and each state is propagated from
/// the previous one; on the dense path the propagator for each distinct gap
/// is computed once.
pub fn evolve_times(
    f: &EvolutionGenerator,
    rho0: &DensityState,
    tpoints: &[f64],
) -> Result<Vec<DensityState>> {
    evolve_times_with_options(f, rho0, tpoints, &EvolveOptions::default())
}

pub fn evolve_times_with_options(
    f: &EvolutionGenerator,
    rho0: &DensityState,
    tpoints: &[f64],
    opts: &EvolveOptions,
) -> Result<Vec<DensityState>> {
    tpoints.iter().try_for_each(|&t| check_time(t))?;
    check_state(f, rho0, opts)?;
    let mut order: Vec<usize> = (0..tpoints.len()).collect();
    order.sort_by(|&a, &b| tpoints[a].total_cmp(&tpoints[b]));

    let mut cache: HashMap<u64, Superoperator> = HashMap::new();
    let mut current = res(rho0.matrix()).into_data().to_vec();
    let mut t_now = 0.0;
    let mut out: Vec<Option<DensityState>> = vec![None; tpoints.len()];
    for k in order {
        let dt = tpoints[k] - t_now;
        if dt > 0.0 {
            current = match f.storage() {
                Storage::Sparse => expmv(dt, f, &current, &opts.krylov)?,
                Storage::Dense => cache
                    .entry(dt.to_bits())
                    .or_insert_with(|| propagator(f, dt))
                    .apply_vec(&current),
            };
            t_now = tpoints[k];
        }
        out[k] = Some(to_state(&current)?);
    }
    Ok(out
        .into_iter()
        .map(|s| s.expect("every slot filled"))
        .collect())
}

/// A precomputed propagator `exp(tF)` acting on vectorized states.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    matrix: Operator,
}

impl Superoperator {
    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    /// Side length of the matrix, `n²`.
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &Superoperator) -> Result<Superoperator> {
        if self.dim() != first.dim() {
            return Err(Error::arg("superoperator dimensions differ"));
        }
        Ok(Superoperator {
            matrix: &self.matrix * &first.matrix,
        })
    }

    fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        crate::expaction::LinearMap::apply(&self.matrix, v, &mut out);
        out
    }

    /// `unres(U · res(ρ))`.
    pub fn apply(&self, rho: &DensityState) -> Result<DensityState> {
        let n2 = rho.dim() * rho.dim();
        if n2 != self.dim() {
            return Err(Error::arg(format!(
                "state of dimension {} does not fit a superoperator of size {}",
                rho.dim(),
                self.dim()
            )));
        }
        to_state(&self.apply_vec(res(rho.matrix()).as_slice()))
    }
}

/// `exp(tF)` for a dense generator.
pub fn evolve_operator(f: &EvolutionGenerator, t: f64) -> Result<Superoperator> {
    check_time(t)?;
    if f.is_sparse() {
        return Err(Error::arg(
            "evolve_operator works for dense generators only; use evolve for sparse ones",
        ));
    }
    Ok(propagator(f, t))
}

/// Shorthand for [`Superoperator::apply`].
pub fn evolve_with_superoperator(u: &Superoperator, rho0: &DensityState) -> Result<DensityState> {
    u.apply(rho0)
}

/// Unitary evolution `e^{-iht} ρ e^{iht}` computed on the `n×n` level.
pub fn evolve_closed(h: &Operator, rho0: &DensityState, t: f64) -> Result<DensityState> {
    check_time(t)?;
    if h.dim() != rho0.dim() {
        return Err(Error::arg(format!(
            "Hamiltonian dimension {} does not match state dimension {}",
            h.dim(),
            rho0.dim()
        )));
    }
    let err = h.hermiticity_error();
    if err > HERMITIAN_TOL {
        return Err(Error::arg(format!(
            "Hamiltonian is not Hermitian (max |H-H†| = {err:.3e})"
        )));
    }
    let u = Operator::Dense(expm(&h.to_dense().mapv(|x| x * C64::new(0.0, -t))));
    let rho = &(&u * rho0.matrix()) * &u.adjoint();
    Ok(DensityState::new_unchecked(rho))
}
