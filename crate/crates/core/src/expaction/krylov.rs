//! Krylov-subspace approximation of `exp(t·A)·v` with adaptive time
//! stepping, after Sidje's Expokit `zgexpv`.
//!
//! Each substep builds an Arnoldi basis of dimension `m`, exponentiates the
//! augmented `(m+2)×(m+2)` Hessenberg matrix densely and estimates the local
//! error from its last two entries. Rejected substeps shrink the step.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use super::pade::expm;
use super::LinearMap;
use crate::error::{Error, Result};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Safety factor applied to every step-size prediction.
const GAMMA: f64 = 0.9;
/// Slack on the accepted local error.
const DELTA: f64 = 1.2;
/// Relative residual below which the Krylov subspace is treated as invariant.
const BREAKDOWN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KrylovConfig {
    pub subspace_dim: usize,
    pub tolerance: f64,
    pub max_step_halvings: usize,
    /// Upper bound on accepted substeps over the whole interval.
    pub max_substeps: usize,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        KrylovConfig {
            subspace_dim: 30,
            tolerance: 1e-7,
            max_step_halvings: 10,
            max_substeps: 100_000,
        }
    }
}

impl KrylovConfig {
    pub fn validate(&self) -> Result<()> {
        if self.subspace_dim == 0 {
            return Err(Error::arg("Krylov subspace dimension must be at least 1"));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::arg("Krylov tolerance must be positive and finite"));
        }
        Ok(())
    }
}

fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨a|b⟩` with `a` conjugated.
fn dotc(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

/// Rounds a step size up to two significant digits, as Expokit does.
fn round_step(step: f64) -> f64 {
    if step <= 0.0 || !step.is_finite() {
        return step;
    }
    let s = 10f64.powf(step.log10().floor() - 1.0);
    (step / s).ceil() * s
}

/// Approximates `exp(t·a)·v`.
pub fn expmv<A: LinearMap + ?Sized>(
    t: f64,
    a: &A,
    v: &[C64],
    cfg: &KrylovConfig,
) -> Result<Vec<C64>> {
    cfg.validate()?;
    let n = a.dim();
    if v.len() != n {
        return Err(Error::arg(format!(
            "vector length {} does not match operator dimension {n}",
            v.len()
        )));
    }
    if !t.is_finite() {
        return Err(Error::arg("evolution time must be finite"));
    }
    let mut w = v.to_vec();
    let mut beta = norm2(&w);
    let anorm = a.norm_inf_bound();
    if t == 0.0 || beta == 0.0 || anorm == 0.0 || n == 0 {
        return Ok(w);
    }

    let m = cfg.subspace_dim.min(n);
    let tol = cfg.tolerance;
    let sgn = t.signum();
    let t_out = t.abs();
    let btol = BREAKDOWN_TOL * anorm;

    let fact = ((m as f64 + 1.0) / std::f64::consts::E).powf(m as f64 + 1.0)
        * (2.0 * std::f64::consts::PI * (m as f64 + 1.0)).sqrt();
    let mut t_new = (1.0 / anorm) * ((fact * tol) / (4.0 * beta * anorm)).powf(1.0 / m as f64);
    t_new = round_step(t_new);
    if t_new <= 0.0 || !t_new.is_finite() {
        t_new = t_out;
    }

    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
    let mut p = vec![ZERO; n];
    let mut t_now = 0.0;
    let mut nstep = 0usize;

    while t_now < t_out {
        if nstep == cfg.max_substeps {
            return Err(Error::Numerical(format!(
                "Krylov integration needed more than {} substeps (reached t = {t_now:.6e} of {t_out:.6e})",
                cfg.max_substeps
            )));
        }
        nstep += 1;
        let mut t_step = (t_out - t_now).min(t_new);
        let mut hess = Array2::<C64>::zeros((m + 2, m + 2));

        if basis.is_empty() {
            basis.push(vec![ZERO; n]);
        }
        let inv_beta = 1.0 / beta;
        basis[0]
            .iter_mut()
            .zip(&w)
            .for_each(|(b, x)| *b = x * inv_beta);

        let mut happy = false;
        let mut mb = m;
        for j in 0..m {
            a.apply(&basis[j], &mut p);
            for (i, vi) in basis.iter().enumerate().take(j + 1) {
                let h = dotc(vi, &p);
                hess[[i, j]] = h;
                axpy(-h, vi, &mut p);
            }
            let s = norm2(&p);
            if s < btol {
                happy = true;
                mb = j + 1;
                t_step = t_out - t_now;
                break;
            }
            hess[[j + 1, j]] = C64::new(s, 0.0);
            if basis.len() <= j + 1 {
                basis.push(vec![ZERO; n]);
            }
            let inv_s = 1.0 / s;
            basis[j + 1]
                .iter_mut()
                .zip(&p)
                .for_each(|(b, x)| *b = x * inv_s);
        }

        let mut avnorm = 0.0;
        if !happy {
            hess[[m + 1, m]] = C64::new(1.0, 0.0);
            a.apply(&basis[m], &mut p);
            avnorm = norm2(&p);
        }

        let mut err_loc;
        let mut xm = 1.0 / m as f64;
        let mut rejections = 0usize;
        let small = loop {
            let mx = if happy { mb } else { m + 2 };
            let scaled = hess
                .slice(ndarray::s![..mx, ..mx])
                .mapv(|h| h * (sgn * t_step));
            let small = expm(&scaled);
            if happy {
                err_loc = 0.0;
                break small;
            }
            let phi1 = (beta * small[[m, 0]]).norm();
            let phi2 = (beta * small[[m + 1, 0]] * avnorm).norm();
            if phi1 > 10.0 * phi2 {
                err_loc = phi2;
                xm = 1.0 / m as f64;
            } else if phi1 > phi2 {
                err_loc = (phi1 * phi2) / (phi1 - phi2);
                xm = 1.0 / m as f64;
            } else {
                err_loc = phi1;
                xm = 1.0 / (m as f64 - 1.0).max(1.0);
            }
            if err_loc <= DELTA * t_step * tol {
                break small;
            }
            if rejections == cfg.max_step_halvings {
                return Err(Error::Numerical(format!(
                    "Krylov step rejected {} times at t = {t_now:.6e} \
                     (step {t_step:.3e}, local error {err_loc:.3e}, tolerance {tol:.1e})",
                    rejections + 1
                )));
            }
            t_step = round_step(GAMMA * t_step * (t_step * tol / err_loc).powf(xm));
            rejections += 1;
        };

        let used = if happy { mb } else { m + 1 };
        w.iter_mut().for_each(|x| *x = ZERO);
        for (k, vk) in basis.iter().enumerate().take(used) {
            axpy(beta * small[[k, 0]], vk, &mut w);
        }
        beta = norm2(&w);
        if !beta.is_finite() {
            return Err(Error::Numerical(format!(
                "Krylov iterate became non-finite at t = {t_now:.6e}"
            )));
        }

        if t_now + t_step == t_now {
            return Err(Error::Numerical(format!(
                "Krylov step size {t_step:.3e} underflowed at t = {t_now:.6e}"
            )));
        }
        t_now += t_step;
        if beta == 0.0 {
            break;
        }
        t_new = if err_loc > 0.0 {
            round_step(GAMMA * t_step * (t_step * tol / err_loc).powf(xm))
        } else {
            f64::INFINITY
        };
        if !t_new.is_finite() || t_new <= 0.0 {
            t_new = t_out;
        }
    }
    log::trace!("expmv: {nstep} substeps, t = {t}");
    Ok(w)
}
