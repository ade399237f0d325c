//! Spectral analysis of generators and statistics of vertex distributions.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::generator::EvolutionGenerator;
use crate::linalg::{dense, unres_slice, DensityState, Operator};

/// Eigenvalues with modulus below this count as zero.
pub const DEFAULT_NULL_TOL: f64 = 1e-5;
/// Largest superoperator dimension that will be densified for analysis.
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Probabilities over vertices, optionally paired with integer lattice
/// positions for computing moments.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct MeasurementDistribution {
    probs: Vec<f64>,
    positions: Option<Vec<i64>>,
}

impl MeasurementDistribution {
    pub fn new(probs: Vec<f64>) -> Self {
        MeasurementDistribution {
            probs,
            positions: None,
        }
    }

    /// Attaches one position per vertex.
    pub fn with_positions(mut self, positions: Vec<i64>) -> Result<Self> {
        if positions.len() != self.probs.len() {
            return Err(Error::arg(format!(
                "{} positions for {} probabilities",
                positions.len(),
                self.probs.len()
            )));
        }
        self.positions = Some(positions);
        Ok(self)
    }

    /// Positions `k - center` for vertices `k = 1..n`.
    pub fn centered_at(self, center: usize) -> Self {
        let positions = (1..=self.probs.len() as i64)
            .map(|k| k - center as i64)
            .collect();
        MeasurementDistribution {
            probs: self.probs,
            positions: Some(positions),
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn positions(&self) -> Option<&[i64]> {
        self.positions.as_deref()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Canonical-basis measurement: real parts of the diagonal.
pub fn measure(state: &DensityState) -> MeasurementDistribution {
    MeasurementDistribution::new(state.populations())
}

/// `Σ (x - c)^order p(x)` with `c` the mean when `central` is set, else 0.
pub fn moment(dist: &MeasurementDistribution, order: u32, central: bool) -> Result<f64> {
    let positions = dist
        .positions()
        .ok_or_else(|| Error::arg("moment requires vertex positions"))?;
    if order == 0 {
        return Err(Error::arg("moment order must be at least 1"));
    }
    let raw = |shift: f64, k: u32| -> f64 {
        positions
            .iter()
            .zip(&dist.probs)
            .map(|(&x, p)| (x as f64 - shift).powi(k as i32) * p)
            .sum()
    };
    let center = if central { raw(0.0, 1) } else { 0.0 };
    Ok(raw(center, order))
}

/// Least-squares slope of `log m₂` against `log t` over the trailing half of
/// the samples.
pub fn ballistic_exponent(times: &[f64], second_moments: &[f64]) -> Result<f64> {
    if times.len() != second_moments.len() {
        return Err(Error::arg(format!(
            "{} times but {} moments",
            times.len(),
            second_moments.len()
        )));
    }
    if times.len() < 5 {
        return Err(Error::arg("at least 5 samples are required"));
    }
    if times
        .iter()
        .chain(second_moments)
        .any(|&x| !(x > 0.0 && x.is_finite()))
    {
        return Err(Error::arg("times and moments must be positive and finite"));
    }
    let start = times.len() / 2;
    let xs: Vec<f64> = times[start..].iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = second_moments[start..].iter().map(|m| m.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::arg("times in the fitted range must be distinct"));
    }
    Ok(sxy / sxx)
}

fn dense_generator(f: &EvolutionGenerator, cap: usize) -> Result<Operator> {
    if f.dim() > cap {
        return Err(Error::Resource(format!(
            "generator dimension {} exceeds the dense analysis cap {cap}",
            f.dim()
        )));
    }
    Ok(f.to_operator())
}

/// All eigenvalues of the generator, sorted by increasing modulus.
pub fn spectrum(f: &EvolutionGenerator, cap: usize) -> Result<Vec<C64>> {
    let mut ev = dense::eigenvalues(&dense_generator(f, cap)?.to_dense())?;
    ev.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    Ok(ev)
}

/// Number of eigenvalues with modulus below `tol`.
pub fn null_dim(f: &EvolutionGenerator, tol: f64, cap: usize) -> Result<usize> {
    Ok(spectrum(f, cap)?.iter().filter(|l| l.norm() < tol).count())
}

/// The unique stationary state, from the eigenvector of the smallest
/// eigenvalue, Hermitized and normalized to unit trace.
pub fn stationary_state(f: &EvolutionGenerator, tol: f64, cap: usize) -> Result<DensityState> {
    let (values, vectors) = dense::eigen(&dense_generator(f, cap)?.to_dense())?;
    let multiplicity = values.iter().filter(|l| l.norm() < tol).count();
    if multiplicity != 1 {
        return Err(Error::Analysis(format!(
            "null space has dimension {multiplicity}, a unique stationary state needs 1"
        )));
    }
    let k = (0..values.len())
        .min_by(|&a, &b| values[a].norm().total_cmp(&values[b].norm()))
        .expect("nonempty spectrum");
    let column: Vec<C64> = vectors.column(k).to_vec();
    let rho = unres_slice(&column)?;
    let trace = rho.trace();
    if trace.norm() < f64::EPSILON * rho.norm_frobenius().max(1.0) {
        return Err(Error::Analysis(
            "null vector is traceless and cannot be normalized".into(),
        ));
    }
    let rho = rho.scale(trace.inv());
    let hermitian = (&rho + &rho.adjoint()).scale(C64::new(0.5, 0.0));
    Ok(DensityState::new_unchecked(hermitian))
}
