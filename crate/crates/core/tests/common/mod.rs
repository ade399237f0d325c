//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use ndarray::Array2;
use num_complex::Complex64 as C64;
use qswalk::linalg::{CsrMatrix, Operator, Storage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense matrix with entries uniform in the square `[-scale, scale]²`.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Array2<C64> {
    Array2::from_shape_fn((n, n), |_| {
        c(
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
        )
    })
}

pub fn random_operator(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Operator {
    Operator::Dense(random_matrix(rng, n, scale))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Operator {
    let a = random_operator(rng, n, scale);
    (&a + &a.adjoint()).scale(c(0.5, 0.0))
}

/// Sparse matrix where each entry is present with probability `density`.
pub fn random_sparse(rng: &mut ChaCha8Rng, n: usize, density: f64, scale: f64) -> Operator {
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if rng.random::<f64>() < density {
                triplets.push((
                    i,
                    j,
                    c(
                        rng.random_range(-scale..scale),
                        rng.random_range(-scale..scale),
                    ),
                ));
            }
        }
    }
    Operator::Sparse(CsrMatrix::from_triplets(n, n, triplets))
}

/// Random density matrix `B B† / tr(B B†)`.
pub fn random_density(rng: &mut ChaCha8Rng, n: usize) -> Operator {
    let b = random_operator(rng, n, 1.0);
    let m = &b * &b.adjoint();
    let tr = m.trace();
    m.scale(tr.inv())
}

pub fn two_parent_adjacency() -> Operator {
    Operator::from_real_rows(&[&[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[1.0, 1.0, 0.0]]).unwrap()
}

pub fn path(n: usize) -> Operator {
    qswalk::graphio::path_graph(n)
}

pub fn zeros(n: usize) -> Operator {
    Operator::zeros(n, Storage::Sparse)
}

/// `exp(a)` by a 60-term Taylor series on `a / 2^s`, squared `s` times.
pub fn taylor_expm(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.5 {
        s += 1;
    }
    let scaled = a.mapv(|z| z / 2f64.powi(s));
    let mut term = Array2::<C64>::eye(n);
    let mut sum = term.clone();
    for k in 1..=60 {
        term = term.dot(&scaled).mapv(|z| z / k as f64);
        sum += &term;
    }
    for _ in 0..s {
        sum = sum.dot(&sum);
    }
    sum
}

pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn vec_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
