mod common;

use common::*;
use ndarray::Array2;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qswalk::expaction::LinearMap;
use qswalk::generator::{evolve_generator, local_lind, DEFAULT_EPSILON};
use qswalk::linalg::{res, Operator, Storage};

fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (n, m) = (a.nrows(), b.nrows());
    Array2::from_shape_fn((n * m, n * m), |(r, c)| {
        a[[r / m, c / m]] * b[[r % m, c % m]]
    })
}

fn conj(a: &Array2<C64>) -> Array2<C64> {
    a.mapv(|z| z.conj())
}

fn adj(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// The generator written term by term from its defining formula.
fn literal_generator(
    h: &Array2<C64>,
    ls: &[Array2<C64>],
    hl: Option<&Array2<C64>>,
    omega: Option<f64>,
) -> Array2<C64> {
    let n = h.nrows();
    let id = Array2::<C64>::eye(n);
    let i = c(0.0, 1.0);
    let (alpha, beta) = match omega {
        Some(w) => (1.0 - w, w),
        None => (1.0, 1.0),
    };
    let coherent = (kron(h, &id) - kron(&id, &conj(h))).mapv(|z| -i * z * alpha);
    let mut dissipative = Array2::<C64>::zeros((n * n, n * n));
    if let Some(hl) = hl {
        dissipative = dissipative + (kron(hl, &id) - kron(&id, &conj(hl))).mapv(|z| -i * z);
    }
    for l in ls {
        let ll = adj(l).dot(l);
        dissipative = dissipative + kron(l, &conj(l))
            - (kron(&ll, &id) + kron(&id, &ll.t().to_owned())).mapv(|z| z * 0.5);
    }
    coherent + dissipative.mapv(|z| z * beta)
}

#[test]
fn assembly_matches_literal_formula() {
    let mut r = rng(21);
    for n in 1..=5 {
        for omega in [None, Some(0.0), Some(0.3), Some(1.0)] {
            let h = random_hermitian(&mut r, n, 1.0);
            let hl = random_hermitian(&mut r, n, 1.0);
            let ls: Vec<Operator> = (0..3).map(|_| random_operator(&mut r, n, 1.0)).collect();
            let f = evolve_generator(&h, &ls, Some(&hl), omega).unwrap();
            let dense_ls: Vec<_> = ls.iter().map(Operator::to_dense).collect();
            let want = literal_generator(&h.to_dense(), &dense_ls, Some(&hl.to_dense()), omega);
            let got = f.to_operator().to_dense();
            assert!(max_abs(&(&got - &want)) < 1e-13, "n={n} omega={omega:?}");
        }
    }
}

#[test]
fn sparse_inputs_give_sparse_generator_with_same_entries() {
    let mut r = rng(22);
    let h = random_hermitian(&mut r, 4, 1.0);
    let l = random_sparse(&mut r, 4, 0.4, 1.0);
    let dense = evolve_generator(&h, std::slice::from_ref(&l), None, Some(0.4)).unwrap();
    let sparse = evolve_generator(
        &h.clone().into_storage(Storage::Sparse),
        &[l],
        None,
        Some(0.4),
    )
    .unwrap();
    assert!(!dense.is_sparse());
    assert!(sparse.is_sparse());
    assert!(sparse.to_operator().is_sparse());
    assert!(sparse.to_operator().max_abs_diff(&dense.to_operator()) < 1e-15);
}

#[test]
fn two_parent_local_lindblads() {
    let ls = local_lind(&two_parent_adjacency(), DEFAULT_EPSILON).unwrap();
    assert_eq!(ls.len(), 2);
    let sum = ls
        .iter()
        .fold(Operator::zeros(3, Storage::Sparse), |acc, l| &acc + l);
    assert_eq!(sum.to_dense(), two_parent_adjacency().to_dense());
}

fn trace_row_residual(f: &Operator, n: usize) -> f64 {
    // res(I)ᵀ F: sum of the rows belonging to diagonal entries.
    let dense = f.to_dense();
    (0..n * n)
        .map(|col| (0..n).map(|k| dense[[k * n + k, col]]).sum::<C64>().norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_preservation(seed in any::<u64>(), n in 1usize..6, k in 0usize..4, omega in proptest::option::of(0.0f64..=1.0)) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, n, 2.0);
        let ls: Vec<Operator> = (0..k).map(|_| random_operator(&mut r, n, 1.5)).collect();
        let hl = random_hermitian(&mut r, n, 1.0);
        let f = evolve_generator(&h, &ls, Some(&hl), omega).unwrap();
        prop_assert!(trace_row_residual(&f.to_operator(), n) < 1e-10);
    }

    #[test]
    fn linear_in_omega(seed in any::<u64>(), n in 1usize..5, w in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, n, 1.0);
        let l = random_operator(&mut r, n, 1.0);
        let at = |w| evolve_generator(&h, std::slice::from_ref(&l), None, Some(w)).unwrap().to_operator();
        let blend = at(0.0).scale(c(1.0 - w, 0.0)).add_scaled(&at(1.0), c(w, 0.0));
        prop_assert!(at(w).max_abs_diff(&blend) < 1e-13);
    }

    #[test]
    fn matrix_free_action_matches_assembly(seed in any::<u64>(), n in 1usize..8, k in 0usize..3, density in 0.05f64..0.6) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, n, 1.0).into_storage(Storage::Sparse);
        let ls: Vec<Operator> = (0..k).map(|_| random_sparse(&mut r, n, density, 1.0)).collect();
        let hl = random_sparse(&mut r, n, 0.3, 1.0);
        let hl = (&hl + &hl.adjoint()).into_storage(Storage::Sparse);
        let f = evolve_generator(&h, &ls, Some(&hl), Some(0.6)).unwrap();
        prop_assert!(f.is_sparse());
        let x = res(&random_operator(&mut r, n, 1.0));
        let mut y = vec![c(0.0, 0.0); n * n];
        f.apply(x.as_slice(), &mut y);
        let explicit = f.to_operator();
        let want = explicit.matvec(x.data());
        prop_assert!(vec_diff(&y, want.as_slice().unwrap()) < 1e-12);
        prop_assert!(f.norm_inf_bound() >= explicit.norm_inf() * (1.0 - 1e-12));
    }
}
