//! Dense matrix exponential by scaling and squaring with diagonal Padé
//! approximants (Higham 2005). The approximant degree and the number of
//! squarings are chosen from the 1-norm of the input.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{dense, Operator};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.53939833006323e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `exp(m)` for a square operator, returned densely.
pub fn expm_dense(m: &Operator) -> Result<Operator> {
    if !m.is_finite() {
        return Err(Error::arg("matrix exponential of non-finite matrix"));
    }
    Ok(Operator::Dense(expm(&m.to_dense())))
}

fn one_norm(a: &Array2<C64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|col| col.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Matrix exponential of a finite square complex matrix.
pub(crate) fn expm(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if n == 0 {
        return Array2::zeros((0, 0));
    }
    let norm = one_norm(a);
    let eye = Array2::<C64>::eye(n);

    for (theta, coeffs) in [
        (THETA_3, &B3[..]),
        (THETA_5, &B5[..]),
        (THETA_7, &B7[..]),
        (THETA_9, &B9[..]),
    ] {
        if norm <= theta {
            let (u, v) = pade_low(a, &eye, coeffs);
            return rational(&u, &v);
        }
    }

    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a * c(0.5f64.powi(s));
    let (u, v) = pade13(&scaled, &eye);
    let mut r = rational(&u, &v);
    for _ in 0..s {
        r = r.dot(&r);
    }
    r
}

/// Odd and even parts `(U, V)` of a degree-3..9 approximant.
fn pade_low(a: &Array2<C64>, eye: &Array2<C64>, b: &[f64]) -> (Array2<C64>, Array2<C64>) {
    let a2 = a.dot(a);
    let mut power = eye.clone();
    let mut odd = eye * c(b[1]);
    let mut even = eye * c(b[0]);
    for k in 1..b.len() / 2 {
        power = power.dot(&a2);
        odd = odd + &power * c(b[2 * k + 1]);
        even = even + &power * c(b[2 * k]);
    }
    (a.dot(&odd), even)
}

fn pade13(a: &Array2<C64>, eye: &Array2<C64>) -> (Array2<C64>, Array2<C64>) {
    let b = &B13;
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let w1 = &a6 * c(b[13]) + &a4 * c(b[11]) + &a2 * c(b[9]);
    let w2 = &a6 * c(b[7]) + &a4 * c(b[5]) + &a2 * c(b[3]) + eye * c(b[1]);
    let u = a.dot(&(a6.dot(&w1) + w2));

    let z1 = &a6 * c(b[12]) + &a4 * c(b[10]) + &a2 * c(b[8]);
    let z2 = &a6 * c(b[6]) + &a4 * c(b[4]) + &a2 * c(b[2]) + eye * c(b[0]);
    let v = a6.dot(&z1) + z2;
    (u, v)
}

/// `(V - U)⁻¹ (V + U)`.
fn rational(u: &Array2<C64>, v: &Array2<C64>) -> Array2<C64> {
    dense::solve(&(v - u), &(v + u))
}
