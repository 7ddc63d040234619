//! Test-only oracles and random generators. Nothing here calls into the
//! eigendecomposition or SVD paths of the library.

#![allow(dead_code)]

use noisy_grover::{Complex64, ComplexMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller.
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| Complex64::new(normal(rng), normal(rng)))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize, norm: f64) -> ComplexMatrix {
    let a = random_matrix(rng, dim);
    let h = (&a + &a.adjoint()).scale_real(0.5);
    let scale = norm / h.frobenius_norm();
    h.scale_real(scale)
}

/// Haar-ish random unitary: Gram-Schmidt on Gaussian columns.
pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| Complex64::new(normal(rng), normal(rng))).collect();
        for u in &cols {
            let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

/// Random density matrix `A A^dagger / tr`.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let a = random_matrix(rng, dim);
    let rho = &a * &a.adjoint();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr).hermitian_part()
}

/// `exp(i h)` by Taylor series summed until the terms vanish.
pub fn exp_i_series(h: &ComplexMatrix) -> ComplexMatrix {
    let dim = h.dim();
    let ih = h.scale(Complex64::new(0.0, 1.0));
    let mut term = ComplexMatrix::identity(dim);
    let mut sum = ComplexMatrix::identity(dim);
    for k in 1..400 {
        term = (&term * &ih).scale_real(1.0 / k as f64);
        sum = &sum + &term;
        if term.frobenius_norm() < 1e-20 {
            break;
        }
    }
    sum
}

/// Maximum-entry comparison helper with a readable failure message.
pub fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64, what: &str) {
    let d = a.max_abs_diff(b);
    assert!(d <= tol, "{what}: max |a - b| = {d:e} > {tol:e}\n{a:?}\n{b:?}");
}
