mod common;

use common::*;
use noisy_grover::channel::{channel_choi_distance, choi_matrix, KrausChannel};
use noisy_grover::linalg::{
    eigvals_hermitian, kron, matexp_i_hermitian, partial_trace_env, polar_unitary_factor, sigma_y, ComplexMatrix,
};
use noisy_grover::Complex64;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn matexp_of_pi_over_4_sigma_y_matches_series() {
    let h = sigma_y().scale_real(std::f64::consts::FRAC_PI_4);
    assert_close(
        &matexp_i_hermitian(&h).unwrap(),
        &exp_i_series(&h),
        1e-15,
        "exp(i pi/4 sigma_y)",
    );
}

#[test]
fn matexp_matches_power_series_up_to_norm_ten() {
    let mut rng = rng(7);
    for trial in 0..60 {
        let dim = 1 + trial % 8;
        let norm = rng.gen_range(0.1..10.0);
        let h = random_hermitian(&mut rng, dim, norm);
        let fast = matexp_i_hermitian(&h).unwrap();
        assert_close(&fast, &exp_i_series(&h), 1e-9, "eig vs series");
        assert!(fast.is_unitary(1e-10));
    }
}

#[test]
fn polar_factor_is_nearest_unitary_by_sampling() {
    let mut rng = rng(11);
    let mut checked = 0;
    while checked < 100 {
        // m = U diag(s) V with singular values drawn in [0.1, 10]
        let s = [rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0)];
        let u = random_unitary(&mut rng, 2);
        let v = random_unitary(&mut rng, 2);
        let m = &(&u * &ComplexMatrix::diag(&s)) * &v;
        let w = polar_unitary_factor(&m).unwrap();
        // the construction itself gives the exact factor U V
        assert_close(&w, &(&u * &v), 1e-10, "polar vs construction");
        let best = (&m - &w).frobenius_norm();
        for _ in 0..1000 {
            let q = random_unitary(&mut rng, 2);
            assert!(best <= (&m - &q).frobenius_norm() + 1e-12);
        }
        checked += 1;
    }
}

#[test]
fn polar_factor_leaves_hermitian_positive_remainder() {
    let mut rng = rng(12);
    for dim in [2, 2, 3, 4, 6] {
        let m = random_matrix(&mut rng, dim);
        let w = polar_unitary_factor(&m).unwrap();
        assert!(w.is_unitary(1e-10));
        let p = &m * &w.adjoint();
        assert!(p.hermiticity_deviation() < 1e-9, "dim {dim}");
        let spectrum = eigvals_hermitian(&p.hermitian_part()).unwrap();
        assert!(spectrum.min() > 0.0);
    }
}

#[test]
fn partial_trace_blocks_reconstruct_the_operator() {
    let mut rng = rng(13);
    for (sys, env) in [(2, 2), (3, 2), (2, 3)] {
        let m = random_matrix(&mut rng, sys * env);
        let mut rebuilt = ComplexMatrix::zeros(sys * env);
        for i in 0..env {
            for j in 0..env {
                let mut unit = ComplexMatrix::zeros(env);
                unit.set(i, j, Complex64::new(1.0, 0.0));
                let block = partial_trace_env(&m, sys, env, i, j).unwrap();
                rebuilt = rebuilt + kron(&block, &unit);
            }
        }
        assert_close(&rebuilt, &m, 1e-15, "reconstruction");
    }
}

#[test]
fn choi_trace_equals_dimension_for_random_channels() {
    let mut rng = rng(14);
    for dim in 2..5 {
        // Stinespring: rows of a random isometry give a trace-preserving Kraus set.
        let big = random_unitary(&mut rng, dim * 3);
        let ops: Vec<ComplexMatrix> = (0..3)
            .map(|k| ComplexMatrix::from_fn(dim, |i, j| big.get(k * dim + i, j)))
            .collect();
        let ch = KrausChannel::new(ops).unwrap();
        assert!(ch.is_trace_preserving(1e-10));
        assert!((choi_matrix(&ch).trace().re - dim as f64).abs() < 1e-10);
    }
}

#[test]
fn choi_distinguishes_distinct_unitaries() {
    let mut rng = rng(15);
    for _ in 0..50 {
        let u = random_unitary(&mut rng, 2);
        let v = random_unitary(&mut rng, 2);
        if u.phase_aligned_distance(&v) <= 1e-3 {
            continue;
        }
        let d = channel_choi_distance(&KrausChannel::unitary(u), &KrausChannel::unitary(v)).unwrap();
        assert!(d > 0.0);
    }
}

fn hermitian_strategy(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_dim).prop_flat_map(|dim| {
        prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), dim * dim).prop_map(move |entries| {
            let a = ComplexMatrix::from_fn(dim, |i, j| {
                let (re, im) = entries[i * dim + j];
                Complex64::new(re, im)
            });
            (&a + &a.adjoint()).scale_real(0.5)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_of_h_times_exp_of_minus_h_is_identity(h in hermitian_strategy(8)) {
        let forward = matexp_i_hermitian(&h).unwrap();
        let backward = matexp_i_hermitian(&h.scale_real(-1.0)).unwrap();
        let product = &forward * &backward;
        prop_assert!(product.max_abs_diff(&ComplexMatrix::identity(h.dim())) < 1e-10);
    }

    #[test]
    fn eigenvalues_sum_to_trace(h in hermitian_strategy(6)) {
        let s = eigvals_hermitian(&h).unwrap();
        prop_assert!((s.sum() - h.trace().re).abs() < 1e-10);
        prop_assert!(s.values().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn kron_multiplies_dimensions(a in hermitian_strategy(3), b in hermitian_strategy(3)) {
        let k = kron(&a, &b);
        prop_assert_eq!(k.dim(), a.dim() * b.dim());
        let tr = a.trace() * b.trace();
        prop_assert!((k.trace() - tr).norm() < 1e-10);
    }
}

#[test]
fn random_density_spectra_are_normalized() {
    let mut rng = rng(16);
    for dim in 2..6 {
        let rho = random_density(&mut rng, dim);
        let s = eigvals_hermitian(&rho).unwrap();
        assert!((s.sum() - 1.0).abs() < 1e-12);
        assert!(s.min() > -1e-12);
    }
}
