use noisy_grover::analysis::{bloch_contraction_factor, closed_form_fidelities, trajectory_report};
use noisy_grover::noise::{chi_star, scalar_profile};
use noisy_grover::{NoiseStrength, SearchInstance};

fn instance(n: usize, chi: f64) -> SearchInstance {
    SearchInstance::new(n, 0, NoiseStrength::new(chi).unwrap()).unwrap()
}

#[test]
fn bloch_norm_ratio_is_constant_and_matches_cos_two_psi() {
    for chi in [0.5, 1.0, 2.0, 5.0] {
        for n in [4, 16] {
            let report = trajectory_report(&instance(n, chi), 30).unwrap();
            let ratios: Vec<f64> = report
                .points
                .windows(2)
                .take_while(|w| w[0].bloch_norm > 1e-6)
                .map(|w| w[1].bloch_norm / w[0].bloch_norm)
                .collect();
            assert!(ratios.len() >= 5);
            let predicted = bloch_contraction_factor(NoiseStrength::new(chi).unwrap()).unwrap();
            for r in &ratios {
                assert!((r - ratios[0]).abs() <= 1e-8, "chi={chi} n={n}: {ratios:?}");
                assert!((r - predicted).abs() <= 1e-6, "chi={chi}: {r} vs {predicted}");
            }
        }
    }
}

#[test]
fn bloch_norm_is_preserved_at_unitary_points() {
    for chi in [NoiseStrength::zero(), chi_star(1).unwrap(), chi_star(2).unwrap()] {
        let inst = SearchInstance::new(16, 0, chi).unwrap();
        let report = trajectory_report(&inst, 50).unwrap();
        for p in &report.points {
            assert!((p.bloch_norm - 1.0).abs() <= 1e-9);
        }
        assert!(report.entropies.iter().all(|s| s.abs() < 1e-10));
    }
}

#[test]
fn entropy_strictly_increases_while_bloch_norm_is_large() {
    for chi in [0.5, 1.0, 2.0, 5.0] {
        let psi = scalar_profile(NoiseStrength::new(chi).unwrap()).unwrap().psi;
        assert!((psi % std::f64::consts::PI).abs() > 1e-6);
        for n in [4, 16] {
            let report = trajectory_report(&instance(n, chi), 40).unwrap();
            for k in 0..40 {
                let gain = report.entropies[k + 1] - report.entropies[k];
                assert!(gain >= -1e-12, "chi={chi} n={n} k={k}");
                if report.points[k].bloch_norm > 1e-3 {
                    assert!(gain > 1e-8, "chi={chi} n={n} k={k}: gain {gain:e}");
                }
            }
        }
    }
}

#[test]
fn angular_fidelity_near_one_at_peak_for_robust_strengths() {
    // The discrete peak only lands within 1e-3 of the pole when some m hits the
    // target angle closely; N = 64 overshoots even without noise (p = 0.998).
    for (chi, n) in [
        (NoiseStrength::zero(), 4),
        (NoiseStrength::zero(), 256),
        (chi_star(1).unwrap(), 256),
    ] {
        let inst = SearchInstance::new(n, 0, chi).unwrap();
        let m_max = (4.0 * (n as f64).sqrt()).ceil() as usize;
        let report = trajectory_report(&inst, m_max).unwrap();
        let peak = report
            .points
            .iter()
            .max_by(|a, b| a.p_success.total_cmp(&b.p_success))
            .unwrap();
        assert!(peak.cos_gamma.unwrap() >= 1.0 - 1e-3, "n={n}: {peak:?}");
        // pure states: cos gamma = z = 2p - 1
        assert!((peak.cos_gamma.unwrap() - (2.0 * peak.p_success - 1.0)).abs() < 1e-10);
    }
}

#[test]
fn closed_form_radial_fidelity_never_reaches_one() {
    // At psi = 0 the printed formula caps f at 1/2, while the simulated
    // success probability gets close to 1.
    let chi = chi_star(1).unwrap();
    let inst = SearchInstance::new(64, 0, chi).unwrap();
    let report = trajectory_report(&inst, 32).unwrap();
    let f_closed_max = report.points.iter().map(|p| p.f_closed).fold(0.0, f64::max);
    let p_max = report.points.iter().map(|p| p.p_success).fold(0.0, f64::max);
    assert!(f_closed_max <= 0.5 + 1e-15);
    assert!(p_max > 0.99);
    for m in 0..32 {
        let c = closed_form_fidelities(chi, m, 64).unwrap();
        assert_eq!(c.f, report.points[m].f_closed);
    }
}
