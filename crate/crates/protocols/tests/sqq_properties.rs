mod common;

use common::*;
use proptest::prelude::*;
use qss_core::graph::canonical_resource;
use qss_core::noise::{apply_noise, seeded, NoiseSpec};
use qss_core::{DensityMatrix, Pauli, PauliString};
use qss_protocols::qq::{secret_fidelity, teleport_retrieval_output};
use qss_protocols::sqq::*;
use qss_protocols::{SecretQubit, Triplet};

#[test]
fn gamma_is_rank_two_on_the_triplet_and_dealer() {
    for t in Triplet::all() {
        let g = gamma(t).unwrap();
        assert!((&g * &g).max_abs_diff(&g) < 1e-10);
        let rho = DensityMatrix::new(g.scale_real(0.25)).unwrap();
        let mut keep = vec![0];
        keep.extend(t.members());
        let reduced = rho.partial_trace(&keep).unwrap();
        let ranks = reduced.eigenvalues().iter().filter(|&&e| e > 1e-9).count();
        assert_eq!(ranks, 2, "{t}");
        let excluded = rho.partial_trace(&[t.excluded()]).unwrap();
        assert!(excluded.max_abs_diff(&DensityMatrix::maximally_mixed(1).unwrap()) < 1e-10);
    }
}

#[test]
fn acceptance_operator_matches_gamma() {
    for t in Triplet::all() {
        let set = test_set(t).unwrap();
        assert_eq!(set.measurements.len(), 8);
        assert_eq!(set.seven().len(), 7);
        let target = (&qss_core::Matrix::identity(32) + &gamma(t).unwrap()).scale_real(0.5);
        assert!(set.acceptance_operator().max_abs_diff(&target) <= 1e-10);
    }
}

#[test]
fn white_noise_pass_probability() {
    let (_, psi) = canonical_resource::<f64>();
    for v in [0.0, 0.3, 0.6903, 1.0] {
        let rho = apply_noise(&psi.density(), &NoiseSpec::white(v).unwrap()).unwrap();
        for t in Triplet::all() {
            let p = pass_probability(&rho, t).unwrap();
            assert!((p - (1.0 + v + (1.0 - v) / 8.0) / 2.0).abs() < 1e-10);
            let set = test_set(t).unwrap();
            assert!((schedule_pass_probability(&rho, &set).unwrap() - p).abs() < 1e-10);
        }
    }
}

/// A single-qubit error either trips the test with positive probability or
/// leaves retrieval perfect.
#[test]
fn undetected_single_errors_are_harmless() {
    let ideal = canonical_resource::<f64>().1.density();
    for t in Triplet::all() {
        for q in 0..5 {
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                let rho = ideal.apply_pauli(&PauliString::single(5, q, p)).unwrap();
                if pass_probability(&rho, t).unwrap() > 1.0 - 1e-9 {
                    let (worst, _) = retrieval_fidelities(&rho, t).unwrap();
                    assert!(worst > 1.0 - 1e-9, "{t} {p:?} on {q}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn fidelity_bound_holds_on_random_states(seed in any::<u64>(), rank in 1usize..=6) {
        let mut rng = seeded(seed);
        let rho = random_density(5, rank, &mut rng);
        let t = Triplet::all()[(seed % 4) as usize];
        let p = pass_probability(&rho, t).unwrap();
        let s = random_secret(&mut rng);
        let f = secret_fidelity(&teleport_retrieval_output(&rho, &s, t).unwrap(), &s).unwrap();
        prop_assert!(f >= 2.0 * p - 1.0 - 1e-6, "f = {f}, P = {p}");
    }
}

#[test]
fn bound_helper_validates_input() {
    assert_eq!(fidelity_lower_bound(0.3).unwrap(), 0.0);
    assert!((fidelity_lower_bound(0.9).unwrap() - 0.8).abs() < 1e-12);
    assert!(fidelity_lower_bound(1.2).is_err());
}

#[test]
fn tampered_sessions_abort() {
    let config = SqqConfig {
        rounds: 1_000,
        s: 0.5,
        triplet: "1,2,3".parse().unwrap(),
        secret: SecretQubit::new(0.4, 0.9).unwrap(),
        noise: None,
        policy: AbortPolicy::AbortOnFail,
        tamper: Some("XIIII".parse().unwrap()),
        record_rounds: None,
    };
    let (out, transcript) = run_sqq_session(&config, 3).unwrap();
    assert!(out.aborted);
    assert!(out.tests_passed < out.tests_run);
    assert_eq!(transcript.messages.last().unwrap().kind, qss_protocols::session::MessageKind::Abort);
}
