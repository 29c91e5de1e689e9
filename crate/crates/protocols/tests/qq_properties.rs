mod common;

use std::f64::consts::PI;

use common::*;
use proptest::prelude::*;
use qss_core::graph::canonical_resource;
use qss_core::info::mutual_information;
use qss_core::noise::seeded;
use qss_core::DensityMatrix;
use qss_protocols::qq::*;
use qss_protocols::{PairClass, SecretQubit, Triplet};

/// Dealer–pair mutual information on the ideal resource.
const DEALER_PAIR_MI_ADJACENT: f64 = 1.0;
const DEALER_PAIR_MI_OPPOSITE: f64 = 1.0;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn direct_and_teleport_encodings_agree(theta in 0.0..=PI, phi in 0.0..(2.0 * PI)) {
        let s = SecretQubit::new(theta, phi).unwrap();
        let ideal = logical_state(&s);
        for s0 in 0..2 {
            prop_assert!(encode_direct_branch(&s, s0).unwrap().equals_up_to_phase(&ideal, 1e-9));
        }
        let (_, res) = canonical_resource::<f64>();
        for m1 in 0..2 {
            for m2 in 0..2 {
                let (p, out) = encode_teleport_branch(&res, &s, m1, m2).unwrap();
                prop_assert!((p - 0.25).abs() < 1e-9);
                prop_assert!(out.unwrap().equals_up_to_phase(&ideal, 1e-9));
            }
        }
    }

    #[test]
    fn sampled_encodings_match_the_ideal(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let s = random_secret(&mut rng);
        let (_, res) = canonical_resource::<f64>();
        let (direct, _) = qq_encode_direct(&s, &mut rng).unwrap();
        let (tele, _) = qq_encode_teleport(&res, &s, &mut rng).unwrap();
        prop_assert!(direct.equals_up_to_phase(&logical_state(&s), 1e-9));
        prop_assert!(tele.equals_up_to_phase(&logical_state(&s), 1e-9));
        let (out, _) = qq_retrieve(&tele, Triplet::all()[(seed % 4) as usize], &mut rng).unwrap();
        prop_assert!((secret_fidelity(&out, &s).unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn single_players_see_the_maximally_mixed_state() {
    let half = DensityMatrix::maximally_mixed(1).unwrap();
    let (_, psi) = canonical_resource::<f64>();
    for k in 1..=4 {
        for s in SecretQubit::probes() {
            let d = single_player_output(k, &s).unwrap().trace_distance(&half).unwrap();
            assert!(d <= 1e-9, "player {k}: {d}");
        }
        let mi = mutual_information(&psi.reduced(&[0, k]).unwrap(), &[0]).unwrap();
        assert!(mi.abs() <= 1e-8);
    }
}

#[test]
fn dealer_pair_mutual_information_regression() {
    for pair in [(1, 3), (1, 4), (2, 3), (2, 4)] {
        let mi = dealer_pair_mutual_information(pair).unwrap();
        assert!((mi - DEALER_PAIR_MI_ADJACENT).abs() < 1e-8, "{pair:?}: {mi}");
    }
    for pair in [(1, 2), (3, 4)] {
        let mi = dealer_pair_mutual_information(pair).unwrap();
        assert!((mi - DEALER_PAIR_MI_OPPOSITE).abs() < 1e-8, "{pair:?}: {mi}");
    }
}

#[test]
fn encoding_is_invariant_under_the_square_cycle() {
    // players 1 → 3 → 2 → 4 → 1, on register positions
    let cycle = [2, 3, 1, 0];
    let mut rng = seeded(4);
    for _ in 0..20 {
        let enc = logical_state(&random_secret(&mut rng));
        let mut rotated = enc.clone();
        for _ in 0..4 {
            rotated = rotated.permute_qubits(&cycle).unwrap();
            assert!(rotated.equals_up_to_phase(&enc, 1e-9));
        }
    }
}

#[test]
fn logical_operators_on_the_code_space() {
    let (p, q) = (phi(), phi_prime());
    let (x, z) = (logical_x(), logical_z());
    assert!(!x.commutes_with(&z));
    let el = |a: &qss_core::StateVector, op: &qss_core::PauliString, b: &qss_core::StateVector| {
        a.inner(&b.apply_pauli(op).unwrap()).unwrap()
    };
    let xs = [el(&p, &x, &p), el(&p, &x, &q), el(&q, &x, &p), el(&q, &x, &q)];
    let zs = [el(&p, &z, &p), el(&p, &z, &q), el(&q, &z, &p), el(&q, &z, &q)];
    for (got, want) in xs.iter().zip([0.0, 1.0, 1.0, 0.0]) {
        assert!((got - ONE * want).norm() < 1e-9);
    }
    for (got, want) in zs.iter().zip([1.0, 0.0, 0.0, -1.0]) {
        assert!((got - ONE * want).norm() < 1e-9);
    }
}

#[test]
fn opposite_pairs_recover_y_axis_secrets() {
    for pair in [(1, 2), (3, 4)] {
        for b in 0..2 {
            let s = SecretQubit::eigenstate(qss_core::Pauli::Y, b);
            let f = secret_fidelity(&opposite_pair_retrieve(pair, &s).unwrap(), &s).unwrap();
            assert!((f - 1.0).abs() < 1e-9, "{pair:?} {b}: {f}");
        }
    }
    assert!(opposite_pair_retrieve((1, 3), &SecretQubit::zero()).is_err());
}

#[test]
fn triplet_channel_is_the_identity() {
    for t in Triplet::all() {
        let rep = channel_tomography(|s| retrieval_output(&logical_state(s), t), IdealChannel::Identity).unwrap();
        assert!((rep.process_fidelity - 1.0).abs() < 1e-9);
        assert!((rep.average_fidelity - 1.0).abs() < 1e-9);
    }
    let rep = channel_tomography(|s| single_player_output(1, s), IdealChannel::Identity).unwrap();
    assert!((rep.process_fidelity - 0.25).abs() < 1e-9);
}

#[test]
fn uhlmann_fidelity_reduces_to_overlap_for_pure_states() {
    let mut rng = seeded(5);
    for _ in 0..20 {
        let a = random_state(1, &mut rng);
        let sigma = random_density(1, 2, &mut rng);
        let f = uhlmann_fidelity(&a.density(), &sigma).unwrap();
        assert!((f - sigma.fidelity_pure(&a).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn sweeps_have_constant_or_complementary_rows() {
    for plane in [Plane::Zy, Plane::Zx, Plane::Xy] {
        for (pair, class) in [((1, 3), PairClass::Adjacent), ((1, 2), PairClass::Opposite), ((3, 4), PairClass::Opposite)] {
            let refs: Vec<DensityMatrix> = default_references(class, plane).unwrap().into_iter().map(|(_, r)| r).collect();
            let rows = plane_sweep(pair, plane, 24, &refs).unwrap();
            assert_eq!(rows.len(), 24);
            for row in &rows {
                let sum: f64 = row.fidelities.iter().sum();
                assert!((sum - 1.0).abs() < 1e-9, "{plane} {pair:?} {}: {sum}", row.angle);
            }
        }
    }
    let refs: Vec<DensityMatrix> = default_references(PairClass::Opposite, Plane::Zy).unwrap().into_iter().map(|(_, r)| r).collect();
    let rows = plane_sweep((1, 2), Plane::Zy, 4, &refs).unwrap();
    // |+y⟩ sits at a quarter turn and |−y⟩ at three quarters
    assert!((rows[1].fidelities[0] - rows[3].fidelities[1]).abs() < 1e-9);
    assert!((rows[1].fidelities[0] - rows[1].fidelities[1]).abs() > 0.5);
}

#[test]
fn planes_parse_and_place_secrets() {
    assert_eq!("ZY".parse::<Plane>().unwrap(), Plane::Zy);
    assert!("ab".parse::<Plane>().is_err());
    let s = Plane::Xy.secret(PI / 2.0).bloch();
    assert!((s[1] - 1.0).abs() < 1e-12);
}
