mod common;

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use proptest::prelude::*;
use qss_core::noise::seeded;
use qss_protocols::field::{Fp, Gf251, Gf5};
use qss_protocols::hybrid::*;
use qss_protocols::qq::{logical_state, secret_fidelity, Plane};
use qss_protocols::{PlayerSet, SecretQubit, Triplet};
use rand::Rng;

/// Coefficients `(a, b)` of the unique `s + a·x + b·x²` through `(x1, y1)` and `(x2, y2)`.
fn consistent_coeffs<const P: u32>(s: Fp<P>, (x1, y1): (Fp<P>, Fp<P>), (x2, y2): (Fp<P>, Fp<P>)) -> (Fp<P>, Fp<P>) {
    let (r1, r2) = (y1 - s, y2 - s);
    let det = x1 * x2 * x2 - x2 * x1 * x1;
    let a = (r1 * x2 * x2 - r2 * x1 * x1) / det;
    let b = (x1 * r2 - x2 * r1) / det;
    (a, b)
}

#[test]
fn gf5_views_of_two_players_are_secret_independent() {
    let mut views: BTreeMap<(Vec<usize>, Vec<u32>), [u32; 5]> = BTreeMap::new();
    for s in Gf5::elements() {
        for a in Gf5::elements() {
            for b in Gf5::elements() {
                let bundle = shamir_share_with_coeffs(s, &[a, b], 4).unwrap();
                for set in PlayerSet::all() {
                    let shares = bundle.shares_for(&set);
                    if set.len() >= 3 {
                        assert_eq!(shamir_reconstruct(&shares, 3).unwrap(), s);
                    } else if set.len() == 2 {
                        let key = (set.players().to_vec(), shares.iter().map(|x| x.value.value()).collect());
                        views.entry(key).or_insert([0; 5])[s.value() as usize] += 1;
                    }
                }
            }
        }
    }
    assert_eq!(views.len(), 6 * 25);
    assert!(views.values().all(|c| c.iter().all(|&n| n == 1)));
}

#[test]
fn gf251_views_admit_every_secret_exactly_once() {
    let mut rng = seeded(251);
    let pairs: Vec<PlayerSet> = PlayerSet::all().into_iter().filter(|s| s.len() == 2).collect();
    for _ in 0..10_000 {
        let secret = Gf251::new(rng.random_range(0..251));
        let bundle = shamir_share(secret, 3, 4, &mut rng).unwrap();
        let set = &pairs[rng.random_range(0..pairs.len())];
        let view = bundle.shares_for(set);
        let other = Gf251::new(rng.random_range(0..251));
        let (a, b) = consistent_coeffs(other, (view[0].point, view[0].value), (view[1].point, view[1].value));
        let alt = shamir_share_with_coeffs(other, &[a, b], 4).unwrap();
        assert_eq!(alt.shares_for(set), view);
        assert_eq!(shamir_reconstruct(&bundle.shares_for(&"1,2,4".parse().unwrap()), 3).unwrap(), secret);
    }
}

#[test]
fn reconstruction_rejects_bad_share_sets() {
    let mut rng = seeded(1);
    let bundle = shamir_share(Gf251::new(1), 3, 4, &mut rng).unwrap();
    assert!(shamir_reconstruct(&bundle.shares[..2], 3).is_err());
    let dup = [bundle.shares[0], bundle.shares[0], bundle.shares[1]];
    assert!(shamir_reconstruct(&dup, 3).is_err());
    let mut bad = bundle.shares.clone();
    bad[3].value = bad[3].value + Gf251::one();
    assert!(shamir_reconstruct(&bad, 3).is_err());
}

proptest! {
    #[test]
    fn shares_survive_the_wire(point in 1u64..251, value in 0u64..251) {
        let s = Share::<251> { point: Gf251::new(point), value: Gf251::new(value) };
        prop_assert_eq!(Share::from_wire(s.to_wire().unwrap()).unwrap(), s);
    }

    #[test]
    fn padding_round_trips(theta in 0.0..=std::f64::consts::PI, phi in 0.0..TAU, x in 0u8..2, z in 0u8..2) {
        let s = SecretQubit::new(theta, phi).unwrap();
        let pad = PadBits { x, z };
        let back = remove_pad(&hybrid_encode_with(&s, pad).unwrap(), pad).unwrap();
        prop_assert!(back.equals_up_to_phase(&logical_state(&s), 1e-9));
    }
}

#[test]
fn pad_averaging_is_secret_independent() {
    for plane in [Plane::Zy, Plane::Zx, Plane::Xy] {
        for pair in [(1, 2), (3, 4), (1, 3), (1, 4), (2, 3), (2, 4)] {
            let reference = pad_averaged_pair_state(pair, &plane.secret(0.0)).unwrap();
            for k in 1..24 {
                let s = plane.secret(TAU * k as f64 / 24.0);
                let d = pad_averaged_pair_state(pair, &s).unwrap().max_abs_diff(&reference);
                assert!(d <= 1e-9, "{plane} {pair:?} step {k}: {d}");
            }
        }
    }
}

#[test]
fn sampled_hybrid_round_trip() {
    let mut rng = seeded(12);
    for t in Triplet::all() {
        let s = common::random_secret(&mut rng);
        let enc = hybrid_encode(&s, &mut rng).unwrap();
        let set = t.set();
        let out = hybrid_retrieve(t, &enc.players, &enc.x_shares.shares_for(&set), &enc.z_shares.shares_for(&set)).unwrap();
        assert!((secret_fidelity(&out, &s).unwrap() - 1.0).abs() < 1e-9);
        let pair: PlayerSet = "1,2".parse().unwrap();
        assert!(hybrid_retrieve(t, &enc.players, &enc.x_shares.shares_for(&pair), &enc.z_shares.shares_for(&set)).is_err());
    }
}
