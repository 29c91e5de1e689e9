//! Acceptance criteria 1–11. Runs as a plain binary so that every verdict is
//! printed, and exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::error::Error;
use std::time::Instant;

use common::*;
use qss_core::graph::{canonical_resource, stabilizer_generators};
use qss_core::info::{fidelity_via_pauli_terms, fits_basis, fidelity_bases, fidelity_terms, mutual_information, witness_value};
use qss_core::noise::{apply_noise, seeded, NoiseSpec};
use qss_core::{DensityMatrix, Matrix, StateVector};
use qss_protocols::cq::{classify_access, run_cq_session, Access, CqConfig};
use qss_protocols::field::{Gf251, Gf5};
use qss_protocols::hybrid::{hybrid_encode_with, HybridConfig, hybrid_retrieve, pad_averaged_pair_state, shamir_reconstruct, shamir_share, shamir_share_with_coeffs, PadBits};
use qss_protocols::qq::{
    channel_tomography, encode_teleport_branch, pair_reduced_state, retrieve_branch, secret_fidelity,
    single_player_output, teleport_retrieval_output, IdealChannel, Plane, QqConfig,
};
use qss_protocols::session::{run_report, SessionConfig};
use qss_protocols::sqq::{gamma, pass_probability, retrieval_fidelities, run_sqq_session, test_set, AbortPolicy, SqqConfig};
use qss_protocols::{pair_class, PairClass, PlayerSet, SecretQubit, Triplet};

type Outcome = Result<(bool, String), Box<dyn Error>>;

/// Ideal-state witness value, fixed by the dense-operator oracle below.
const IDEAL_WITNESS: f64 = -1.0;
const WHITE_V_DIGITS: f64 = 0.6903;

fn ideal_density() -> DensityMatrix {
    canonical_resource::<f64>().1.density()
}

fn white_noise_state() -> Result<DensityMatrix, Box<dyn Error>> {
    let v = NoiseSpec::visibility_for_fidelity(0.70, 5);
    Ok(apply_noise(&ideal_density(), &NoiseSpec::white(v)?)?)
}

fn max_amplitude_error(psi: &StateVector, oracle: &[qss_core::Complex]) -> f64 {
    let overlap: qss_core::Complex = oracle.iter().zip(psi.amplitudes()).map(|(o, p)| o.conj() * p).sum();
    let phase = overlap / overlap.norm();
    psi.amplitudes()
        .iter()
        .zip(oracle)
        .map(|(p, o)| (p - phase * o).norm())
        .fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let (g, psi) = canonical_resource::<f64>();
    let err = max_amplitude_error(&psi, resource_y_expansion().amplitudes());
    let mut worst_stab: f64 = 0.0;
    for k in stabilizer_generators(&g) {
        let dense = dense_pauli(&k.to_string());
        worst_stab = worst_stab.max((dense_expectation(&dense, psi.amplitudes()) - ONE).norm());
    }
    let secs = t.elapsed().as_secs_f64();
    Ok((
        err <= 1e-9 && worst_stab <= 1e-10 && secs < 1.0,
        format!("max amplitude error {err:.2e}, worst stabilizer deviation {worst_stab:.2e}, {secs:.3} s"),
    ))
}

fn criterion_2() -> Outcome {
    let ideal = ideal_density();
    let f_ideal = fidelity_via_pauli_terms(&ideal)?.fidelity;
    let bases = fidelity_bases();
    let mut unique: Vec<String> = bases.iter().map(|b| b.to_string()).collect();
    unique.sort();
    unique.dedup();
    let covered = fidelity_terms().iter().all(|t| bases.iter().any(|b| fits_basis(t, b)));
    let (_, psi) = canonical_resource::<f64>();
    let mut rng = seeded(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let rho = random_state(5, &mut rng).density();
        let a = fidelity_via_pauli_terms(&rho)?.fidelity;
        worst = worst.max((a - rho.fidelity_pure(&psi)?).abs());
    }
    Ok((
        (f_ideal - 1.0).abs() <= 1e-12 && unique.len() == 17 && covered && worst <= 1e-9,
        format!(
            "ideal F = {f_ideal:.15}, {} unique bases (all terms covered: {covered}), worst deviation on 100 random states {worst:.2e}",
            unique.len()
        ),
    ))
}

/// `⟨Ψ|W|Ψ⟩` for `W = 9/4·I − ¼ΣX-type − ½ΣY/Z-type`, by dense operators on the expansion oracle.
fn witness_oracle(psi: &[qss_core::Complex]) -> f64 {
    let x_terms = ["-XXIIX", "-XXIXI", "+IXXXX", "+IXXII", "-XIXIX", "-XIXXI", "+IIIXX"];
    let yz_terms = ["+IZYYZ", "+YZYII", "+YIIYZ"];
    let mut v = 2.25;
    for t in x_terms {
        v -= 0.25 * dense_expectation(&dense_pauli(t), psi).re;
    }
    for t in yz_terms {
        v -= 0.5 * dense_expectation(&dense_pauli(t), psi).re;
    }
    v
}

fn criterion_3() -> Outcome {
    let mut rng = seeded(3);
    let mut min_product = f64::INFINITY;
    for _ in 0..1000 {
        min_product = min_product.min(witness_value(&random_product(5, &mut rng).density())?);
    }
    let ideal = witness_value(&ideal_density())?;
    let oracle = witness_oracle(resource_y_expansion().amplitudes());
    let noisy = witness_value(&white_noise_state()?)?;
    println!("  note: witness on the F = 0.70 white-noise model = {noisy:.4} (experiment: -0.15 ± 0.03)");
    Ok((
        min_product >= -1e-9 && ideal < 0.0 && (ideal - oracle).abs() <= 1e-9 && (ideal - IDEAL_WITNESS).abs() <= 1e-9,
        format!("min over 1000 product states {min_product:.4}, ideal {ideal:.12} (oracle {oracle:.12}, constant {IDEAL_WITNESS})"),
    ))
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let verdicts = classify_access(&ideal_density(), 1e-9)?;
    let mut ok = verdicts.len() == 15;
    let mut lines = Vec::new();
    for v in &verdicts {
        let p = v.subset.players();
        let good = match p.len() {
            1 => v.chi_z <= 1e-9 && v.chi_y <= 1e-9 && v.classification == Access::Unauthorized,
            2 => match pair_class(p[0], p[1])? {
                PairClass::Adjacent => v.chi_z <= 1e-9 && v.chi_y <= 1e-9 && v.classification == Access::Unauthorized,
                PairClass::Opposite => v.chi_z <= 1e-9 && (v.chi_y - 1.0).abs() <= 1e-9 && v.classification == Access::Partial,
            },
            _ => (v.chi_z - 1.0).abs() <= 1e-9 && (v.chi_y - 1.0).abs() <= 1e-9 && v.classification == Access::Authorized,
        };
        if !good {
            lines.push(format!("{:?}: chi_z {:.3e} chi_y {:.3e}", p, v.chi_z, v.chi_y));
        }
        ok &= good;
    }
    let secs = t.elapsed().as_secs_f64();
    ok &= secs < 5.0;
    let detail = if lines.is_empty() {
        format!("15 subsets match the (3,1,4) ramp table, {secs:.3} s")
    } else {
        format!("mismatches: {}", lines.join("; "))
    };
    Ok((ok, detail))
}

fn criterion_5() -> Outcome {
    let triplet: Triplet = "1,2,4".parse()?;
    let clean = CqConfig { rounds: 10_000, triplet, noise: None, record_rounds: Some(0) };
    let (ideal, _) = run_cq_session(&clean, 5)?;
    let noisy = CqConfig { noise: Some(NoiseSpec::flip(0.14)?), ..clean };
    let (flipped, _) = run_cq_session(&noisy, 5)?;
    println!(
        "  note: flip p = 0.14 gives QBER {:.4} against the 0.11 bound (experiment: 14–18%)",
        flipped.qber_same_basis
    );
    Ok((
        ideal.qber_same_basis == 0.0
            && (ideal.qber_cross_basis - 0.5).abs() <= 0.02
            && (flipped.qber_same_basis - 0.14).abs() <= 0.01,
        format!(
            "noiseless same-basis {:.4}, cross-basis {:.4}; flip 0.14 same-basis {:.4}",
            ideal.qber_same_basis, ideal.qber_cross_basis, flipped.qber_same_basis
        ),
    ))
}

fn criterion_6() -> Outcome {
    let (_, psi) = canonical_resource::<f64>();
    let mut worst_m: f64 = 0.0;
    let mut worst_t: f64 = 0.0;
    let mut worst_mi: f64 = 0.0;
    for k in 1..=4 {
        let report = channel_tomography(|s| Ok(single_player_output(k, s)?), IdealChannel::MaximallyMixed)?;
        worst_m = worst_m.max(report.channel.matrix_norm());
        worst_t = worst_t.max(report.channel.translation_norm());
        worst_mi = worst_mi.max(mutual_information(&psi.reduced(&[0, k])?, &[0])?.abs());
    }
    Ok((
        worst_m <= 1e-9 && worst_t <= 1e-9 && worst_mi <= 1e-8,
        format!("worst matrix norm {worst_m:.2e}, translation norm {worst_t:.2e}, dealer-player MI {worst_mi:.2e}"),
    ))
}

fn criterion_7() -> Outcome {
    let (_, psi) = canonical_resource::<f64>();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for triplet in Triplet::all() {
        for secret in SecretQubit::cardinal() {
            for m1 in 0..2 {
                for m2 in 0..2 {
                    let (_, players) = encode_teleport_branch(&psi, &secret, m1, m2)?;
                    let players = players.ok_or("empty teleport branch")?;
                    for s_z in 0..2 {
                        for s_x in 0..2 {
                            if let (p, Some(out)) = retrieve_branch(&players, triplet, s_z, s_x)? {
                                if p > 1e-12 {
                                    worst = worst.max((secret_fidelity(&out, &secret)? - 1.0).abs());
                                    cases += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let noisy = white_noise_state()?;
    let mut total = 0.0;
    for triplet in Triplet::all() {
        for secret in SecretQubit::cardinal() {
            total += secret_fidelity(&teleport_retrieval_output(&noisy, &secret, triplet)?, &secret)?;
        }
    }
    println!(
        "  note: mean retrieval fidelity at v = {WHITE_V_DIGITS} is {:.4} (experiment: 0.82 / 0.81)",
        total / 24.0
    );
    Ok((
        worst <= 1e-9 && cases == 4 * 6 * 4 * 4,
        format!("{cases} branches, worst |F − 1| = {worst:.2e}"),
    ))
}

fn criterion_8() -> Outcome {
    let mut worst_opp: f64 = 0.0;
    let mut worst_adj: f64 = 0.0;
    for plane in [Plane::Zy, Plane::Zx, Plane::Xy] {
        for k in 0..24 {
            let secret = plane.secret(std::f64::consts::TAU * k as f64 / 24.0);
            let opp = opposite_closed_form(&secret);
            let adj = adjacent_closed_form(&secret);
            for pair in [(1, 2), (3, 4)] {
                worst_opp = worst_opp.max(pair_reduced_state(pair, &secret)?.max_abs_diff(&opp));
            }
            for pair in [(1, 3), (1, 4), (2, 3), (2, 4)] {
                worst_adj = worst_adj.max(pair_reduced_state(pair, &secret)?.max_abs_diff(&adj));
            }
        }
    }
    Ok((
        worst_opp <= 1e-9 && worst_adj <= 1e-9,
        format!("72 secrets: opposite worst {worst_opp:.2e}, adjacent worst {worst_adj:.2e}"),
    ))
}

fn criterion_9() -> Outcome {
    let quarter_i = DensityMatrix::maximally_mixed(2)?;
    let xx = Matrix::from_fn(4, |i, j| dense_pauli("XX")[i][j]);
    let opp_ref = DensityMatrix::new((&Matrix::identity(4) + &xx).scale_real(0.25))?;
    let mut rng = seeded(9);
    let mut secrets: Vec<SecretQubit> = SecretQubit::cardinal().to_vec();
    secrets.extend((0..10).map(|_| random_secret(&mut rng)));
    let mut worst_avg: f64 = 0.0;
    for s in &secrets {
        for pair in [(1, 2), (3, 4)] {
            worst_avg = worst_avg.max(pad_averaged_pair_state(pair, s)?.max_abs_diff(&opp_ref));
        }
        for pair in [(1, 3), (1, 4), (2, 3), (2, 4)] {
            worst_avg = worst_avg.max(pad_averaged_pair_state(pair, s)?.max_abs_diff(&quarter_i));
        }
    }

    let mut worst_fid: f64 = 0.0;
    let mut cases = 0;
    for triplet in Triplet::all() {
        for secret in SecretQubit::cardinal() {
            for pad in PadBits::all() {
                let players = hybrid_encode_with(&secret, pad)?;
                let xs = shamir_share(Gf251::new(pad.x.into()), 3, 4, &mut rng)?;
                let zs = shamir_share(Gf251::new(pad.z.into()), 3, 4, &mut rng)?;
                let set = triplet.set();
                let out = hybrid_retrieve(triplet, &players, &xs.shares_for(&set), &zs.shares_for(&set))?;
                worst_fid = worst_fid.max((secret_fidelity(&out, &secret)? - 1.0).abs());
                cases += 1;
            }
        }
    }

    let (threshold_ok, hiding_ok) = shamir_gf5_exhaustive()?;
    Ok((
        worst_avg <= 1e-9 && worst_fid <= 1e-9 && cases == 96 && threshold_ok && hiding_ok,
        format!(
            "pad-averaged worst {worst_avg:.2e}; {cases} retrievals worst |F − 1| = {worst_fid:.2e}; GF(5) reconstruction {threshold_ok}, two-share hiding {hiding_ok}"
        ),
    ))
}

/// Every degree-2 polynomial over GF(5): any three shares reconstruct, and the
/// joint distribution of any two shares does not depend on the secret.
fn shamir_gf5_exhaustive() -> Result<(bool, bool), Box<dyn Error>> {
    let mut reconstruct = true;
    let mut hiding = true;
    let players: Vec<PlayerSet> = PlayerSet::all();
    let mut views: BTreeMap<(Vec<usize>, Vec<u32>), [u32; 5]> = BTreeMap::new();
    for secret in Gf5::elements() {
        for a in Gf5::elements() {
            for b in Gf5::elements() {
                let bundle = shamir_share_with_coeffs(secret, &[a, b], 4)?;
                for set in &players {
                    let shares = bundle.shares_for(set);
                    match set.len() {
                        3 | 4 => reconstruct &= shamir_reconstruct(&shares, 3)? == secret,
                        2 => {
                            reconstruct &= shamir_reconstruct(&shares, 3).is_err();
                            let key = (set.players().to_vec(), shares.iter().map(|s| s.value.value()).collect());
                            views.entry(key).or_insert([0; 5])[secret.value() as usize] += 1;
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    for counts in views.values() {
        hiding &= counts.iter().all(|&c| c == counts[0]);
    }
    hiding &= views.len() == 6 * 25;
    Ok((reconstruct, hiding))
}

fn criterion_10() -> Outcome {
    let mut op_err: f64 = 0.0;
    for triplet in Triplet::all() {
        let set = test_set(triplet)?;
        let target = (&Matrix::identity(32) + &gamma(triplet)?).scale_real(0.5);
        op_err = op_err.max(set.acceptance_operator().max_abs_diff(&target));
    }

    let triplet: Triplet = "1,2,3".parse()?;
    let v = NoiseSpec::visibility_for_fidelity(0.70, 5);
    let rho = white_noise_state()?;
    let exact = pass_probability(&rho, triplet)?;
    let closed = (1.0 + v + (1.0 - v) / 8.0) / 2.0;
    let printed = (1.0 + v + (1.0 - v) / 16.0) / 2.0;
    let config = SqqConfig {
        rounds: 100_000,
        s: 0.5,
        triplet,
        secret: SecretQubit::new(1.0, 2.0)?,
        noise: Some(NoiseSpec::white(v)?),
        policy: AbortPolicy::Continue,
        tamper: None,
        record_rounds: Some(0),
    };
    let (mc, _) = run_sqq_session(&config, 10)?;
    let p_mc = mc.empirical_p.ok_or("no tests were run")?;
    println!(
        "  note: v = {v:.4}: Tr(ρ M_pass) = {exact:.4}, (1+v+(1−v)/8)/2 = {closed:.4}, Monte Carlo {p_mc:.4}; \
         (1+v+(1−v)/16)/2 = {printed:.4} differs from the exact value by {:.4}",
        exact - printed
    );

    let mut rng = seeded(10);
    let mut worst_gap = f64::INFINITY;
    for k in 0..50 {
        let rho = random_density(5, 1 + k % 6, &mut rng);
        for triplet in Triplet::all() {
            let p = pass_probability(&rho, triplet)?;
            let (f, _) = retrieval_fidelities(&rho, triplet)?;
            worst_gap = worst_gap.min(f - (2.0 * p - 1.0));
        }
    }

    let mut aborted = false;
    for (i, triplet) in Triplet::all().into_iter().enumerate() {
        let c = SqqConfig {
            rounds: 2_000,
            triplet,
            noise: None,
            policy: AbortPolicy::AbortOnFail,
            ..config.clone()
        };
        aborted |= run_sqq_session(&c, 100 + i as u64)?.0.aborted;
    }

    Ok((
        op_err <= 1e-10 && (closed - exact).abs() <= 1e-10 && (p_mc - exact).abs() <= 0.01 && worst_gap >= -1e-6 && !aborted,
        format!(
            "M_pass error {op_err:.2e}; P exact {exact:.4} vs Monte Carlo {p_mc:.4}; min f − (2P − 1) over 200 cases {worst_gap:.4}; noiseless aborts: {aborted}"
        ),
    ))
}

fn session_configs() -> Result<Vec<SessionConfig>, Box<dyn Error>> {
    let triplet: Triplet = "1,2,4".parse()?;
    let secret = SecretQubit::new(0.7, 1.3)?;
    Ok(vec![
        SessionConfig::Cq(CqConfig { rounds: 100, triplet, noise: None, record_rounds: None }),
        SessionConfig::Qq(QqConfig {
            rounds: 50,
            triplet,
            secret,
            noise: Some(NoiseSpec::white(0.9)?),
            record_rounds: None,
        }),
        SessionConfig::Hybrid(HybridConfig { rounds: 20, triplet, secret, noise: None, record_rounds: None }),
        SessionConfig::Sqq(SqqConfig {
            rounds: 200,
            s: 0.5,
            triplet,
            secret,
            noise: Some(NoiseSpec::white(0.8)?),
            policy: AbortPolicy::Continue,
            tamper: None,
            record_rounds: None,
        }),
    ])
}

fn criterion_11(start: Instant) -> Outcome {
    let mut identical = true;
    let mut seed_matters = true;
    for config in session_configs()? {
        let a = run_report(&config, 7, true)?.to_json();
        let b = run_report(&config, 7, true)?.to_json();
        let c = run_report(&config, 8, true)?.to_json();
        identical &= a == b;
        seed_matters &= a != c;
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        identical && seed_matters && secs < 60.0,
        format!("byte-identical replays {identical}, seeds distinguish runs {seed_matters}, acceptance run {secs:.2} s"),
    ))
}

fn main() {
    let start = Instant::now();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("resource correctness", Box::new(criterion_1)),
        ("fidelity machinery", Box::new(criterion_2)),
        ("witness soundness", Box::new(criterion_3)),
        ("CQ access structure", Box::new(criterion_4)),
        ("CQ sessions", Box::new(criterion_5)),
        ("QQ single-player secrecy", Box::new(criterion_6)),
        ("QQ triplet retrieval", Box::new(criterion_7)),
        ("pair closed forms", Box::new(criterion_8)),
        ("hybrid elevation", Box::new(criterion_9)),
        ("SQQ bounds", Box::new(criterion_10)),
        ("determinism and pipeline", Box::new(move || criterion_11(start))),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        println!("{} criterion {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
        failures += usize::from(!ok);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
