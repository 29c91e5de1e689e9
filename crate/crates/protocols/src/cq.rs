//! Classical secret sharing: the dealer measures its qubit in `Z` or `Y` and
//! authorised players recover the outcome.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use qss_core::graph::canonical_resource;
use qss_core::info::{holevo_chi, ClassicalQuantumEnsemble};
use qss_core::noise::{NoiseKind, NoiseSpec};
use qss_core::{DensityMatrix, Pauli, StateVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ProtocolError, Result};
use crate::qq::correction;
use crate::roles::{Party, PlayerSet, Triplet};
use crate::session::{basis_name, MessageKind, Payload, Protocol, QuantumRegistry, Session, Transcript};
use crate::sim::{measure, noisy_trajectory};

/// Error rate above which no secure key can be distilled.
pub const QBER_BOUND: f64 = 0.11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DealerBasis {
    Z,
    Y,
}

impl DealerBasis {
    pub const BOTH: [DealerBasis; 2] = [DealerBasis::Z, DealerBasis::Y];

    pub fn pauli(self) -> Pauli {
        match self {
            DealerBasis::Z => Pauli::Z,
            DealerBasis::Y => Pauli::Y,
        }
    }

    /// Bit to XOR onto the designated player's outcome: a `Y` outcome 0 of the
    /// dealer leaves the players holding the logical `|−_y⟩`.
    pub fn decode_flip(self) -> u8 {
        match self {
            DealerBasis::Z => 0,
            DealerBasis::Y => 1,
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.random::<bool>() {
            DealerBasis::Y
        } else {
            DealerBasis::Z
        }
    }
}

impl fmt::Display for DealerBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DealerBasis::Z => "Z",
            DealerBasis::Y => "Y",
        })
    }
}

impl FromStr for DealerBasis {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Z" | "z" => Ok(DealerBasis::Z),
            "Y" | "y" => Ok(DealerBasis::Y),
            _ => Err(ProtocolError::arg(format!("dealer basis '{s}' is not Z or Y"))),
        }
    }
}

/// Samples the dealer's measurement on a five-qubit state and returns the
/// outcome with the players' four-qubit post-measurement state.
pub fn dealer_measure<R: Rng + ?Sized>(
    state: &StateVector,
    basis: DealerBasis,
    rng: &mut R,
) -> Result<(u8, StateVector)> {
    if state.n() != 5 {
        return Err(ProtocolError::arg("the dealer measures a five-qubit resource"));
    }
    measure(state, 0, basis.pauli(), true, rng)
}

/// `{(p_i, ρ_B^{i})}` for dealer outcome `i` in `basis`; outcomes of zero
/// probability are dropped.
pub fn ensemble_for(subset: &PlayerSet, basis: DealerBasis, state: &DensityMatrix) -> Result<ClassicalQuantumEnsemble<f64>> {
    if state.n() != 5 {
        return Err(ProtocolError::arg("ensembles are built from the five-qubit state"));
    }
    let mut items = Vec::with_capacity(2);
    for i in 0..2 {
        let (p, post) = state.project_remove(0, basis.pauli(), i)?;
        if let Some(post) = post {
            items.push((p, post.partial_trace(&subset.register_indices())?));
        }
    }
    Ok(ClassicalQuantumEnsemble::new(items)?)
}

/// `E(ρ^{i}) = p ρ^{i⊕1} + (1−p) ρ^{i}` on a two-outcome ensemble.
pub fn qber_superoperator(e: &ClassicalQuantumEnsemble<f64>, p: f64) -> Result<ClassicalQuantumEnsemble<f64>> {
    let items = e.items();
    if items.len() != 2 {
        return Err(ProtocolError::arg("the QBER map acts on two-outcome ensembles"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(ProtocolError::arg(format!("QBER {p} outside [0, 1]")));
    }
    let flipped = |i: usize| DensityMatrix::mixture(&[(p, &items[1 - i].1), (1.0 - p, &items[i].1)]);
    Ok(ClassicalQuantumEnsemble::new(vec![
        (items[0].0, flipped(0)?),
        (items[1].0, flipped(1)?),
    ])?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Access {
    Authorized,
    Unauthorized,
    Partial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccessVerdict {
    pub subset: PlayerSet,
    pub chi_z: f64,
    pub chi_y: f64,
    pub classification: Access,
}

pub fn classify(chi_z: f64, chi_y: f64, tol: f64) -> Access {
    if chi_z.min(chi_y) >= 1.0 - tol {
        Access::Authorized
    } else if chi_z.max(chi_y) <= tol {
        Access::Unauthorized
    } else {
        Access::Partial
    }
}

/// Holevo quantities for both dealer bases on every non-empty player subset.
pub fn classify_access(state: &DensityMatrix, tol: f64) -> Result<Vec<AccessVerdict>> {
    PlayerSet::all()
        .into_iter()
        .map(|subset| {
            let chi_z = holevo_chi(&ensemble_for(&subset, DealerBasis::Z, state)?);
            let chi_y = holevo_chi(&ensemble_for(&subset, DealerBasis::Y, state)?);
            Ok(AccessVerdict {
                classification: classify(chi_z, chi_y, tol),
                subset,
                chi_z,
                chi_y,
            })
        })
        .collect()
}

/// Probability that the designated player decodes `bit` when the players'
/// state is `players` and helper outcomes are `(s_z, s_x)`; returns the branch
/// probability too.
pub fn decode_branch(
    players: &StateVector,
    triplet: Triplet,
    basis: DealerBasis,
    s_z: u8,
    s_x: u8,
    bit: u8,
) -> Result<(f64, f64)> {
    let (p, rho) = crate::qq::retrieve_branch(players, triplet, s_z, s_x)?;
    let Some(rho) = rho else { return Ok((0.0, 0.0)) };
    let outcome = bit ^ basis.decode_flip();
    Ok((p, rho.outcome_probability(0, basis.pauli(), outcome)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CqConfig {
    pub rounds: u64,
    pub triplet: Triplet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    /// Store messages for at most this many rounds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_rounds: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CqOutcome {
    pub rounds: u64,
    pub dealer_key: Vec<u8>,
    pub player_key: Vec<u8>,
    pub qber_same_basis: f64,
    pub qber_cross_basis: f64,
}

impl CqOutcome {
    pub fn sifted_len(&self) -> usize {
        self.dealer_key.len()
    }
}

/// Runs `rounds` rounds of key generation with the authorised `triplet`.
///
/// A `qber-flip` noise spec flips the decoded bit classically; other kinds act
/// on the distributed resource.
pub fn run_cq_session(config: &CqConfig, seed: u64) -> Result<(CqOutcome, Transcript)> {
    if config.rounds == 0 {
        return Err(ProtocolError::arg("a session needs at least one round"));
    }
    let (_, resource) = canonical_resource::<f64>();
    let (state_noise, flip) = match &config.noise {
        Some(n) if n.kind == NoiseKind::QberFlip => (None, n.parameter),
        other => (other.clone(), 0.0),
    };
    let t = config.triplet;
    let (d, zh, xh) = (t.designated(), t.z_helper(), t.x_helper());
    let mut session = Session::new(Protocol::Cq, seed).with_record_limit(config.record_rounds);
    let (mut dealer_key, mut player_key) = (Vec::new(), Vec::new());
    let (mut cross, mut cross_err) = (0u64, 0u64);
    for _ in 0..config.rounds {
        session.begin_round("key");
        let psi = noisy_trajectory(&resource, state_noise.as_ref(), session.rng())?;
        let mut reg = QuantumRegistry::distribute(psi)?;

        let j = DealerBasis::random(session.rng());
        let dealer_bit = reg.measure(Party::Dealer, 0, j.pauli(), session.rng())?;
        let guess = DealerBasis::random(session.rng());

        let s_z = reg.measure(Party::Player(zh), zh, Pauli::Z, session.rng())?;
        session.send(
            Party::Player(zh),
            Party::Player(d),
            MessageKind::ResultAnnouncement,
            Payload::Outcome { qubit: zh, basis: basis_name(Pauli::Z), bit: s_z },
        );
        let s_x = reg.measure(Party::Player(xh), xh, Pauli::X, session.rng())?;
        session.send(
            Party::Player(xh),
            Party::Player(d),
            MessageKind::ResultAnnouncement,
            Payload::Outcome { qubit: xh, basis: basis_name(Pauli::X), bit: s_x },
        );
        for p in correction(s_z, s_x) {
            reg.apply_pauli(Party::Player(d), d, p)?;
        }
        let raw = reg.measure(Party::Player(d), d, guess.pauli(), session.rng())?;
        let mut decoded = raw ^ guess.decode_flip();
        if flip > 0.0 && session.rng().random::<f64>() < flip {
            decoded ^= 1;
        }

        session.send(
            Party::Dealer,
            Party::All,
            MessageKind::BasisAnnouncement,
            Payload::Basis { basis: j.to_string() },
        );
        session.send(
            Party::Player(d),
            Party::All,
            MessageKind::BasisAnnouncement,
            Payload::Basis { basis: guess.to_string() },
        );
        let keep = j == guess;
        session.send(Party::Dealer, Party::All, MessageKind::Sift, Payload::Sift { keep });
        session.note("dealer_bit", dealer_bit as f64);
        session.note("player_bit", decoded as f64);
        session.note("kept", f64::from(u8::from(keep)));
        if keep {
            dealer_key.push(dealer_bit);
            player_key.push(decoded);
        } else {
            cross += 1;
            cross_err += u64::from(dealer_bit != decoded);
        }
    }
    let same_err = dealer_key.iter().zip(&player_key).filter(|(a, b)| a != b).count();
    let rate = |e: u64, n: u64| if n == 0 { 0.0 } else { e as f64 / n as f64 };
    let outcome = CqOutcome {
        rounds: config.rounds,
        qber_same_basis: rate(same_err as u64, dealer_key.len() as u64),
        qber_cross_basis: rate(cross_err, cross),
        dealer_key,
        player_key,
    };
    let metrics = BTreeMap::from([
        ("rounds".to_string(), config.rounds as f64),
        ("sifted_bits".to_string(), outcome.sifted_len() as f64),
        ("qber_same_basis".to_string(), outcome.qber_same_basis),
        ("qber_cross_basis".to_string(), outcome.qber_cross_basis),
        ("qber_bound".to_string(), QBER_BOUND),
        ("below_bound".to_string(), f64::from(u8::from(outcome.qber_same_basis < QBER_BOUND))),
    ]);
    Ok((outcome, session.finish(metrics)))
}
