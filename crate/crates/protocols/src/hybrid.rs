//! Threshold (3,4) sharing of a qubit: a quantum one-time pad on the encoded
//! state plus Shamir sharing of the two pad bits.

use std::collections::BTreeMap;

use qss_core::graph::canonical_resource;
use qss_core::noise::NoiseSpec;
use qss_core::{DensityMatrix, Pauli, StateVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ProtocolError, Result};
use crate::field::{Fp, Gf251};
use crate::qq::{
    logical_state, logical_x, logical_z, qq_encode_direct, retrieval_output, retrieve_in_registry,
    secret_fidelity, teleport_in_registry,
};
use crate::roles::{pair_class, Party, PlayerSet, SecretQubit, Triplet, PLAYERS};
use crate::session::{MessageKind, Payload, Protocol, QuantumRegistry, Session, Transcript};
use crate::sim::noisy_trajectory;

/// One evaluation `(point, f(point))` of the sharing polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Share<const P: u32> {
    pub point: Fp<P>,
    pub value: Fp<P>,
}

impl<const P: u32> Share<P> {
    /// `[point, value, modulus]`, one byte each.
    pub fn to_wire(self) -> Result<[u8; 3]> {
        let byte = |v: u32| u8::try_from(v).map_err(|_| ProtocolError::arg("field too large for the byte wire format"));
        Ok([byte(self.point.value())?, byte(self.value.value())?, byte(P)?])
    }

    pub fn from_wire(bytes: [u8; 3]) -> Result<Self> {
        if u32::from(bytes[2]) != P {
            return Err(ProtocolError::arg(format!("share marked for GF({}), expected GF({P})", bytes[2])));
        }
        if u32::from(bytes[0]) >= P || u32::from(bytes[1]) >= P || bytes[0] == 0 {
            return Err(ProtocolError::arg("share bytes out of range"));
        }
        Ok(Self {
            point: Fp::new(bytes[0].into()),
            value: Fp::new(bytes[1].into()),
        })
    }
}

/// Shares of one secret; share `i` (point `i`) belongs to player `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareBundle<const P: u32> {
    pub threshold: usize,
    pub shares: Vec<Share<P>>,
}

impl<const P: u32> ShareBundle<P> {
    pub fn share_for(&self, player: usize) -> Option<Share<P>> {
        self.shares.iter().copied().find(|s| s.point.value() as usize == player)
    }

    pub fn shares_for(&self, set: &PlayerSet) -> Vec<Share<P>> {
        set.players().iter().filter_map(|&p| self.share_for(p)).collect()
    }
}

fn check_params<const P: u32>(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(ProtocolError::arg(format!("threshold {k} must lie in 1..={n}")));
    }
    if n as u64 >= P as u64 {
        return Err(ProtocolError::arg(format!("{n} shares need a field larger than GF({P})")));
    }
    Ok(())
}

/// Shares `secret` with the given non-constant coefficients (degree `k − 1`
/// where `k = coeffs.len() + 1`) at points `1..=n`.
pub fn shamir_share_with_coeffs<const P: u32>(secret: Fp<P>, coeffs: &[Fp<P>], n: usize) -> Result<ShareBundle<P>> {
    let k = coeffs.len() + 1;
    check_params::<P>(k, n)?;
    let shares = (1..=n as u64)
        .map(|x| {
            let point = Fp::new(x);
            let value = coeffs.iter().rev().fold(Fp::zero(), |acc, &c| acc * point + c) * point + secret;
            Share { point, value }
        })
        .collect();
    Ok(ShareBundle { threshold: k, shares })
}

pub fn shamir_share<const P: u32, R: Rng + ?Sized>(secret: Fp<P>, k: usize, n: usize, rng: &mut R) -> Result<ShareBundle<P>> {
    check_params::<P>(k, n)?;
    let coeffs: Vec<Fp<P>> = (1..k).map(|_| Fp::new(rng.random_range(0..P).into())).collect();
    shamir_share_with_coeffs(secret, &coeffs, n)
}

fn lagrange_at<const P: u32>(shares: &[Share<P>], x: Fp<P>) -> Fp<P> {
    let mut acc = Fp::zero();
    for (i, si) in shares.iter().enumerate() {
        let mut term = si.value;
        for (j, sj) in shares.iter().enumerate() {
            if i != j {
                term = term * (x - sj.point) / (si.point - sj.point);
            }
        }
        acc = acc + term;
    }
    acc
}

/// Lagrange interpolation at zero from the first `k` shares; any extra shares
/// must lie on the same polynomial.
pub fn shamir_reconstruct<const P: u32>(shares: &[Share<P>], k: usize) -> Result<Fp<P>> {
    if k == 0 {
        return Err(ProtocolError::arg("threshold must be positive"));
    }
    if shares.len() < k {
        return Err(ProtocolError::Threshold { have: shares.len(), need: k });
    }
    for (i, a) in shares.iter().enumerate() {
        if a.point.is_zero() || shares[..i].iter().any(|b| b.point == a.point) {
            return Err(ProtocolError::arg(format!("duplicate or zero evaluation point {}", a.point)));
        }
    }
    let (basis, extra) = shares.split_at(k);
    if let Some(bad) = extra.iter().find(|s| lagrange_at(basis, s.point) != s.value) {
        return Err(ProtocolError::arg(format!("share at point {} is inconsistent", bad.point)));
    }
    Ok(lagrange_at(basis, Fp::zero()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadBits {
    pub x: u8,
    pub z: u8,
}

impl PadBits {
    pub fn all() -> [PadBits; 4] {
        [(0, 0), (0, 1), (1, 0), (1, 1)].map(|(x, z)| PadBits { x, z })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        PadBits {
            x: u8::from(rng.random::<bool>()),
            z: u8::from(rng.random::<bool>()),
        }
    }
}

/// `X_L^x Z_L^z` on the players' register.
pub fn apply_pad(players: &StateVector, pad: PadBits) -> Result<StateVector> {
    let mut s = players.clone();
    if pad.z == 1 {
        s = s.apply_pauli(&logical_z())?;
    }
    if pad.x == 1 {
        s = s.apply_pauli(&logical_x())?;
    }
    Ok(s)
}

/// Inverse of [`apply_pad`] up to a global phase.
pub fn remove_pad(players: &StateVector, pad: PadBits) -> Result<StateVector> {
    let mut s = players.clone();
    if pad.x == 1 {
        s = s.apply_pauli(&logical_x())?;
    }
    if pad.z == 1 {
        s = s.apply_pauli(&logical_z())?;
    }
    Ok(s)
}

pub fn hybrid_encode_with(secret: &SecretQubit, pad: PadBits) -> Result<StateVector> {
    apply_pad(&logical_state(secret), pad)
}

#[derive(Clone, Debug)]
pub struct HybridEncoding {
    pub players: StateVector,
    pub pad: PadBits,
    pub x_shares: ShareBundle<251>,
    pub z_shares: ShareBundle<251>,
}

/// Encodes `secret`, pads it with random `(x, z)` and shares both bits (3,4).
pub fn hybrid_encode<R: Rng + ?Sized>(secret: &SecretQubit, rng: &mut R) -> Result<HybridEncoding> {
    let (encoded, _) = qq_encode_direct(secret, rng)?;
    let pad = PadBits::random(rng);
    Ok(HybridEncoding {
        players: apply_pad(&encoded, pad)?,
        pad,
        x_shares: shamir_share(Gf251::new(pad.x.into()), 3, 4, rng)?,
        z_shares: shamir_share(Gf251::new(pad.z.into()), 3, 4, rng)?,
    })
}

fn pad_bit(v: Gf251) -> Result<u8> {
    match v.value() {
        0 => Ok(0),
        1 => Ok(1),
        other => Err(ProtocolError::arg(format!("reconstructed pad value {other} is not a bit"))),
    }
}

/// Reconstructs the pad from the supplied shares, removes it and runs
/// triplet retrieval; returns the designated player's qubit averaged over
/// helper outcomes.
pub fn hybrid_retrieve(
    triplet: Triplet,
    players: &StateVector,
    x_shares: &[Share<251>],
    z_shares: &[Share<251>],
) -> Result<DensityMatrix> {
    let pad = PadBits {
        x: pad_bit(shamir_reconstruct(x_shares, 3)?)?,
        z: pad_bit(shamir_reconstruct(z_shares, 3)?)?,
    };
    retrieval_output(&remove_pad(players, pad)?, triplet)
}

/// Pair state averaged uniformly over the four pads.
pub fn pad_averaged_pair_state(pair: (usize, usize), secret: &SecretQubit) -> Result<DensityMatrix> {
    pair_class(pair.0, pair.1)?;
    let set = PlayerSet::new(vec![pair.0, pair.1])?;
    let states = PadBits::all()
        .into_iter()
        .map(|pad| Ok(hybrid_encode_with(secret, pad)?.reduced(&set.register_indices())?))
        .collect::<Result<Vec<_>>>()?;
    let parts: Vec<(f64, &DensityMatrix)> = states.iter().map(|s| (0.25, s)).collect();
    Ok(DensityMatrix::mixture(&parts)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridConfig {
    pub rounds: u64,
    pub triplet: Triplet,
    pub secret: SecretQubit,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_rounds: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridOutcome {
    pub rounds: u64,
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
}

/// Per round: the dealer pads the secret locally, teleports it in, deals the
/// pad shares to all four players, the triplet pools its shares at the
/// designated player, retrieves, and the designated player removes the pad.
pub fn run_hybrid_session(config: &HybridConfig, seed: u64) -> Result<(HybridOutcome, Transcript)> {
    if config.rounds == 0 {
        return Err(ProtocolError::arg("a session needs at least one round"));
    }
    let (_, resource) = canonical_resource::<f64>();
    let t = config.triplet;
    let d = t.designated();
    let mut session = Session::new(Protocol::Hybrid, seed).with_record_limit(config.record_rounds);
    let (mut total, mut min) = (0.0, f64::INFINITY);
    for _ in 0..config.rounds {
        session.begin_round("use");
        let psi = noisy_trajectory(&resource, config.noise.as_ref(), session.rng())?;
        let mut reg = QuantumRegistry::distribute(psi)?;

        let pad = PadBits::random(session.rng());
        let padded = {
            let mut s = config.secret.state();
            if pad.z == 1 {
                s = s.apply_pauli(&"Z".parse()?)?;
            }
            if pad.x == 1 {
                s = s.apply_pauli(&"X".parse()?)?;
            }
            [s.amplitude(0), s.amplitude(1)]
        };
        teleport_in_registry(&mut reg, &mut session, padded)?;

        let xs = shamir_share(Gf251::new(pad.x.into()), 3, 4, session.rng())?;
        let zs = shamir_share(Gf251::new(pad.z.into()), 3, 4, session.rng())?;
        for (tag, bundle) in [('x', &xs), ('z', &zs)] {
            for k in PLAYERS {
                let share = bundle.share_for(k).expect("four shares");
                session.send(
                    Party::Dealer,
                    Party::Player(k),
                    MessageKind::ShareDelivery,
                    Payload::Share { pad: tag, wire: share.to_wire()? },
                );
            }
        }
        let mut pooled: BTreeMap<char, Vec<Share<251>>> = BTreeMap::new();
        for (tag, bundle) in [('x', &xs), ('z', &zs)] {
            for k in t.members() {
                let share = bundle.share_for(k).expect("four shares");
                if k != d {
                    session.send(
                        Party::Player(k),
                        Party::Player(d),
                        MessageKind::ResultAnnouncement,
                        Payload::Share { pad: tag, wire: share.to_wire()? },
                    );
                }
                pooled.entry(tag).or_default().push(Share::from_wire(share.to_wire()?)?);
            }
        }
        let x = pad_bit(shamir_reconstruct(&pooled[&'x'], 3)?)?;
        let z = pad_bit(shamir_reconstruct(&pooled[&'z'], 3)?)?;

        retrieve_in_registry(&mut reg, &mut session, t)?;
        if x == 1 {
            reg.apply_pauli(Party::Player(d), d, Pauli::X)?;
        }
        if z == 1 {
            reg.apply_pauli(Party::Player(d), d, Pauli::Z)?;
        }
        let f = secret_fidelity(&reg.inspect(&[d])?, &config.secret)?;
        session.note("fidelity", f);
        total += f;
        min = min.min(f);
    }
    let outcome = HybridOutcome {
        rounds: config.rounds,
        mean_fidelity: total / config.rounds as f64,
        min_fidelity: min,
    };
    let metrics = BTreeMap::from([
        ("rounds".to_string(), config.rounds as f64),
        ("mean_fidelity".to_string(), outcome.mean_fidelity),
        ("min_fidelity".to_string(), outcome.min_fidelity),
    ]);
    Ok((outcome, session.finish(metrics)))
}
