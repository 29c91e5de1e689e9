//! Quantum secret sharing: encoding a qubit into the players' square graph
//! state, retrieving it with three players, and the two-player analysis.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use qss_core::graph::{build_graph_state, canonical_graph, canonical_resource, square_graph};
use qss_core::info::mutual_information;
use qss_core::linalg::{bloch_state, bloch_vector, hermitian_eig, QuantumState};
use qss_core::noise::NoiseSpec;
use qss_core::{Complex, DensityMatrix, Matrix, Pauli, PauliString, StateVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ProtocolError, Result};
use crate::roles::{pair_class, PairClass, Party, PlayerSet, SecretQubit, Triplet, PLAYERS};
use crate::session::{basis_name, MessageKind, Payload, Protocol, QuantumRegistry, Session, Transcript};
use crate::sim::{cnot, measure, noisy_trajectory, pauli};

/// Logical X on the players' code space: maps `|φ⟩` to `|φ'⟩`.
pub fn logical_x() -> PauliString {
    pauli("ZZZZ")
}

/// Logical Z on the players' code space; also the feedforward after an `X`
/// measurement of the dealer's qubit with outcome 1.
pub fn logical_z() -> PauliString {
    pauli("ZZXI")
}

/// `|φ⟩`, the square graph state on players 1–4.
pub fn phi() -> StateVector {
    build_graph_state(&square_graph())
}

/// `|φ'⟩ = Z₁Z₂Z₃Z₄|φ⟩`.
pub fn phi_prime() -> StateVector {
    phi().apply_pauli(&logical_x()).expect("four qubits")
}

/// `α|φ⟩ + β|φ'⟩`, the ideal encoding of `secret`.
pub fn logical_state(secret: &SecretQubit) -> StateVector {
    let [a, b] = secret.amplitudes();
    let (p, q) = (phi(), phi_prime());
    let amps = p
        .amplitudes()
        .iter()
        .zip(q.amplitudes())
        .map(|(x, y)| a * x + b * y)
        .collect();
    StateVector::new(amps).expect("normalised combination")
}

/// Applies a Pauli on the players' register (`I` on qubits outside it).
fn apply_players<S: QuantumState<f64>>(s: &S, p: &PauliString) -> Result<S> {
    Ok(s.apply_pauli(p)?)
}

/// Direct encoding for a fixed `X` outcome `s0` of the dealer's qubit.
pub fn encode_direct_branch(secret: &SecretQubit, s0: u8) -> Result<StateVector> {
    let g = canonical_graph();
    let mut psi = StateVector::plus(4)?.insert_qubit(0, secret.amplitudes())?;
    for (u, v) in g.edges() {
        psi = psi.apply_cz(u, v)?;
    }
    let (_, players) = psi.project_remove(0, Pauli::X, s0)?;
    if s0 == 1 {
        apply_players(&players, &logical_z())
    } else {
        Ok(players)
    }
}

/// The dealer prepares its qubit in the secret state before the entangling
/// gates, measures it in `X` and announces `s0`; the players' state is
/// corrected by `Z₁Z₂X₃` when `s0 = 1`.
pub fn qq_encode_direct<R: Rng + ?Sized>(secret: &SecretQubit, rng: &mut R) -> Result<(StateVector, u8)> {
    let s0 = u8::from(rng.random::<bool>());
    Ok((encode_direct_branch(secret, s0)?, s0))
}

/// Teleports `secret` into a five-qubit resource through a Bell measurement on
/// the dealer's qubit, for Bell outcome `(m1, m2)`. Returns the probability of
/// that outcome and the corrected four-qubit players' state.
pub fn encode_teleport_branch<S: QuantumState<f64>>(
    resource: &S,
    secret: &SecretQubit,
    m1: u8,
    m2: u8,
) -> Result<(f64, Option<S>)> {
    if resource.n() != 5 {
        return Err(ProtocolError::arg("teleport encoding needs the five-qubit resource"));
    }
    let joint = cnot(&resource.append_qubit(secret.amplitudes())?, 5, 0)?;
    let (p1, after) = joint.project_out(5, Pauli::X, m1)?;
    let Some(after) = after else { return Ok((0.0, None)) };
    let (p2, players) = after.project_out(0, Pauli::Z, m2)?;
    let Some(mut players) = players else { return Ok((0.0, None)) };
    if m2 == 1 {
        players = apply_players(&players, &logical_x())?;
    }
    if m1 == 1 {
        players = apply_players(&players, &logical_z())?;
    }
    Ok((p1 * p2, Some(players)))
}

/// Samples the Bell outcome of [`encode_teleport_branch`].
pub fn qq_encode_teleport<S: QuantumState<f64>, R: Rng + ?Sized>(
    resource: &S,
    secret: &SecretQubit,
    rng: &mut R,
) -> Result<(S, [u8; 2])> {
    let joint = cnot(&resource.append_qubit(secret.amplitudes())?, 5, 0)?;
    let (m1, after) = measure(&joint, 5, Pauli::X, true, rng)?;
    let (m2, mut players) = measure(&after, 0, Pauli::Z, true, rng)?;
    if m2 == 1 {
        players = apply_players(&players, &logical_x())?;
    }
    if m1 == 1 {
        players = apply_players(&players, &logical_z())?;
    }
    Ok((players, [m1, m2]))
}

/// Feedforward on the designated player for helper outcomes `(s_z, s_x)`:
/// `X^{s_z} (XZ)^{s_x} Z`, listed in application order.
pub fn correction(s_z: u8, s_x: u8) -> Vec<Pauli> {
    let mut ops = vec![Pauli::Z];
    if s_x == 1 {
        ops.extend([Pauli::Z, Pauli::X]);
    }
    if s_z == 1 {
        ops.push(Pauli::X);
    }
    ops
}

/// Index of player `k` in a register holding `players` (sorted).
fn position(players: &[usize], k: usize) -> usize {
    players.iter().position(|&p| p == k).expect("player present")
}

/// Retrieval for fixed helper outcomes: the Z helper measures `Z`, the X helper
/// measures `X`, and the designated player applies [`correction`]. `players`
/// is the four-qubit register with player `k` on qubit `k − 1`.
pub fn retrieve_branch<S: QuantumState<f64>>(
    players: &S,
    triplet: Triplet,
    s_z: u8,
    s_x: u8,
) -> Result<(f64, Option<DensityMatrix>)> {
    if players.n() != 4 {
        return Err(ProtocolError::arg("retrieval acts on the four players' qubits"));
    }
    let mut left = vec![1, 2, 3, 4];
    let (pz, s) = players.project_out(triplet.z_helper() - 1, Pauli::Z, s_z)?;
    let Some(s) = s else { return Ok((0.0, None)) };
    left.retain(|&p| p != triplet.z_helper());
    let (px, s) = s.project_out(position(&left, triplet.x_helper()), Pauli::X, s_x)?;
    let Some(mut s) = s else { return Ok((0.0, None)) };
    left.retain(|&p| p != triplet.x_helper());
    let d = position(&left, triplet.designated());
    for p in correction(s_z, s_x) {
        s = s.apply_pauli(&PauliString::single(2, d, p))?;
    }
    Ok((pz * px, Some(s.reduced(&[d])?)))
}

/// Samples the helper outcomes and returns them with the designated player's qubit.
pub fn qq_retrieve<S: QuantumState<f64>, R: Rng + ?Sized>(
    players: &S,
    triplet: Triplet,
    rng: &mut R,
) -> Result<(DensityMatrix, [u8; 2])> {
    let (s_z, s) = measure(players, triplet.z_helper() - 1, Pauli::Z, false, rng)?;
    let (s_x, mut s) = measure(&s, triplet.x_helper() - 1, Pauli::X, false, rng)?;
    let d = triplet.designated() - 1;
    for p in correction(s_z, s_x) {
        s = s.apply_pauli(&PauliString::single(4, d, p))?;
    }
    Ok((s.reduced(&[d])?, [s_z, s_x]))
}

/// Designated player's qubit averaged over the helper outcomes.
pub fn retrieval_output<S: QuantumState<f64>>(players: &S, triplet: Triplet) -> Result<DensityMatrix> {
    let mut parts = Vec::with_capacity(4);
    for s_z in 0..2 {
        for s_x in 0..2 {
            if let (p, Some(rho)) = retrieve_branch(players, triplet, s_z, s_x)? {
                parts.push((p, rho));
            }
        }
    }
    weighted_sum(&parts)
}

/// Full teleport-then-retrieve map on a (possibly noisy) five-qubit resource,
/// averaged over Bell and helper outcomes.
pub fn teleport_retrieval_output<S: QuantumState<f64>>(
    resource: &S,
    secret: &SecretQubit,
    triplet: Triplet,
) -> Result<DensityMatrix> {
    let mut parts = Vec::with_capacity(4);
    for m1 in 0..2 {
        for m2 in 0..2 {
            if let (p, Some(players)) = encode_teleport_branch(resource, secret, m1, m2)? {
                parts.push((p, retrieval_output(&players, triplet)?));
            }
        }
    }
    weighted_sum(&parts)
}

fn weighted_sum(parts: &[(f64, DensityMatrix)]) -> Result<DensityMatrix> {
    let total: f64 = parts.iter().map(|(p, _)| p).sum();
    if total <= 0.0 {
        return Err(ProtocolError::arg("no outcome branch has support"));
    }
    let refs: Vec<(f64, &DensityMatrix)> = parts.iter().map(|(p, r)| (p / total, r)).collect();
    Ok(DensityMatrix::mixture(&refs)?)
}

/// Reduced state of a player pair on the ideal encoding of `secret`.
pub fn pair_reduced_state(pair: (usize, usize), secret: &SecretQubit) -> Result<DensityMatrix> {
    pair_class(pair.0, pair.1)?;
    let set = PlayerSet::new(vec![pair.0, pair.1])?;
    Ok(logical_state(secret).reduced(&set.register_indices())?)
}

/// Opposite-pair retrieval: the lower-numbered player measures `Z` with outcome `s`
/// and the other applies `Z^{s⊕1}`. Returns the second player's qubit averaged
/// over `s`. This recovers secrets on the `Y` axis exactly.
pub fn opposite_pair_retrieve(pair: (usize, usize), secret: &SecretQubit) -> Result<DensityMatrix> {
    if pair_class(pair.0, pair.1)? != PairClass::Opposite {
        return Err(ProtocolError::arg("opposite-pair retrieval needs players (1,2) or (3,4)"));
    }
    let rho = pair_reduced_state(pair, secret)?;
    let mut parts = Vec::with_capacity(2);
    for s in 0..2u8 {
        if let (p, Some(mut out)) = rho.project_out(0, Pauli::Z, s)? {
            if s == 0 {
                out = out.apply_pauli(&pauli("Z"))?;
            }
            parts.push((p, out));
        }
    }
    weighted_sum(&parts)
}

/// Mutual information between the dealer's qubit and a player pair in the
/// ideal resource.
pub fn dealer_pair_mutual_information(pair: (usize, usize)) -> Result<f64> {
    pair_class(pair.0, pair.1)?;
    let (_, psi) = canonical_resource::<f64>();
    let (a, b) = (pair.0.min(pair.1), pair.0.max(pair.1));
    let rho = psi.reduced(&[0, a, b])?;
    Ok(mutual_information(&rho, &[0])?)
}

/// Affine action `r ↦ M r + t` of a qubit channel on Bloch vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochChannel {
    pub matrix: [[f64; 3]; 3],
    pub translation: [f64; 3],
}

impl BlochChannel {
    pub fn identity() -> Self {
        Self {
            matrix: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation: [0.0; 3],
        }
    }

    pub fn completely_depolarizing() -> Self {
        Self {
            matrix: [[0.0; 3]; 3],
            translation: [0.0; 3],
        }
    }

    /// Reconstructs the map from its outputs on `|0⟩, |1⟩, |+⟩, |+_y⟩`.
    pub fn from_probe_outputs(outputs: &[DensityMatrix; 4]) -> Result<Self> {
        let r = outputs
            .iter()
            .map(|o| Ok(bloch_vector(o)?))
            .collect::<Result<Vec<[f64; 3]>>>()?;
        let mut translation = [0.0; 3];
        let mut matrix = [[0.0; 3]; 3];
        for i in 0..3 {
            translation[i] = (r[0][i] + r[1][i]) / 2.0;
            matrix[i][0] = r[2][i] - translation[i];
            matrix[i][1] = r[3][i] - translation[i];
            matrix[i][2] = (r[0][i] - r[1][i]) / 2.0;
        }
        Ok(Self { matrix, translation })
    }

    pub fn apply(&self, r: [f64; 3]) -> [f64; 3] {
        let mut out = self.translation;
        for (i, row) in self.matrix.iter().enumerate() {
            out[i] += row[0] * r[0] + row[1] * r[1] + row[2] * r[2];
        }
        out
    }

    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(bloch_state(self.apply(bloch_vector(rho)?)))
    }

    pub fn matrix_norm(&self) -> f64 {
        self.matrix.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn translation_norm(&self) -> f64 {
        self.translation.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Normalised Choi state `½ Σ_{ij} |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.
    pub fn choi(&self) -> Result<DensityMatrix> {
        let image = |k: usize| -> Matrix {
            // image of the Pauli σ_k (k = 0 is the identity)
            let (coeffs, id) = match k {
                0 => (self.translation, 1.0),
                _ => ([self.matrix[0][k - 1], self.matrix[1][k - 1], self.matrix[2][k - 1]], 0.0),
            };
            let mut m = Pauli::I.matrix::<f64>().scale_real(id);
            for (c, p) in coeffs.iter().zip([Pauli::X, Pauli::Y, Pauli::Z]) {
                m = &m + &p.matrix::<f64>().scale_real(*c);
            }
            m
        };
        let (i, x, y, z) = (image(0), image(1), image(2), image(3));
        let half = Complex::new(0.5, 0.0);
        // |0⟩⟨0| = (I+Z)/2, |1⟩⟨1| = (I−Z)/2, |0⟩⟨1| = (X+iY)/2, |1⟩⟨0| = (X−iY)/2
        let blocks = [
            [(&i + &z).scale(half), (&x + &y.scale(Complex::new(0.0, 1.0))).scale(half)],
            [(&x - &y.scale(Complex::new(0.0, 1.0))).scale(half), (&i - &z).scale(half)],
        ];
        let m = Matrix::from_fn(4, |r, c| blocks[r / 2][c / 2][(r % 2, c % 2)] * half);
        Ok(DensityMatrix::new(m)?)
    }
}

/// `(Tr √(√ρ σ √ρ))²`.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    // eigenvalues at round-off level would contribute their square roots
    let clip = |l: f64| if l > 1e-13 { l.sqrt() } else { 0.0 };
    let sqrt_rho = rho.eigen().reconstruct_with(clip);
    let inner = &(&sqrt_rho * sigma.matrix()) * &sqrt_rho;
    let inner = Matrix::from_fn(inner.dim(), |r, c| (inner[(r, c)] + inner[(c, r)].conj()) * 0.5);
    let eig = hermitian_eig(&inner)?;
    let tr: f64 = eig.values.iter().map(|&l| clip(l)).sum();
    Ok(tr * tr)
}

/// Reference channel for process fidelity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdealChannel {
    Identity,
    MaximallyMixed,
}

impl IdealChannel {
    pub fn bloch(self) -> BlochChannel {
        match self {
            IdealChannel::Identity => BlochChannel::identity(),
            IdealChannel::MaximallyMixed => BlochChannel::completely_depolarizing(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelReport {
    pub channel: BlochChannel,
    pub ideal: IdealChannel,
    pub process_fidelity: f64,
    /// Mean over the six Pauli eigenstates of the fidelity between actual and ideal outputs.
    pub average_fidelity: f64,
}

/// Probe-based tomography of a secret-to-qubit map.
pub fn channel_tomography(
    channel: impl Fn(&SecretQubit) -> Result<DensityMatrix>,
    ideal: IdealChannel,
) -> Result<ChannelReport> {
    let probes = SecretQubit::probes();
    let outputs = [
        channel(&probes[0])?,
        channel(&probes[1])?,
        channel(&probes[2])?,
        channel(&probes[3])?,
    ];
    let bloch = BlochChannel::from_probe_outputs(&outputs)?;
    let target = ideal.bloch();
    let process_fidelity = uhlmann_fidelity(&bloch.choi()?, &target.choi()?)?;
    let mut total = 0.0;
    for s in SecretQubit::cardinal() {
        let input = bloch_state(s.bloch());
        total += uhlmann_fidelity(&channel(&s)?, &target.apply_state(&input)?)?;
    }
    Ok(ChannelReport {
        channel: bloch,
        ideal,
        process_fidelity,
        average_fidelity: total / 6.0,
    })
}

/// Dealer-to-single-player map on the ideal encoding.
pub fn single_player_output(player: usize, secret: &SecretQubit) -> Result<DensityMatrix> {
    let set = PlayerSet::new(vec![player])?;
    Ok(logical_state(secret).reduced(&set.register_indices())?)
}

/// Plane of secrets swept on a great circle of the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    Zy,
    Zx,
    Xy,
}

impl Plane {
    /// Secret at angle `a` on the circle; `a = 0` is `|0⟩` for the planes
    /// through `Z` and `|+⟩` for the equator.
    pub fn secret(self, a: f64) -> SecretQubit {
        let (s, c) = a.sin_cos();
        let r = match self {
            Plane::Zy => [0.0, s, c],
            Plane::Zx => [s, 0.0, c],
            Plane::Xy => [c, s, 0.0],
        };
        SecretQubit::from_bloch(r).expect("unit vector")
    }
}

impl FromStr for Plane {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "zy" | "yz" => Ok(Plane::Zy),
            "zx" | "xz" => Ok(Plane::Zx),
            "xy" | "yx" => Ok(Plane::Xy),
            _ => Err(ProtocolError::arg(format!("unknown plane '{s}' (zy, zx or xy)"))),
        }
    }
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Plane::Zy => "zy",
            Plane::Zx => "zx",
            Plane::Xy => "xy",
        })
    }
}

/// `Tr(ρσ) / Tr(σ²)`; equals `⟨σ|ρ|σ⟩` for a pure reference.
pub fn overlap_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.n() != sigma.n() {
        return Err(ProtocolError::arg("reference and state sizes differ"));
    }
    let num = rho.matrix().trace_product(sigma.matrix()).re;
    Ok(num / sigma.purity())
}

/// Two-qubit state `¼(I + Σ c_P P)`.
pub fn pauli_mixture(terms: &[(f64, &str)]) -> Result<DensityMatrix> {
    let mut m = Matrix::identity(4);
    for (c, p) in terms {
        m = &m + &pauli(p).matrix::<f64>().scale_real(*c);
    }
    Ok(DensityMatrix::new(m.scale_real(0.25))?)
}

/// Named reference states for a sweep, chosen by pair class and plane.
pub fn default_references(class: PairClass, plane: Plane) -> Result<Vec<(String, DensityMatrix)>> {
    Ok(match (class, plane) {
        (PairClass::Adjacent, _) => vec![("i/4".into(), pauli_mixture(&[])?)],
        (PairClass::Opposite, Plane::Zx) => vec![("(i+xx)/4".into(), pauli_mixture(&[(1.0, "XX")])?)],
        (PairClass::Opposite, _) => vec![
            ("(i+xx+zy+yz)/4".into(), pauli_mixture(&[(1.0, "XX"), (1.0, "ZY"), (1.0, "YZ")])?),
            ("(i+xx-zy-yz)/4".into(), pauli_mixture(&[(1.0, "XX"), (-1.0, "ZY"), (-1.0, "YZ")])?),
        ],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub angle: f64,
    pub fidelities: Vec<f64>,
}

/// Overlap of the pair's reduced state with each reference at `steps` equally
/// spaced angles in `[0, 2π)`.
pub fn plane_sweep(
    pair: (usize, usize),
    plane: Plane,
    steps: usize,
    references: &[DensityMatrix],
) -> Result<Vec<SweepRow>> {
    if steps < 2 {
        return Err(ProtocolError::arg("a sweep needs at least two steps"));
    }
    (0..steps)
        .map(|k| {
            let angle = 2.0 * PI * k as f64 / steps as f64;
            let rho = pair_reduced_state(pair, &plane.secret(angle))?;
            let fidelities = references
                .iter()
                .map(|r| overlap_fidelity(&rho, r))
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRow { angle, fidelities })
        })
        .collect()
}

/// Fidelity `⟨ψ|ρ|ψ⟩` of a retrieved qubit against the secret.
pub fn secret_fidelity(rho: &DensityMatrix, secret: &SecretQubit) -> Result<f64> {
    Ok(rho.fidelity_pure(&secret.state())?)
}

/// Dealer-side teleport of `secret` through qubit 0 of a distributed
/// resource. The dealer prepares the secret as qubit 5, runs the Bell
/// measurement and broadcasts the logical correction, which each player
/// applies to their own qubit.
pub(crate) fn teleport_in_registry(
    reg: &mut QuantumRegistry,
    session: &mut Session,
    secret: [Complex; 2],
) -> Result<()> {
    reg.prepare(Party::Dealer, 5, secret)?;
    reg.cnot(Party::Dealer, 5, 0)?;
    let m1 = reg.measure(Party::Dealer, 5, Pauli::X, session.rng())?;
    let m2 = reg.measure(Party::Dealer, 0, Pauli::Z, session.rng())?;
    let mut op = PauliString::identity(4);
    if m2 == 1 {
        op = &op * &logical_x();
    }
    if m1 == 1 {
        op = &op * &logical_z();
    }
    session.send(
        Party::Dealer,
        Party::All,
        MessageKind::Correction,
        Payload::Correction { operator: op.unsigned().to_string() },
    );
    for k in PLAYERS {
        reg.apply_pauli(Party::Player(k), k, op.factor(k - 1))?;
    }
    Ok(())
}

/// Helpers measure and announce; the designated player applies the feedforward.
pub(crate) fn retrieve_in_registry(reg: &mut QuantumRegistry, session: &mut Session, triplet: Triplet) -> Result<()> {
    let (d, zh, xh) = (triplet.designated(), triplet.z_helper(), triplet.x_helper());
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
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QqConfig {
    pub rounds: u64,
    pub triplet: Triplet,
    pub secret: SecretQubit,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_rounds: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QqOutcome {
    pub rounds: u64,
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
}

/// Repeated teleport-encode and triplet-retrieve rounds on fresh (possibly
/// noisy) resource copies, scoring the designated player's qubit.
pub fn run_qq_session(config: &QqConfig, seed: u64) -> Result<(QqOutcome, Transcript)> {
    if config.rounds == 0 {
        return Err(ProtocolError::arg("a session needs at least one round"));
    }
    let (_, resource) = canonical_resource::<f64>();
    let mut session = Session::new(Protocol::Qq, seed).with_record_limit(config.record_rounds);
    let (mut total, mut min) = (0.0, f64::INFINITY);
    for _ in 0..config.rounds {
        session.begin_round("use");
        let psi = noisy_trajectory(&resource, config.noise.as_ref(), session.rng())?;
        let mut reg = QuantumRegistry::distribute(psi)?;
        teleport_in_registry(&mut reg, &mut session, config.secret.amplitudes())?;
        retrieve_in_registry(&mut reg, &mut session, config.triplet)?;
        let f = secret_fidelity(&reg.inspect(&[config.triplet.designated()])?, &config.secret)?;
        session.note("fidelity", f);
        total += f;
        min = min.min(f);
    }
    let outcome = QqOutcome {
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
