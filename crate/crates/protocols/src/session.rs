//! In-process message bus, quantum ownership registry and transcripts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use qss_core::linalg::QuantumState;
use qss_core::noise::{seeded, SeededRng};
use qss_core::{DensityMatrix, Matrix, Pauli, PauliString, StateVector};
use serde::{Deserialize, Serialize};

use crate::cq::{run_cq_session, CqConfig};
use crate::error::{ProtocolError, Result};
use crate::hybrid::{run_hybrid_session, HybridConfig};
use crate::qq::{run_qq_session, QqConfig};
use crate::roles::{Party, DEALER, PLAYERS};
use crate::sqq::{run_sqq_session, SqqConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MessageKind {
    BasisAnnouncement,
    ResultAnnouncement,
    TestOrUse,
    Sift,
    Correction,
    ShareDelivery,
    PassFail,
    Abort,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Payload {
    Basis { basis: String },
    Outcome { qubit: usize, basis: String, bit: u8 },
    TestOrUse { test: bool, setting: Option<String> },
    Sift { keep: bool },
    Correction { operator: String },
    Share { pad: char, wire: [u8; 3] },
    Verdict { pass: bool },
    Abort { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub seq: u64,
    pub round: u64,
    pub from: Party,
    pub to: Party,
    pub kind: MessageKind,
    pub payload: Payload,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Protocol {
    Cq,
    Qq,
    Hybrid,
    Sqq,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::Cq => "CQ",
            Protocol::Qq => "QQ",
            Protocol::Hybrid => "HYBRID",
            Protocol::Sqq => "SQQ",
        })
    }
}

impl FromStr for Protocol {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "CQ" => Ok(Protocol::Cq),
            "QQ" => Ok(Protocol::Qq),
            "HYBRID" => Ok(Protocol::Hybrid),
            "SQQ" => Ok(Protocol::Sqq),
            _ => Err(ProtocolError::arg(format!("unknown protocol '{s}'"))),
        }
    }
}

/// Bookkeeping for one round: which fresh resource copy it consumed and what it produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u64,
    pub state_id: u64,
    pub label: String,
    pub values: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub session_id: String,
    pub protocol: Protocol,
    pub seed: u64,
    pub messages: Vec<Message>,
    pub rounds: Vec<RoundRecord>,
    pub metrics: BTreeMap<String, f64>,
    /// Messages and rounds past this many rounds were counted but not stored.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recorded_rounds: Option<u64>,
    pub total_messages: u64,
    pub total_rounds: u64,
}

impl Transcript {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serialises")
    }

    pub fn count(&self, kind: MessageKind) -> usize {
        self.messages.iter().filter(|m| m.kind == kind).count()
    }
}

/// One protocol run: the seeded randomness, the message log and the round log.
pub struct Session {
    protocol: Protocol,
    seed: u64,
    rng: SeededRng,
    seq: u64,
    round: u64,
    next_state_id: u64,
    record_limit: Option<u64>,
    messages: Vec<Message>,
    rounds: Vec<RoundRecord>,
}

impl Session {
    pub fn new(protocol: Protocol, seed: u64) -> Self {
        Self {
            protocol,
            seed,
            rng: seeded(seed),
            seq: 0,
            round: 0,
            next_state_id: 0,
            record_limit: None,
            messages: Vec::new(),
            rounds: Vec::new(),
        }
    }

    /// Stores messages and round records for the first `rounds` rounds only.
    pub fn with_record_limit(mut self, rounds: Option<u64>) -> Self {
        self.record_limit = rounds;
        self
    }

    pub fn rng(&mut self) -> &mut SeededRng {
        &mut self.rng
    }

    fn recording(&self) -> bool {
        self.record_limit.is_none_or(|l| self.round <= l)
    }

    /// Starts a round on a fresh resource copy and returns its id.
    pub fn begin_round(&mut self, label: &str) -> u64 {
        self.round += 1;
        let state_id = self.next_state_id;
        self.next_state_id += 1;
        if self.recording() {
            self.rounds.push(RoundRecord {
                round: self.round,
                state_id,
                label: label.to_string(),
                values: BTreeMap::new(),
            });
        }
        state_id
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn relabel_round(&mut self, label: &str) {
        if self.recording() {
            if let Some(r) = self.rounds.last_mut() {
                r.label = label.to_string();
            }
        }
    }

    pub fn note(&mut self, key: &str, value: f64) {
        if self.recording() {
            if let Some(r) = self.rounds.last_mut() {
                r.values.insert(key.to_string(), value);
            }
        }
    }

    pub fn send(&mut self, from: Party, to: Party, kind: MessageKind, payload: Payload) {
        self.seq += 1;
        if self.recording() {
            self.messages.push(Message {
                seq: self.seq,
                round: self.round,
                from,
                to,
                kind,
                payload,
            });
        }
    }

    pub fn finish(self, metrics: BTreeMap<String, f64>) -> Transcript {
        Transcript {
            session_id: format!("{}-{:016x}", self.protocol.to_string().to_lowercase(), self.seed),
            protocol: self.protocol,
            seed: self.seed,
            messages: self.messages,
            rounds: self.rounds,
            metrics,
            recorded_rounds: self.record_limit,
            total_messages: self.seq,
            total_rounds: self.round,
        }
    }
}

/// Joint state of one round plus who owns which qubit. Qubit ids are stable:
/// `0` is the dealer's resource qubit, `k` is player `k`'s, and ids from `5`
/// up are qubits a party prepares later. Measured qubits leave the register.
#[derive(Clone, Debug)]
pub struct QuantumRegistry<S = StateVector> {
    state: S,
    ids: Vec<usize>,
    owners: BTreeMap<usize, Party>,
}

impl<S: QuantumState<f64>> QuantumRegistry<S> {
    /// Hands out a five-qubit resource: qubit 0 to the dealer, qubit `k` to player `k`.
    pub fn distribute(state: S) -> Result<Self> {
        if state.n() != 5 {
            return Err(ProtocolError::arg("the resource has five qubits"));
        }
        let mut owners = BTreeMap::new();
        owners.insert(DEALER, Party::Dealer);
        for k in PLAYERS {
            owners.insert(k, Party::Player(k));
        }
        Ok(Self {
            state,
            ids: (0..5).collect(),
            owners,
        })
    }

    pub fn owner(&self, id: usize) -> Option<Party> {
        self.owners.get(&id).copied()
    }

    pub fn state(&self) -> &S {
        &self.state
    }

    pub fn qubits(&self) -> &[usize] {
        &self.ids
    }

    /// Register position of `id`, provided `party` owns it.
    fn local(&self, party: Party, id: usize) -> Result<usize> {
        if self.owners.get(&id) != Some(&party) {
            return Err(ProtocolError::Locality { party, qubit: id });
        }
        self.ids
            .iter()
            .position(|&q| q == id)
            .ok_or_else(|| ProtocolError::arg(format!("qubit {id} was already measured")))
    }

    /// Measures and discards the qubit.
    pub fn measure<R: rand::Rng + ?Sized>(
        &mut self,
        party: Party,
        id: usize,
        basis: Pauli,
        rng: &mut R,
    ) -> Result<u8> {
        let pos = self.local(party, id)?;
        let (bit, post) = crate::sim::measure(&self.state, pos, basis, true, rng)?;
        self.state = post;
        self.ids.remove(pos);
        self.owners.remove(&id);
        Ok(bit)
    }

    pub fn apply_pauli(&mut self, party: Party, id: usize, p: Pauli) -> Result<()> {
        let pos = self.local(party, id)?;
        if p != Pauli::I {
            self.state = self.state.apply_pauli(&PauliString::single(self.ids.len(), pos, p))?;
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, party: Party, id: usize, gate: &Matrix) -> Result<()> {
        let pos = self.local(party, id)?;
        self.state = self.state.apply_single(pos, gate)?;
        Ok(())
    }

    pub fn cnot(&mut self, party: Party, control: usize, target: usize) -> Result<()> {
        let c = self.local(party, control)?;
        let t = self.local(party, target)?;
        self.state = crate::sim::cnot(&self.state, c, t)?;
        Ok(())
    }

    /// `party` prepares a new qubit with the given amplitudes under id `id`.
    pub fn prepare(&mut self, party: Party, id: usize, amps: [qss_core::Complex; 2]) -> Result<()> {
        if self.owners.contains_key(&id) || self.ids.contains(&id) {
            return Err(ProtocolError::arg(format!("qubit id {id} is in use")));
        }
        self.state = self.state.append_qubit(amps)?;
        self.ids.push(id);
        self.owners.insert(id, party);
        Ok(())
    }

    /// Simulator-side view of some qubits for scoring; not a party action.
    pub fn inspect(&self, ids: &[usize]) -> Result<DensityMatrix> {
        let keep = ids
            .iter()
            .map(|id| {
                self.ids
                    .iter()
                    .position(|q| q == id)
                    .ok_or_else(|| ProtocolError::arg(format!("qubit {id} not in register")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.state.reduced(&keep)?)
    }
}

/// Configuration of any of the four session types.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "UPPERCASE")]
pub enum SessionConfig {
    Cq(CqConfig),
    Qq(QqConfig),
    Hybrid(HybridConfig),
    Sqq(SqqConfig),
}

impl SessionConfig {
    pub fn protocol(&self) -> Protocol {
        match self {
            SessionConfig::Cq(_) => Protocol::Cq,
            SessionConfig::Qq(_) => Protocol::Qq,
            SessionConfig::Hybrid(_) => Protocol::Hybrid,
            SessionConfig::Sqq(_) => Protocol::Sqq,
        }
    }
}

/// Top-level report: `{protocol, config, seed, metrics, transcript?}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub protocol: Protocol,
    pub config: SessionConfig,
    pub seed: u64,
    pub metrics: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript: Option<Transcript>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// `true` when an SQQ session stopped on a failed test.
    pub fn aborted(&self) -> bool {
        self.metrics.get("aborted").is_some_and(|v| *v != 0.0)
    }
}

/// Runs a session of any protocol and returns its transcript.
pub fn run_session(config: &SessionConfig, seed: u64) -> Result<Transcript> {
    match config {
        SessionConfig::Cq(c) => run_cq_session(c, seed).map(|(_, t)| t),
        SessionConfig::Qq(c) => run_qq_session(c, seed).map(|(_, t)| t),
        SessionConfig::Hybrid(c) => run_hybrid_session(c, seed).map(|(_, t)| t),
        SessionConfig::Sqq(c) => run_sqq_session(c, seed).map(|(_, t)| t),
    }
}

/// Runs a session and wraps it in a report; the transcript is kept only when asked.
pub fn run_report(config: &SessionConfig, seed: u64, keep_transcript: bool) -> Result<Report> {
    let transcript = run_session(config, seed)?;
    Ok(Report {
        protocol: config.protocol(),
        config: config.clone(),
        seed,
        metrics: transcript.metrics.clone(),
        transcript: keep_transcript.then_some(transcript),
    })
}

pub(crate) fn basis_name(p: Pauli) -> String {
    p.as_char().to_string()
}
