//! Verified quantum secret sharing: the dealer interleaves stabilizer tests
//! with uses of the resource and aborts on a failed test.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use qss_core::graph::{canonical_graph, canonical_resource, GraphSpec};
use qss_core::noise::NoiseSpec;
use qss_core::{DensityMatrix, Matrix, Pauli, PauliString};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ProtocolError, Result};
use crate::qq::{retrieve_in_registry, secret_fidelity, teleport_in_registry, teleport_retrieval_output};
use crate::roles::{Party, SecretQubit, Triplet, DEALER};
use crate::session::{basis_name, MessageKind, Payload, Protocol, QuantumRegistry, Session, Transcript};
use crate::sim::{noisy_trajectory, pauli};

/// Tests for the triplet `(1,2,3)`, with the dealer's choice that selects each.
/// The last entry is the trivial test that pairs with `M₆` when the dealer
/// makes no measurement.
const BASE_TESTS: [(&str, Option<Pauli>); 8] = [
    ("+ZZZXI", Some(Pauli::Z)),
    ("+YYZII", Some(Pauli::Y)),
    ("+YZYII", Some(Pauli::Y)),
    ("-XXIXI", Some(Pauli::X)),
    ("-XIXXI", Some(Pauli::X)),
    ("+IXXII", None),
    ("-ZYYXI", Some(Pauli::Z)),
    ("+IIIII", None),
];

/// Randomised stabilizer test for one triplet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestSet {
    pub triplet: Triplet,
    /// `M₁ … M₇` followed by the identity; each carries its accept sign.
    pub measurements: Vec<PauliString>,
    /// Dealer's basis for each entry (`None`: no dealer measurement, result `+1`).
    pub dealer_choice: Vec<Option<Pauli>>,
}

impl TestSet {
    /// The seven non-trivial measurements.
    pub fn seven(&self) -> &[PauliString] {
        &self.measurements[..7]
    }

    /// Uniform average of the accept projectors `(I + M)/2` over the schedule.
    pub fn acceptance_operator(&self) -> Matrix {
        let w = 1.0 / self.measurements.len() as f64;
        let mut acc = Matrix::zeros(32);
        for m in &self.measurements {
            let proj = (&Matrix::identity(32) + &m.matrix::<f64>()).scale_real(0.5 * w);
            acc = &acc + &proj;
        }
        acc
    }
}

/// Dealer-fixing automorphism taking `(1,2,3)` onto `triplet`.
fn relabelling_for(triplet: Triplet) -> Vec<usize> {
    let target = triplet.members();
    canonical_graph()
        .automorphisms()
        .into_iter()
        .find(|perm| {
            let mut image = [perm[1], perm[2], perm[3]];
            image.sort_unstable();
            image == target
        })
        .expect("the square's symmetries act transitively on triplets")
}

/// Builds the test set for `triplet` by relabelling the `(1,2,3)` set and
/// certifies it against `(I + Γ_B)/2`.
pub fn test_set(triplet: Triplet) -> Result<TestSet> {
    let perm = relabelling_for(triplet);
    let mut measurements = Vec::with_capacity(BASE_TESTS.len());
    let mut dealer_choice = Vec::with_capacity(BASE_TESTS.len());
    for (m, choice) in BASE_TESTS {
        measurements.push(pauli(m).relabel(&perm)?);
        dealer_choice.push(choice);
    }
    let set = TestSet {
        triplet,
        measurements,
        dealer_choice,
    };
    let target = (&Matrix::identity(32) + &gamma(triplet)?).scale_real(0.5);
    let dev = set.acceptance_operator().max_abs_diff(&target);
    if dev > 1e-10 {
        return Err(ProtocolError::Certification(format!(
            "acceptance operator for {triplet} is {dev:e} away from (I+Γ)/2"
        )));
    }
    Ok(set)
}

/// `Γ_B = P_g + Z_N P_g Z_N` where `P_g` projects onto the graph state of the
/// subgraph on the dealer and `B`, and `Z_N` is `Z` on every neighbour of the
/// excluded player. Rank 2 on those four qubits, identity on the excluded one.
pub fn gamma(triplet: Triplet) -> Result<Matrix> {
    let full = canonical_graph();
    let excluded = triplet.excluded();
    let sub = GraphSpec::new(5, full.edges().filter(|&(u, v)| u != excluded && v != excluded), DEALER)?;
    let gens: Vec<PauliString> = qss_core::graph::stabilizer_generators(&sub)
        .into_iter()
        .enumerate()
        .filter(|(v, _)| *v != excluded)
        .map(|(_, g)| g)
        .collect();
    let mut proj = Matrix::zeros(32);
    for mask in 0..(1u32 << gens.len()) {
        let mut s = PauliString::identity(5);
        for (i, g) in gens.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s = &s * g;
            }
        }
        proj = &proj + &s.matrix::<f64>();
    }
    let proj = proj.scale_real(1.0 / (1u32 << gens.len()) as f64);
    let zn = PauliString::on(5, &full.neighbors(excluded), Pauli::Z).matrix::<f64>();
    Ok(&proj + &(&(&zn * &proj) * &zn))
}

/// `Tr(ρ (I + Γ_B)/2)`.
pub fn pass_probability(rho: &DensityMatrix, triplet: Triplet) -> Result<f64> {
    let g = gamma(triplet)?;
    Ok((1.0 + rho.expectation_of(&g)?) / 2.0)
}

/// Average accept probability over the test schedule.
pub fn schedule_pass_probability(rho: &DensityMatrix, set: &TestSet) -> Result<f64> {
    let mut total = 0.0;
    for m in &set.measurements {
        total += (1.0 + rho.expectation(m)?) / 2.0;
    }
    Ok(total / set.measurements.len() as f64)
}

/// `max(2P − 1, 0)`.
pub fn fidelity_lower_bound(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ProtocolError::arg(format!("pass probability {p} outside [0, 1]")));
    }
    Ok((2.0 * p - 1.0).max(0.0))
}

/// Retrieval fidelity of the teleport-and-retrieve map on `rho`, as
/// `(worst, mean)` over the six Pauli-eigenstate secrets.
pub fn retrieval_fidelities(rho: &DensityMatrix, triplet: Triplet) -> Result<(f64, f64)> {
    let mut worst = f64::INFINITY;
    let mut total = 0.0;
    for s in SecretQubit::cardinal() {
        let f = secret_fidelity(&teleport_retrieval_output(rho, &s, triplet)?, &s)?;
        worst = worst.min(f);
        total += f;
    }
    Ok((worst, total / 6.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbortPolicy {
    /// Stop the session at the first failed test.
    AbortOnFail,
    /// Keep going to gather statistics; not the protocol as specified.
    Continue,
}

impl FromStr for AbortPolicy {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abort" | "abort-on-fail" => Ok(AbortPolicy::AbortOnFail),
            "continue" => Ok(AbortPolicy::Continue),
            _ => Err(ProtocolError::arg(format!("unknown abort policy '{s}'"))),
        }
    }
}

impl fmt::Display for AbortPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AbortPolicy::AbortOnFail => "abort-on-fail",
            AbortPolicy::Continue => "continue",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqqConfig {
    pub rounds: u64,
    /// Probability that a round is a test.
    pub s: f64,
    pub triplet: Triplet,
    pub secret: SecretQubit,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    pub policy: AbortPolicy,
    /// Fixed Pauli an untrusted channel applies to every distributed copy.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tamper: Option<PauliString>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_rounds: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqqOutcome {
    pub rounds: u64,
    pub tests_run: u64,
    pub tests_passed: u64,
    pub uses: u64,
    pub aborted: bool,
    pub empirical_p: Option<f64>,
    pub fidelity_bound: Option<f64>,
    pub mean_fidelity: Option<f64>,
    pub min_fidelity: Option<f64>,
    /// `(1−s)/(1−sP)`: chance of reaching a use without a failed test.
    pub event_probability: Option<f64>,
    /// `2s/(1−f²)` at the mean use fidelity.
    pub event_bound: Option<f64>,
    pub event_bound_holds: Option<bool>,
    /// `(1 − 2s/P(C))^{1/2}`, the fidelity the event bound guarantees.
    pub implied_fidelity: Option<f64>,
    pub implied_fidelity_holds: Option<bool>,
}

impl SqqOutcome {
    fn finalise(&mut self, s: f64, fid_total: f64) {
        if self.tests_run > 0 {
            let p = self.tests_passed as f64 / self.tests_run as f64;
            self.empirical_p = Some(p);
            self.fidelity_bound = Some((2.0 * p - 1.0).max(0.0));
            self.event_probability = Some((1.0 - s) / (1.0 - s * p));
        }
        if self.uses > 0 {
            self.mean_fidelity = Some(fid_total / self.uses as f64);
        }
        if let (Some(pc), Some(f)) = (self.event_probability, self.mean_fidelity) {
            let bound = if f < 1.0 { 2.0 * s / (1.0 - f * f) } else { f64::INFINITY };
            self.event_bound = bound.is_finite().then_some(bound);
            self.event_bound_holds = Some(pc <= bound);
            if pc > 0.0 {
                let implied = (1.0 - 2.0 * s / pc).max(0.0).sqrt();
                self.implied_fidelity = Some(implied);
                self.implied_fidelity_holds = Some(f >= implied);
            }
        }
    }

    fn metrics(&self, policy: AbortPolicy) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::from([
            ("rounds".to_string(), self.rounds as f64),
            ("tests_run".to_string(), self.tests_run as f64),
            ("tests_passed".to_string(), self.tests_passed as f64),
            ("uses".to_string(), self.uses as f64),
            ("aborted".to_string(), f64::from(u8::from(self.aborted))),
            ("statistics_mode".to_string(), f64::from(u8::from(policy == AbortPolicy::Continue))),
        ]);
        let opt = [
            ("empirical_p", self.empirical_p),
            ("fidelity_bound", self.fidelity_bound),
            ("mean_fidelity", self.mean_fidelity),
            ("min_fidelity", self.min_fidelity),
            ("event_probability", self.event_probability),
            ("event_bound", self.event_bound),
            ("implied_fidelity", self.implied_fidelity),
        ];
        for (k, v) in opt {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        }
        for (k, v) in [
            ("event_bound_holds", self.event_bound_holds),
            ("implied_fidelity_holds", self.implied_fidelity_holds),
        ] {
            if let Some(v) = v {
                m.insert(k.to_string(), f64::from(u8::from(v)));
            }
        }
        m
    }
}

/// Per round the dealer distributes a fresh (noisy, possibly tampered)
/// resource, then with probability `s` runs one randomly chosen test and
/// otherwise teleports the secret in for triplet retrieval.
pub fn run_sqq_session(config: &SqqConfig, seed: u64) -> Result<(SqqOutcome, Transcript)> {
    if !(config.s > 0.0 && config.s <= 1.0) {
        return Err(ProtocolError::arg(format!("test probability s = {} outside (0, 1]", config.s)));
    }
    if config.rounds == 0 {
        return Err(ProtocolError::arg("a session needs at least one round"));
    }
    if let Some(t) = &config.tamper {
        if t.n() != 5 {
            return Err(ProtocolError::arg("tamper operator must act on five qubits"));
        }
    }
    let tests = test_set(config.triplet)?;
    let (_, resource) = canonical_resource::<f64>();
    let mut session = Session::new(Protocol::Sqq, seed).with_record_limit(config.record_rounds);
    let mut out = SqqOutcome {
        rounds: config.rounds,
        tests_run: 0,
        tests_passed: 0,
        uses: 0,
        aborted: false,
        empirical_p: None,
        fidelity_bound: None,
        mean_fidelity: None,
        min_fidelity: None,
        event_probability: None,
        event_bound: None,
        event_bound_holds: None,
        implied_fidelity: None,
        implied_fidelity_holds: None,
    };
    let mut fid_total = 0.0;
    for _ in 0..config.rounds {
        session.begin_round("distribute");
        let mut psi = noisy_trajectory(&resource, config.noise.as_ref(), session.rng())?;
        if let Some(t) = &config.tamper {
            psi = psi.apply_pauli(t)?;
        }
        let mut reg = QuantumRegistry::distribute(psi)?;
        let test = session.rng().random::<f64>() < config.s;
        if test {
            session.relabel_round("test");
            let k = session.rng().random_range(0..tests.measurements.len());
            let m = &tests.measurements[k];
            session.send(
                Party::Dealer,
                Party::All,
                MessageKind::TestOrUse,
                Payload::TestOrUse { test: true, setting: Some(m.to_string()) },
            );
            let mut parity = 0u8;
            for q in m.support() {
                let party = reg.owner(q).expect("unmeasured qubit has an owner");
                let bit = reg.measure(party, q, m.factor(q), session.rng())?;
                parity ^= bit;
                if party != Party::Dealer {
                    session.send(
                        party,
                        Party::Dealer,
                        MessageKind::ResultAnnouncement,
                        Payload::Outcome { qubit: q, basis: basis_name(m.factor(q)), bit },
                    );
                }
            }
            let sign = m.phase().sign().expect("test operators are Hermitian");
            let pass = (parity == 0) == (sign > 0);
            out.tests_run += 1;
            out.tests_passed += u64::from(pass);
            session.note("pass", f64::from(u8::from(pass)));
            session.send(Party::Dealer, Party::All, MessageKind::PassFail, Payload::Verdict { pass });
            if !pass && config.policy == AbortPolicy::AbortOnFail {
                out.aborted = true;
                session.send(
                    Party::Dealer,
                    Party::All,
                    MessageKind::Abort,
                    Payload::Abort { reason: format!("test {m} failed") },
                );
                break;
            }
        } else {
            session.relabel_round("use");
            session.send(
                Party::Dealer,
                Party::All,
                MessageKind::TestOrUse,
                Payload::TestOrUse { test: false, setting: None },
            );
            teleport_in_registry(&mut reg, &mut session, config.secret.amplitudes())?;
            retrieve_in_registry(&mut reg, &mut session, config.triplet)?;
            let f = secret_fidelity(&reg.inspect(&[config.triplet.designated()])?, &config.secret)?;
            session.note("fidelity", f);
            out.uses += 1;
            fid_total += f;
            out.min_fidelity = Some(out.min_fidelity.map_or(f, |m: f64| m.min(f)));
        }
    }
    out.finalise(config.s, fid_total);
    let metrics = out.metrics(config.policy);
    Ok((out, session.finish(metrics)))
}
