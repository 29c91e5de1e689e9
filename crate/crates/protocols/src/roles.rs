//! Player sets, the authorised triplets and the secret qubit.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use qss_core::{Complex, Pauli, StateVector};
use serde::{Deserialize, Serialize};

use crate::error::{ProtocolError, Result};

pub const DEALER: usize = 0;
pub const PLAYERS: [usize; 4] = [1, 2, 3, 4];

/// A protocol participant, or every participant at once as a message target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    Dealer,
    Player(usize),
    All,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Dealer => f.write_str("dealer"),
            Party::Player(k) => write!(f, "player{k}"),
            Party::All => f.write_str("all"),
        }
    }
}

impl FromStr for Party {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dealer" => Ok(Party::Dealer),
            "all" => Ok(Party::All),
            _ => s
                .strip_prefix("player")
                .and_then(|k| k.parse().ok())
                .filter(|k| PLAYERS.contains(k))
                .map(Party::Player)
                .ok_or_else(|| ProtocolError::arg(format!("unknown party '{s}'"))),
        }
    }
}

impl Serialize for Party {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Party {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Non-empty subset of the players `{1, 2, 3, 4}`, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PlayerSet(Vec<usize>);

impl PlayerSet {
    pub fn new(mut players: Vec<usize>) -> Result<Self> {
        players.sort_unstable();
        players.dedup();
        if players.is_empty() || players.iter().any(|p| !PLAYERS.contains(p)) {
            return Err(ProtocolError::arg(format!(
                "{players:?} is not a non-empty subset of players 1-4"
            )));
        }
        Ok(Self(players))
    }

    pub fn players(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.0.contains(&p)
    }

    /// Indices into a four-qubit players' register (player `k` sits at `k − 1`).
    pub fn register_indices(&self) -> Vec<usize> {
        self.0.iter().map(|p| p - 1).collect()
    }

    /// All 15 non-empty subsets, by size then lexicographically.
    pub fn all() -> Vec<PlayerSet> {
        let mut sets: Vec<PlayerSet> = (1u32..16)
            .map(|mask| {
                PlayerSet(PLAYERS.iter().copied().filter(|p| mask & (1 << (p - 1)) != 0).collect())
            })
            .collect();
        sets.sort_by(|a, b| a.len().cmp(&b.len()).then(a.0.cmp(&b.0)));
        sets
    }
}

impl TryFrom<Vec<usize>> for PlayerSet {
    type Error = ProtocolError;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        PlayerSet::new(v)
    }
}

impl From<PlayerSet> for Vec<usize> {
    fn from(s: PlayerSet) -> Self {
        s.0
    }
}

impl fmt::Display for PlayerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Comma-separated player numbers, e.g. `1,2,4`.
impl FromStr for PlayerSet {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self> {
        let players = s
            .trim_matches(|c| c == '(' || c == ')')
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| ProtocolError::arg(format!("bad player list '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        PlayerSet::new(players)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairClass {
    /// Joined by an edge of the square.
    Adjacent,
    /// Diagonally opposite: `(1,2)` or `(3,4)`.
    Opposite,
}

pub fn pair_class(a: usize, b: usize) -> Result<PairClass> {
    let set = PlayerSet::new(vec![a, b])?;
    if set.len() != 2 {
        return Err(ProtocolError::arg("a pair needs two distinct players"));
    }
    Ok(match set.players() {
        [1, 2] | [3, 4] => PairClass::Opposite,
        _ => PairClass::Adjacent,
    })
}

/// An authorised set of three players together with its retrieval roles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PlayerSet", into = "PlayerSet")]
pub struct Triplet {
    members: [usize; 3],
    designated: usize,
    z_helper: usize,
    x_helper: usize,
}

/// `(members, designated, Z helper, X helper)`. The designated player is adjacent to
/// the absent one; the Z helper sits opposite the designated player.
const TRIPLETS: [([usize; 3], usize, usize, usize); 4] = [
    ([1, 2, 3], 2, 1, 3),
    ([1, 2, 4], 1, 2, 4),
    ([1, 3, 4], 3, 4, 1),
    ([2, 3, 4], 4, 3, 2),
];

impl Triplet {
    pub fn new(set: &PlayerSet) -> Result<Self> {
        TRIPLETS
            .iter()
            .find(|t| t.0.as_slice() == set.players())
            .map(|&(members, designated, z_helper, x_helper)| Triplet {
                members,
                designated,
                z_helper,
                x_helper,
            })
            .ok_or_else(|| ProtocolError::arg(format!("{set} is not a set of three players")))
    }

    pub fn all() -> [Triplet; 4] {
        TRIPLETS.map(|(m, ..)| Triplet::new(&PlayerSet(m.to_vec())).expect("static triplet"))
    }

    pub fn members(&self) -> [usize; 3] {
        self.members
    }

    pub fn designated(&self) -> usize {
        self.designated
    }

    pub fn z_helper(&self) -> usize {
        self.z_helper
    }

    pub fn x_helper(&self) -> usize {
        self.x_helper
    }

    pub fn excluded(&self) -> usize {
        PLAYERS
            .into_iter()
            .find(|p| !self.members.contains(p))
            .expect("three of four players")
    }

    pub fn set(&self) -> PlayerSet {
        PlayerSet(self.members.to_vec())
    }
}

impl TryFrom<PlayerSet> for Triplet {
    type Error = ProtocolError;

    fn try_from(s: PlayerSet) -> Result<Self> {
        Triplet::new(&s)
    }
}

impl From<Triplet> for PlayerSet {
    fn from(t: Triplet) -> Self {
        t.set()
    }
}

impl fmt::Display for Triplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.set().fmt(f)
    }
}

impl FromStr for Triplet {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self> {
        Triplet::new(&s.parse()?)
    }
}

/// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecretQubit {
    pub theta: f64,
    pub phi: f64,
}

impl SecretQubit {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..2.0 * PI).contains(&phi) {
            return Err(ProtocolError::arg(format!(
                "secret angles ({theta}, {phi}) outside [0, π] × [0, 2π)"
            )));
        }
        Ok(Self { theta, phi })
    }

    /// Angles of the pure state with Bloch vector `r` (normalised internally).
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if norm < 1e-12 {
            return Err(ProtocolError::arg("zero Bloch vector"));
        }
        let theta = (r[2] / norm).clamp(-1.0, 1.0).acos();
        let mut phi = r[1].atan2(r[0]);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        Self::new(theta, phi)
    }

    pub fn zero() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn one() -> Self {
        Self { theta: PI, phi: 0.0 }
    }

    /// Eigenstate of `basis` with outcome bit `b` (`0` ↔ `+1`).
    pub fn eigenstate(basis: Pauli, b: u8) -> Self {
        let s = if b == 0 { 1.0 } else { -1.0 };
        let r = match basis {
            Pauli::X => [s, 0.0, 0.0],
            Pauli::Y => [0.0, s, 0.0],
            _ => [0.0, 0.0, s],
        };
        Self::from_bloch(r).expect("unit vector")
    }

    /// `|0⟩, |1⟩, |+⟩, |−⟩, |+_y⟩, |−_y⟩`.
    pub fn cardinal() -> [SecretQubit; 6] {
        [
            Self::eigenstate(Pauli::Z, 0),
            Self::eigenstate(Pauli::Z, 1),
            Self::eigenstate(Pauli::X, 0),
            Self::eigenstate(Pauli::X, 1),
            Self::eigenstate(Pauli::Y, 0),
            Self::eigenstate(Pauli::Y, 1),
        ]
    }

    /// Tomography probes `|0⟩, |1⟩, |+⟩, |+_y⟩`.
    pub fn probes() -> [SecretQubit; 4] {
        [
            Self::eigenstate(Pauli::Z, 0),
            Self::eigenstate(Pauli::Z, 1),
            Self::eigenstate(Pauli::X, 0),
            Self::eigenstate(Pauli::Y, 0),
        ]
    }

    pub fn amplitudes(&self) -> [Complex; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        [Complex::new(c, 0.0), Complex::from_polar(s, self.phi)]
    }

    pub fn state(&self) -> StateVector {
        StateVector::new(self.amplitudes().to_vec()).expect("unit amplitudes")
    }

    pub fn bloch(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        [st * self.phi.cos(), st * self.phi.sin(), ct]
    }
}

/// `theta,phi` in radians.
impl FromStr for SecretQubit {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || ProtocolError::arg(format!("secret '{s}' is not theta,phi"));
        let (t, p) = s.split_once(',').ok_or_else(bad)?;
        let theta = t.trim().parse().map_err(|_| bad())?;
        let phi = p.trim().parse().map_err(|_| bad())?;
        SecretQubit::new(theta, phi)
    }
}
