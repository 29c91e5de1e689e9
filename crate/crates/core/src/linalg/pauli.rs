//! Signed tensor products of single-qubit Pauli operators.

use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{QssError, Result, MAX_QUBITS};
use crate::linalg::matrix::Matrix;
use crate::scalar::{c, Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix<T: Real>(self) -> Matrix<T> {
        let (o, z) = (T::one(), T::zero());
        let rows: [[C<T>; 2]; 2] = match self {
            Pauli::I => [[c(o, z), c(z, z)], [c(z, z), c(o, z)]],
            Pauli::X => [[c(z, z), c(o, z)], [c(o, z), c(z, z)]],
            Pauli::Y => [[c(z, z), c(z, -o)], [c(z, o), c(z, z)]],
            Pauli::Z => [[c(o, z), c(z, z)], [c(z, z), c(-o, z)]],
        };
        Matrix::from_rows(&[&rows[0], &rows[1]]).expect("2x2")
    }

    /// Single-qubit product `self · other` as (phase exponent of i, result).
    fn product(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(ch: char) -> Option<Self> {
        match ch {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Overall phase of a Pauli string, stored as a power of `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(u8);

impl Phase {
    pub const PLUS_ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power_of_i(k: u8) -> Self {
        Phase(k % 4)
    }

    pub fn power_of_i(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    /// `+1` or `-1` for real phases.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn value<T: Real>(self) -> C<T> {
        let (o, z) = (T::one(), T::zero());
        match self.0 {
            0 => c(o, z),
            1 => c(z, o),
            2 => c(-o, z),
            _ => c(z, -o),
        }
    }
}

/// Phase times a tensor product of Paulis; qubit 0 is the leftmost factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    phase: Phase,
    factors: Vec<Pauli>,
}

impl PauliString {
    pub fn new(phase: Phase, factors: Vec<Pauli>) -> Result<Self> {
        if factors.len() > MAX_QUBITS {
            return Err(QssError::Capacity {
                requested: factors.len(),
            });
        }
        Ok(Self { phase, factors })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            phase: Phase::PLUS_ONE,
            factors: vec![Pauli::I; n],
        }
    }

    /// `p` on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.factors[q] = p;
        s
    }

    /// Product of `p` over the listed qubits.
    pub fn on(n: usize, qubits: &[usize], p: Pauli) -> Self {
        let mut s = Self::identity(n);
        for &q in qubits {
            s.factors[q] = p;
        }
        s
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.factors
    }

    pub fn factor(&self, q: usize) -> Pauli {
        self.factors[q]
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    pub fn is_identity(&self) -> bool {
        self.factors.iter().all(|&p| p == Pauli::I)
    }

    /// Qubits carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    pub fn weight(&self) -> usize {
        self.support().len()
    }

    pub fn with_phase(&self, phase: Phase) -> Self {
        Self {
            phase,
            factors: self.factors.clone(),
        }
    }

    /// Same factors with a `+1` phase.
    pub fn unsigned(&self) -> Self {
        self.with_phase(Phase::PLUS_ONE)
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        assert_eq!(self.n(), other.n(), "commutator on mismatched qubit counts");
        let anti = self
            .factors
            .iter()
            .zip(&other.factors)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// Moves the factor on qubit `q` to qubit `map[q]`.
    pub fn relabel(&self, map: &[usize]) -> Result<Self> {
        if map.len() != self.n() {
            return Err(QssError::DimensionMismatch {
                expected: self.n(),
                got: map.len(),
            });
        }
        let mut factors = vec![Pauli::I; self.n()];
        let mut seen = vec![false; self.n()];
        for (q, &target) in map.iter().enumerate() {
            if target >= self.n() || seen[target] {
                return Err(QssError::arg("relabelling is not a permutation"));
            }
            seen[target] = true;
            factors[target] = self.factors[q];
        }
        Ok(Self {
            phase: self.phase,
            factors,
        })
    }

    /// Bit position of qubit `q` in a basis index (qubit 0 is the most significant bit).
    fn bit(&self, q: usize) -> usize {
        1 << (self.n() - 1 - q)
    }

    pub fn x_mask(&self) -> usize {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, &p)| matches!(p, Pauli::X | Pauli::Y))
            .fold(0, |m, (q, _)| m | self.bit(q))
    }

    pub fn z_mask(&self) -> usize {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, &p)| matches!(p, Pauli::Z | Pauli::Y))
            .fold(0, |m, (q, _)| m | self.bit(q))
    }

    /// `P|idx⟩ = coefficient · |idx ^ x_mask⟩`.
    pub fn action_on_basis<T: Real>(&self, idx: usize) -> (usize, C<T>) {
        let y_count = self.factors.iter().filter(|&&p| p == Pauli::Y).count() as u8;
        let sign_flips = (idx & self.z_mask()).count_ones() as u8;
        let k = self.phase.0 + y_count + 2 * (sign_flips % 2);
        (idx ^ self.x_mask(), Phase::from_power_of_i(k).value())
    }

    pub fn matrix<T: Real>(&self) -> Matrix<T> {
        let dim = 1usize << self.n();
        let mut m = Matrix::zeros(dim);
        for col in 0..dim {
            let (row, coef) = self.action_on_basis::<T>(col);
            m[(row, col)] = coef;
        }
        m
    }

    /// Applies the operator to raw amplitudes.
    pub fn apply_to<T: Real>(&self, amps: &[C<T>]) -> Vec<C<T>> {
        let mut out = vec![C::zero(); amps.len()];
        for (idx, &a) in amps.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let (to, coef) = self.action_on_basis::<T>(idx);
            out[to] += coef * a;
        }
        out
    }

    /// Tensor product with `self` on the leading qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Self::new(
            Phase::from_power_of_i(self.phase.0 + other.phase.0),
            factors,
        )
    }
}

impl Mul for &PauliString {
    type Output = PauliString;
    fn mul(self, rhs: &PauliString) -> PauliString {
        assert_eq!(self.n(), rhs.n(), "Pauli product on mismatched qubit counts");
        let mut k = self.phase.0 + rhs.phase.0;
        let factors = self
            .factors
            .iter()
            .zip(&rhs.factors)
            .map(|(a, b)| {
                let (ph, p) = a.product(*b);
                k += ph;
                p
            })
            .collect();
        PauliString {
            phase: Phase::from_power_of_i(k),
            factors,
        }
    }
}

impl Neg for &PauliString {
    type Output = PauliString;
    fn neg(self) -> PauliString {
        self.with_phase(Phase::from_power_of_i(self.phase.0 + 2))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for p in &self.factors {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = QssError;

    /// Accepts an optional sign (`+`, `-`, `+i`, `-i`, `i`) followed by letters from `IXYZ`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix("+i") {
            (Phase::PLUS_I, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (Phase::PLUS_I, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (Phase::PLUS_ONE, rest)
        } else {
            (Phase::PLUS_ONE, s)
        };
        if body.is_empty() {
            return Err(QssError::Parse(format!("empty Pauli string {s:?}")));
        }
        let factors = body
            .chars()
            .map(|ch| {
                Pauli::from_char(ch)
                    .ok_or_else(|| QssError::Parse(format!("bad Pauli letter {ch:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(phase, factors)
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
