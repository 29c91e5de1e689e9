use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{QssError, Result, MAX_QUBITS};
use crate::linalg::density::DensityMatrix;
use crate::linalg::matrix::Matrix;
use crate::linalg::pauli::{Pauli, PauliString};
use crate::scalar::{c, cr, Real, C};

/// Normalised pure state of up to [`MAX_QUBITS`] qubits; qubit 0 is the most
/// significant bit of the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    n: usize,
    amps: Vec<C<T>>,
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(QssError::arg(format!("state length {len} is not a power of two")));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(QssError::Capacity { requested: n });
    }
    Ok(n)
}

/// Eigenvector of a single-qubit Pauli for outcome bit `b` (`0` ↔ eigenvalue `+1`).
pub fn basis_vector<T: Real>(basis: Pauli, b: u8) -> [C<T>; 2] {
    let h = T::FRAC_1_SQRT_2();
    let (o, z) = (T::one(), T::zero());
    match (basis, b) {
        (Pauli::Z | Pauli::I, 0) => [cr(o), cr(z)],
        (Pauli::Z | Pauli::I, _) => [cr(z), cr(o)],
        (Pauli::X, 0) => [cr(h), cr(h)],
        (Pauli::X, _) => [cr(h), cr(-h)],
        (Pauli::Y, 0) => [cr(h), c(z, h)],
        (Pauli::Y, _) => [cr(h), c(z, -h)],
    }
}

impl<T: Real> StateVector<T> {
    /// Validates normalisation within the scalar's tolerance.
    pub fn new(amps: Vec<C<T>>) -> Result<Self> {
        let n = qubits_for_len(amps.len())?;
        let norm: T = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - T::one()).abs() > T::validation_tol() {
            return Err(QssError::InvalidState(format!(
                "squared norm {norm} differs from 1"
            )));
        }
        Ok(Self { n, amps })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(amps: Vec<C<T>>) -> Result<Self> {
        let n = qubits_for_len(amps.len())?;
        let norm: T = amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if norm <= T::min_positive_value() {
            return Err(QssError::InvalidState("zero vector".into()));
        }
        let inv = cr(T::one() / norm);
        Ok(Self {
            n,
            amps: amps.into_iter().map(|a| a * inv).collect(),
        })
    }

    /// Computational basis state `|index⟩` on `n` qubits.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(QssError::Capacity { requested: n });
        }
        if index >= 1 << n {
            return Err(QssError::arg(format!("basis index {index} out of range for {n} qubits")));
        }
        let mut amps = vec![C::zero(); 1 << n];
        amps[index] = C::one();
        Ok(Self { n, amps })
    }

    /// Product of single-qubit Pauli eigenstates, one `(basis, outcome)` per qubit.
    pub fn product(factors: &[(Pauli, u8)]) -> Result<Self> {
        let mut st = StateVector {
            n: 0,
            amps: vec![C::one()],
        };
        for &(p, b) in factors {
            st = st.kron(&Self::qubit(basis_vector(p, b)))?;
        }
        Ok(st)
    }

    /// `|+⟩^{⊗n}`.
    pub fn plus(n: usize) -> Result<Self> {
        Self::product(&vec![(Pauli::X, 0); n])
    }

    pub(crate) fn qubit(amps: [C<T>; 2]) -> Self {
        Self {
            n: 1,
            amps: amps.to_vec(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C<T> {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        if self.dim() != other.dim() {
            return Err(QssError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * *b)
            .sum())
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        let n = self.n + other.n;
        if n > MAX_QUBITS {
            return Err(QssError::Capacity { requested: n });
        }
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| *a * *b))
            .collect();
        Ok(Self { n, amps })
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(QssError::arg(format!("qubit {q} out of range for {} qubits", self.n)));
        }
        Ok(())
    }

    /// Applies a 2x2 matrix to qubit `q`.
    pub fn apply_single(&self, q: usize, gate: &Matrix<T>) -> Result<Self> {
        self.check_qubit(q)?;
        if gate.dim() != 2 {
            return Err(QssError::DimensionMismatch {
                expected: 2,
                got: gate.dim(),
            });
        }
        let bit = self.bit(q);
        let mut amps = self.amps.clone();
        for idx in 0..self.dim() {
            if idx & bit != 0 {
                continue;
            }
            let (a0, a1) = (self.amps[idx], self.amps[idx | bit]);
            amps[idx] = gate[(0, 0)] * a0 + gate[(0, 1)] * a1;
            amps[idx | bit] = gate[(1, 0)] * a0 + gate[(1, 1)] * a1;
        }
        Ok(Self { n: self.n, amps })
    }

    pub fn apply_pauli(&self, p: &PauliString) -> Result<Self> {
        if p.n() != self.n {
            return Err(QssError::DimensionMismatch {
                expected: self.n,
                got: p.n(),
            });
        }
        Ok(Self {
            n: self.n,
            amps: p.apply_to(&self.amps),
        })
    }

    /// Controlled-phase between qubits `u` and `v`.
    pub fn apply_cz(&self, u: usize, v: usize) -> Result<Self> {
        self.check_qubit(u)?;
        self.check_qubit(v)?;
        if u == v {
            return Err(QssError::arg("controlled-phase needs two distinct qubits"));
        }
        let mask = self.bit(u) | self.bit(v);
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(idx, &a)| if idx & mask == mask { -a } else { a })
            .collect();
        Ok(Self { n: self.n, amps })
    }

    /// Unnormalised projection of qubit `q` onto `basis` eigenvector `outcome`,
    /// with the measured qubit removed. Returns `(probability, residual)`.
    fn project_out(&self, q: usize, basis: Pauli, outcome: u8) -> Result<(T, Vec<C<T>>)> {
        self.check_qubit(q)?;
        let ev = basis_vector::<T>(basis, outcome);
        let bit = self.bit(q);
        let low_mask = bit - 1;
        let mut out = Vec::with_capacity(self.dim() / 2);
        for rest in 0..self.dim() / 2 {
            let idx0 = ((rest & !low_mask) << 1) | (rest & low_mask);
            let idx1 = idx0 | bit;
            out.push(ev[0].conj() * self.amps[idx0] + ev[1].conj() * self.amps[idx1]);
        }
        let p = out.iter().map(|a| a.norm_sqr()).sum();
        Ok((p, out))
    }

    /// Probability of `outcome` when measuring qubit `q` in `basis`.
    pub fn outcome_probability(&self, q: usize, basis: Pauli, outcome: u8) -> Result<T> {
        Ok(self.project_out(q, basis, outcome)?.0)
    }

    /// Projects qubit `q` onto the `outcome` eigenvector of `basis` and removes it.
    pub fn project_remove(&self, q: usize, basis: Pauli, outcome: u8) -> Result<(T, Self)> {
        let (p, amps) = self.project_out(q, basis, outcome)?;
        if p <= T::lit(1e-14) {
            return Err(QssError::ZeroProbability(format!(
                "qubit {q} outcome {outcome} in basis {basis:?}"
            )));
        }
        Ok((p, Self::normalized(amps)?))
    }

    /// Projects qubit `q` onto an eigenvector and keeps the (now product) qubit in place.
    pub fn project_keep(&self, q: usize, basis: Pauli, outcome: u8) -> Result<(T, Self)> {
        let (p, rest) = self.project_remove(q, basis, outcome)?;
        Ok((p, rest.insert_qubit(q, basis_vector(basis, outcome))?))
    }

    /// Inserts a single-qubit factor so that it becomes qubit `q`.
    pub fn insert_qubit(&self, q: usize, amps: [C<T>; 2]) -> Result<Self> {
        let n = self.n + 1;
        if n > MAX_QUBITS {
            return Err(QssError::Capacity { requested: n });
        }
        if q > self.n {
            return Err(QssError::arg(format!("insert position {q} out of range")));
        }
        let bit = 1 << (n - 1 - q);
        let low_mask = bit - 1;
        let mut out = vec![C::zero(); 1 << n];
        for (rest, &a) in self.amps.iter().enumerate() {
            let idx0 = ((rest & !low_mask) << 1) | (rest & low_mask);
            out[idx0] = a * amps[0];
            out[idx0 | bit] = a * amps[1];
        }
        Ok(Self { n, amps: out })
    }

    /// Samples a measurement of qubit `q` in `basis`, returning the outcome and the
    /// post-measurement state with the qubit removed.
    pub fn measure_remove<R: Rng + ?Sized>(
        &self,
        q: usize,
        basis: Pauli,
        rng: &mut R,
    ) -> Result<(u8, Self)> {
        let p0 = self.outcome_probability(q, basis, 0)?;
        let outcome = u8::from(rng.random::<f64>() >= p0.to_f64_lossy());
        let (_, post) = self.project_remove(q, basis, outcome)?;
        Ok((outcome, post))
    }

    /// Same as [`measure_remove`](Self::measure_remove) but leaves the collapsed qubit in place.
    pub fn measure_keep<R: Rng + ?Sized>(
        &self,
        q: usize,
        basis: Pauli,
        rng: &mut R,
    ) -> Result<(u8, Self)> {
        let p0 = self.outcome_probability(q, basis, 0)?;
        let outcome = u8::from(rng.random::<f64>() >= p0.to_f64_lossy());
        let (_, post) = self.project_keep(q, basis, outcome)?;
        Ok((outcome, post))
    }

    /// Reorders qubits: qubit `q` of `self` becomes qubit `perm[q]` of the result.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(QssError::DimensionMismatch {
                expected: self.n,
                got: perm.len(),
            });
        }
        let mut seen = vec![false; self.n];
        for &t in perm {
            if t >= self.n || std::mem::replace(&mut seen[t], true) {
                return Err(QssError::arg("qubit permutation is not a bijection"));
            }
        }
        let mut amps = vec![C::zero(); self.dim()];
        for (idx, &a) in self.amps.iter().enumerate() {
            let mut to = 0;
            for (q, &t) in perm.iter().enumerate() {
                if idx & self.bit(q) != 0 {
                    to |= 1 << (self.n - 1 - t);
                }
            }
            amps[to] = a;
        }
        Ok(Self { n: self.n, amps })
    }

    /// Multiplies by the conjugate phase of the largest-magnitude amplitude so
    /// that amplitude becomes real and positive.
    pub fn phase_aligned(&self) -> Self {
        let pivot = self
            .amps
            .iter()
            .copied()
            .max_by(|a, b| a.norm_sqr().partial_cmp(&b.norm_sqr()).unwrap())
            .unwrap_or(C::one());
        let mag = pivot.norm();
        if mag <= T::min_positive_value() {
            return self.clone();
        }
        let rot = pivot.conj() / cr(mag);
        Self {
            n: self.n,
            amps: self.amps.iter().map(|&a| a * rot).collect(),
        }
    }

    /// Largest amplitude difference after removing global phase from both states.
    pub fn distance_up_to_phase(&self, other: &Self) -> Result<T> {
        if self.dim() != other.dim() {
            return Err(QssError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        // Align on the same pivot index so near-degenerate maxima cannot disagree.
        let overlap = self.inner(other)?;
        let mag = overlap.norm();
        let rot = if mag > T::min_positive_value() {
            overlap.conj() / cr(mag)
        } else {
            C::one()
        };
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (*a - *b * rot).norm())
            .fold(T::zero(), T::max))
    }

    pub fn equals_up_to_phase(&self, other: &Self, tol: T) -> bool {
        self.distance_up_to_phase(other).map(|d| d <= tol).unwrap_or(false)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityMatrix<T> {
        DensityMatrix::from_pure(self)
    }

    /// Reduced state on `keep` (ascending qubit order).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix<T>> {
        self.density().partial_trace(keep)
    }

    pub fn expectation(&self, p: &PauliString) -> Result<T> {
        let applied = self.apply_pauli(p)?;
        Ok(self.inner(&applied)?.re)
    }
}

/// Converts a row-major slice of `f64` pairs into amplitudes (test and data helper).
pub fn amps_from_f64<T: Real>(pairs: &[(f64, f64)]) -> Vec<C<T>> {
    pairs.iter().map(|&(re, im)| c(T::lit(re), T::lit(im))).collect()
}
