use crate::error::{QssError, Result};
use crate::linalg::{DensityMatrix, Matrix, Pauli, PauliString, StateVector};
use crate::scalar::{Real, C};

/// Operations shared by pure and mixed states, so that protocol steps can be
/// written once and run on either representation.
pub trait QuantumState<T: Real>: Clone + Sized {
    fn n(&self) -> usize;

    /// Normalised post-measurement state with qubit `q` left in place;
    /// `None` when the outcome has (numerically) zero probability.
    fn project(&self, q: usize, basis: Pauli, outcome: u8) -> Result<(T, Option<Self>)>;

    /// Same as [`project`](Self::project) but removes the measured qubit.
    fn project_out(&self, q: usize, basis: Pauli, outcome: u8) -> Result<(T, Option<Self>)>;

    fn apply_pauli(&self, p: &PauliString) -> Result<Self>;

    fn apply_single(&self, q: usize, gate: &Matrix<T>) -> Result<Self>;

    fn apply_cz(&self, u: usize, v: usize) -> Result<Self>;

    fn to_density(&self) -> DensityMatrix<T>;

    /// Appends a pure qubit as the new last qubit.
    fn append_qubit(&self, amps: [C<T>; 2]) -> Result<Self>;

    fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix<T>> {
        self.to_density().partial_trace(keep)
    }
}

fn zero_is_none<S, T: Real>(r: Result<(T, S)>) -> Result<(T, Option<S>)> {
    match r {
        Ok((p, s)) => Ok((p, Some(s))),
        Err(QssError::ZeroProbability(_)) => Ok((T::zero(), None)),
        Err(e) => Err(e),
    }
}

impl<T: Real> QuantumState<T> for StateVector<T> {
    fn n(&self) -> usize {
        StateVector::n(self)
    }

    fn project(&self, q: usize, basis: Pauli, outcome: u8) -> Result<(T, Option<Self>)> {
        zero_is_none(self.project_keep(q, basis, outcome))
    }

    fn project_out(&self, q: usize, basis: Pauli, outcome: u8) -> Result<(T, Option<Self>)> {
        zero_is_none(self.project_remove(q, basis, outcome))
    }

    fn apply_pauli(&self, p: &PauliString) -> Result<Self> {
        StateVector::apply_pauli(self, p)
    }

    fn apply_single(&self, q: usize, gate: &Matrix<T>) -> Result<Self> {
        StateVector::apply_single(self, q, gate)
    }

    fn apply_cz(&self, u: usize, v: usize) -> Result<Self> {
        StateVector::apply_cz(self, u, v)
    }

    fn to_density(&self) -> DensityMatrix<T> {
        self.density()
    }

    fn append_qubit(&self, amps: [C<T>; 2]) -> Result<Self> {
        self.insert_qubit(StateVector::n(self), amps)
    }
}

impl<T: Real> QuantumState<T> for DensityMatrix<T> {
    fn n(&self) -> usize {
        DensityMatrix::n(self)
    }

    fn project(&self, q: usize, basis: Pauli, outcome: u8) -> Result<(T, Option<Self>)> {
        self.project_keep(q, basis, outcome)
    }

    fn project_out(&self, q: usize, basis: Pauli, outcome: u8) -> Result<(T, Option<Self>)> {
        self.project_remove(q, basis, outcome)
    }

    fn apply_pauli(&self, p: &PauliString) -> Result<Self> {
        DensityMatrix::apply_pauli(self, p)
    }

    fn apply_single(&self, q: usize, gate: &Matrix<T>) -> Result<Self> {
        DensityMatrix::apply_single(self, q, gate)
    }

    fn apply_cz(&self, u: usize, v: usize) -> Result<Self> {
        DensityMatrix::apply_cz(self, u, v)
    }

    fn to_density(&self) -> DensityMatrix<T> {
        self.clone()
    }

    fn append_qubit(&self, amps: [C<T>; 2]) -> Result<Self> {
        let q = StateVector::new(amps.to_vec())?;
        self.kron(&q.density())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_and_mixed_paths_agree() {
        let psi = StateVector::<f64>::plus(3).unwrap().apply_cz(0, 2).unwrap();
        let rho = psi.density();
        assert!(QuantumState::apply_cz(&rho, 0, 1).unwrap().max_abs_diff(&psi.apply_cz(0, 1).unwrap().density()) < 1e-12);
        let (pp, sp) = QuantumState::project(&psi, 1, Pauli::Y, 1).unwrap();
        let (pm, sm) = QuantumState::project(&rho, 1, Pauli::Y, 1).unwrap();
        assert!((pp - pm).abs() < 1e-12);
        assert!(sp.unwrap().density().max_abs_diff(&sm.unwrap()) < 1e-12);
        let zero = StateVector::<f64>::basis(1, 0).unwrap();
        assert!(QuantumState::project(&zero, 0, Pauli::Z, 1).unwrap().1.is_none());
        assert!(QuantumState::project(&zero.density(), 0, Pauli::Z, 1).unwrap().1.is_none());
    }
}
