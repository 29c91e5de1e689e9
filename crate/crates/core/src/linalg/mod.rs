//! Dense state-vector and density-matrix algebra for at most six qubits.

pub mod density;
pub mod eig;
pub mod matrix;
pub mod pauli;
pub mod qstate;
pub mod state;

pub use density::{bloch_state, bloch_vector, embed_single, fidelity_pure, von_neumann_entropy, DensityMatrix};
pub use eig::{hermitian_eig, Eigen};
pub use matrix::Matrix;
pub use pauli::{Pauli, PauliString, Phase};
pub use qstate::QuantumState;
pub use state::{basis_vector, StateVector};

use crate::error::Result;
use crate::scalar::Real;

/// Tensor product with the qubits of `self` preceding those of `other`.
pub trait Kron: Sized {
    fn kron(&self, other: &Self) -> Result<Self>;
}

impl<T: Real> Kron for Matrix<T> {
    fn kron(&self, other: &Self) -> Result<Self> {
        Matrix::kron(self, other)
    }
}

impl<T: Real> Kron for StateVector<T> {
    fn kron(&self, other: &Self) -> Result<Self> {
        StateVector::kron(self, other)
    }
}

impl<T: Real> Kron for DensityMatrix<T> {
    fn kron(&self, other: &Self) -> Result<Self> {
        DensityMatrix::kron(self, other)
    }
}

pub fn kron<K: Kron>(a: &K, b: &K) -> Result<K> {
    a.kron(b)
}
