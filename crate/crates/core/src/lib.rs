//! Simulation core for graph-state quantum secret sharing.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix `f64`, which is what the protocols use.

pub mod error;
pub mod graph;
pub mod info;
pub mod noise;
pub mod linalg;
pub mod scalar;

pub use error::{QssError, Result, MAX_QUBITS};
pub use linalg::{Pauli, PauliString, Phase};
pub use scalar::{Real, C};

pub type Matrix = linalg::Matrix<f64>;
pub type StateVector = linalg::StateVector<f64>;
pub type DensityMatrix = linalg::DensityMatrix<f64>;
pub type Complex = C<f64>;
