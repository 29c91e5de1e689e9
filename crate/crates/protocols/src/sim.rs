//! Small simulation helpers shared by the protocol modules.

use std::f64::consts::FRAC_1_SQRT_2;

use qss_core::linalg::QuantumState;
use qss_core::noise::NoiseSpec;
use qss_core::{Complex, Matrix, Pauli, PauliString, StateVector};
use rand::Rng;

use crate::error::Result;

pub fn hadamard() -> Matrix {
    let h = Complex::new(FRAC_1_SQRT_2, 0.0);
    Matrix::from_rows(&[&[h, h], &[h, -h]]).expect("2x2")
}

/// CNOT written as `H_t · CZ · H_t`.
pub fn cnot<S: QuantumState<f64>>(s: &S, control: usize, target: usize) -> Result<S> {
    let h = hadamard();
    Ok(s.apply_single(target, &h)?.apply_cz(control, target)?.apply_single(target, &h)?)
}

/// Parses a Pauli literal that is known to be well formed.
pub(crate) fn pauli(s: &str) -> PauliString {
    s.parse().expect("static Pauli literal")
}

/// Samples a single-qubit measurement; `remove` drops the measured qubit.
pub fn measure<S: QuantumState<f64>, R: Rng + ?Sized>(
    state: &S,
    q: usize,
    basis: Pauli,
    remove: bool,
    rng: &mut R,
) -> Result<(u8, S)> {
    let project = |b: u8| {
        if remove {
            state.project_out(q, basis, b)
        } else {
            state.project(q, basis, b)
        }
    };
    let (p0, post0) = project(0)?;
    let outcome = u8::from(rng.random::<f64>() >= p0);
    let post = match (outcome, post0) {
        (0, Some(s)) => s,
        _ => match project(1)?.1 {
            Some(s) => s,
            None => project(0)?.1.expect("one outcome has support"),
        },
    };
    Ok((outcome, post))
}

/// One pure trajectory of a Pauli noise channel.
pub fn noisy_trajectory<R: Rng + ?Sized>(
    psi: &StateVector,
    noise: Option<&NoiseSpec>,
    rng: &mut R,
) -> Result<StateVector> {
    match noise {
        Some(spec) => {
            let p = spec.sample_pauli(psi.n(), rng)?;
            if p.is_identity() {
                Ok(psi.clone())
            } else {
                Ok(psi.apply_pauli(&p)?)
            }
        }
        None => Ok(psi.clone()),
    }
}
