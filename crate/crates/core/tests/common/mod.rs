#![allow(dead_code)]

use num_complex::Complex64;
use qss_core::{DensityMatrix, Matrix, StateVector};
use rand::Rng;

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> StateVector {
    let amps = (0..1 << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(amps).unwrap()
}

/// `A A† / Tr` with `A` of full rank `rank`.
pub fn random_density<R: Rng>(n: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let dim = 1 << n;
    let mut m = Matrix::zeros(dim);
    for _ in 0..rank {
        let v = random_state(n, rng);
        let w: f64 = rng.random_range(0.05..1.0);
        m = &m + &Matrix::outer(v.amplitudes(), v.amplitudes()).unwrap().scale_real(w);
    }
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr)).unwrap()
}

pub fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> Matrix {
    let a = Matrix::from_fn(dim, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&a + &a.adjoint()).scale_real(0.5)
}

pub fn random_product<R: Rng>(n: usize, rng: &mut R) -> StateVector {
    let mut psi = random_state(1, rng);
    for _ in 1..n {
        psi = psi.kron(&random_state(1, rng)).unwrap();
    }
    psi
}

/// `|±_y⟩` amplitudes.
pub fn ket_y(sign: f64) -> [Complex64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [Complex64::new(h, 0.0), Complex64::new(0.0, sign * h)]
}

pub fn ket_x(sign: f64) -> [Complex64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [Complex64::new(h, 0.0), Complex64::new(sign * h, 0.0)]
}

pub fn ket_z(bit: u8) -> [Complex64; 2] {
    if bit == 0 {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
    } else {
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
    }
}

/// Tensor product of single-qubit kets given as amplitude pairs.
pub fn product_ket(factors: &[[Complex64; 2]]) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(1.0, 0.0)];
    for f in factors {
        v = v.iter().flat_map(|a| [a * f[0], a * f[1]]).collect();
    }
    v
}

pub fn add_scaled(acc: &mut [Complex64], v: &[Complex64], s: Complex64) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += s * b;
    }
}
