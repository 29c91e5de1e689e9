//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use num_traits::Zero;

use crate::error::{QssError, Result};
use crate::linalg::matrix::Matrix;
use crate::scalar::{c, Real};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (descending) and the matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

impl<T: Real> Eigen<T> {
    /// `Σ_k f(λ_k) v_k v_k†`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let n = self.values.len();
        Matrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.vectors[(j, k)].conj() * f(self.values[k]))
                .sum()
        })
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        self.reconstruct_with(|x| x)
    }
}

/// Tolerance on `|A - A†|` accepted as Hermitian input.
fn hermitian_input_tol<T: Real>(a: &Matrix<T>) -> T {
    let scale = T::one().max(a.frobenius_norm());
    T::lit(1e-8).max(T::epsilon() * T::lit(1e3) * scale)
}

/// Diagonalises a Hermitian matrix.
///
/// Sweeps stop once the off-diagonal Frobenius norm drops below `1e-12` (or a
/// few ulps of the matrix norm, whichever is larger for the scalar type).
pub fn hermitian_eig<T: Real>(a: &Matrix<T>) -> Result<Eigen<T>> {
    let dev = a.hermitian_deviation();
    if dev > hermitian_input_tol(a) {
        return Err(QssError::NotHermitian {
            deviation: dev.to_f64_lossy(),
        });
    }
    let n = a.dim();
    // Work on the exactly Hermitian part.
    let mut m = Matrix::from_fn(n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * c(T::lit(0.5), T::zero()));
    let mut v = Matrix::identity(n);
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(n as f64) * m.frobenius_norm());

    for _ in 0..MAX_SWEEPS {
        if m.off_diagonal_norm() < tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = Matrix::from_fn(n, |i, k| v[(i, order[k])]);
    Ok(Eigen { values, vectors })
}

/// Zeroes `m[p][q]` with the unitary `G = diag(1, e^{-iα}) · R(θ)` acting on
/// coordinates `p, q`, where `α = arg m[p][q]`.
fn rotate<T: Real>(m: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag <= T::min_positive_value() {
        return;
    }
    let phase = apq / c(mag, T::zero()); // e^{iα}
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = T::lit(0.5) * (T::lit(2.0) * mag).atan2(aqq - app);
    let (s, co) = theta.sin_cos();
    let cs = c(co, T::zero());
    let ss = c(s, T::zero());
    let n = m.dim();

    // Columns: A ← A G.
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * cs - akq * ss * phase.conj();
        m[(k, q)] = akp * ss + akq * cs * phase.conj();
    }
    // Rows: A ← G† A.
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = apk * cs - aqk * ss * phase;
        m[(q, k)] = apk * ss + aqk * cs * phase;
    }
    m[(p, q)] = num_complex::Complex::zero();
    m[(q, p)] = num_complex::Complex::zero();
    m[(p, p)] = c(m[(p, p)].re, T::zero());
    m[(q, q)] = c(m[(q, q)].re, T::zero());

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cs - vkq * ss * phase.conj();
        v[(k, q)] = vkp * ss + vkq * cs * phase.conj();
    }
}
