use num_traits::Zero;

use crate::error::{QssError, Result, MAX_QUBITS};
use crate::linalg::eig::{hermitian_eig, Eigen};
use crate::linalg::matrix::Matrix;
use crate::linalg::pauli::{Pauli, PauliString};
use crate::linalg::state::{basis_vector, StateVector};
use crate::scalar::{cr, Real, C};

/// Eigenvalues down to this (negative) level are treated as numerical zero.
pub const PSD_SLACK: f64 = 1e-9;

/// Hermitian, unit-trace, positive semidefinite operator on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    n: usize,
    m: Matrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: Matrix<T>) -> Result<Self> {
        let n = m
            .n_qubits()
            .ok_or_else(|| QssError::arg(format!("dimension {} is not a power of two", m.dim())))?;
        if n > MAX_QUBITS {
            return Err(QssError::Capacity { requested: n });
        }
        let tol = T::validation_tol();
        let dev = m.hermitian_deviation();
        if dev > tol {
            return Err(QssError::NotHermitian {
                deviation: dev.to_f64_lossy(),
            });
        }
        let tr = m.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(QssError::InvalidState(format!("trace {tr} differs from 1")));
        }
        let eig = hermitian_eig(&m)?;
        let min = eig.values.last().copied().unwrap_or(T::zero());
        if min < -T::lit(PSD_SLACK).max(tol) {
            return Err(QssError::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(Self { n, m })
    }

    /// Wraps a matrix already known to satisfy the invariants (internal constructions).
    pub(crate) fn trusted(m: Matrix<T>) -> Self {
        let n = m.n_qubits().expect("power-of-two dimension");
        Self { n, m }
    }

    pub fn from_pure(psi: &StateVector<T>) -> Self {
        let a = psi.amplitudes();
        Self {
            n: psi.n(),
            m: Matrix::outer(a, a).expect("same vector"),
        }
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(QssError::Capacity { requested: n });
        }
        let dim = 1 << n;
        Ok(Self {
            n,
            m: Matrix::identity(dim).scale_real(T::one() / T::lit(dim as f64)),
        })
    }

    /// Convex combination `Σ w_k ρ_k`; weights must be non-negative and sum to 1.
    pub fn mixture(parts: &[(T, &DensityMatrix<T>)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| QssError::arg("empty mixture"))?
            .1;
        let mut total = T::zero();
        let mut m = Matrix::zeros(first.dim());
        for (w, rho) in parts {
            if *w < T::zero() {
                return Err(QssError::arg("negative mixture weight"));
            }
            if rho.n != first.n {
                return Err(QssError::DimensionMismatch {
                    expected: first.dim(),
                    got: rho.dim(),
                });
            }
            total += *w;
            m = &m + &rho.m.scale_real(*w);
        }
        if (total - T::one()).abs() > T::validation_tol() {
            return Err(QssError::arg(format!("mixture weights sum to {total}")));
        }
        Ok(Self { n: first.n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> C<T> {
        self.m[(i, j)]
    }

    pub fn purity(&self) -> T {
        self.m.trace_product(&self.m).re
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            n: self.n + other.n,
            m: self.m.kron(&other.m)?,
        })
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(QssError::arg(format!("qubit {q} out of range for {} qubits", self.n)));
        }
        Ok(())
    }

    /// Reduced state on the qubits in `keep`, ordered ascending.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(QssError::arg("partial trace needs a non-empty keep set"));
        }
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        for &q in &keep {
            self.check_qubit(q)?;
        }
        if keep.len() == self.n {
            return Ok(self.clone());
        }
        let traced: Vec<usize> = (0..self.n).filter(|q| !keep.contains(q)).collect();
        let bit = |q: usize| 1usize << (self.n - 1 - q);
        let spread = |sub: usize, qubits: &[usize]| -> usize {
            qubits
                .iter()
                .enumerate()
                .filter(|(k, _)| sub & (1 << (qubits.len() - 1 - k)) != 0)
                .fold(0, |acc, (_, &q)| acc | bit(q))
        };
        let kd = 1 << keep.len();
        let td = 1 << traced.len();
        let keep_idx: Vec<usize> = (0..kd).map(|s| spread(s, &keep)).collect();
        let trace_idx: Vec<usize> = (0..td).map(|s| spread(s, &traced)).collect();
        let m = Matrix::from_fn(kd, |i, j| {
            trace_idx
                .iter()
                .map(|&t| self.m[(keep_idx[i] | t, keep_idx[j] | t)])
                .sum()
        });
        Ok(Self { n: keep.len(), m })
    }

    /// `Tr(ρ P)` for a Hermitian Pauli string.
    pub fn expectation(&self, p: &PauliString) -> Result<T> {
        if !p.is_hermitian() {
            return Err(QssError::arg(format!("{p} is not Hermitian")));
        }
        if p.n() != self.n {
            return Err(QssError::DimensionMismatch {
                expected: self.n,
                got: p.n(),
            });
        }
        let mut acc = C::zero();
        for col in 0..self.dim() {
            let (row, coef) = p.action_on_basis::<T>(col);
            // ⟨col|ρ P|col⟩ = coef · ρ[col][row]
            acc += coef * self.m[(col, row)];
        }
        Ok(acc.re)
    }

    /// Expectation of an arbitrary Hermitian operator.
    pub fn expectation_of(&self, op: &Matrix<T>) -> Result<T> {
        if op.dim() != self.dim() {
            return Err(QssError::DimensionMismatch {
                expected: self.dim(),
                got: op.dim(),
            });
        }
        Ok(self.m.trace_product(op).re)
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_pure(&self, psi: &StateVector<T>) -> Result<T> {
        fidelity_pure(psi, self)
    }

    pub fn eigen(&self) -> Eigen<T> {
        hermitian_eig(&self.m).expect("density matrices are Hermitian")
    }

    /// Eigenvalues, descending, with PSD slack clamped to zero.
    pub fn eigenvalues(&self) -> Vec<T> {
        let slack = T::lit(PSD_SLACK);
        self.eigen()
            .values
            .into_iter()
            .map(|l| if l < T::zero() && l >= -slack { T::zero() } else { l })
            .collect()
    }

    /// `U ρ U†` with `gate` acting on qubit `q`.
    pub fn apply_single(&self, q: usize, gate: &Matrix<T>) -> Result<Self> {
        self.check_qubit(q)?;
        let full = embed_single(self.n, q, gate)?;
        Ok(Self {
            n: self.n,
            m: &(&full * &self.m) * &full.adjoint(),
        })
    }

    /// `U ρ U†` for a full-register unitary.
    pub fn conjugate(&self, u: &Matrix<T>) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(QssError::DimensionMismatch {
                expected: self.dim(),
                got: u.dim(),
            });
        }
        Ok(Self {
            n: self.n,
            m: &(u * &self.m) * &u.adjoint(),
        })
    }

    /// `P ρ P†` without forming dense products.
    pub fn apply_pauli(&self, p: &PauliString) -> Result<Self> {
        if p.n() != self.n {
            return Err(QssError::DimensionMismatch {
                expected: self.n,
                got: p.n(),
            });
        }
        let dim = self.dim();
        let mut m = Matrix::zeros(dim);
        let actions: Vec<(usize, C<T>)> = (0..dim).map(|i| p.action_on_basis::<T>(i)).collect();
        for i in 0..dim {
            let (ri, ci) = actions[i];
            for j in 0..dim {
                let (rj, cj) = actions[j];
                m[(ri, rj)] = ci * self.m[(i, j)] * cj.conj();
            }
        }
        Ok(Self { n: self.n, m })
    }

    /// Unnormalised `Π ρ Π` for the `outcome` projector of `basis` on qubit `q`,
    /// with that qubit traced out. Returns `(probability, normalised residual)`.
    pub fn project_remove(&self, q: usize, basis: Pauli, outcome: u8) -> Result<(T, Option<Self>)> {
        self.check_qubit(q)?;
        let ev = basis_vector::<T>(basis, outcome);
        let bit = 1usize << (self.n - 1 - q);
        let low = bit - 1;
        let rd = self.dim() / 2;
        let expand = |r: usize| ((r & !low) << 1) | (r & low);
        let m = Matrix::from_fn(rd, |i, j| {
            let (i0, j0) = (expand(i), expand(j));
            let mut acc = C::<T>::zero();
            for a in 0..2 {
                for b in 0..2 {
                    let ii = if a == 1 { i0 | bit } else { i0 };
                    let jj = if b == 1 { j0 | bit } else { j0 };
                    acc += ev[a].conj() * self.m[(ii, jj)] * ev[b];
                }
            }
            acc
        });
        let p = m.trace().re;
        if p <= T::lit(1e-14) {
            return Ok((p.max(T::zero()), None));
        }
        if self.n == 1 {
            return Ok((p, None));
        }
        Ok((
            p,
            Some(Self {
                n: self.n - 1,
                m: m.scale_real(T::one() / p),
            }),
        ))
    }

    /// Projects qubit `q` onto an eigenvector of `basis`, keeping it in place.
    pub fn project_keep(&self, q: usize, basis: Pauli, outcome: u8) -> Result<(T, Option<Self>)> {
        self.check_qubit(q)?;
        let ev = basis_vector::<T>(basis, outcome);
        let mut proj = Matrix::zeros(2);
        for a in 0..2 {
            for b in 0..2 {
                proj[(a, b)] = ev[a] * ev[b].conj();
            }
        }
        let full = embed_single(self.n, q, &proj)?;
        let m = &(&full * &self.m) * &full;
        let p = m.trace().re;
        if p <= T::lit(1e-14) {
            return Ok((p.max(T::zero()), None));
        }
        Ok((
            p,
            Some(Self {
                n: self.n,
                m: m.scale_real(T::one() / p),
            }),
        ))
    }

    /// Controlled-phase between qubits `u` and `v`.
    pub fn apply_cz(&self, u: usize, v: usize) -> Result<Self> {
        self.check_qubit(u)?;
        self.check_qubit(v)?;
        if u == v {
            return Err(QssError::arg("controlled-phase needs two distinct qubits"));
        }
        let mask = (1usize << (self.n - 1 - u)) | (1usize << (self.n - 1 - v));
        let sign = |i: usize| if i & mask == mask { -T::one() } else { T::one() };
        let m = Matrix::from_fn(self.dim(), |i, j| self.m[(i, j)] * cr(sign(i) * sign(j)));
        Ok(Self { n: self.n, m })
    }

    /// Probability of `outcome` for a single-qubit measurement.
    pub fn outcome_probability(&self, q: usize, basis: Pauli, outcome: u8) -> Result<T> {
        Ok(self.project_remove(q, basis, outcome)?.0)
    }

    /// Trace distance `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &Self) -> Result<T> {
        if self.dim() != other.dim() {
            return Err(QssError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let diff = &self.m - &other.m;
        let eig = hermitian_eig(&diff)?;
        Ok(eig.values.iter().map(|l| l.abs()).sum::<T>() * T::lit(0.5))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.m.max_abs_diff(&other.m)
    }

    /// Reorders qubits: qubit `q` of `self` becomes qubit `perm[q]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        let dim = self.dim();
        let basis_map: Vec<usize> = (0..dim)
            .map(|idx| {
                StateVector::<T>::basis(self.n, idx)
                    .and_then(|s| s.permute_qubits(perm))
                    .map(|s| {
                        s.amplitudes()
                            .iter()
                            .position(|a| !a.is_zero())
                            .expect("basis state")
                    })
            })
            .collect::<Result<_>>()?;
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(basis_map[i], basis_map[j])] = self.m[(i, j)];
            }
        }
        Ok(Self { n: self.n, m })
    }
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity_pure<T: Real>(psi: &StateVector<T>, rho: &DensityMatrix<T>) -> Result<T> {
    if psi.dim() != rho.dim() {
        return Err(QssError::DimensionMismatch {
            expected: rho.dim(),
            got: psi.dim(),
        });
    }
    let v = rho.matrix().mul_vec(psi.amplitudes())?;
    let f: C<T> = psi.amplitudes().iter().zip(&v).map(|(a, b)| a.conj() * *b).sum();
    Ok(f.re)
}

/// Von Neumann entropy in bits; eigenvalues within the PSD slack are clamped to zero.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> T {
    rho.eigenvalues()
        .into_iter()
        .filter(|&l| l > T::zero())
        .map(|l| -l * l.log2())
        .sum::<T>()
        .max(T::zero())
}

/// Lifts a single-qubit operator to the full register.
pub fn embed_single<T: Real>(n: usize, q: usize, gate: &Matrix<T>) -> Result<Matrix<T>> {
    let mut full = Matrix::<T>::identity(1);
    for k in 0..n {
        let factor = if k == q { gate.clone() } else { Matrix::identity(2) };
        full = full.kron(&factor)?;
    }
    Ok(full)
}

/// Maps a Bloch vector to the single-qubit state `½(I + r·σ)` without validation.
pub fn bloch_state<T: Real>(r: [T; 3]) -> DensityMatrix<T> {
    let half = T::lit(0.5);
    let m = Matrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => cr(half * (T::one() + r[2])),
        (1, 1) => cr(half * (T::one() - r[2])),
        (0, 1) => C::new(half * r[0], -half * r[1]),
        _ => C::new(half * r[0], half * r[1]),
    });
    DensityMatrix::trusted(m)
}

/// Bloch vector `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` of a single-qubit state.
pub fn bloch_vector<T: Real>(rho: &DensityMatrix<T>) -> Result<[T; 3]> {
    if rho.n() != 1 {
        return Err(QssError::DimensionMismatch {
            expected: 2,
            got: rho.dim(),
        });
    }
    Ok([
        rho.expectation(&PauliString::single(1, 0, Pauli::X))?,
        rho.expectation(&PauliString::single(1, 0, Pauli::Y))?,
        rho.expectation(&PauliString::single(1, 0, Pauli::Z))?,
    ])
}
