//! Holevo quantity, mutual information, the resource witness and the Pauli-term fidelity.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{QssError, Result};
use crate::linalg::{von_neumann_entropy, DensityMatrix, Matrix, Pauli, PauliString};
use crate::scalar::{cr, Real};

/// Classical labels `i` with probability `p_i`, each encoded as a state `ρ_i`.
#[derive(Clone, Debug)]
pub struct ClassicalQuantumEnsemble<T: Real> {
    items: Vec<(T, DensityMatrix<T>)>,
}

impl<T: Real> ClassicalQuantumEnsemble<T> {
    pub fn new(items: Vec<(T, DensityMatrix<T>)>) -> Result<Self> {
        let dim = items
            .first()
            .ok_or_else(|| QssError::arg("empty ensemble"))?
            .1
            .dim();
        let mut total = T::zero();
        for (p, rho) in &items {
            if *p < T::zero() {
                return Err(QssError::arg("negative probability"));
            }
            if rho.dim() != dim {
                return Err(QssError::DimensionMismatch {
                    expected: dim,
                    got: rho.dim(),
                });
            }
            total += *p;
        }
        if (total - T::one()).abs() > T::validation_tol() {
            return Err(QssError::arg(format!("probabilities sum to {total}")));
        }
        Ok(Self { items })
    }

    pub fn items(&self) -> &[(T, DensityMatrix<T>)] {
        &self.items
    }

    /// `Σ p_i ρ_i`.
    pub fn average(&self) -> DensityMatrix<T> {
        let parts: Vec<(T, &DensityMatrix<T>)> = self.items.iter().map(|(p, r)| (*p, r)).collect();
        DensityMatrix::mixture(&parts).expect("validated ensemble")
    }

    /// `Σ p_i |i⟩⟨i| ⊗ ρ_i` with the label register on the leading qubits.
    pub fn cq_state(&self) -> Result<(DensityMatrix<T>, usize)> {
        let k = self.items.len();
        let reg = (usize::BITS - (k.max(2) - 1).leading_zeros()) as usize;
        let dim = self.items[0].1.dim();
        let mut m = Matrix::zeros((1 << reg) * dim);
        for (i, (p, rho)) in self.items.iter().enumerate() {
            for a in 0..dim {
                for b in 0..dim {
                    m[(i * dim + a, i * dim + b)] = rho.entry(a, b) * cr(*p);
                }
            }
        }
        Ok((DensityMatrix::new(m)?, reg))
    }
}

/// `χ = S(Σ p_i ρ_i) − Σ p_i S(ρ_i)` in bits.
pub fn holevo_chi<T: Real>(e: &ClassicalQuantumEnsemble<T>) -> T {
    let avg = von_neumann_entropy(&e.average());
    let each: T = e
        .items
        .iter()
        .map(|(p, r)| *p * von_neumann_entropy(r))
        .sum();
    (avg - each).max(T::zero())
}

/// `S(ρ_cut) + S(ρ_rest) − S(ρ)` in bits.
pub fn mutual_information<T: Real>(rho: &DensityMatrix<T>, cut: &[usize]) -> Result<T> {
    let cut: BTreeSet<usize> = cut.iter().copied().collect();
    if cut.is_empty() || cut.len() >= rho.n() || cut.iter().any(|&q| q >= rho.n()) {
        return Err(QssError::arg(format!(
            "cut {cut:?} is not a non-empty proper subset of {} qubits",
            rho.n()
        )));
    }
    let a: Vec<usize> = cut.iter().copied().collect();
    let b: Vec<usize> = (0..rho.n()).filter(|q| !cut.contains(q)).collect();
    let sa = von_neumann_entropy(&rho.partial_trace(&a)?);
    let sb = von_neumann_entropy(&rho.partial_trace(&b)?);
    Ok(sa + sb - von_neumann_entropy(rho))
}

/// `W = c·I + Σ_k w_k P_k`.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessSpec<T: Real> {
    pub constant: T,
    pub terms: Vec<(T, PauliString)>,
}

/// Tilde marks `~` swap eigenstates, i.e. negate that factor.
fn parse_tilde(s: &str) -> PauliString {
    let mut sign = false;
    let mut plain = String::new();
    for ch in s.chars() {
        if ch == '~' {
            sign = !sign;
        } else {
            plain.push(ch);
        }
    }
    let p: PauliString = plain.parse().expect("static term");
    if sign {
        -&p
    } else {
        p
    }
}

const WITNESS_X_TERMS: [&str; 7] = [
    "~X~XII~X", "~X~XI~XI", "I~X~X~X~X", "I~X~XII", "~XI~XI~X", "~XI~X~XI", "III~X~X",
];
const WITNESS_YZ_TERMS: [&str; 3] = ["IZ~Y~YZ", "~YZ~YII", "~YII~YZ"];

impl<T: Real> WitnessSpec<T> {
    /// Witness for the five-qubit resource with weights `1/4` on the seven X-type
    /// correlations and `1/2` on the three Y/Z-type ones.
    pub fn resource() -> Self {
        Self::resource_with(T::lit(0.25), T::lit(0.5))
    }

    /// Same operator content with the weights `1/8` and `1/4`.
    pub fn resource_printed_weights() -> Self {
        Self::resource_with(T::lit(0.125), T::lit(0.25))
    }

    fn resource_with(wx: T, wyz: T) -> Self {
        let mut terms: Vec<(T, PauliString)> =
            WITNESS_X_TERMS.iter().map(|s| (-wx, parse_tilde(s))).collect();
        terms.extend(WITNESS_YZ_TERMS.iter().map(|s| (-wyz, parse_tilde(s))));
        Self {
            constant: T::lit(2.25),
            terms,
        }
    }

    pub fn n(&self) -> usize {
        self.terms.first().map_or(0, |(_, p)| p.n())
    }

    pub fn evaluate(&self, rho: &DensityMatrix<T>) -> Result<T> {
        if rho.n() != self.n() {
            return Err(QssError::DimensionMismatch {
                expected: 1 << self.n(),
                got: rho.dim(),
            });
        }
        let mut v = self.constant;
        for (w, p) in &self.terms {
            v += *w * rho.expectation(p)?;
        }
        Ok(v)
    }

    /// Value computed from per-term expectations (e.g. estimated from counts);
    /// `None` if any term is unavailable.
    pub fn evaluate_from(&self, expectation: impl Fn(&PauliString) -> Option<T>) -> Option<T> {
        let mut v = self.constant;
        for (w, p) in &self.terms {
            v += *w * expectation(p)?;
        }
        Some(v)
    }

    /// Measurement settings needed: each term's support must fit one of these.
    pub fn bases(&self) -> [PauliString; 2] {
        ["XXXXX".parse().unwrap(), "YZYYZ".parse().unwrap()]
    }
}

/// `Tr(ρW)` for the resource witness.
pub fn witness_value<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    WitnessSpec::resource().evaluate(rho)
}

/// The 31 signed non-identity stabilizer elements of the resource state.
pub const FIDELITY_TERMS: [&str; 31] = [
    "+IXXII", "-XXIXI", "-XIXXI", "-XXIIX", "-XIXIX", "+IIIXX", "+IXXXX", "+XYYYY", "+YZYII",
    "+YZYXX", "+YYZII", "+YYZXX", "-XZZYY", "-ZYYXI", "-ZYYIX", "-ZXIYY", "-ZIXYY", "+ZZZXI",
    "+ZZZIX", "+YIIZY", "+YXXZY", "+IZYZY", "+IYZZY", "+YIIYZ", "+YXXYZ", "+IZYYZ", "+IYZYZ",
    "-XYYZZ", "+XZZZZ", "+ZXIZZ", "+ZIXZZ",
];

/// The 17 local measurement settings covering [`FIDELITY_TERMS`].
pub const FIDELITY_BASES: [&str; 17] = [
    "XXXXX", "YXXYZ", "YXXZY", "ZXXYY", "ZXXZZ", "XYYYY", "XYYZZ", "ZYYXX", "YYZYZ", "XYZZY",
    "YYZXX", "YZYYZ", "ZZYZY", "YZYXX", "XZZYY", "XZZZZ", "ZZZXX",
];

pub fn fidelity_terms() -> Vec<PauliString> {
    FIDELITY_TERMS.iter().map(|s| s.parse().expect("static term")).collect()
}

pub fn fidelity_bases() -> Vec<PauliString> {
    FIDELITY_BASES.iter().map(|s| s.parse().expect("static basis")).collect()
}

/// Whether every non-identity factor of `term` agrees with `basis`.
pub fn fits_basis(term: &PauliString, basis: &PauliString) -> bool {
    term.n() == basis.n()
        && term
            .factors()
            .iter()
            .zip(basis.factors())
            .all(|(t, b)| *t == Pauli::I || t == b)
}

/// Index into [`FIDELITY_BASES`] of the first basis that measures `term`.
pub fn basis_for(term: &PauliString) -> Option<usize> {
    fidelity_bases().iter().position(|b| fits_basis(term, b))
}

#[derive(Clone, Debug, Serialize)]
pub struct FidelityEstimate<T: Real> {
    pub fidelity: T,
    pub per_term: Vec<(PauliString, T)>,
}

/// `F = (1 + Σ signed ⟨P_k⟩)/32` against the resource state.
pub fn fidelity_via_pauli_terms<T: Real>(rho: &DensityMatrix<T>) -> Result<FidelityEstimate<T>> {
    if rho.n() != 5 {
        return Err(QssError::DimensionMismatch {
            expected: 32,
            got: rho.dim(),
        });
    }
    let per_term = fidelity_terms()
        .into_iter()
        .map(|p| {
            let e = rho.expectation(&p)?;
            Ok((p, e))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FidelityEstimate {
        fidelity: fidelity_from_terms(per_term.iter().map(|(_, e)| *e)),
        per_term,
    })
}

pub fn fidelity_from_terms<T: Real>(signed: impl Iterator<Item = T>) -> T {
    (T::one() + signed.sum::<T>()) / T::lit(32.0)
}
