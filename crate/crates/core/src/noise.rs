//! Noise channels, finite-shot sampling, Poisson resampling and linear-inversion tomography.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;
use serde::{Deserialize, Serialize};

use crate::error::{QssError, Result};
use crate::linalg::{basis_vector, DensityMatrix, Matrix, Pauli, PauliString};
#[cfg(test)]
use crate::linalg::StateVector;
use crate::scalar::{cr, Real, C};

/// Reproducible random source used throughout.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// `vρ + (1−v)I/2ⁿ`; the parameter is the visibility `v`.
    White,
    /// Independent depolarizing with weight `p` on each target qubit.
    Depolarizing,
    /// Bit flip `X` with probability `p` on each target qubit.
    QberFlip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub parameter: f64,
    /// `None` means every qubit; white noise ignores it.
    pub targets: Option<Vec<usize>>,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, parameter: f64, targets: Option<Vec<usize>>) -> Result<Self> {
        if !(0.0..=1.0).contains(&parameter) || parameter.is_nan() {
            return Err(QssError::arg(format!("noise parameter {parameter} outside [0, 1]")));
        }
        if kind == NoiseKind::White && targets.is_some() {
            return Err(QssError::arg("white noise acts on the whole register"));
        }
        Ok(Self {
            kind,
            parameter,
            targets,
        })
    }

    pub fn white(v: f64) -> Result<Self> {
        Self::new(NoiseKind::White, v, None)
    }

    pub fn flip(p: f64) -> Result<Self> {
        Self::new(NoiseKind::QberFlip, p, None)
    }

    /// White-noise visibility giving fidelity `f` with an `n`-qubit pure target.
    pub fn visibility_for_fidelity(f: f64, n: usize) -> f64 {
        let floor = 1.0 / (1u64 << n) as f64;
        (f - floor) / (1.0 - floor)
    }

    fn targets_for(&self, n: usize) -> Result<Vec<usize>> {
        match &self.targets {
            None => Ok((0..n).collect()),
            Some(t) => {
                if let Some(&q) = t.iter().find(|&&q| q >= n) {
                    return Err(QssError::arg(format!("noise target {q} out of range")));
                }
                Ok(t.clone())
            }
        }
    }

    /// Draws one Pauli error so that averaging `PρP` over draws reproduces [`apply_noise`].
    pub fn sample_pauli<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<PauliString> {
        const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        let mut factors = vec![Pauli::I; n];
        match self.kind {
            // the uniform Pauli twirl of any state is I/2ⁿ
            NoiseKind::White => {
                if rng.random::<f64>() >= self.parameter {
                    for f in factors.iter_mut() {
                        *f = ALL[rng.random_range(0..4)];
                    }
                }
            }
            NoiseKind::Depolarizing => {
                for q in self.targets_for(n)? {
                    if rng.random::<f64>() < self.parameter {
                        factors[q] = ALL[rng.random_range(0..4)];
                    }
                }
            }
            NoiseKind::QberFlip => {
                for q in self.targets_for(n)? {
                    if rng.random::<f64>() < self.parameter {
                        factors[q] = Pauli::X;
                    }
                }
            }
        }
        PauliString::new(crate::linalg::Phase::PLUS_ONE, factors)
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            NoiseKind::White => "white",
            NoiseKind::Depolarizing => "depol",
            NoiseKind::QberFlip => "flip",
        };
        write!(f, "{kind}:{}", self.parameter)?;
        if let Some(t) = &self.targets {
            let t: Vec<String> = t.iter().map(|q| q.to_string()).collect();
            write!(f, "@{}", t.join(","))?;
        }
        Ok(())
    }
}

/// `kind:param[@q,q,...]` with kind one of `white`, `depol`/`depolarizing`, `flip`/`qber`.
impl FromStr for NoiseSpec {
    type Err = QssError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || QssError::Parse(format!("noise spec '{s}' is not kind:param[@targets]"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let (param, targets) = match rest.split_once('@') {
            Some((p, t)) => (p, Some(t)),
            None => (rest, None),
        };
        let kind = match kind.trim().to_ascii_lowercase().as_str() {
            "white" => NoiseKind::White,
            "depol" | "depolarizing" => NoiseKind::Depolarizing,
            "flip" | "qber" | "qber-flip" => NoiseKind::QberFlip,
            _ => return Err(bad()),
        };
        let parameter: f64 = param.trim().parse().map_err(|_| bad())?;
        let targets = targets
            .map(|t| {
                t.split(',')
                    .map(|q| q.trim().parse::<usize>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        NoiseSpec::new(kind, parameter, targets)
    }
}

fn pauli_conj<T: Real>(rho: &DensityMatrix<T>, q: usize, p: Pauli) -> Matrix<T> {
    rho.apply_pauli(&PauliString::single(rho.n(), q, p))
        .expect("qubit in range")
        .into_matrix()
}

pub fn apply_noise<T: Real>(rho: &DensityMatrix<T>, spec: &NoiseSpec) -> Result<DensityMatrix<T>> {
    let p = T::lit(spec.parameter);
    let one = T::one();
    match spec.kind {
        NoiseKind::White => {
            let mixed = DensityMatrix::maximally_mixed(rho.n())?;
            DensityMatrix::mixture(&[(p, rho), (one - p, &mixed)])
        }
        NoiseKind::Depolarizing => {
            let mut out = rho.clone();
            for q in spec.targets_for(rho.n())? {
                let quarter = p * T::lit(0.25);
                let mut m = out.matrix().scale_real(one - T::lit(3.0) * quarter);
                for pa in [Pauli::X, Pauli::Y, Pauli::Z] {
                    m = &m + &pauli_conj(&out, q, pa).scale_real(quarter);
                }
                out = DensityMatrix::trusted(m);
            }
            Ok(out)
        }
        NoiseKind::QberFlip => {
            let mut out = rho.clone();
            for q in spec.targets_for(rho.n())? {
                let m = &out.matrix().scale_real(one - p) + &pauli_conj(&out, q, Pauli::X).scale_real(p);
                out = DensityMatrix::trusted(m);
            }
            Ok(out)
        }
    }
}

/// Outcome histogram for one local measurement setting; bit `k` of an outcome
/// string is qubit `k`, `0` meaning the `+1` eigenvalue.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub setting: PauliString,
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
}

impl CountRecord {
    pub fn new(setting: PauliString, counts: BTreeMap<String, u64>) -> Result<Self> {
        if !setting.phase().is_real() || setting.phase().sign() != Some(1) {
            return Err(QssError::arg("settings carry no sign"));
        }
        for k in counts.keys() {
            if k.len() != setting.n() || !k.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(QssError::arg(format!("outcome '{k}' does not match setting {setting}")));
            }
        }
        let shots = counts.values().sum();
        Ok(Self {
            setting,
            counts,
            shots,
        })
    }

    /// Empirical `⟨P⟩` for a term whose non-identity factors agree with the setting.
    pub fn expectation(&self, term: &PauliString) -> Option<f64> {
        if self.shots == 0 || !crate::info::fits_basis(term, &self.setting) {
            return None;
        }
        let support = term.support();
        let mut acc = 0i64;
        for (k, &c) in &self.counts {
            let b = k.as_bytes();
            let parity = support.iter().filter(|&&q| b[q] == b'1').count() % 2;
            acc += if parity == 0 { c as i64 } else { -(c as i64) };
        }
        let sign = term.phase().sign().unwrap_or(1) as f64;
        Some(sign * acc as f64 / self.shots as f64)
    }
}

/// Born probabilities of every outcome of a local setting.
pub fn outcome_distribution<T: Real>(rho: &DensityMatrix<T>, setting: &PauliString) -> Result<Vec<T>> {
    let n = rho.n();
    if setting.n() != n {
        return Err(QssError::DimensionMismatch {
            expected: n,
            got: setting.n(),
        });
    }
    if setting.factors().contains(&Pauli::I) {
        return Err(QssError::arg(format!("setting {setting} leaves a qubit unmeasured")));
    }
    let dim = rho.dim();
    let mut probs = Vec::with_capacity(dim);
    for b in 0..dim {
        let mut v = vec![cr(T::one())];
        for q in 0..n {
            let e = basis_vector::<T>(setting.factor(q), ((b >> (n - 1 - q)) & 1) as u8);
            v = v.iter().flat_map(|a| [*a * e[0], *a * e[1]]).collect();
        }
        let rv = rho.matrix().mul_vec(&v)?;
        let p: C<T> = v.iter().zip(&rv).map(|(a, r)| a.conj() * *r).sum();
        probs.push(p.re.max(T::zero()));
    }
    Ok(probs)
}

pub fn bitstring(b: usize, n: usize) -> String {
    (0..n).map(|q| if (b >> (n - 1 - q)) & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn sample_counts<T: Real, R: Rng + ?Sized>(
    rho: &DensityMatrix<T>,
    setting: &PauliString,
    shots: u64,
    rng: &mut R,
) -> Result<CountRecord> {
    if shots == 0 {
        return Err(QssError::arg("shots must be at least 1"));
    }
    let probs: Vec<f64> = outcome_distribution(rho, setting)?
        .into_iter()
        .map(|p| p.to_f64_lossy())
        .collect();
    let dist = WeightedIndex::new(&probs).map_err(|e| QssError::InvalidState(e.to_string()))?;
    let mut hist = vec![0u64; probs.len()];
    for _ in 0..shots {
        hist[dist.sample(rng)] += 1;
    }
    let counts = hist
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(b, c)| (bitstring(b, rho.n()), c))
        .collect();
    CountRecord::new(setting.unsigned(), counts)
}

/// Replaces each count by a Poisson draw with that mean.
pub fn poisson_resample<R: Rng + ?Sized>(rec: &CountRecord, rng: &mut R) -> CountRecord {
    let counts = rec
        .counts
        .iter()
        .map(|(k, &c)| {
            let draw = if c == 0 {
                0
            } else {
                Poisson::new(c as f64).expect("positive mean").sample(rng) as u64
            };
            (k.clone(), draw)
        })
        .collect();
    CountRecord::new(rec.setting.clone(), counts).expect("same keys")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std: f64,
    pub retained: usize,
}

/// Poisson-resampled mean and standard deviation of `statistic`. Resample `i` uses
/// its own stream of the seeded generator, so results do not depend on scheduling.
pub fn monte_carlo_error(
    records: &[CountRecord],
    statistic: impl Fn(&[CountRecord]) -> Option<f64>,
    resamples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if resamples < 100 {
        return Err(QssError::arg("at least 100 resamples are required"));
    }
    let values: Vec<f64> = (0..resamples)
        .filter_map(|i| {
            let mut rng = seeded(seed);
            rng.set_stream(i as u64);
            let resampled: Vec<CountRecord> =
                records.iter().map(|r| poisson_resample(r, &mut rng)).collect();
            statistic(&resampled).filter(|v| v.is_finite())
        })
        .collect();
    if values.len() * 10 < resamples * 9 {
        return Err(QssError::arg(format!(
            "statistic undefined on {} of {resamples} resamples",
            resamples - values.len()
        )));
    }
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
    Ok(McEstimate {
        mean,
        std: var.sqrt(),
        retained: values.len(),
    })
}

/// Empirical expectation of `term` from the first record whose setting covers it.
pub fn expectation_from_records(records: &[CountRecord], term: &PauliString) -> Option<f64> {
    records.iter().find_map(|r| r.expectation(term))
}

/// All `4ⁿ − 1` non-identity Pauli strings in lexicographic I<X<Y<Z order.
pub fn all_pauli_strings(n: usize) -> Vec<PauliString> {
    const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    (1..1usize << (2 * n))
        .map(|k| {
            let f = (0..n).map(|q| ALL[(k >> (2 * (n - 1 - q))) & 3]).collect();
            PauliString::new(crate::linalg::Phase::PLUS_ONE, f).expect("n within cap")
        })
        .collect()
}

/// The `3ⁿ` full local settings.
pub fn tomography_settings(n: usize) -> Vec<PauliString> {
    const XYZ: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
    (0..3usize.pow(n as u32))
        .map(|mut k| {
            let mut f = vec![Pauli::I; n];
            for q in (0..n).rev() {
                f[q] = XYZ[k % 3];
                k /= 3;
            }
            PauliString::new(crate::linalg::Phase::PLUS_ONE, f).expect("n within cap")
        })
        .collect()
}

/// Linear inversion `ρ = (I + Σ e_P P)/2ⁿ` followed by eigenvalue clipping.
/// Strings missing from `expectations` count as zero.
pub fn tomography_reconstruct<T: Real>(
    expectations: &BTreeMap<PauliString, T>,
    n: usize,
) -> Result<DensityMatrix<T>> {
    if n == 0 || n > crate::MAX_QUBITS {
        return Err(QssError::Capacity { requested: n });
    }
    let dim = 1usize << n;
    let mut m = Matrix::<T>::identity(dim);
    for (p, &e) in expectations {
        if p.n() != n {
            return Err(QssError::DimensionMismatch {
                expected: n,
                got: p.n(),
            });
        }
        if !p.is_hermitian() {
            return Err(QssError::arg(format!("{p} is not Hermitian")));
        }
        if p.is_identity() {
            continue;
        }
        for col in 0..dim {
            let (row, coef) = p.action_on_basis::<T>(col);
            m[(row, col)] += coef * cr(e);
        }
    }
    let m = m.scale_real(T::one() / T::lit(dim as f64));
    project_psd(&m)
}

/// Clips negative eigenvalues and renormalises the trace.
pub fn project_psd<T: Real>(m: &Matrix<T>) -> Result<DensityMatrix<T>> {
    let herm = (m + &m.adjoint()).scale_real(T::lit(0.5));
    let eig = crate::linalg::hermitian_eig(&herm)?;
    let total: T = eig.values.iter().map(|l| l.max(T::zero())).sum();
    if total <= T::zero() {
        return Err(QssError::InvalidState("no positive spectrum to renormalise".into()));
    }
    let clipped = eig.reconstruct_with(|l| l.max(T::zero()) / total);
    let clipped = (&clipped + &clipped.adjoint()).scale_real(T::lit(0.5));
    DensityMatrix::new(clipped)
}

/// Exact expectations of every non-identity string.
pub fn exact_expectations<T: Real>(rho: &DensityMatrix<T>) -> BTreeMap<PauliString, T> {
    all_pauli_strings(rho.n())
        .into_iter()
        .map(|p| {
            let e = rho.expectation(&p).expect("matching size");
            (p, e)
        })
        .collect()
}

/// Expectations of every non-identity string estimated from full-setting records.
pub fn expectations_from_counts(records: &[CountRecord], n: usize) -> BTreeMap<PauliString, f64> {
    all_pauli_strings(n)
        .into_iter()
        .filter_map(|p| expectation_from_records(records, &p).map(|e| (p, e)))
        .collect()
}

/// CSV with header `setting,outcome_bitstring,count`, one row per outcome.
pub fn write_counts_csv<W: Write>(records: &[CountRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| QssError::arg(format!("csv write failed: {e}"));
    w.write_record(["setting", "outcome_bitstring", "count"]).map_err(io)?;
    for r in records {
        let setting: String = r.setting.to_string().trim_start_matches('+').to_string();
        for (k, c) in &r.counts {
            w.write_record([setting.as_str(), k.as_str(), &c.to_string()]).map_err(io)?;
        }
    }
    w.flush().map_err(|e| QssError::arg(format!("csv flush failed: {e}")))?;
    Ok(())
}

pub fn read_counts_csv<R: Read>(input: R) -> Result<Vec<CountRecord>> {
    #[derive(Deserialize)]
    struct Row {
        setting: String,
        outcome_bitstring: String,
        count: u64,
    }
    let mut grouped: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    let mut order = Vec::new();
    for row in csv::Reader::from_reader(input).deserialize::<Row>() {
        let row = row.map_err(|e| QssError::Parse(e.to_string()))?;
        if !grouped.contains_key(&row.setting) {
            order.push(row.setting.clone());
        }
        *grouped
            .entry(row.setting)
            .or_default()
            .entry(row.outcome_bitstring)
            .or_default() += row.count;
    }
    order
        .into_iter()
        .map(|s| {
            let setting: PauliString = s.parse()?;
            CountRecord::new(setting, grouped.remove(&s).unwrap_or_default())
        })
        .collect()
}
