#![allow(dead_code)]

use qss_core::{Complex, DensityMatrix, Matrix, StateVector};
use qss_protocols::SecretQubit;
use rand::Rng;

pub const ZERO: Complex = Complex::new(0.0, 0.0);
pub const ONE: Complex = Complex::new(1.0, 0.0);
pub const I: Complex = Complex::new(0.0, 1.0);

pub fn ket_x(sign: f64) -> [Complex; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [Complex::new(h, 0.0), Complex::new(sign * h, 0.0)]
}

pub fn ket_y(sign: f64) -> [Complex; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [Complex::new(h, 0.0), Complex::new(0.0, sign * h)]
}

pub fn ket_z(bit: u8) -> [Complex; 2] {
    if bit == 0 {
        [ONE, ZERO]
    } else {
        [ZERO, ONE]
    }
}

pub fn product_ket(factors: &[[Complex; 2]]) -> Vec<Complex> {
    let mut v = vec![ONE];
    for f in factors {
        v = v.iter().flat_map(|a| [a * f[0], a * f[1]]).collect();
    }
    v
}

pub fn add_scaled(acc: &mut [Complex], v: &[Complex], s: Complex) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += s * b;
    }
}

/// Resource written term by term: dealer in the Y basis, players 1,2 in X,
/// player 3 in Z and player 4 in Y.
pub fn resource_y_expansion() -> StateVector {
    let (p, m) = (ket_x(1.0), ket_x(-1.0));
    let (yp, ym) = (ket_y(1.0), ket_y(-1.0));
    let (z0, z1) = (ket_z(0), ket_z(1));
    let branch = |d: [Complex; 2], terms: [(Complex, [[Complex; 2]; 4]); 4]| {
        let mut acc = vec![ZERO; 32];
        for (coef, f) in terms {
            add_scaled(&mut acc, &product_ket(&[d, f[0], f[1], f[2], f[3]]), coef);
        }
        acc
    };
    let a = branch(
        ym,
        [(ONE, [p, p, z0, ym]), (-I, [p, p, z1, yp]), (I, [m, m, z0, ym]), (ONE, [m, m, z1, yp])],
    );
    let b = branch(
        yp,
        [(ONE, [p, p, z0, yp]), (I, [p, p, z1, ym]), (-I, [m, m, z0, yp]), (ONE, [m, m, z1, ym])],
    );
    let sum: Vec<Complex> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    StateVector::normalized(sum).unwrap()
}

/// Dense 2×2 Pauli by letter, built from literals.
pub fn pauli_2x2(ch: char) -> [[Complex; 2]; 2] {
    match ch {
        'I' => [[ONE, ZERO], [ZERO, ONE]],
        'X' => [[ZERO, ONE], [ONE, ZERO]],
        'Y' => [[ZERO, -I], [I, ZERO]],
        'Z' => [[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("not a Pauli letter: {ch}"),
    }
}

/// Dense operator for a string such as `"-XZIY"`, by explicit Kronecker products.
pub fn dense_pauli(s: &str) -> Vec<Vec<Complex>> {
    let (sign, letters) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.trim_start_matches('+')),
    };
    let mut m = vec![vec![Complex::new(sign, 0.0)]];
    for ch in letters.chars() {
        let p = pauli_2x2(ch);
        let d = m.len();
        let mut next = vec![vec![ZERO; 2 * d]; 2 * d];
        for i in 0..d {
            for j in 0..d {
                for a in 0..2 {
                    for b in 0..2 {
                        next[2 * i + a][2 * j + b] = m[i][j] * p[a][b];
                    }
                }
            }
        }
        m = next;
    }
    m
}

pub fn dense_expectation(op: &[Vec<Complex>], psi: &[Complex]) -> Complex {
    let mut acc = ZERO;
    for (i, row) in op.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            acc += psi[i].conj() * x * psi[j];
        }
    }
    acc
}

pub fn ket_matrix(a: &[Complex]) -> Matrix {
    Matrix::outer(a, a).unwrap()
}

fn single(ch: char) -> Matrix {
    let p = pauli_2x2(ch);
    Matrix::from_rows(&[&p[0], &p[1]]).unwrap()
}

/// Opposite-pair closed form `½[|A⟩⟨A| + |B⟩⟨B| + i sinθ sinφ (|A⟩⟨B| − |B⟩⟨A|)]`
/// with `|A⟩, |B⟩ = (|++⟩ ± |−−⟩)/√2`.
pub fn opposite_closed_form(s: &SecretQubit) -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let pp = product_ket(&[ket_x(1.0), ket_x(1.0)]);
    let mm = product_ket(&[ket_x(-1.0), ket_x(-1.0)]);
    let a: Vec<Complex> = pp.iter().zip(&mm).map(|(x, y)| (x + y) * h).collect();
    let b: Vec<Complex> = pp.iter().zip(&mm).map(|(x, y)| (x - y) * h).collect();
    let c = I * (s.theta.sin() * s.phi.sin());
    let ab = Matrix::outer(&a, &b).unwrap();
    let ba = Matrix::outer(&b, &a).unwrap();
    let m = &(&ket_matrix(&a) + &ket_matrix(&b)) + &(&ab - &ba).scale(c);
    DensityMatrix::new(m.scale_real(0.5)).unwrap()
}

/// Adjacent-pair closed form: player `a ∈ {1,2}` first, the other player second,
/// `½[|+⟩⟨+| ⊗ ½(XZψψ†ZX + Zψψ†Z) + |−⟩⟨−| ⊗ ½(Xψψ†X + ψψ†)]`.
pub fn adjacent_closed_form(s: &SecretQubit) -> DensityMatrix {
    let psi = ket_matrix(&s.amplitudes());
    let (x, z) = (single('X'), single('Z'));
    let xz = &x * &z;
    let conj = |u: &Matrix| &(u * &psi) * &u.adjoint();
    let plus_part = (&conj(&xz) + &conj(&z)).scale_real(0.5);
    let minus_part = (&conj(&x) + &psi).scale_real(0.5);
    let p = ket_matrix(&ket_x(1.0));
    let m = ket_matrix(&ket_x(-1.0));
    let total = &p.kron(&plus_part).unwrap() + &m.kron(&minus_part).unwrap();
    DensityMatrix::new(total.scale_real(0.5)).unwrap()
}

pub fn random_secret<R: Rng>(rng: &mut R) -> SecretQubit {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    SecretQubit::new(z.acos(), phi).unwrap()
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> StateVector {
    let amps = (0..1 << n)
        .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(amps).unwrap()
}

pub fn random_product<R: Rng>(n: usize, rng: &mut R) -> StateVector {
    let mut psi = random_state(1, rng);
    for _ in 1..n {
        psi = psi.kron(&random_state(1, rng)).unwrap();
    }
    psi
}

/// `Σ w_k |v_k⟩⟨v_k|` normalised, with `rank` random components.
pub fn random_density<R: Rng>(n: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let mut m = Matrix::zeros(1 << n);
    for _ in 0..rank {
        let v = random_state(n, rng);
        let w: f64 = rng.random_range(0.05..1.0);
        m = &m + &ket_matrix(v.amplitudes()).scale_real(w);
    }
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr)).unwrap()
}
