//! Certified Clifford unitaries and the non-Clifford magic gate.
//!
//! Every matrix built here is checked against the displacement table before
//! it is handed out, so a phase-convention slip shows up as a construction
//! error rather than as silently wrong entropies.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entropy::DEFAULT_CLIFFORD_TOL;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, UnitaryMatrix};
use crate::phase_space::{DisplacementTable, QuditSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `F_jk = omega^{jk} / sqrt(d_L)` on one qudit.
    Fourier(usize),
    /// `diag(conj(tau)^{k^2})` on one qudit.
    Phase(usize),
    /// `|j, k> -> |j, k + j>` from `control` to `target`.
    Sum { control: usize, target: usize },
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Fourier(q) => write!(f, "F{q}"),
            Generator::Phase(q) => write!(f, "P{q}"),
            Generator::Sum { control, target } => write!(f, "SUM{control}{target}"),
        }
    }
}

fn fourier(d: usize) -> DMatrix<Complex64> {
    let s = 1.0 / (d as f64).sqrt();
    DMatrix::from_fn(d, d, |j, k| Complex64::from_polar(s, 2.0 * PI * ((j * k) % d) as f64 / d as f64))
}

fn quadratic_phase(d: usize) -> DMatrix<Complex64> {
    // conj(tau)^{k^2} = exp(-i pi (d+1) k^2 / d), exponent reduced mod 2d
    let two_d = 2 * d;
    DMatrix::from_fn(d, d, |j, k| {
        if j != k {
            return Complex64::new(0.0, 0.0);
        }
        let r = ((k * k) % two_d * (d + 1)) % two_d;
        Complex64::from_polar(1.0, -PI * r as f64 / d as f64)
    })
}

/// Embeds a local operator on qudit `q` into the full register.
pub fn embed_local(sys: &QuditSystem, q: usize, local: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut out = DMatrix::<Complex64>::identity(1, 1);
    for (i, &d) in sys.local_dims().iter().enumerate() {
        let factor = if i == q {
            local.clone()
        } else {
            DMatrix::identity(d, d)
        };
        out = out.kronecker(&factor);
    }
    out
}

fn sum_gate(sys: &QuditSystem, control: usize, target: usize) -> DMatrix<Complex64> {
    let dims = sys.local_dims();
    let d = sys.dim();
    let dl = dims[target];
    let mut m = DMatrix::zeros(d, d);
    for col in 0..d {
        // decode the basis state, shift the target digit by the control digit
        let mut digits = vec![0; dims.len()];
        let mut rem = col;
        for (q, &dq) in dims.iter().enumerate().rev() {
            digits[q] = rem % dq;
            rem /= dq;
        }
        digits[target] = (digits[target] + digits[control]) % dl;
        let row = digits.iter().zip(dims).fold(0, |acc, (&x, &dq)| acc * dq + x);
        m[(row, col)] = Complex64::new(1.0, 0.0);
    }
    m
}

fn certify(table: &DisplacementTable, u: &UnitaryMatrix) -> Result<bool> {
    Ok(table.char_matrix(u)?.is_permutation(DEFAULT_CLIFFORD_TOL))
}

/// Fourier and phase gate on each qudit, plus SUM for every ordered pair of
/// qudits with equal local dimension. Each generator is certified Clifford.
pub fn clifford_generators(sys: &QuditSystem) -> Result<Vec<(Generator, UnitaryMatrix)>> {
    let table = DisplacementTable::new(sys);
    let dims = sys.local_dims();
    let mut out = Vec::new();
    for (q, &d) in dims.iter().enumerate() {
        out.push((Generator::Fourier(q), embed_local(sys, q, &fourier(d))));
        out.push((Generator::Phase(q), embed_local(sys, q, &quadratic_phase(d))));
    }
    for control in 0..dims.len() {
        for target in 0..dims.len() {
            if control != target && dims[control] == dims[target] {
                out.push((Generator::Sum { control, target }, sum_gate(sys, control, target)));
            }
        }
    }
    out.into_iter()
        .map(|(g, m)| {
            let u = UnitaryMatrix::from_dmatrix(m)?;
            if !certify(&table, &u)? {
                return Err(Error::Certification(format!("generator {g} is not Clifford")));
            }
            Ok((g, u))
        })
        .collect()
}

/// A product of generators, applied right to left in `generators` order
/// (the first entry acts first).
#[derive(Clone, Debug)]
pub struct CliffordWord {
    system: QuditSystem,
    generators: Vec<Generator>,
    unitary: UnitaryMatrix,
}

impl CliffordWord {
    pub fn system(&self) -> &QuditSystem {
        &self.system
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn unitary(&self) -> &UnitaryMatrix {
        &self.unitary
    }

    pub fn into_unitary(self) -> UnitaryMatrix {
        self.unitary
    }
}

/// Draws random generator words for one system, reusing a certified
/// generator set and displacement table.
#[derive(Clone, Debug)]
pub struct CliffordSampler {
    system: QuditSystem,
    table: DisplacementTable,
    generators: Vec<(Generator, UnitaryMatrix)>,
}

impl CliffordSampler {
    pub fn new(sys: &QuditSystem) -> Result<Self> {
        Ok(Self {
            system: sys.clone(),
            table: DisplacementTable::new(sys),
            generators: clifford_generators(sys)?,
        })
    }

    pub fn generators(&self) -> &[(Generator, UnitaryMatrix)] {
        &self.generators
    }

    pub fn sample<R: Rng + ?Sized>(&self, length: usize, rng: &mut R) -> Result<CliffordWord> {
        let d = self.system.dim();
        let mut m = DMatrix::<Complex64>::identity(d, d);
        let mut word = Vec::with_capacity(length);
        for _ in 0..length {
            let (g, u) = &self.generators[rng.random_range(0..self.generators.len())];
            m = u.as_dmatrix() * m;
            word.push(*g);
        }
        let unitary = UnitaryMatrix::from_dmatrix(m)?;
        if !certify(&self.table, &unitary)? {
            return Err(Error::Certification("random word failed Clifford check".into()));
        }
        Ok(CliffordWord {
            system: self.system.clone(),
            generators: word,
            unitary,
        })
    }
}

/// Uniformly random word of `length` generators, deterministic in `seed`.
pub fn random_clifford_word(sys: &QuditSystem, length: usize, seed: u64) -> Result<CliffordWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CliffordSampler::new(sys)?.sample(length, &mut rng)
}

fn diagonal_gate(phases: impl Iterator<Item = f64>) -> DMatrix<Complex64> {
    let diag: Vec<Complex64> = phases.map(|t| Complex64::from_polar(1.0, t)).collect();
    ComplexMatrix::diagonal(&diag).into_dmatrix()
}

/// Candidate magic gates on one qudit, tried in order.
fn magic_candidates(d: usize) -> Vec<DMatrix<Complex64>> {
    if d == 2 {
        return vec![diagonal_gate([0.0, PI / 4.0].into_iter())];
    }
    let df = d as f64;
    vec![
        // cubic phase exp(2 pi i k^3 / d^2); for d = 3 this is the usual qutrit T
        diagonal_gate((0..d).map(|k| 2.0 * PI * ((k * k * k) % (d * d)) as f64 / (df * df))),
        diagonal_gate((0..d).map(|k| 2.0 * PI * (k * k * k) as f64 / (df * df * df))),
    ]
}

/// The magic gate on qudit 0 (identity elsewhere): `diag(1, e^{i pi/4})` for
/// qubits and a cubic-phase gate otherwise. Certified non-Clifford.
pub fn t_gate(sys: &QuditSystem) -> Result<UnitaryMatrix> {
    let table = DisplacementTable::new(sys);
    for local in magic_candidates(sys.local_dims()[0]) {
        let u = UnitaryMatrix::from_dmatrix(embed_local(sys, 0, &local))?;
        if !certify(&table, &u)? {
            return Ok(u);
        }
    }
    Err(Error::Certification(format!(
        "no non-Clifford magic gate found for local dimension {}",
        sys.local_dims()[0]
    )))
}
