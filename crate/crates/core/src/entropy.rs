//! Stabilizer entropies of pure states and Clifford entropies of unitaries.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::UnitaryMatrix;
use crate::phase_space::{check_state, CharacteristicMatrix, DisplacementTable, QuditSystem};

/// Tolerance on entries of `D` when deciding Cliffordness.
pub const DEFAULT_CLIFFORD_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntropyKind {
    Renyi,
    /// Linearized (Tsallis) stabilizer entropy.
    TsallisLin,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha != 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// `chi_a = |c_a|^2 / d`, a probability distribution over phase space.
#[derive(Clone, Debug)]
pub struct ChiDistribution {
    system: QuditSystem,
    probs: Vec<f64>,
}

impl ChiDistribution {
    pub fn new(table: &DisplacementTable, psi: &[Complex64]) -> Result<Self> {
        let d = table.system().dim() as f64;
        let probs = table
            .char_function_state(psi)?
            .into_iter()
            .map(|c| c.norm_sqr() / d)
            .collect();
        Ok(Self {
            system: table.system().clone(),
            probs,
        })
    }

    pub fn system(&self) -> &QuditSystem {
        &self.system
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn power_sum(&self, alpha: f64) -> f64 {
        self.probs.iter().map(|p| p.powf(alpha)).sum()
    }

    pub fn entropy(&self, alpha: f64, kind: EntropyKind) -> Result<f64> {
        check_alpha(alpha)?;
        let d = self.system.dim() as f64;
        let s = self.power_sum(alpha);
        Ok(match kind {
            EntropyKind::Renyi => s.ln() / (1.0 - alpha) - d.ln(),
            EntropyKind::TsallisLin => (1.0 - d.powf(alpha - 1.0) * s) / (alpha - 1.0),
        })
    }
}

/// Stabilizer entropy `M_alpha` (Renyi) or `M_lin^(alpha)` (Tsallis) of a pure state.
pub fn stabilizer_entropy(sys: &QuditSystem, psi: &[Complex64], alpha: f64, kind: EntropyKind) -> Result<f64> {
    check_alpha(alpha)?;
    ChiDistribution::new(&DisplacementTable::new(sys), psi)?.entropy(alpha, kind)
}

/// Upper bound on the Renyi stabilizer entropy in dimension `d`.
pub fn stabilizer_entropy_bound(d: usize, alpha: f64) -> f64 {
    let d = d as f64;
    ((1.0 + (d - 1.0) * (d + 1.0).powf(1.0 - alpha)) / d).ln() / (1.0 - alpha)
}

/// `H_alpha` from a prebuilt characteristic matrix.
pub fn clifford_entropy_of(g: &CharacteristicMatrix, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let d2 = g.size() as f64;
    Ok((1.0 - g.power_sum(alpha) / d2) / (alpha - 1.0))
}

/// `H_alpha(U) = (1 - sum_ab D_ab^alpha / d^2) / (alpha - 1)`.
pub fn clifford_entropy(sys: &QuditSystem, u: &UnitaryMatrix, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    clifford_entropy_of(&DisplacementTable::new(sys).char_matrix(u)?, alpha)
}

/// Same value assembled from the Tsallis entropies of the rows and columns of
/// `D`, averaged over all `d^4` label pairs.
pub fn row_column_entropy(g: &CharacteristicMatrix, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let n = g.size();
    let tsallis = |s: f64| (1.0 - s) / (alpha - 1.0);
    let rows: Vec<f64> = (0..n)
        .map(|a| tsallis((0..n).map(|b| g.transition(a, b).powf(alpha)).sum()))
        .collect();
    let cols: Vec<f64> = (0..n)
        .map(|b| tsallis((0..n).map(|a| g.transition(a, b).powf(alpha)).sum()))
        .collect();
    let total: f64 = rows.iter().chain(&cols).map(|h| h * n as f64).sum();
    Ok(total / (2.0 * (n * n) as f64))
}

/// Largest value `H_2` can take in dimension `d` according to the Choi-state
/// bound, `1 - 2/(d^2 + 1)`.
pub fn h2_upper_bound(d: usize) -> f64 {
    let d2 = (d * d) as f64;
    1.0 - 2.0 / (d2 + 1.0)
}

/// `alpha -> 1` limit: `-(1/d^2) sum_ab D_ab ln D_ab` with `0 ln 0 = 0`.
pub fn shannon_clifford_entropy(sys: &QuditSystem, u: &UnitaryMatrix) -> Result<f64> {
    let g = DisplacementTable::new(sys).char_matrix(u)?;
    let n = g.size();
    let mut s = 0.0;
    for b in 0..n {
        for a in 0..n {
            let p = g.transition(a, b);
            if p > 0.0 {
                s -= p * p.ln();
            }
        }
    }
    Ok(s / n as f64)
}

/// Choi state `(1/sqrt d) sum_i U|i> (x) |i>` of a unitary channel.
#[derive(Clone, Debug)]
pub struct ChoiState {
    dim: usize,
    amplitudes: Vec<Complex64>,
}

impl ChoiState {
    /// Dimension of each half.
    pub fn half_dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Purities of the first and second reduced states.
    pub fn reduced_purities(&self) -> (f64, f64) {
        let first = reduced_purity(&self.amplitudes, self.dim, self.dim);
        let second = reduced_purity(&swap_halves(&self.amplitudes, self.dim), self.dim, self.dim);
        (first, second)
    }
}

fn swap_halves(psi: &[Complex64], d: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for i in 0..d {
        for j in 0..d {
            out[j * d + i] = psi[i * d + j];
        }
    }
    out
}

/// `tr(rho_1^2)` for a pure state on `C^{d1} (x) C^{d2}`.
pub fn reduced_purity(psi: &[Complex64], d1: usize, d2: usize) -> f64 {
    // rho_1 = M M^dag with M[i][j] = psi[i*d2 + j]
    let mut purity = 0.0;
    for i in 0..d1 {
        for k in 0..d1 {
            let rho_ik: Complex64 = (0..d2).map(|j| psi[i * d2 + j] * psi[k * d2 + j].conj()).sum();
            purity += rho_ik.norm_sqr();
        }
    }
    purity
}

pub fn choi_state(u: &UnitaryMatrix) -> ChoiState {
    let d = u.dim();
    let m = u.as_dmatrix();
    let scale = 1.0 / (d as f64).sqrt();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for k in 0..d {
            amplitudes[k * d + i] = m[(k, i)] * scale;
        }
    }
    ChoiState { dim: d, amplitudes }
}

/// `|H_alpha(U) - (1 - exp(-(alpha-1) M_alpha(Choi))) / (alpha - 1)|`, with the
/// Choi-side entropy taken over the doubled group `WH(sys) x WH(sys)`.
pub fn choi_relation_residual(sys: &QuditSystem, u: &UnitaryMatrix, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let h = clifford_entropy(sys, u, alpha)?;
    let choi = choi_state(u);
    let doubled = sys.tensor(sys);
    check_state(&doubled, choi.amplitudes())?;
    let m = stabilizer_entropy(&doubled, choi.amplitudes(), alpha, EntropyKind::Renyi)?;
    let predicted = (1.0 - (-(alpha - 1.0) * m).exp()) / (alpha - 1.0);
    Ok((h - predicted).abs())
}

/// Clifford test: `D(U)` must be a permutation matrix up to `tol`.
pub fn is_clifford(sys: &QuditSystem, u: &UnitaryMatrix, tol: f64) -> Result<bool> {
    Ok(DisplacementTable::new(sys).char_matrix(u)?.is_permutation(tol))
}
