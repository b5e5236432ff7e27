//! Weyl-Heisenberg phase space: qudit systems, symplectic labels, displacement
//! operators and the characteristic functions of states and unitary channels.
//!
//! Labels are ordered lexicographically over qudits (qudit 0 most
//! significant), and within a qudit by `a1 * d_L + a2`. The computational
//! basis of a multi-qudit system uses the same ordering, so
//! `D_{a (+) b} = D_a (x) D_b` matches [`ComplexMatrix::kron`].

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{state_norm, ComplexMatrix, UnitaryMatrix};

/// Normalization tolerance for state vectors.
pub const STATE_NORM_TOL: f64 = 1e-10;

/// Column count above which [`DisplacementTable::char_matrix`] fans out over
/// the rayon pool.
const PARALLEL_MIN_DIM: usize = 8;

/// A register of qudits. Usually all factors share one local dimension
/// (`QuditSystem::new(d_L, n)`), but mixed radices are allowed so that
/// `U (x) V` with `U` in `U(2)` and `V` in `U(3)` can be addressed with the
/// product group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuditSystem {
    local_dims: Vec<usize>,
    dim: usize,
}

impl QuditSystem {
    /// `n` qudits of local dimension `d_L`.
    pub fn new(local_dim: usize, num_qudits: usize) -> Result<Self> {
        if num_qudits == 0 {
            return Err(Error::InvalidParameter("a system needs at least one qudit".into()));
        }
        Self::product(&vec![local_dim; num_qudits])
    }

    /// A single qudit of dimension `d`, composite or not.
    pub fn single(d: usize) -> Result<Self> {
        Self::new(d, 1)
    }

    pub fn product(local_dims: &[usize]) -> Result<Self> {
        if local_dims.is_empty() {
            return Err(Error::InvalidParameter("a system needs at least one qudit".into()));
        }
        if let Some(&bad) = local_dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDimension(bad));
        }
        let dim = local_dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidParameter("total dimension overflows".into()))?;
        Ok(Self {
            local_dims: local_dims.to_vec(),
            dim,
        })
    }

    /// The system `self (x) other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut local_dims = self.local_dims.clone();
        local_dims.extend_from_slice(&other.local_dims);
        Self {
            local_dims,
            dim: self.dim * other.dim,
        }
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    /// The shared local dimension, if every qudit has the same one.
    pub fn local_dim(&self) -> Option<usize> {
        let first = self.local_dims[0];
        self.local_dims.iter().all(|&d| d == first).then_some(first)
    }

    pub fn num_qudits(&self) -> usize {
        self.local_dims.len()
    }

    /// Total Hilbert-space dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of displacement operators, `d^2`.
    pub fn num_indices(&self) -> usize {
        self.dim * self.dim
    }

    /// `omega = exp(2 pi i / d_L)` for qudit `q`.
    pub fn omega(&self, q: usize) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI / self.local_dims[q] as f64)
    }

    /// `tau = -exp(i pi / d_L)` for qudit `q`.
    pub fn tau(&self, q: usize) -> Complex64 {
        -Complex64::from_polar(1.0, PI / self.local_dims[q] as f64)
    }

    pub fn index_at(&self, flat: usize) -> PhaseSpaceIndex {
        let mut rem = flat;
        let mut components = vec![(0, 0); self.num_qudits()];
        for (q, &d) in self.local_dims.iter().enumerate().rev() {
            let local = rem % (d * d);
            rem /= d * d;
            components[q] = (local / d, local % d);
        }
        PhaseSpaceIndex { components }
    }

    pub fn flat_index(&self, a: &PhaseSpaceIndex) -> Result<usize> {
        self.check(a)?;
        Ok(a.components
            .iter()
            .zip(&self.local_dims)
            .fold(0, |acc, (&(a1, a2), &d)| acc * d * d + a1 * d + a2))
    }

    /// All `d^2` labels in canonical order.
    pub fn indices(&self) -> impl Iterator<Item = PhaseSpaceIndex> + '_ {
        (0..self.num_indices()).map(|i| self.index_at(i))
    }

    fn check(&self, a: &PhaseSpaceIndex) -> Result<()> {
        if a.components.len() != self.num_qudits() {
            return Err(Error::SystemMismatch);
        }
        for (q, (&(a1, a2), &d)) in a.components.iter().zip(&self.local_dims).enumerate() {
            if a1 >= d || a2 >= d {
                return Err(Error::InvalidIndex(format!(
                    "component ({a1}, {a2}) of qudit {q} outside Z_{d}"
                )));
            }
        }
        Ok(())
    }
}

/// Symplectic label `a = a_1 (+) ... (+) a_n`, one `(a1, a2)` pair per qudit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhaseSpaceIndex {
    components: Vec<(usize, usize)>,
}

impl PhaseSpaceIndex {
    /// Validated label; components must already lie in `Z_{d_L}`.
    pub fn new(sys: &QuditSystem, components: Vec<(usize, usize)>) -> Result<Self> {
        let a = Self { components };
        sys.check(&a)?;
        Ok(a)
    }

    /// Label from arbitrary integers, reduced modulo each local dimension.
    pub fn reduced(sys: &QuditSystem, components: &[(i64, i64)]) -> Result<Self> {
        if components.len() != sys.num_qudits() {
            return Err(Error::SystemMismatch);
        }
        let components = components
            .iter()
            .zip(sys.local_dims())
            .map(|(&(a1, a2), &d)| {
                let d = d as i64;
                (a1.rem_euclid(d) as usize, a2.rem_euclid(d) as usize)
            })
            .collect();
        Ok(Self { components })
    }

    pub fn zero(sys: &QuditSystem) -> Self {
        Self {
            components: vec![(0, 0); sys.num_qudits()],
        }
    }

    pub fn components(&self) -> &[(usize, usize)] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&c| c == (0, 0))
    }

    pub fn neg(&self, sys: &QuditSystem) -> Self {
        let components = self
            .components
            .iter()
            .zip(sys.local_dims())
            .map(|(&(a1, a2), &d)| ((d - a1) % d, (d - a2) % d))
            .collect();
        Self { components }
    }

    pub fn add(&self, other: &Self, sys: &QuditSystem) -> Self {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .zip(sys.local_dims())
            .map(|((&(a1, a2), &(b1, b2)), &d)| ((a1 + b1) % d, (a2 + b2) % d))
            .collect();
        Self { components }
    }
}

/// `[a, b] = sum_i (a1_i b2_i - a2_i b1_i) mod d_L`.
pub fn symplectic_form(sys: &QuditSystem, a: &PhaseSpaceIndex, b: &PhaseSpaceIndex) -> Result<usize> {
    sys.check(a)?;
    sys.check(b)?;
    let d = sys.local_dim().ok_or_else(|| {
        Error::InvalidParameter("symplectic form needs a common local dimension".into())
    })? as i64;
    let s: i64 = a
        .components
        .iter()
        .zip(&b.components)
        .map(|(&(a1, a2), &(b1, b2))| a1 as i64 * b2 as i64 - a2 as i64 * b1 as i64)
        .sum();
    Ok(s.rem_euclid(d) as usize)
}

/// `tau^e` for `tau = -exp(i pi / d)`, evaluated from the exponent reduced
/// modulo `2d` so large exponents do not lose precision.
fn tau_pow(d: usize, e: i64) -> Complex64 {
    let two_d = 2 * d as i64;
    let r = (e.rem_euclid(two_d) * (d as i64 + 1)).rem_euclid(two_d);
    Complex64::from_polar(1.0, PI * r as f64 / d as f64)
}

/// The phase `c` with `D_a D_b = c D_{a+b}` (labels of `a+b` reduced).
///
/// For odd `d_L` this is `tau^{-[a,b]}`. For even `d_L` it differs from that
/// by a sign whenever a label wraps around, because `tau` then has order `2 d_L`.
pub fn composition_phase(sys: &QuditSystem, a: &PhaseSpaceIndex, b: &PhaseSpaceIndex) -> Result<Complex64> {
    sys.check(a)?;
    sys.check(b)?;
    let mut c = Complex64::new(1.0, 0.0);
    for ((&(a1, a2), &(b1, b2)), &d) in a.components.iter().zip(&b.components).zip(sys.local_dims()) {
        let (r1, r2) = ((a1 + b1) % d, (a2 + b2) % d);
        let e = (a1 * a2 + b1 * b2 + 2 * a2 * b1) as i64 - (r1 * r2) as i64;
        c *= tau_pow(d, e);
    }
    Ok(c)
}

/// A monomial operator `D = sum_k phase[k] |perm[k]><k|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Displacement {
    perm: Vec<usize>,
    phase: Vec<Complex64>,
}

impl Displacement {
    fn single(d: usize, a1: usize, a2: usize) -> Self {
        let perm = (0..d).map(|k| (k + a1) % d).collect();
        // tau^{a1 a2} omega^{a2 k} = tau^{a1 a2 + 2 a2 k}
        let phase = (0..d)
            .map(|k| tau_pow(d, (a1 * a2 + 2 * ((a2 * k) % d)) as i64))
            .collect();
        Self { perm, phase }
    }

    fn kron(&self, other: &Self) -> Self {
        let n = other.perm.len();
        let mut perm = Vec::with_capacity(self.perm.len() * n);
        let mut phase = Vec::with_capacity(self.perm.len() * n);
        for (&p, &z) in self.perm.iter().zip(&self.phase) {
            for (&q, &w) in other.perm.iter().zip(&other.phase) {
                perm.push(p * n + q);
                phase.push(z * w);
            }
        }
        Self { perm, phase }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Row hit by column `k`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.phase
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (k, (&p, &z)) in self.perm.iter().zip(&self.phase).enumerate() {
            m[(p, k)] = z;
        }
        ComplexMatrix::new(m).expect("displacement entries are finite")
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim();
        let mut perm = vec![0; d];
        let mut phase = vec![Complex64::new(0.0, 0.0); d];
        for (k, (&p, &z)) in self.perm.iter().zip(&self.phase).enumerate() {
            perm[p] = k;
            phase[p] = z.conj();
        }
        Self { perm, phase }
    }

    /// `tr(D^dag M)` in `O(d)`.
    pub fn trace_adjoint_times(&self, m: &DMatrix<Complex64>) -> Complex64 {
        self.perm
            .iter()
            .zip(&self.phase)
            .enumerate()
            .map(|(k, (&p, z))| z.conj() * m[(p, k)])
            .sum()
    }

    /// `D |psi>`.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for (k, (&p, &z)) in self.perm.iter().zip(&self.phase).enumerate() {
            out[p] = z * psi[k];
        }
        out
    }

    /// `<psi| D |psi>`.
    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        self.perm
            .iter()
            .zip(&self.phase)
            .enumerate()
            .map(|(k, (&p, &z))| psi[p].conj() * z * psi[k])
            .sum()
    }

    /// `U D` without a dense product.
    pub fn right_multiply(&self, u: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, k| u[(i, self.perm[k])] * self.phase[k])
    }
}

/// `D_a` for one label.
pub fn displacement(sys: &QuditSystem, a: &PhaseSpaceIndex) -> Result<Displacement> {
    sys.check(a)?;
    Ok(displacement_unchecked(sys, a))
}

fn displacement_unchecked(sys: &QuditSystem, a: &PhaseSpaceIndex) -> Displacement {
    let mut iter = a.components.iter().zip(sys.local_dims());
    let (&(a1, a2), &d) = iter.next().expect("system has at least one qudit");
    let mut op = Displacement::single(d, a1, a2);
    for (&(a1, a2), &d) in iter {
        op = op.kron(&Displacement::single(d, a1, a2));
    }
    op
}

/// Every displacement operator of a system, in canonical order.
#[derive(Clone, Debug)]
pub struct DisplacementTable {
    system: QuditSystem,
    ops: Vec<Displacement>,
}

impl DisplacementTable {
    pub fn new(system: &QuditSystem) -> Self {
        let ops = system
            .indices()
            .map(|a| displacement_unchecked(system, &a))
            .collect();
        Self {
            system: system.clone(),
            ops,
        }
    }

    pub fn system(&self) -> &QuditSystem {
        &self.system
    }

    pub fn ops(&self) -> &[Displacement] {
        &self.ops
    }

    pub fn get(&self, flat: usize) -> &Displacement {
        &self.ops[flat]
    }

    /// `c_a = <psi| D_a^dag |psi>` for every label.
    pub fn char_function_state(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        check_state(&self.system, psi)?;
        Ok(self.ops.iter().map(|op| op.expectation(psi).conj()).collect())
    }

    /// `G_ab = tr(D_a^dag U D_b U^dag) / d`.
    pub fn char_matrix(&self, u: &UnitaryMatrix) -> Result<CharacteristicMatrix> {
        self.char_matrix_of(u.as_dmatrix())
    }

    /// Same as [`Self::char_matrix`] but for any square matrix; used to show
    /// that bistochasticity fails off the unitary group.
    pub fn char_matrix_of(&self, u: &DMatrix<Complex64>) -> Result<CharacteristicMatrix> {
        let d = self.system.dim();
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: u.nrows(),
            });
        }
        let u_adj = u.adjoint();
        let inv_d = 1.0 / d as f64;
        let column = |b: &Displacement| -> Vec<Complex64> {
            let conj = b.right_multiply(u) * &u_adj;
            self.ops
                .iter()
                .map(|a| a.trace_adjoint_times(&conj) * inv_d)
                .collect()
        };
        let columns: Vec<Vec<Complex64>> = if d >= PARALLEL_MIN_DIM {
            self.ops.par_iter().map(column).collect()
        } else {
            self.ops.iter().map(column).collect()
        };
        Ok(CharacteristicMatrix {
            system: self.system.clone(),
            n: self.ops.len(),
            entries: columns.into_iter().flatten().collect(),
        })
    }
}

pub(crate) fn check_state(sys: &QuditSystem, psi: &[Complex64]) -> Result<()> {
    if psi.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            actual: psi.len(),
        });
    }
    let norm = state_norm(psi);
    if !((norm - 1.0).abs() <= STATE_NORM_TOL) {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// Characteristic function `c_a(psi) = <psi| D_a^dag |psi>` over all labels.
pub fn char_function_state(sys: &QuditSystem, psi: &[Complex64]) -> Result<Vec<Complex64>> {
    DisplacementTable::new(sys).char_function_state(psi)
}

/// Characteristic matrix of the channel `X -> U X U^dag`.
pub fn char_matrix(sys: &QuditSystem, u: &UnitaryMatrix) -> Result<CharacteristicMatrix> {
    DisplacementTable::new(sys).char_matrix(u)
}

/// The `d^2 x d^2` matrix `G(U)`, stored column-major.
#[derive(Clone, Debug)]
pub struct CharacteristicMatrix {
    system: QuditSystem,
    n: usize,
    entries: Vec<Complex64>,
}

impl CharacteristicMatrix {
    pub fn system(&self) -> &QuditSystem {
        &self.system
    }

    /// Side length, `d^2`.
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> Complex64 {
        self.entries[b * self.n + a]
    }

    /// `D_ab = |G_ab|^2`.
    pub fn transition(&self, a: usize, b: usize) -> f64 {
        self.get(a, b).norm_sqr()
    }

    /// `D` in row-major order.
    pub fn transition_matrix(&self) -> Vec<f64> {
        let n = self.n;
        (0..n * n).map(|i| self.transition(i / n, i % n)).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|a| (0..self.n).map(|b| self.transition(a, b)).sum())
            .collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        self.entries
            .chunks(self.n)
            .map(|col| col.iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    /// Largest deviation of a row or column sum of `D` from 1.
    pub fn bistochastic_defect(&self) -> f64 {
        self.row_sums()
            .into_iter()
            .chain(self.column_sums())
            .map(|s| (s - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `sum_ab D_ab^alpha`.
    pub fn power_sum(&self, alpha: f64) -> f64 {
        if alpha == 2.0 {
            self.entries.iter().map(|z| z.norm_sqr().powi(2)).sum()
        } else {
            self.entries.iter().map(|z| z.norm_sqr().powf(alpha)).sum()
        }
    }

    /// Conjugate transpose as a characteristic matrix of the same system.
    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let entries = (0..n * n)
            .map(|i| self.get(i / n, i % n).conj())
            .collect();
        Self {
            system: self.system.clone(),
            n,
            entries,
        }
    }

    /// True when every row holds exactly one entry `>= 1 - tol` and the rest
    /// are `<= tol`.
    pub fn is_permutation(&self, tol: f64) -> bool {
        (0..self.n).all(|a| {
            let mut big = 0;
            for b in 0..self.n {
                let v = self.transition(a, b);
                if v >= 1.0 - tol {
                    big += 1;
                } else if v > tol {
                    return false;
                }
            }
            big == 1
        })
    }
}
