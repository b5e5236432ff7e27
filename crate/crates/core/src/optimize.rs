//! Maximizing `H_2` over the unitary group, and numerical checks of its
//! derivative and Lipschitz bounds.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bfgs::{self, Problem};
use crate::entropy::clifford_entropy_of;
use crate::error::{Error, Result};
use crate::haar::sample_haar;
use crate::matrix::{reunitarize, UnitaryMatrix};
use crate::phase_space::{DisplacementTable, QuditSystem};
use crate::rng::RngStream;

/// Finite-difference step for optimizer gradients.
pub const GRADIENT_STEP: f64 = 1e-5;
/// Base step for [`directional_derivative_h2`].
pub const DERIVATIVE_STEP: f64 = 1e-3;
pub const DEFAULT_RESTARTS: usize = 100;
pub const DEFAULT_MAX_ITERS: usize = 300;

type CMat = DMatrix<Complex64>;

/// Orthonormal basis of the `d^2`-dimensional real space of anti-Hermitian
/// matrices, for the inner product `Re tr(A^dag B)`.
pub fn anti_hermitian_basis(d: usize) -> Vec<CMat> {
    let i = Complex64::new(0.0, 1.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(d * d);
    for j in 0..d {
        let mut m = CMat::zeros(d, d);
        m[(j, j)] = i;
        basis.push(m);
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut re = CMat::zeros(d, d);
            re[(j, k)] = Complex64::new(s, 0.0);
            re[(k, j)] = Complex64::new(-s, 0.0);
            basis.push(re);
            let mut im = CMat::zeros(d, d);
            im[(j, k)] = i * s;
            im[(k, j)] = i * s;
            basis.push(im);
        }
    }
    basis
}

/// Anti-Hermitian `K` with unit Frobenius norm.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentDirection(CMat);

impl TangentDirection {
    pub fn new(k: CMat) -> Result<Self> {
        if k.nrows() != k.ncols() {
            return Err(Error::DimensionMismatch {
                expected: k.nrows(),
                actual: k.ncols(),
            });
        }
        let skew = (&k + k.adjoint()).norm();
        let norm = k.norm();
        if skew > 1e-12 || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "tangent direction needs K^dag = -K and |K|_F = 1 (|K + K^dag| = {skew:.2e}, |K| = {norm})"
            )));
        }
        Ok(Self(k))
    }

    /// Uniformly random direction on the unit sphere of the Lie algebra.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let coords: Vec<f64> = (0..d * d).map(|_| rng.sample(StandardNormal)).collect();
        Self::from_coords(d, &coords).expect("gaussian vector is nonzero")
    }

    /// Normalized combination of [`anti_hermitian_basis`] elements.
    pub fn from_coords(d: usize, coords: &[f64]) -> Result<Self> {
        if coords.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                actual: coords.len(),
            });
        }
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero tangent vector".into()));
        }
        let k = combine(&anti_hermitian_basis(d), coords) / Complex64::new(norm, 0.0);
        // exact anti-Hermitian up to roundoff; symmetrize it away
        Ok(Self((&k - k.adjoint()) * Complex64::new(0.5, 0.0)))
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn neg(&self) -> Self {
        Self(-&self.0)
    }
}

fn combine(basis: &[CMat], coords: &[f64]) -> CMat {
    let d = basis[0].nrows();
    let mut k = CMat::zeros(d, d);
    for (b, &c) in basis.iter().zip(coords) {
        if c != 0.0 {
            k += b * Complex64::new(c, 0.0);
        }
    }
    k
}

/// `exp(t K) U`, re-orthonormalized.
pub fn retract(u: &CMat, k: &CMat, t: f64) -> CMat {
    let e = (k * Complex64::new(t, 0.0)).exp();
    reunitarize(e * u)
}

struct H2 {
    table: DisplacementTable,
}

impl H2 {
    fn new(sys: &QuditSystem) -> Self {
        Self {
            table: DisplacementTable::new(sys),
        }
    }

    fn eval(&self, u: &CMat) -> f64 {
        let g = self.table.char_matrix_of(u).expect("dimensions agree");
        clifford_entropy_of(&g, 2.0).expect("alpha = 2 is valid")
    }
}

/// Central difference `(H_2(e^{hK}U) - H_2(e^{-hK}U)) / 2h`.
pub fn central_difference(sys: &QuditSystem, u: &UnitaryMatrix, k: &TangentDirection, h: f64) -> Result<f64> {
    if u.dim() != sys.dim() || k.0.nrows() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            actual: u.dim(),
        });
    }
    let f = H2::new(sys);
    Ok(central_difference_with(&f, u.as_dmatrix(), &k.0, h))
}

fn central_difference_with(f: &H2, u: &CMat, k: &CMat, h: f64) -> f64 {
    (f.eval(&retract(u, k, h)) - f.eval(&retract(u, k, -h))) / (2.0 * h)
}

fn richardson(f: &H2, u: &CMat, k: &CMat) -> f64 {
    let coarse = central_difference_with(f, u, k, DERIVATIVE_STEP);
    let fine = central_difference_with(f, u, k, DERIVATIVE_STEP / 2.0);
    (4.0 * fine - coarse) / 3.0
}

/// `d/dt H_2(e^{tK} U)` at `t = 0`, by Richardson-extrapolated central
/// differences.
pub fn directional_derivative_h2(sys: &QuditSystem, u: &UnitaryMatrix, k: &TangentDirection) -> Result<f64> {
    if u.dim() != sys.dim() || k.0.nrows() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            actual: u.dim(),
        });
    }
    Ok(richardson(&H2::new(sys), u.as_dmatrix(), &k.0))
}

/// Analytic bound `8 / sqrt(d)` on the directional derivative.
pub fn derivative_bound(d: usize) -> f64 {
    8.0 / (d as f64).sqrt()
}

/// Lipschitz constant `4 pi / sqrt(d)` of `H_2` in the Frobenius norm.
pub fn lipschitz_bound(d: usize) -> f64 {
    4.0 * std::f64::consts::PI / (d as f64).sqrt()
}

/// Largest `|d/dt H_2(e^{tK}U)|` over `n` random Haar points and directions.
pub fn max_directional_derivative(sys: &QuditSystem, n: usize, stream: &RngStream) -> f64 {
    let f = H2::new(sys);
    let d = sys.dim();
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.rng(i);
            let u = sample_haar(d, &mut rng);
            let k = TangentDirection::random(d, &mut rng);
            richardson(&f, u.as_dmatrix(), &k.0).abs()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max)
}

struct Ascent {
    h2: H2,
    basis: Vec<CMat>,
    /// `exp(+h B_j)` and `exp(-h B_j)`.
    shifts: Vec<(CMat, CMat)>,
}

impl Ascent {
    fn new(sys: &QuditSystem) -> Self {
        let basis = anti_hermitian_basis(sys.dim());
        let shifts = basis
            .iter()
            .map(|b| {
                (
                    (b * Complex64::new(GRADIENT_STEP, 0.0)).exp(),
                    (b * Complex64::new(-GRADIENT_STEP, 0.0)).exp(),
                )
            })
            .collect();
        Self {
            h2: H2::new(sys),
            basis,
            shifts,
        }
    }
}

impl Problem for Ascent {
    type Point = CMat;

    fn value(&self, u: &CMat) -> f64 {
        -self.h2.eval(u)
    }

    fn gradient(&self, u: &CMat) -> Vec<f64> {
        self.shifts
            .iter()
            .map(|(plus, minus)| {
                -(self.h2.eval(&(plus * u)) - self.h2.eval(&(minus * u))) / (2.0 * GRADIENT_STEP)
            })
            .collect()
    }

    fn retract(&self, u: &CMat, step: &[f64]) -> CMat {
        retract(u, &combine(&self.basis, step), 1.0)
    }
}

#[derive(Clone, Debug)]
pub struct RestartTrace {
    pub index: usize,
    pub iterations: usize,
    pub final_value: f64,
    pub converged: bool,
    /// `H_2` after each accepted step.
    pub history: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct OptimizationResult {
    pub best: UnitaryMatrix,
    pub best_value: f64,
    pub best_restart: usize,
    pub restarts: Vec<RestartTrace>,
    pub seed: u64,
}

/// Quasi-Newton ascent of `H_2` from `restarts` independent Haar draws.
/// Runs that hit `max_iters` are flagged unconverged but still count.
pub fn maximize_h2(sys: &QuditSystem, restarts: usize, max_iters: usize, stream: &RngStream) -> Result<OptimizationResult> {
    if restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    let problem = Ascent::new(sys);
    let opts = bfgs::Options {
        max_iters,
        grad_tol: 1e-8,
        rel_tol: 1e-12,
        max_step: 0.5,
    };
    let d = sys.dim();
    let runs: Vec<(CMat, RestartTrace)> = (0..restarts)
        .into_par_iter()
        .map(|index| {
            let start = sample_haar(d, &mut stream.rng(index as u64));
            let out = bfgs::minimize(&problem, start.as_dmatrix().clone(), opts);
            let trace = RestartTrace {
                index,
                iterations: out.iterations,
                final_value: -out.value,
                converged: out.converged,
                history: out.history.iter().map(|v| -v).collect(),
            };
            (out.point, trace)
        })
        .collect();

    let mut best = 0;
    for (i, (_, t)) in runs.iter().enumerate() {
        if t.final_value > runs[best].1.final_value + 1e-12 {
            best = i;
        }
    }
    let best_matrix = UnitaryMatrix::from_dmatrix(runs[best].0.clone())?;
    let best_value = runs[best].1.final_value;
    Ok(OptimizationResult {
        best: best_matrix,
        best_value,
        best_restart: best,
        restarts: runs.into_iter().map(|(_, t)| t).collect(),
        seed: stream.seed(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LipschitzReport {
    /// `max |H_2(U) - H_2(V)| / |U - V|_F`.
    pub max_ratio: f64,
    pub bound: f64,
    /// Same ratio for `G_2(U, V) = H_2(UV) - H_2(U) - H_2(V)` on the product metric.
    pub max_pair_ratio: f64,
    pub pair_bound: f64,
    pub probed: usize,
    pub skipped: usize,
}

/// Probes the Lipschitz bounds with `n_pairs` pairs: even indices draw
/// independent Haar points, odd ones perturb the first point by `e^{eps K}`
/// with `eps` log-uniform in `[1e-3, 1]`.
pub fn lipschitz_probe(sys: &QuditSystem, n_pairs: usize, stream: &RngStream) -> Result<LipschitzReport> {
    if n_pairs == 0 {
        return Err(Error::InvalidParameter("n_pairs must be at least 1".into()));
    }
    let f = H2::new(sys);
    let d = sys.dim();
    let results: Vec<Option<(f64, f64)>> = (0..n_pairs as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.rng(i);
            let u1 = sample_haar(d, &mut rng).as_dmatrix().clone();
            let v1 = sample_haar(d, &mut rng).as_dmatrix().clone();
            let (u2, v2) = if i % 2 == 0 {
                (
                    sample_haar(d, &mut rng).as_dmatrix().clone(),
                    sample_haar(d, &mut rng).as_dmatrix().clone(),
                )
            } else {
                let eps = 10f64.powf(-3.0 + 3.0 * rng.random::<f64>());
                let ku = TangentDirection::random(d, &mut rng);
                let kv = TangentDirection::random(d, &mut rng);
                (retract(&u1, &ku.0, eps), retract(&v1, &kv.0, eps))
            };
            let du = (&u1 - &u2).norm();
            let dv = (&v1 - &v2).norm();
            if du < 1e-12 {
                return None;
            }
            let (hu1, hu2, hv1, hv2) = (f.eval(&u1), f.eval(&u2), f.eval(&v1), f.eval(&v2));
            let ratio = (hu1 - hu2).abs() / du;
            let g1 = f.eval(&(&u1 * &v1)) - hu1 - hv1;
            let g2 = f.eval(&(&u2 * &v2)) - hu2 - hv2;
            let pair_ratio = (g1 - g2).abs() / (du * du + dv * dv).sqrt();
            Some((ratio, pair_ratio))
        })
        .collect();
    let bound = lipschitz_bound(d);
    let mut report = LipschitzReport {
        max_ratio: 0.0,
        bound,
        max_pair_ratio: 0.0,
        pair_bound: 2.0 * std::f64::consts::SQRT_2 * bound,
        probed: 0,
        skipped: 0,
    };
    for r in results {
        match r {
            Some((a, b)) => {
                report.probed += 1;
                report.max_ratio = report.max_ratio.max(a);
                report.max_pair_ratio = report.max_pair_ratio.max(b);
            }
            None => report.skipped += 1,
        }
    }
    Ok(report)
}

/// `|H_2(U) - H_2(V)| / |U - V|_F`, or `None` when `U = V`.
pub fn lipschitz_ratio(sys: &QuditSystem, u: &UnitaryMatrix, v: &UnitaryMatrix) -> Option<f64> {
    let dist = (u.as_dmatrix() - v.as_dmatrix()).norm();
    if dist < 1e-12 {
        return None;
    }
    let f = H2::new(sys);
    Some((f.eval(u.as_dmatrix()) - f.eval(v.as_dmatrix())).abs() / dist)
}
