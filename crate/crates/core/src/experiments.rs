//! Statistical experiments: how often `H_2` breaks subadditivity under
//! composition, the T-count lower bound on doped Clifford circuits, and the
//! subsystem purity of SIC fiducials.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bfgs::{self, Problem};
use crate::clifford::{t_gate, CliffordSampler, CliffordWord};
use crate::entropy::{clifford_entropy_of, reduced_purity};
use crate::error::{Error, Result};
use crate::haar::sample_haar;
use crate::matrix::UnitaryMatrix;
use crate::phase_space::{DisplacementTable, QuditSystem};
use crate::rng::RngStream;

/// Clifford layer length used by the T-count experiment unless overridden.
pub const DEFAULT_WORD_LENGTH: usize = 20;
/// Largest tolerated `| |<psi|D_a|psi>|^2 - 1/(N+1) |` for a SIC fiducial.
pub const SIC_TOL: f64 = 1e-8;

fn h2(table: &DisplacementTable, u: &UnitaryMatrix) -> f64 {
    let g = table.char_matrix(u).expect("dimensions agree");
    clifford_entropy_of(&g, 2.0).expect("alpha = 2 is valid")
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubadditivityReport {
    pub d: usize,
    pub n_pairs: usize,
    pub n_reps: usize,
    pub seed: u64,
    pub violations: Vec<usize>,
    pub frequencies: Vec<f64>,
    pub mean_frequency: f64,
}

/// Whether `H_2(UV) >= H_2(U) + H_2(V)`, compared in raw binary64.
pub fn violates_subadditivity(table: &DisplacementTable, u: &UnitaryMatrix, v: &UnitaryMatrix) -> bool {
    let uv = UnitaryMatrix::from_dmatrix(u.as_dmatrix() * v.as_dmatrix()).expect("product of unitaries");
    h2(table, &uv) >= h2(table, u) + h2(table, v)
}

/// Frequency of subadditivity violations over `n_reps` batches of `n_pairs`
/// Haar pairs. Rep `r` draws pair `i` from `stream.fork(r).rng(i)`.
pub fn subadditivity_violation_rate(
    sys: &QuditSystem,
    n_pairs: usize,
    n_reps: usize,
    stream: &RngStream,
) -> Result<SubadditivityReport> {
    if n_pairs == 0 || n_reps == 0 {
        return Err(Error::InvalidParameter("n_pairs and n_reps must be at least 1".into()));
    }
    let table = DisplacementTable::new(sys);
    let d = sys.dim();
    let mut violations = Vec::with_capacity(n_reps);
    for rep in 0..n_reps {
        let rep_stream = stream.fork(rep as u64);
        let hits: Vec<bool> = (0..n_pairs as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = rep_stream.rng(i);
                let u = sample_haar(d, &mut rng);
                let v = sample_haar(d, &mut rng);
                violates_subadditivity(&table, &u, &v)
            })
            .collect();
        violations.push(hits.into_iter().filter(|&h| h).count());
    }
    let frequencies: Vec<f64> = violations.iter().map(|&v| v as f64 / n_pairs as f64).collect();
    let mean_frequency = frequencies.iter().sum::<f64>() / n_reps as f64;
    Ok(SubadditivityReport {
        d,
        n_pairs,
        n_reps,
        seed: stream.seed(),
        violations,
        frequencies,
        mean_frequency,
    })
}

/// `C_1 T C_2 T ... C_t T`.
#[derive(Clone, Debug)]
pub struct DopedCircuit {
    pub depth: usize,
    pub layers: Vec<CliffordWord>,
    pub unitary: UnitaryMatrix,
}

impl DopedCircuit {
    pub fn sample<R: Rng + ?Sized>(
        sampler: &CliffordSampler,
        magic: &UnitaryMatrix,
        depth: usize,
        word_length: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let layers = (0..depth)
            .map(|_| sampler.sample(word_length, rng))
            .collect::<Result<Vec<_>>>()?;
        let unitary = Self::realize(&layers, magic)?;
        Ok(Self {
            depth,
            layers,
            unitary,
        })
    }

    /// Ordered product of the layers, each followed by the magic gate.
    pub fn realize(layers: &[CliffordWord], magic: &UnitaryMatrix) -> Result<UnitaryMatrix> {
        let d = magic.dim();
        let mut m = DMatrix::<Complex64>::identity(d, d);
        for layer in layers {
            m = m * layer.unitary().as_dmatrix() * magic.as_dmatrix();
        }
        UnitaryMatrix::from_dmatrix(m)
    }
}

/// Roundoff allowance when comparing a T-count ratio with `t`.
pub const RATIO_SLACK: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct TcountReport {
    pub d: usize,
    pub t: usize,
    pub seed: u64,
    pub h2_t: f64,
    pub h2_u: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Fraction of circuits with `H_2(U)/H_2(T) <= t`.
    pub fraction_within: f64,
}

impl TcountReport {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Samples `n_circuits` doped circuits of depth `t` and checks the bound
/// `t >= H_2(U) / H_2(T)` on each.
pub fn tcount_bound_experiment(
    sys: &QuditSystem,
    t: usize,
    n_circuits: usize,
    word_length: usize,
    stream: &RngStream,
) -> Result<TcountReport> {
    if t == 0 {
        return Err(Error::InvalidParameter("depth t must be at least 1".into()));
    }
    let table = DisplacementTable::new(sys);
    let magic = t_gate(sys)?;
    let h2_t = h2(&table, &magic);
    if !(h2_t > 0.0) {
        return Err(Error::Certification("magic gate has zero Clifford entropy".into()));
    }
    let sampler = CliffordSampler::new(sys)?;
    let h2_u = (0..n_circuits as u64)
        .into_par_iter()
        .map(|i| {
            let circuit = DopedCircuit::sample(&sampler, &magic, t, word_length, &mut stream.rng(i))?;
            Ok(h2(&table, &circuit.unitary))
        })
        .collect::<Result<Vec<f64>>>()?;
    let ratios: Vec<f64> = h2_u.iter().map(|h| h / h2_t).collect();
    let within = ratios.iter().filter(|&&r| r <= t as f64 + RATIO_SLACK).count();
    Ok(TcountReport {
        d: sys.dim(),
        t,
        seed: stream.seed(),
        h2_t,
        h2_u,
        fraction_within: if n_circuits == 0 { 1.0 } else { within as f64 / n_circuits as f64 },
        ratios,
    })
}

/// Result of a fiducial search. `accepted` is false when no restart reached
/// [`SIC_TOL`]; the best candidate is still returned.
#[derive(Clone, Debug, PartialEq)]
pub struct SicFiducial {
    pub dim: usize,
    pub state: Vec<Complex64>,
    /// `sum_{a != 0} |<psi|D_a|psi>|^4`.
    pub frame_potential: f64,
    pub max_overlap_deviation: f64,
    pub accepted: bool,
    pub restarts_used: usize,
}

/// Squared overlaps `|<psi|D_a|psi>|^2` for every label.
pub fn overlaps(table: &DisplacementTable, psi: &[Complex64]) -> Vec<f64> {
    table.ops().iter().map(|op| op.expectation(psi).norm_sqr()).collect()
}

fn overlap_deviation(table: &DisplacementTable, psi: &[Complex64]) -> f64 {
    let target = 1.0 / (table.system().dim() as f64 + 1.0);
    overlaps(table, psi)[1..]
        .iter()
        .map(|o| (o - target).abs())
        .fold(0.0, f64::max)
}

fn unpack(x: &[f64]) -> Vec<Complex64> {
    let n = x.len() / 2;
    (0..n).map(|k| Complex64::new(x[k], x[n + k])).collect()
}

fn normalized(psi: Vec<Complex64>) -> Vec<Complex64> {
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.into_iter().map(|z| z / norm).collect()
}

struct FramePotential<'a> {
    table: &'a DisplacementTable,
}

impl FramePotential<'_> {
    /// `g_a = |v^dag D_a v|^2 / |v|^4` and its real gradient, for `a != 0`.
    fn overlap_jacobian(&self, x: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let v = unpack(x);
        let n = v.len();
        let nn: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let mut values = Vec::with_capacity(n * n - 1);
        let mut grads = Vec::with_capacity(n * n - 1);
        for op in &self.table.ops()[1..] {
            let c = op.expectation(&v);
            let dv = op.apply(&v);
            let dadj_v = op.adjoint().apply(&v);
            let g = c.norm_sqr() / (nn * nn);
            // d g / d conj(v)
            let wirtinger: Vec<Complex64> = (0..n)
                .map(|k| {
                    (c.conj() * dv[k] + c * dadj_v[k]) / (nn * nn) - v[k] * (2.0 * c.norm_sqr() / (nn * nn * nn))
                })
                .collect();
            let mut grad = vec![0.0; 2 * n];
            for k in 0..n {
                grad[k] = 2.0 * wirtinger[k].re;
                grad[n + k] = 2.0 * wirtinger[k].im;
            }
            values.push(g);
            grads.push(grad);
        }
        (values, grads)
    }
}

impl Problem for FramePotential<'_> {
    type Point = Vec<f64>;

    fn value(&self, x: &Vec<f64>) -> f64 {
        let v = unpack(x);
        let nn: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        self.table.ops()[1..]
            .iter()
            .map(|op| (op.expectation(&v).norm_sqr() / (nn * nn)).powi(2))
            .sum()
    }

    fn gradient(&self, x: &Vec<f64>) -> Vec<f64> {
        let (values, grads) = self.overlap_jacobian(x);
        let mut out = vec![0.0; x.len()];
        for (g, grad) in values.iter().zip(&grads) {
            for (o, gi) in out.iter_mut().zip(grad) {
                *o += 2.0 * g * gi;
            }
        }
        out
    }

    fn retract(&self, x: &Vec<f64>, step: &[f64]) -> Vec<f64> {
        let y: Vec<f64> = x.iter().zip(step).map(|(a, b)| a + b).collect();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y.into_iter().map(|v| v / norm).collect()
    }
}

/// Gauss-Newton on the residuals `g_a - 1/(N+1)`; converges quadratically
/// once the frame-potential descent has landed in the right basin.
fn polish(problem: &FramePotential<'_>, mut x: Vec<f64>) -> Vec<f64> {
    let n_real = x.len();
    let target = 1.0 / (n_real as f64 / 2.0 + 1.0);
    for _ in 0..50 {
        let (values, grads) = problem.overlap_jacobian(&x);
        let residual = DVector::from_iterator(values.len(), values.iter().map(|g| target - g));
        if residual.amax() < 1e-15 {
            break;
        }
        let jac = DMatrix::from_fn(values.len(), n_real, |i, j| grads[i][j]);
        let Ok(step) = jac.svd(true, true).solve(&residual, 1e-10) else {
            break;
        };
        x = problem.retract(&x, step.as_slice());
    }
    x
}

/// Searches for a WH-covariant SIC fiducial in dimension `dim` by minimizing
/// the frame potential from random starts, stopping at the first accepted one.
pub fn sic_fiducial_search(dim: usize, restarts: usize, stream: &RngStream) -> Result<SicFiducial> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    let sys = QuditSystem::single(dim)?;
    let table = DisplacementTable::new(&sys);
    let problem = FramePotential { table: &table };
    let opts = bfgs::Options {
        max_iters: 2000,
        grad_tol: 1e-12,
        rel_tol: 0.0,
        max_step: 0.5,
    };
    let mut best: Option<SicFiducial> = None;
    for r in 0..restarts {
        let mut rng = stream.rng(r as u64);
        let start: Vec<f64> = (0..2 * dim).map(|_| rng.sample(StandardNormal)).collect();
        let start = problem.retract(&start, &vec![0.0; 2 * dim]);
        let out = bfgs::minimize(&problem, start, opts);
        let x = polish(&problem, out.point);
        let state = normalized(unpack(&x));
        let dev = overlap_deviation(&table, &state);
        let candidate = SicFiducial {
            dim,
            frame_potential: overlaps(&table, &state)[1..].iter().map(|o| o * o).sum(),
            max_overlap_deviation: dev,
            accepted: dev <= SIC_TOL,
            restarts_used: r + 1,
            state,
        };
        let better = best
            .as_ref()
            .is_none_or(|b| candidate.max_overlap_deviation < b.max_overlap_deviation);
        if better {
            best = Some(candidate);
        }
        if best.as_ref().is_some_and(|b| b.accepted) {
            break;
        }
    }
    let mut best = best.expect("at least one restart ran");
    best.restarts_used = best.restarts_used.max(1);
    Ok(best)
}

/// Exact integer square root, if `n` is a perfect square.
pub fn exact_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

/// Average purity of the first factor over states read on `C^d (x) C^d`.
pub fn average_subsystem_purity(states: &[Vec<Complex64>], d: usize) -> f64 {
    states.iter().map(|s| reduced_purity(s, d, d)).sum::<f64>() / states.len() as f64
}

/// WH orbit `{D_a |psi>}` of a fiducial in its own dimension.
pub fn sic_orbit(fid: &SicFiducial) -> Result<Vec<Vec<Complex64>>> {
    let table = DisplacementTable::new(&QuditSystem::single(fid.dim)?);
    Ok(table.ops().iter().map(|op| op.apply(&fid.state)).collect())
}

/// Average subsystem purity of the SIC generated by `fid`, with each orbit
/// state reinterpreted on `C^d (x) C^d` (`fid.dim = d^2`).
pub fn sic_subsystem_purity(fid: &SicFiducial, d: usize) -> Result<f64> {
    let root = exact_sqrt(fid.dim).ok_or(Error::NotPerfectSquare(fid.dim))?;
    if root != d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            actual: fid.dim,
        });
    }
    if !fid.accepted {
        return Err(Error::InvalidParameter(format!(
            "fiducial not accepted (max overlap deviation {:.3e})",
            fid.max_overlap_deviation
        )));
    }
    Ok(average_subsystem_purity(&sic_orbit(fid)?, d))
}

/// `2d / (d^2 + 1)`.
pub fn predicted_sic_purity(d: usize) -> f64 {
    let d = d as f64;
    2.0 * d / (d * d + 1.0)
}

/// Frobenius distance between `(1/N^2) sum_i P_i (x) P_i` and
/// `2/(N(N+1)) P_sym`, for the projectors onto `states`.
pub fn two_design_defect(states: &[Vec<Complex64>]) -> f64 {
    let n = states[0].len();
    let m = states.len() as f64;
    let mut frame = DMatrix::<Complex64>::zeros(n * n, n * n);
    for s in states {
        let v = DVector::from_iterator(n * n, (0..n * n).map(|k| s[k / n] * s[k % n]));
        frame += &v * v.adjoint();
    }
    frame /= Complex64::new(m, 0.0);
    // symmetric projector (I + SWAP)/2
    let coeff = 2.0 / (n as f64 * (n as f64 + 1.0));
    let sym = DMatrix::from_fn(n * n, n * n, |r, c| {
        let (i, j) = (r / n, r % n);
        let (k, l) = (c / n, c % n);
        let id = (i == k && j == l) as u8 as f64;
        let swap = (i == l && j == k) as u8 as f64;
        Complex64::new(coeff * 0.5 * (id + swap), 0.0)
    });
    (frame - sym).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn purity_of_simple_states() {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let bell = vec![h, z, z, h];
        let product = vec![one, z, z, z];
        assert!((average_subsystem_purity(&[bell], 2) - 0.5).abs() < 1e-15);
        assert!((average_subsystem_purity(&[product], 2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn qubit_sic_found() {
        let fid = sic_fiducial_search(2, 20, &RngStream::new(5)).unwrap();
        assert!(fid.accepted, "deviation {}", fid.max_overlap_deviation);
        // Bloch vector has |x| = |y| = |z| = 1/sqrt(3)
        let table = DisplacementTable::new(&QuditSystem::single(2).unwrap());
        for o in &overlaps(&table, &fid.state)[1..] {
            assert!((o - 1.0 / 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn purity_rejects_non_square() {
        let fid = sic_fiducial_search(3, 20, &RngStream::new(1)).unwrap();
        assert!(matches!(sic_subsystem_purity(&fid, 2), Err(Error::NotPerfectSquare(3))));
    }

    #[test]
    fn zero_depth_rejected() {
        let sys = QuditSystem::single(2).unwrap();
        assert!(tcount_bound_experiment(&sys, 0, 1, 5, &RngStream::new(0)).is_err());
    }

    #[test]
    fn clifford_factor_sits_on_the_boundary() {
        // H_2(CV) = H_2(V) and H_2(C) = 0, so G_2(C, V) vanishes up to roundoff
        let sys = QuditSystem::single(2).unwrap();
        let table = DisplacementTable::new(&sys);
        let sampler = CliffordSampler::new(&sys).unwrap();
        let stream = RngStream::new(11);
        for i in 0..200 {
            let mut rng = stream.rng(i);
            let c = sampler.sample(15, &mut rng).unwrap().into_unitary();
            let v = sample_haar(2, &mut rng);
            let cv = UnitaryMatrix::from_dmatrix(c.as_dmatrix() * v.as_dmatrix()).unwrap();
            let gap = h2(&table, &cv) - h2(&table, &c) - h2(&table, &v);
            assert!(gap.abs() < 1e-12);
        }
    }
}
