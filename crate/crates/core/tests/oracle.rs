//! Cross-checks against independent computations and sampling statistics.

use clifford_entropy::entropy::{clifford_entropy_of, row_column_entropy, stabilizer_entropy_bound};
use clifford_entropy::experiments::{sic_orbit, two_design_defect};
use clifford_entropy::haar::sample_haar_at;
use clifford_entropy::optimize::central_difference;
use clifford_entropy::{
    char_matrix, clifford_entropy, directional_derivative_h2, maximize_h2, random_clifford_word,
    shannon_clifford_entropy, sic_fiducial_search, stabilizer_entropy, t_gate, tcount_bound_experiment,
    EntropyKind, QuditSystem, RngStream, TangentDirection,
};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

fn single(d: usize) -> QuditSystem {
    QuditSystem::single(d).unwrap()
}

fn dense(u: &clifford_entropy::UnitaryMatrix) -> Vec<Vec<Complex64>> {
    let m = u.as_dmatrix();
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn dagger(a: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
}

fn pauli_h2(u: &[Vec<Complex64>]) -> f64 {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    let paulis = [
        vec![vec![o, z], vec![z, o]],
        vec![vec![z, o], vec![o, z]],
        vec![vec![z, -i], vec![i, z]],
        vec![vec![o, z], vec![z, -o]],
    ];
    let mut sum = 0.0;
    for p in &paulis {
        for q in &paulis {
            let m = matmul(&matmul(&dagger(p), u), &matmul(q, &dagger(u)));
            sum += ((m[0][0] + m[1][1]) / 2.0).norm_sqr().powi(2);
        }
    }
    1.0 - sum / 4.0
}

#[test]
fn pauli_oracle_matches_on_random_qubit_unitaries() {
    let stream = RngStream::new(11);
    let sys = single(2);
    for i in 0..50 {
        let u = sample_haar_at(2, &stream, i);
        let h = clifford_entropy(&sys, &u, 2.0).unwrap();
        assert!((h - pauli_h2(&dense(&u))).abs() < 1e-12);
    }
    let t = t_gate(&sys).unwrap();
    assert!((pauli_h2(&dense(&t)) - 0.25).abs() < 1e-15);
}

#[test]
fn clifford_conjugation_permutes_displacements() {
    for d in [2, 3, 4, 5] {
        let sys = single(d);
        for seed in 0..10 {
            let w = random_clifford_word(&sys, 15, seed).unwrap();
            let g = char_matrix(&sys, w.unitary()).unwrap();
            assert!(g.is_permutation(1e-10), "d={d} seed={seed}");
        }
    }
}

#[test]
fn adjoint_transposes_characteristic_matrix() {
    let stream = RngStream::new(12);
    for d in 2..=5 {
        let sys = single(d);
        let u = sample_haar_at(d, &stream, d as u64);
        let g = char_matrix(&sys, &u).unwrap();
        let g_adj = char_matrix(&sys, &u.adjoint()).unwrap();
        let expected = g.adjoint();
        for a in 0..g.size() {
            for b in 0..g.size() {
                assert!((g_adj.get(a, b) - expected.get(a, b)).norm() < 1e-12);
            }
        }
        for alpha in [2.0, 3.0, 0.5] {
            let lhs = clifford_entropy_of(&g, alpha).unwrap();
            let rhs = clifford_entropy_of(&g_adj, alpha).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}

#[test]
fn shannon_is_the_alpha_one_limit() {
    let stream = RngStream::new(13);
    for d in [2, 3, 4] {
        let sys = single(d);
        let u = sample_haar_at(d, &stream, d as u64);
        let shannon = shannon_clifford_entropy(&sys, &u).unwrap();
        for eps in [1e-4, 1e-5, 1e-6] {
            for alpha in [1.0 - eps, 1.0 + eps] {
                let h = clifford_entropy(&sys, &u, alpha).unwrap();
                assert!((h - shannon).abs() < 10.0 * eps, "d={d} alpha={alpha}");
            }
        }
    }
}

#[test]
fn row_column_form_agrees() {
    let stream = RngStream::new(14);
    for d in 2..=6 {
        let u = sample_haar_at(d, &stream, d as u64);
        let g = char_matrix(&single(d), &u).unwrap();
        for alpha in [2.0, 3.0, 1.5] {
            let direct = clifford_entropy_of(&g, alpha).unwrap();
            assert!((row_column_entropy(&g, alpha).unwrap() - direct).abs() < 1e-12);
        }
    }
}

#[test]
fn richardson_derivative_is_second_order_consistent() {
    let stream = RngStream::new(15);
    for d in [2, 3, 4] {
        let sys = single(d);
        let u = sample_haar_at(d, &stream, d as u64);
        let k = TangentDirection::random(d, &mut stream.fork(1).rng(d as u64));
        let rich = directional_derivative_h2(&sys, &u, &k).unwrap();
        let fine = central_difference(&sys, &u, &k, 1e-4).unwrap();
        assert!((rich - fine).abs() < 1e-7, "d={d}: {rich} vs {fine}");
        let flipped = directional_derivative_h2(&sys, &u, &k.neg()).unwrap();
        assert!((rich + flipped).abs() < 1e-9);
    }
}

fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut best) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        best = best.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    best
}

#[test]
fn haar_samples_are_left_invariant() {
    let d = 3;
    let n = 10_000u64;
    let stream = RngStream::new(16);
    let fixed = sample_haar_at(d, &RngStream::new(99), 0);
    let plain: Vec<f64> = (0..n).map(|i| sample_haar_at(d, &stream.fork(0), i).as_dmatrix()[(0, 0)].norm_sqr()).collect();
    let rotated: Vec<f64> = (0..n)
        .map(|i| {
            let u = sample_haar_at(d, &stream.fork(1), i);
            fixed.compose(&u).unwrap().as_dmatrix()[(0, 0)].norm_sqr()
        })
        .collect();
    // two-sample KS critical value at level 1e-3
    let critical = (-(0.5e-3f64).ln() / 2.0).sqrt() * (2.0 / n as f64).sqrt();
    assert!(ks_statistic(plain, rotated) < critical);
}

#[test]
fn haar_trace_second_moment() {
    let d = 3;
    let stream = RngStream::new(17);
    let n = 100_000u64;
    let mean: f64 = (0..n).map(|i| sample_haar_at(d, &stream, i).as_dmatrix().trace().norm_sqr()).sum::<f64>() / n as f64;
    assert!((mean - 1.0).abs() < 0.02, "E|tr U|^2 = {mean}");
}

#[test]
fn optimizer_history_is_monotone_and_reproducible() {
    let sys = single(3);
    let stream = RngStream::new(18);
    let a = maximize_h2(&sys, 4, 100, &stream).unwrap();
    let b = maximize_h2(&sys, 4, 100, &stream).unwrap();
    assert_eq!(a.best_value, b.best_value);
    assert_eq!(a.best_restart, b.best_restart);
    for trace in &a.restarts {
        for w in trace.history.windows(2) {
            assert!(w[1] >= w[0] - 1e-15);
        }
    }
    assert!(a.best_value <= clifford_entropy::h2_upper_bound(3));
}

#[test]
fn single_magic_gate_saturates_tcount_ratio() {
    for d in [2, 3, 5] {
        let report = tcount_bound_experiment(&single(d), 1, 20, 20, &RngStream::new(19)).unwrap();
        assert!(report.ratios.iter().all(|r| (r - 1.0).abs() < 1e-10));
    }
}

#[test]
fn sic_orbit_is_a_two_design() {
    for dim in [2, 3, 4] {
        let fid = sic_fiducial_search(dim, 20, &RngStream::new(20)).unwrap();
        assert!(fid.accepted);
        let orbit = sic_orbit(&fid).unwrap();
        assert_eq!(orbit.len(), dim * dim);
        assert!(two_design_defect(&orbit) <= 1e-6);
    }
}

fn random_state(d: usize, stream: &RngStream, i: u64) -> Vec<Complex64> {
    let mut rng = stream.rng(i);
    let v: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

#[test]
fn stabilizer_entropy_respects_its_bound() {
    let stream = RngStream::new(21);
    for d in 2..=6 {
        let sys = single(d);
        for i in 0..50 {
            let psi = random_state(d, &stream, i);
            for alpha in [2.0, 3.0] {
                let m = stabilizer_entropy(&sys, &psi, alpha, EntropyKind::Renyi).unwrap();
                assert!(m >= -1e-12 && m <= stabilizer_entropy_bound(d, alpha) + 1e-12);
            }
        }
    }
}
