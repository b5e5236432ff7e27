use clifford_entropy::haar::sample_haar_at;
use clifford_entropy::{
    char_matrix, choi_relation_residual, clifford_entropy, displacement, h2_upper_bound, random_clifford_word,
    PhaseSpaceIndex, QuditSystem, RngStream,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn characteristic_matrix_is_bistochastic(d in 2usize..8, seed in any::<u64>()) {
        let u = sample_haar_at(d, &RngStream::new(seed), 0);
        let g = char_matrix(&QuditSystem::single(d).unwrap(), &u).unwrap();
        prop_assert!(g.bistochastic_defect() < 1e-10);
    }

    #[test]
    fn entropy_lies_between_zero_and_bound(d in 2usize..7, seed in any::<u64>()) {
        let u = sample_haar_at(d, &RngStream::new(seed), 1);
        let h = clifford_entropy(&QuditSystem::single(d).unwrap(), &u, 2.0).unwrap();
        prop_assert!(h >= -1e-12 && h <= h2_upper_bound(d));
    }

    #[test]
    fn tensor_identity_holds(seed in any::<u64>(), da in 2usize..4, db in 2usize..4, alpha in 1.2f64..4.0) {
        let stream = RngStream::new(seed);
        let u = sample_haar_at(da, &stream, 0);
        let v = sample_haar_at(db, &stream, 1);
        let hu = clifford_entropy(&QuditSystem::single(da).unwrap(), &u, alpha).unwrap();
        let hv = clifford_entropy(&QuditSystem::single(db).unwrap(), &v, alpha).unwrap();
        let joint = QuditSystem::product(&[da, db]).unwrap();
        let huv = clifford_entropy(&joint, &u.kron(&v).unwrap(), alpha).unwrap();
        prop_assert!((huv - (hu + hv - (alpha - 1.0) * hu * hv)).abs() < 1e-10);
    }

    #[test]
    fn clifford_words_have_zero_entropy(d in 2usize..7, seed in any::<u64>(), len in 0usize..30) {
        let sys = QuditSystem::single(d).unwrap();
        let w = random_clifford_word(&sys, len, seed).unwrap();
        prop_assert!(clifford_entropy(&sys, w.unitary(), 2.0).unwrap().abs() < 1e-10);
    }

    #[test]
    fn choi_relation_holds(d in 2usize..4, seed in any::<u64>(), alpha in 1.5f64..3.5) {
        let u = sample_haar_at(d, &RngStream::new(seed), 2);
        prop_assert!(choi_relation_residual(&QuditSystem::single(d).unwrap(), &u, alpha).unwrap() < 1e-10);
    }

    #[test]
    fn displacements_are_unitary(d in 2usize..7, a1 in 0usize..7, a2 in 0usize..7) {
        let sys = QuditSystem::single(d).unwrap();
        let a = PhaseSpaceIndex::new(&sys, vec![(a1 % d, a2 % d)]).unwrap();
        let m = displacement(&sys, &a).unwrap().to_dense();
        prop_assert!(m.unitarity_defect() < 1e-12);
    }
}
