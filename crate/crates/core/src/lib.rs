//! Clifford entropy of unitaries and stabilizer entropy of pure states over
//! Weyl-Heisenberg phase space, with the Monte Carlo and optimization
//! experiments built on them.
//!
//! ```
//! use clifford_entropy::{clifford_entropy, t_gate, QuditSystem};
//!
//! let qubit = QuditSystem::single(2).unwrap();
//! let t = t_gate(&qubit).unwrap();
//! let h2 = clifford_entropy(&qubit, &t, 2.0).unwrap();
//! assert!((h2 - 0.25).abs() < 1e-12);
//! ```

mod bfgs;
pub mod cli;
pub mod clifford;
pub mod entropy;
pub mod error;
pub mod experiments;
pub mod haar;
pub mod matrix;
pub mod optimize;
pub mod phase_space;
pub mod report;
pub mod rng;

pub use clifford::{clifford_generators, random_clifford_word, t_gate, CliffordSampler, CliffordWord, Generator};
pub use entropy::{
    choi_relation_residual, choi_state, clifford_entropy, h2_upper_bound, is_clifford, shannon_clifford_entropy,
    stabilizer_entropy, ChiDistribution, ChoiState, EntropyKind, DEFAULT_CLIFFORD_TOL,
};
pub use error::{Error, Result};
pub use experiments::{
    sic_fiducial_search, sic_subsystem_purity, subadditivity_violation_rate, tcount_bound_experiment, SicFiducial,
    SubadditivityReport, TcountReport,
};
pub use haar::{analytic_avg_h2, mc_avg_h2, sample_haar, HaarAverageVariant, McEstimate};
pub use matrix::{ComplexMatrix, MatrixFile, UnitaryMatrix};
pub use optimize::{directional_derivative_h2, lipschitz_probe, maximize_h2, OptimizationResult, TangentDirection};
pub use phase_space::{
    char_function_state, char_matrix, displacement, symplectic_form, CharacteristicMatrix, DisplacementTable,
    PhaseSpaceIndex, QuditSystem,
};
pub use rng::RngStream;
