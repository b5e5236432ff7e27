//! Haar-random unitaries and the Haar average of `H_2`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::entropy::clifford_entropy_of;
use crate::error::{Error, Result};
use crate::matrix::UnitaryMatrix;
use crate::phase_space::{DisplacementTable, QuditSystem};
use crate::rng::RngStream;

/// Ginibre matrix followed by QR, with the diagonal of `R` rotated to the
/// positive reals so the law of `Q` is exactly Haar.
pub fn sample_haar<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitaryMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let g = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = rjj / rjj.norm();
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix::from_dmatrix(q).expect("QR factor is unitary")
}

/// Draw number `index` of `stream`.
pub fn sample_haar_at(d: usize, stream: &RngStream, index: u64) -> UnitaryMatrix {
    sample_haar(d, &mut stream.rng(index))
}

/// Which closed form of the Haar average applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HaarAverageVariant {
    /// Single qudit, odd `d`.
    OddD,
    /// Single qudit, even `d`.
    EvenD,
    /// `d = 2^n` with the multiqubit group.
    Qubits,
}

impl HaarAverageVariant {
    pub fn name(&self) -> &'static str {
        match self {
            Self::OddD => "odd_d",
            Self::EvenD => "even_d",
            Self::Qubits => "qubits",
        }
    }

    /// Variant matching the phase-space group of `sys`, if one exists.
    pub fn for_system(sys: &QuditSystem) -> Option<Self> {
        match (sys.num_qudits(), sys.local_dim()) {
            (1, Some(d)) if d % 2 == 1 => Some(Self::OddD),
            (1, Some(2)) => Some(Self::Qubits),
            (1, Some(_)) => Some(Self::EvenD),
            (_, Some(2)) => Some(Self::Qubits),
            _ => None,
        }
    }
}

impl fmt::Display for HaarAverageVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HaarAverageVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "odd_d" => Ok(Self::OddD),
            "even_d" => Ok(Self::EvenD),
            "qubits" => Ok(Self::Qubits),
            other => Err(Error::InvalidParameter(format!("unknown variant `{other}`"))),
        }
    }
}

/// Closed-form `E_U[H_2(U)]` over `U(d)`.
pub fn analytic_avg_h2(d: usize, variant: HaarAverageVariant) -> Result<f64> {
    let bad = || Error::InvalidVariant {
        variant: variant.name(),
        d,
    };
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let x = d as f64;
    let x2 = x * x;
    let x4 = x2 * x2;
    match variant {
        HaarAverageVariant::OddD if d % 2 == 1 => {
            Ok(1.0 - 3.0 * (x4 - 4.0 * x2 + 2.0) / (x4 * (x2 - 4.0)))
        }
        HaarAverageVariant::EvenD if d % 2 == 0 => {
            Ok(1.0 - 3.0 * (x4 - 10.0 * x2 + 10.0) / (x2 * (x2 - 9.0) * (x2 - 1.0)))
        }
        HaarAverageVariant::Qubits if d.is_power_of_two() => {
            Ok(1.0 - 4.0 * (x4 - 9.0 * x2 + 6.0) / (x4 * (x2 - 9.0)))
        }
        _ => Err(bad()),
    }
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl McEstimate {
    /// Summary of `values`, accumulated in order.
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            std_error: (var / n as f64).sqrt(),
            n_samples: n,
        }
    }
}

/// `H_2` of draws `0..n` of `stream`, in index order.
pub fn haar_h2_samples(sys: &QuditSystem, n_samples: usize, stream: &RngStream) -> Vec<f64> {
    let table = DisplacementTable::new(sys);
    let d = sys.dim();
    (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let u = sample_haar_at(d, stream, i);
            let g = table.char_matrix(&u).expect("dimensions agree");
            clifford_entropy_of(&g, 2.0).expect("alpha = 2 is valid")
        })
        .collect()
}

/// Monte Carlo estimate of `E_U[H_2(U)]` with the phase-space group of `sys`.
pub fn mc_avg_h2(sys: &QuditSystem, n_samples: usize, stream: &RngStream) -> Result<McEstimate> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    Ok(McEstimate::from_samples(&haar_h2_samples(sys, n_samples, stream)))
}
