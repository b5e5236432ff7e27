//! Browser bindings: the transition matrix of a chosen gate, `H_2` along a
//! one-parameter phase family, and a Haar histogram of `H_2`.

use clifford_entropy::entropy::clifford_entropy_of;
use clifford_entropy::haar::{haar_h2_samples, sample_haar_at};
use clifford_entropy::{
    analytic_avg_h2, clifford_generators, h2_upper_bound, t_gate, ComplexMatrix, DisplacementTable,
    HaarAverageVariant, QuditSystem, RngStream, UnitaryMatrix, DEFAULT_CLIFFORD_TOL,
};
use num_complex::Complex64;
use wasm_bindgen::prelude::*;

const MAX_DIM: usize = 12;

#[wasm_bindgen]
pub struct Heatmap {
    size: usize,
    values: Vec<f64>,
    h2: f64,
    clifford: bool,
}

#[wasm_bindgen]
impl Heatmap {
    /// Number of phase-space labels, `d^2`.
    #[wasm_bindgen(getter)]
    pub fn size(&self) -> usize {
        self.size
    }

    /// `D_ab` in row-major order.
    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn h2(&self) -> f64 {
        self.h2
    }

    #[wasm_bindgen(getter)]
    pub fn clifford(&self) -> bool {
        self.clifford
    }
}

#[wasm_bindgen]
pub struct Histogram {
    counts: Vec<u32>,
    lo: f64,
    hi: f64,
    mean: f64,
    analytic: f64,
}

#[wasm_bindgen]
impl Histogram {
    #[wasm_bindgen(getter)]
    pub fn counts(&self) -> Vec<u32> {
        self.counts.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[wasm_bindgen(getter)]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[wasm_bindgen(getter)]
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Closed-form Haar average for the same dimension.
    #[wasm_bindgen(getter)]
    pub fn analytic(&self) -> f64 {
        self.analytic
    }
}

fn system(d: usize) -> Result<QuditSystem, String> {
    if !(2..=MAX_DIM).contains(&d) {
        return Err(format!("dimension must be between 2 and {MAX_DIM}"));
    }
    QuditSystem::single(d).map_err(|e| e.to_string())
}

fn gate(sys: &QuditSystem, name: &str, seed: u64) -> Result<UnitaryMatrix, String> {
    let d = sys.dim();
    let generator = |i: usize| -> Result<UnitaryMatrix, String> {
        let gens = clifford_generators(sys).map_err(|e| e.to_string())?;
        Ok(gens[i].1.clone())
    };
    match name {
        "identity" => Ok(UnitaryMatrix::identity(d)),
        "fourier" => generator(0),
        "phase" => generator(1),
        "t" => t_gate(sys).map_err(|e| e.to_string()),
        "haar" => Ok(sample_haar_at(d, &RngStream::new(seed), 0)),
        other => Err(format!("unknown gate `{other}`")),
    }
}

pub fn heatmap_for(name: &str, d: usize, seed: u64) -> Result<Heatmap, String> {
    let sys = system(d)?;
    let u = gate(&sys, name, seed)?;
    let g = DisplacementTable::new(&sys).char_matrix(&u).map_err(|e| e.to_string())?;
    Ok(Heatmap {
        size: g.size(),
        values: g.transition_matrix(),
        h2: clifford_entropy_of(&g, 2.0).map_err(|e| e.to_string())?,
        clifford: g.is_permutation(DEFAULT_CLIFFORD_TOL),
    })
}

/// `H_2(diag(1, ..., 1, e^{i theta}))` for `steps` values of theta in `[0, 2 pi]`.
pub fn phase_curve_for(d: usize, steps: usize) -> Result<Vec<f64>, String> {
    let sys = system(d)?;
    if steps < 2 {
        return Err("need at least two steps".into());
    }
    let table = DisplacementTable::new(&sys);
    (0..steps)
        .map(|i| {
            let theta = std::f64::consts::TAU * i as f64 / (steps - 1) as f64;
            let mut diag = vec![Complex64::new(1.0, 0.0); d];
            diag[d - 1] = Complex64::from_polar(1.0, theta);
            let u = UnitaryMatrix::new(ComplexMatrix::diagonal(&diag)).map_err(|e| e.to_string())?;
            let g = table.char_matrix(&u).map_err(|e| e.to_string())?;
            clifford_entropy_of(&g, 2.0).map_err(|e| e.to_string())
        })
        .collect()
}

pub fn haar_histogram_for(d: usize, samples: usize, bins: usize, seed: u64) -> Result<Histogram, String> {
    let sys = system(d)?;
    if samples == 0 || bins == 0 {
        return Err("samples and bins must be positive".into());
    }
    let values = haar_h2_samples(&sys, samples, &RngStream::new(seed));
    let hi = h2_upper_bound(d);
    let mut counts = vec![0u32; bins];
    for v in &values {
        let bin = ((v / hi) * bins as f64).floor().clamp(0.0, (bins - 1) as f64) as usize;
        counts[bin] += 1;
    }
    let variant = if d % 2 == 1 { HaarAverageVariant::OddD } else { HaarAverageVariant::EvenD };
    Ok(Histogram {
        counts,
        lo: 0.0,
        hi,
        mean: values.iter().sum::<f64>() / samples as f64,
        analytic: analytic_avg_h2(d, variant).map_err(|e| e.to_string())?,
    })
}

/// Transition matrix and `H_2` of `gate` (`identity`, `fourier`, `phase`,
/// `t` or `haar`) in dimension `d`.
#[wasm_bindgen]
pub fn heatmap(gate: &str, d: usize, seed: u64) -> Result<Heatmap, JsError> {
    heatmap_for(gate, d, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn phase_curve(d: usize, steps: usize) -> Result<Vec<f64>, JsError> {
    phase_curve_for(d, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn haar_histogram(d: usize, samples: usize, bins: usize, seed: u64) -> Result<Histogram, JsError> {
    haar_histogram_for(d, samples, bins, seed).map_err(|e| JsError::new(&e))
}
