//! Dense complex matrices and the unitarity-certified wrapper used everywhere
//! a unitary channel is expected, plus the JSON file format for matrices and
//! state vectors.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// Default bound on `|U^dag U - I|_F` for a matrix to count as unitary.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                actual: m.ncols(),
            });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    pub fn identity(d: usize) -> Self {
        Self(DMatrix::identity(d, d))
    }

    pub fn from_fn(d: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(d, d, f))
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_row_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// `|M^dag M - I|_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        (self.0.adjoint() * &self.0 - DMatrix::<Complex64>::identity(d, d)).norm()
    }

    /// Row-major entries as `(re, im)` pairs.
    pub fn row_major(&self) -> Vec<[f64; 2]> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let z = self.0[(i, j)];
                out.push([z.re, z.im]);
            }
        }
        out
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

/// A [`ComplexMatrix`] whose unitarity has been checked against a tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    matrix: ComplexMatrix,
    defect: f64,
}

impl UnitaryMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, UNITARITY_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let defect = matrix.unitarity_defect();
        if !(defect <= tol) {
            return Err(Error::NotUnitary { defect, tol });
        }
        Ok(Self { matrix, defect })
    }

    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        Self::new(ComplexMatrix::new(m)?)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(d),
            defect: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Measured `|U^dag U - I|_F` at construction.
    pub fn defect(&self) -> f64 {
        self.defect
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        self.matrix.as_dmatrix()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            defect: self.defect,
        }
    }

    /// Product of two unitaries. The result is re-certified.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        Self::new(&self.matrix * &rhs.matrix)
    }

    pub fn kron(&self, rhs: &Self) -> Result<Self> {
        Self::new(self.matrix.kron(&rhs.matrix))
    }
}

/// On-disk representation: `{"d": <int>, "entries": [[re, im], ...]}`,
/// row-major for matrices (`d*d` entries) or a plain vector (`d` entries).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixFile {
    pub d: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            d: m.dim(),
            entries: m.row_major(),
        }
    }

    pub fn from_state(psi: &[Complex64]) -> Self {
        Self {
            d: psi.len(),
            entries: psi.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    /// Parses and validates the JSON text. Diagnostics name the first
    /// offending field.
    pub fn parse(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("invalid JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Format("top level must be an object".into()))?;
        let d = obj
            .get("d")
            .ok_or_else(|| Error::Format("field `d` is missing".into()))?
            .as_u64()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::Format("field `d` must be a positive integer".into()))?
            as usize;
        let raw = obj
            .get("entries")
            .ok_or_else(|| Error::Format("field `entries` is missing".into()))?
            .as_array()
            .ok_or_else(|| Error::Format("field `entries` must be an array".into()))?;
        let mut entries = Vec::with_capacity(raw.len());
        for (i, e) in raw.iter().enumerate() {
            let pair = e
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::Format(format!("field `entries[{i}]` must be [re, im]")))?;
            let re = pair[0].as_f64();
            let im = pair[1].as_f64();
            match (re, im) {
                (Some(re), Some(im)) if re.is_finite() && im.is_finite() => entries.push([re, im]),
                _ => {
                    return Err(Error::Format(format!(
                        "field `entries[{i}]` must hold two finite numbers"
                    )))
                }
            }
        }
        Ok(Self { d, entries })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix file serializes")
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.entries.len() != self.d * self.d {
            return Err(Error::Format(format!(
                "field `entries` has {} values, expected d*d = {}",
                self.entries.len(),
                self.d * self.d
            )));
        }
        let d = self.d;
        ComplexMatrix::new(DMatrix::from_fn(d, d, |i, j| {
            let [re, im] = self.entries[i * d + j];
            Complex64::new(re, im)
        }))
    }

    pub fn to_unitary(&self) -> Result<UnitaryMatrix> {
        UnitaryMatrix::new(self.to_matrix()?)
    }

    pub fn to_state(&self) -> Result<Vec<Complex64>> {
        if self.entries.len() != self.d {
            return Err(Error::Format(format!(
                "field `entries` has {} values, expected d = {}",
                self.entries.len(),
                self.d
            )));
        }
        Ok(self.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let z = self.0[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Euclidean norm of a state vector.
pub fn state_norm(psi: &[Complex64]) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Re-orthonormalizes a nearly unitary matrix via QR with the diagonal of
/// `R` made positive, which leaves an exactly unitary input unchanged up to
/// roundoff.
pub(crate) fn reunitarize(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let qr = m.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..q.ncols() {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        if n > 0.0 {
            let phase = rjj / n;
            for i in 0..q.nrows() {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}
