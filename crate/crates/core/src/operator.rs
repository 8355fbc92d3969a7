use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::signal::Signal;

/// Largest `|M - M^*|` entry tolerated for an operator flagged Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Localization,
    Weyl,
    Frame,
    Raw,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Localization => "localization",
            Provenance::Weyl => "weyl",
            Provenance::Frame => "frame",
            Provenance::Raw => "raw",
        }
    }
}

/// Dense L x L complex operator on signals of length L.
#[derive(Clone, Debug)]
pub struct Operator {
    matrix: DMatrix<Complex64>,
    provenance: Provenance,
    hermitian: bool,
}

impl Operator {
    /// Wraps a square matrix; the Hermitian flag is set from the measured asymmetry.
    pub fn new(matrix: DMatrix<Complex64>, provenance: Provenance) -> Self {
        assert!(matrix.is_square(), "operator matrix must be square");
        let hermitian = hermitian_asymmetry(&matrix) <= HERMITIAN_TOL;
        Self {
            matrix,
            provenance,
            hermitian,
        }
    }

    pub fn raw(matrix: DMatrix<Complex64>) -> Self {
        Self::new(matrix, Provenance::Raw)
    }

    pub fn identity(len: usize) -> Self {
        Self::raw(DMatrix::identity(len, len))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    #[inline]
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn apply(&self, f: &Signal) -> Signal {
        let v = DVector::from_column_slice(f.as_slice());
        let out = &self.matrix * v;
        Signal::from_vec_unchecked(out.as_slice().to_vec())
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            matrix: self.matrix.adjoint(),
            provenance: self.provenance,
            hermitian: self.hermitian,
        }
    }

    /// `max |M_ij|`.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    pub fn frobenius(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }

    /// Stable fingerprint of the entry bit patterns, used in solver diagnostics.
    pub fn content_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.matrix.nrows().hash(&mut h);
        for z in self.matrix.iter() {
            z.re.to_bits().hash(&mut h);
            z.im.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |M - M^*|` entrywise.
pub fn hermitian_asymmetry(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Outer product `u v^*`.
pub fn outer(u: &Signal, v: &Signal) -> DMatrix<Complex64> {
    let n = u.len();
    let (u, v) = (u.as_slice(), v.as_slice());
    DMatrix::from_fn(n, n, |i, j| u[i] * v[j].conj())
}
