//! Dense eigendecompositions, singular values and Schatten quasi-norms.
//!
//! Hermitian operators go through `nalgebra`'s symmetric eigensolver. General
//! operators are reduced to Hessenberg form and driven to complex Schur form
//! by single-shift QR with Wilkinson shifts; eigenvectors come from
//! back-substitution on the triangular factor.

use std::cmp::Ordering;

use nalgebra::{DMatrix, Hessenberg};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{max_abs, Operator};
use crate::signal::Signal;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Eigenpairs sorted by modulus (descending), then real part, then imaginary part.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: Vec<Signal>,
    pub residuals: Vec<f64>,
    /// Whether the Hermitian solver produced this system.
    pub hermitian: bool,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Residual tolerance `1e-8 * max|A_ij| * L`.
pub fn eig_tolerance(a: &Operator) -> f64 {
    1e-8 * a.max_abs() * a.dim() as f64
}

/// Eigenvalues (ascending) and unit eigenvectors (columns) of a Hermitian matrix.
///
/// Only the Hermitian part `(M + M^*) / 2` is used.
pub(crate) fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let se = herm.symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let vals = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| se.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

fn spectral_order(a: &Complex64, b: &Complex64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then(b.re.total_cmp(&a.re))
        .then(b.im.total_cmp(&a.im))
}

/// Full eigendecomposition of a square operator.
pub fn eig(a: &Operator) -> Result<EigenSystem> {
    let n = a.dim();
    let (values, vectors): (Vec<Complex64>, DMatrix<Complex64>) = if a.is_hermitian() {
        let (vals, vecs) = hermitian_eigen(a.matrix());
        (vals.into_iter().map(|v| Complex64::new(v, 0.0)).collect(), vecs)
    } else {
        let (q, t) = complex_schur(a.matrix()).ok_or(Error::SolverFailure {
            hash: a.content_hash(),
        })?;
        let y = triangular_eigenvectors(&t);
        let vals = (0..n).map(|i| t[(i, i)]).collect();
        (vals, q * y)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| spectral_order(&values[i], &values[j]));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for &i in &order {
        let col: Vec<Complex64> = vectors.column(i).iter().copied().collect();
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::SolverFailure {
                hash: a.content_hash(),
            });
        }
        let v = Signal::from_vec_unchecked(col.into_iter().map(|z| z / norm).collect());
        let lam = values[i];
        let av = a.apply(&v);
        let res = av.sub(&v.scaled(lam)).norm2();
        eigenvalues.push(lam);
        eigenvectors.push(v);
        residuals.push(res);
    }
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
        residuals,
        hermitian: a.is_hermitian(),
    })
}

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    (na / r, (a / na) * b.conj() / r)
}

/// Complex Schur form `A = Q T Q^*` with `T` upper triangular.
///
/// Returns `None` when the QR iteration exceeds its budget.
pub fn complex_schur(a: &DMatrix<Complex64>) -> Option<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let n = a.nrows();
    if n == 0 {
        return Some((DMatrix::zeros(0, 0), DMatrix::zeros(0, 0)));
    }
    let scale = max_abs(a);
    if scale == 0.0 {
        return Some((DMatrix::identity(n, n), a.clone()));
    }
    let (mut q, mut h) = Hessenberg::new(a / Complex64::new(scale, 0.0)).unpack();
    let eps = f64::EPSILON;
    let hnorm = max_abs(&h);

    let mut hi = n - 1;
    let mut its = 0usize;
    let mut total = 0usize;
    let budget = 100 * n.max(10);
    while hi > 0 {
        // locate the start of the unreduced block ending at hi
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if diag == 0.0 {
                diag = hnorm;
            }
            if sub <= eps * diag {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        total += 1;
        its += 1;
        if total > budget {
            return None;
        }

        let shift = if its.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            let (a11, a12) = (h[(hi - 1, hi - 1)], h[(hi - 1, hi)]);
            let (a21, a22) = (h[(hi, hi - 1)], h[(hi, hi)]);
            let half_tr = (a11 + a22) * 0.5;
            let disc = ((a11 - a22) * 0.5).powi(2) + a12 * a21;
            let root = disc.sqrt();
            let (e1, e2) = (half_tr + root, half_tr - root);
            if (e1 - a22).norm() <= (e2 - a22).norm() {
                e1
            } else {
                e2
            }
        };

        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = ZERO;
            rots.push((k, c, s));
        }
        for &(k, c, s) in &rots {
            let rows = (k + 2).min(hi);
            for i in 0..=rows {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
            for i in 0..n {
                let (x, y) = (q[(i, k)], q[(i, k + 1)]);
                q[(i, k)] = x * c + y * s.conj();
                q[(i, k + 1)] = -x * s + y * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    // clear rounding noise below the diagonal
    for j in 0..n {
        for i in (j + 1)..n {
            h[(i, j)] = ZERO;
        }
    }
    Some((q, h * Complex64::new(scale, 0.0)))
}

/// Columns `y_i` with `T y_i = T_ii y_i`, for upper-triangular `T`.
fn triangular_eigenvectors(t: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = t.nrows();
    let tnorm = max_abs(t).max(f64::MIN_POSITIVE);
    let mut y = DMatrix::zeros(n, n);
    for i in 0..n {
        let lam = t[(i, i)];
        let smin = (f64::EPSILON * lam.norm()).max(f64::EPSILON * tnorm).max(f64::MIN_POSITIVE);
        let mut x = vec![ZERO; i + 1];
        x[i] = Complex64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let rhs: Complex64 = ((j + 1)..=i).map(|k| t[(j, k)] * x[k]).sum();
            let mut denom = t[(j, j)] - lam;
            if denom.norm() < smin {
                denom = Complex64::new(smin, 0.0);
            }
            x[j] = -rhs / denom;
            let big = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if big > 1e100 {
                x.iter_mut().for_each(|z| *z /= big);
            }
        }
        for (r, v) in x.into_iter().enumerate() {
            y[(r, i)] = v;
        }
    }
    y
}

/// Singular values, nonincreasing.
pub fn singular_values(a: &Operator) -> Vec<f64> {
    let mut s: Vec<f64> = a.matrix().clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// `(sum_k s_k^p)^{1/p}` for `0 < p < inf`.
pub fn schatten_qnorm(a: &Operator, p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(format!("Schatten exponent must be in (0, inf), got {p}")));
    }
    let s = singular_values(a);
    Ok(s.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p))
}

/// Keeps the pairs with `|lambda| > floor * |lambda_1|`, in order.
pub fn point_spectrum_nonzero(e: &EigenSystem, floor: f64) -> Result<EigenSystem> {
    if !(floor > 0.0) {
        return Err(Error::InvalidArgument(format!("floor must be positive, got {floor}")));
    }
    let top = e.eigenvalues.first().map(|z| z.norm()).unwrap_or(0.0);
    let keep: Vec<usize> = (0..e.len())
        .filter(|&i| e.eigenvalues[i].norm() > floor * top)
        .collect();
    Ok(EigenSystem {
        eigenvalues: keep.iter().map(|&i| e.eigenvalues[i]).collect(),
        eigenvectors: keep.iter().map(|&i| e.eigenvectors[i].clone()).collect(),
        residuals: keep.iter().map(|&i| e.residuals[i]).collect(),
        hermitian: e.hermitian,
    })
}
