//! Weighted mixed-norm sequence quasi-norms and the elementary inequalities
//! that drive the decay estimates: Young, Hölder and Stechkin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gabor::CoefficientTable;
use crate::signal::centered;

/// Positive weight on Z or Z x Z.
///
/// Lattice tables evaluate weights at centered coordinates `(alpha k~, beta n~)`;
/// one-dimensional sequences evaluate at `(j, 0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightSpec {
    Constant,
    /// `v_s(z) = (1 + |z|^2)^{s/2}`.
    Polynomial { s: f64 },
    /// `(v_s (x) v_t)(x, w) = (1 + x^2)^{s/2} (1 + w^2)^{t/2}`.
    Product { s: f64, t: f64 },
    /// Explicit values by flat index.
    Tabulated { values: Vec<f64> },
}

impl WeightSpec {
    pub fn is_constant(&self) -> bool {
        match self {
            WeightSpec::Constant => true,
            WeightSpec::Polynomial { s } => *s == 0.0,
            WeightSpec::Product { s, t } => *s == 0.0 && *t == 0.0,
            WeightSpec::Tabulated { .. } => false,
        }
    }

    /// Weight `1/m`.
    pub fn reciprocal(&self) -> WeightSpec {
        match self {
            WeightSpec::Constant => WeightSpec::Constant,
            WeightSpec::Polynomial { s } => WeightSpec::Polynomial { s: -s },
            WeightSpec::Product { s, t } => WeightSpec::Product { s: -s, t: -t },
            WeightSpec::Tabulated { values } => WeightSpec::Tabulated {
                values: values.iter().map(|v| 1.0 / v).collect(),
            },
        }
    }

    /// Weight at flat position `index` with phase-space coordinates `(x, w)`.
    pub fn eval(&self, index: usize, x: f64, w: f64) -> Result<f64> {
        let v = match self {
            WeightSpec::Constant => 1.0,
            WeightSpec::Polynomial { s } => (1.0 + x * x + w * w).powf(s / 2.0),
            WeightSpec::Product { s, t } => (1.0 + x * x).powf(s / 2.0) * (1.0 + w * w).powf(t / 2.0),
            WeightSpec::Tabulated { values } => *values.get(index).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "tabulated weight has {} values, index {index} requested",
                    values.len()
                ))
            })?,
        };
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("weight must be positive and finite, got {v}")));
        }
        Ok(v)
    }

    /// One-dimensional weight at sequence position `j`.
    pub fn eval_1d(&self, j: usize) -> Result<f64> {
        self.eval(j, j as f64, 0.0)
    }
}

/// Nonincreasing nonnegative magnitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct SortedMagnitudes {
    values: Vec<f64>,
}

impl SortedMagnitudes {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument("magnitudes must be finite and nonnegative".into()));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("magnitudes must be nonincreasing".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Ratio of the two sides of an inequality, `lhs / rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl RatioReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            ratio: lhs / rhs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StechkinReport {
    pub middle: f64,
    pub lp: f64,
    pub ratio: f64,
}

pub(crate) fn check_exponent(name: &str, p: f64) -> Result<()> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::InvalidExponent(format!("{name} must be in (0, inf], got {p}")));
    }
    Ok(())
}

#[inline]
fn recip(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

/// `(sum x^p)^{1/p}` over nonnegative terms, or the max when `p = inf`.
fn power_sum(terms: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        terms.map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `||a||_{l^p_m}` for a sequence on Z indexed from 0.
pub fn lp_norm(a: &[Complex64], p: f64, m: &WeightSpec) -> Result<f64> {
    check_exponent("p", p)?;
    let terms = a
        .iter()
        .enumerate()
        .map(|(j, z)| m.eval_1d(j).map(|w| z.norm() * w))
        .collect::<Result<Vec<f64>>>()?;
    Ok(power_sum(terms.into_iter(), p))
}

/// Mixed quasi-norm `( sum_n ( sum_k |c(k,n)|^p m(k,n)^p )^{q/p} )^{1/q}`;
/// the inner sum runs over time, the outer over frequency.
pub fn lpq_norm(c: &CoefficientTable, p: f64, q: f64, m: &WeightSpec) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    let lat = c.lattice();
    let (nt, nf) = (lat.time_count(), lat.freq_count());
    let (alpha, beta) = (lat.alpha() as f64, lat.beta() as f64);
    let mut inner = Vec::with_capacity(nf);
    for n in 0..nf {
        let w = beta * centered(n, nf) as f64;
        let terms = (0..nt)
            .map(|k| {
                let x = alpha * centered(k, nt) as f64;
                m.eval(k * nf + n, x, w).map(|wt| c.get(k, n).norm() * wt)
            })
            .collect::<Result<Vec<f64>>>()?;
        inner.push(power_sum(terms.into_iter(), p));
    }
    Ok(power_sum(inner.into_iter(), q))
}

/// Full linear convolution `(a * b)(k) = sum_j a(j) b(k - j)`.
pub fn convolve_seq(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

const EXPONENT_TOL: f64 = 1e-12;

/// Checks `1/p + 1/q = 1 + 1/r` with `r >= 1`, or `p = q = r < 1`.
pub fn young_exponents_ok(p: f64, q: f64, r: f64) -> bool {
    let banach = r >= 1.0 && (recip(p) + recip(q) - 1.0 - recip(r)).abs() <= EXPONENT_TOL;
    let quasi = r < 1.0 && p == r && q == r;
    banach || quasi
}

/// `||a * b||_{l^r_m} / (||a||_{l^p_m} ||b||_{l^q_v})`.
pub fn young_check(
    a: &[Complex64],
    b: &[Complex64],
    p: f64,
    q: f64,
    r: f64,
    m: &WeightSpec,
    v: &WeightSpec,
) -> Result<RatioReport> {
    for (name, e) in [("p", p), ("q", q), ("r", r)] {
        check_exponent(name, e)?;
    }
    if !young_exponents_ok(p, q, r) {
        return Err(Error::ExponentConstraint(format!(
            "(p, q, r) = ({p}, {q}, {r}) satisfies neither 1/p + 1/q = 1 + 1/r with r >= 1 nor p = q = r < 1"
        )));
    }
    let conv = convolve_seq(a, b);
    let lhs = lp_norm(&conv, r, m)?;
    let rhs = lp_norm(a, p, m)? * lp_norm(b, q, v)?;
    Ok(RatioReport::new(lhs, rhs))
}

/// `||a b||_{l^r} / (||a||_{l^p_m} ||b||_{l^q_{1/m}})` for `1/p + 1/q = 1/r`.
pub fn holder_check(a: &[Complex64], b: &[Complex64], p: f64, q: f64, r: f64, m: &WeightSpec) -> Result<RatioReport> {
    for (name, e) in [("p", p), ("q", q), ("r", r)] {
        check_exponent(name, e)?;
    }
    if (recip(p) + recip(q) - recip(r)).abs() > EXPONENT_TOL {
        return Err(Error::ExponentConstraint(format!(
            "(p, q, r) = ({p}, {q}, {r}) violates 1/p + 1/q = 1/r"
        )));
    }
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let prod: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    let lhs = lp_norm(&prod, r, &WeightSpec::Constant)?;
    let rhs = lp_norm(a, p, m)? * lp_norm(b, q, &m.reciprocal())?;
    Ok(RatioReport::new(lhs, rhs))
}

/// Lattice indices `(k, n)` ordered by decreasing magnitude, ties by `(n, k)` ascending.
pub fn rearrangement_order(c: &CoefficientTable) -> Vec<(usize, usize)> {
    let lat = c.lattice();
    let nf = lat.freq_count();
    let mut idx: Vec<(usize, usize)> = lat.indices().collect();
    let mag = |k: usize, n: usize| c.values()[k * nf + n].norm();
    idx.sort_by(|&(k1, n1), &(k2, n2)| {
        mag(k2, n2)
            .total_cmp(&mag(k1, n1))
            .then(n1.cmp(&n2))
            .then(k1.cmp(&k2))
    });
    idx
}

/// Non-increasing rearrangement of the coefficient magnitudes.
pub fn rearrange_desc(c: &CoefficientTable) -> SortedMagnitudes {
    let values = rearrangement_order(c)
        .into_iter()
        .map(|(k, n)| c.get(k, n).norm())
        .collect();
    SortedMagnitudes { values }
}

/// Tail energies `sigma_N = (sum_{m > N} s_m^2)^{1/2}` for `N = 0..=len`.
pub fn sigma_profile(s: &SortedMagnitudes) -> Vec<f64> {
    let mut out = vec![0.0; s.len() + 1];
    let mut acc = 0.0;
    // accumulate from the small end
    for (i, v) in s.values.iter().enumerate().rev() {
        acc += v * v;
        out[i] = acc.sqrt();
    }
    out
}

/// `sigma_N(s)` with 1-based indexing; zero once `N >= len`.
pub fn sigma_tail(s: &SortedMagnitudes, n: usize) -> f64 {
    if n >= s.len() {
        return 0.0;
    }
    s.values[n..].iter().rev().map(|v| v * v).sum::<f64>().sqrt()
}

/// Middle quantity `( sum_{N>=1} (N^gamma sigma_{N-1})^p / N )^{1/p}` with `gamma = 1/p - 1/2`,
/// truncated at the sequence length, against `||s||_{l^p}`.
pub fn stechkin_ratio(s: &SortedMagnitudes, p: f64) -> Result<StechkinReport> {
    if !(p > 0.0 && p < 2.0) {
        return Err(Error::InvalidExponent(format!("Stechkin exponent must be in (0, 2), got {p}")));
    }
    let gamma = 1.0 / p - 0.5;
    let profile = sigma_profile(s);
    let middle = (1..=s.len())
        .map(|n| {
            let nf = n as f64;
            (nf.powf(gamma) * profile[n - 1]).powf(p) / nf
        })
        .sum::<f64>()
        .powf(1.0 / p);
    let lp = power_sum(s.values.iter().copied(), p);
    Ok(StechkinReport {
        middle,
        lp,
        ratio: middle / lp,
    })
}
