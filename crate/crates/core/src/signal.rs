//! Signals on the cyclic group Z_L and the elementary operators acting on them.
//!
//! Conventions: the forward DFT is the unnormalized sum
//! `(F f)(n) = sum_t f(t) e^{-2 pi i t n / L}` and the inverse carries `1/L`.
//! Translation is cyclic, `(T_k f)(t) = f(t - k)`, modulation is
//! `(M_n f)(t) = e^{2 pi i n t / L} f(t)`, and the time-frequency shift is
//! `pi(k, n) = M_n T_k`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Reduce a (possibly negative) index into `0..len`.
#[inline]
pub fn reduce(i: i64, len: usize) -> usize {
    i.rem_euclid(len as i64) as usize
}

/// Signed representative of `i` in `(-L/2, L/2]`.
#[inline]
pub fn centered(i: usize, len: usize) -> i64 {
    let i = i % len;
    if 2 * i <= len {
        i as i64
    } else {
        i as i64 - len as i64
    }
}

/// Table of `e^{2 pi i m / L}` for `m = 0..L`.
pub fn unit_roots(len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / len as f64))
        .collect()
}

/// A point `(k, n)` of the phase space Z_L x Z_L, always stored reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TfPoint {
    pub k: usize,
    pub n: usize,
}

impl TfPoint {
    pub fn new(k: i64, n: i64, len: usize) -> Self {
        Self {
            k: reduce(k, len),
            n: reduce(n, len),
        }
    }

    pub fn origin() -> Self {
        Self { k: 0, n: 0 }
    }
}

/// Complex-valued signal on Z_L with `L >= 2` and finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    data: Vec<Complex64>,
}

impl Signal {
    pub fn new(data: Vec<Complex64>) -> Result<Self> {
        if data.len() < 2 {
            return Err(Error::InvalidSignal(format!(
                "length must be at least 2, got {}",
                data.len()
            )));
        }
        if let Some(t) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidSignal(format!("non-finite entry at index {t}")));
        }
        Ok(Self { data })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        assert!(len >= 2, "signal length must be at least 2");
        Self {
            data: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    /// Unit impulse at position `at` (reduced mod L).
    pub fn delta(len: usize, at: i64) -> Self {
        let mut s = Self::zeros(len);
        s.data[reduce(at, len)] = Complex64::new(1.0, 0.0);
        s
    }

    /// Entries drawn i.i.d. from the standard complex normal distribution.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let data = (0..len)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            })
            .collect();
        Self { data }
    }

    /// Random signal rescaled to unit l2 norm.
    pub fn random_unit<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let s = Self::random(len, rng);
        let norm = s.norm2();
        s.scaled(Complex64::new(1.0 / norm, 0.0))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    /// Entry at a cyclic index.
    #[inline]
    pub fn at(&self, t: i64) -> Complex64 {
        self.data[reduce(t, self.data.len())]
    }

    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// `<self, other> = sum_t self(t) conj(other(t))`.
    pub fn inner(&self, other: &Signal) -> Complex64 {
        debug_assert_eq!(self.len(), other.len());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn scaled(&self, c: Complex64) -> Signal {
        Signal {
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// Rescale to unit norm; rejects the zero signal.
    pub fn normalized(&self) -> Result<Signal> {
        let n = self.norm2();
        if n == 0.0 {
            return Err(Error::ZeroWindow);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn conj(&self) -> Signal {
        Signal {
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn add(&self, other: &Signal) -> Signal {
        Signal {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Signal) -> Signal {
        Signal {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Signal) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn from_vec_unchecked(data: Vec<Complex64>) -> Signal {
        Signal { data }
    }
}

pub(crate) fn ensure_same_len(a: &Signal, b: &Signal) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(())
}

/// In-place unnormalized forward FFT.
pub(crate) fn fft_in_place(buf: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buf.len()).process(buf);
}

/// In-place inverse FFT including the `1/L` factor.
pub(crate) fn ifft_in_place(buf: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(buf.len()).process(buf);
    let scale = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|z| *z *= scale);
}

/// Forward DFT, `(F f)(n) = sum_t f(t) e^{-2 pi i t n / L}`.
pub fn dft(f: &Signal) -> Signal {
    let mut buf = f.data.clone();
    fft_in_place(&mut buf);
    Signal { data: buf }
}

/// Inverse DFT, `f(t) = (1/L) sum_n F(n) e^{2 pi i t n / L}`.
pub fn idft(f: &Signal) -> Signal {
    let mut buf = f.data.clone();
    ifft_in_place(&mut buf);
    Signal { data: buf }
}

/// Direct O(L^2) summation of the forward DFT in a fixed order.
pub fn dft_reference(f: &Signal) -> Signal {
    let len = f.len();
    let roots = unit_roots(len);
    let data = (0..len)
        .map(|n| {
            f.data
                .iter()
                .enumerate()
                .map(|(t, x)| x * roots[(t * n) % len].conj())
                .sum()
        })
        .collect();
    Signal { data }
}

/// `(T_k f)(t) = f(t - k)`.
pub fn translate(f: &Signal, k: i64) -> Signal {
    let len = f.len();
    let shift = reduce(k, len);
    let data = (0..len).map(|t| f.data[(t + len - shift) % len]).collect();
    Signal { data }
}

/// `(M_n f)(t) = e^{2 pi i n t / L} f(t)`.
pub fn modulate(f: &Signal, n: i64) -> Signal {
    let len = f.len();
    let n = reduce(n, len);
    let roots = unit_roots(len);
    let data = f
        .data
        .iter()
        .enumerate()
        .map(|(t, x)| x * roots[(n * t) % len])
        .collect();
    Signal { data }
}

/// `pi(z) f = M_{z.n} T_{z.k} f`.
pub fn tf_shift(f: &Signal, z: TfPoint) -> Signal {
    let len = f.len();
    let roots = unit_roots(len);
    let (k, n) = (z.k % len, z.n % len);
    let data = (0..len)
        .map(|t| roots[(n * t) % len] * f.data[(t + len - k) % len])
        .collect();
    Signal { data }
}

/// Scalar `c` with `pi(z) pi(w) = c * pi(w) pi(z)` on Z_L, namely
/// `c = e^{-2 pi i (z_k w_n - w_k z_n) / L}`.
pub fn commutation_phase(z: TfPoint, w: TfPoint, len: usize) -> Complex64 {
    let l = len as i64;
    let m = (z.k as i64 * w.n as i64 - w.k as i64 * z.n as i64).rem_euclid(l);
    Complex64::from_polar(1.0, -2.0 * PI * m as f64 / len as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn rejects_short_and_nonfinite() {
        assert!(Signal::from_real(&[1.0]).is_err());
        assert!(Signal::from_real(&[1.0, f64::NAN]).is_err());
        assert!(Signal::from_real(&[1.0, f64::INFINITY, 0.0]).is_err());
        assert!(Signal::from_real(&[0.0, 0.0]).is_ok());
    }

    #[test]
    fn norm_zero_iff_zero() {
        assert_eq!(Signal::zeros(5).norm2(), 0.0);
        assert!(Signal::delta(5, 3).norm2() > 0.0);
    }

    #[test]
    fn dft_of_delta_is_ones() {
        let d = dft(&Signal::delta(8, 0));
        for z in d.as_slice() {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn dft_of_constant_is_scaled_delta() {
        let one = Signal::from_real(&[1.0; 6]).unwrap();
        let d = dft(&one);
        assert!((d.as_slice()[0] - Complex64::new(6.0, 0.0)).norm() < 1e-13);
        for z in &d.as_slice()[1..] {
            assert!(z.norm() < 1e-13);
        }
    }

    #[test]
    fn dft_energy_and_inverse() {
        let f = Signal::random(13, &mut rng());
        let d = dft(&f);
        let lhs = d.norm2().powi(2);
        let rhs = 13.0 * f.norm2().powi(2);
        assert!((lhs - rhs).abs() < 1e-11 * rhs);
        assert!(idft(&d).max_abs_diff(&f) < 1e-13);
    }

    #[test]
    fn translate_delta() {
        assert_eq!(translate(&Signal::delta(6, 0), 1), Signal::delta(6, 1));
        assert_eq!(translate(&Signal::delta(6, 0), -1), Signal::delta(6, 5));
    }

    #[test]
    fn periodicity_is_exact() {
        let f = Signal::random(9, &mut rng());
        assert_eq!(translate(&f, 9), f);
        assert_eq!(modulate(&f, 9), f);
        assert_eq!(translate(&translate(&f, 4), 7), translate(&f, 11));
    }

    #[test]
    fn zero_shift_is_identity() {
        let f = Signal::random(9, &mut rng());
        assert_eq!(tf_shift(&f, TfPoint::origin()), f);
    }

    #[test]
    fn tfpoint_reduces_negative_indices() {
        assert_eq!(TfPoint::new(-1, -9, 8), TfPoint { k: 7, n: 7 });
        assert_eq!(centered(5, 8), -3);
        assert_eq!(centered(4, 8), 4);
        assert_eq!(centered(4, 9), 4);
        assert_eq!(centered(5, 9), -4);
    }
}
