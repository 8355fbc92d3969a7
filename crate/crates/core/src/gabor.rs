//! Short-time Fourier transform and Gabor systems on separable lattices
//! `alpha Z_L x beta Z_L`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{hermitian_asymmetry, Operator, Provenance, HERMITIAN_TOL};
use crate::signal::{ensure_same_len, fft_in_place, tf_shift, Signal, TfPoint};
use crate::spectral::hermitian_eigen;

/// Relative eigenvalue threshold below which a frame operator is declared singular.
pub const FRAME_RTOL: f64 = 1e-10;

/// Separable lattice `alpha Z x beta Z` inside Z_L x Z_L.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeSpec {
    alpha: usize,
    beta: usize,
    len: usize,
}

impl LatticeSpec {
    pub fn new(alpha: usize, beta: usize, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidSignal(format!("lattice length must be >= 2, got {len}")));
        }
        for step in [alpha, beta] {
            if step == 0 || !len.is_multiple_of(step) {
                return Err(Error::Divisibility { step, len });
            }
        }
        Ok(Self { alpha, beta, len })
    }

    /// The full grid `alpha = beta = 1`.
    pub fn full(len: usize) -> Result<Self> {
        Self::new(1, 1, len)
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    /// Signal length `L`; never zero.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_full(&self) -> bool {
        self.alpha == 1 && self.beta == 1
    }

    /// Number of time positions `L / alpha`.
    pub fn time_count(&self) -> usize {
        self.len / self.alpha
    }

    /// Number of frequency positions `L / beta`.
    pub fn freq_count(&self) -> usize {
        self.len / self.beta
    }

    pub fn point_count(&self) -> usize {
        self.time_count() * self.freq_count()
    }

    /// Phase-space point of lattice index `(k, n)`.
    pub fn point(&self, k: usize, n: usize) -> TfPoint {
        TfPoint {
            k: self.alpha * k,
            n: self.beta * n,
        }
    }

    /// All lattice indices in row-major `(k, n)` order.
    pub fn indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nf = self.freq_count();
        (0..self.time_count()).flat_map(move |k| (0..nf).map(move |n| (k, n)))
    }

    fn check_signal(&self, f: &Signal) -> Result<()> {
        if f.len() != self.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                got: f.len(),
            });
        }
        Ok(())
    }
}

/// Coefficients indexed by lattice points, stored row-major by time index.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable {
    lattice: LatticeSpec,
    values: Vec<Complex64>,
}

impl CoefficientTable {
    pub fn new(lattice: LatticeSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lattice.point_count() {
            return Err(Error::LengthMismatch {
                expected: lattice.point_count(),
                got: values.len(),
            });
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidSignal("non-finite coefficient".into()));
        }
        Ok(Self { lattice, values })
    }

    pub fn zeros(lattice: LatticeSpec) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); lattice.point_count()],
            lattice,
        }
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, k: usize, n: usize) -> Complex64 {
        self.values[k * self.lattice.freq_count() + n]
    }

    pub fn set(&mut self, k: usize, n: usize, v: Complex64) {
        let nf = self.lattice.freq_count();
        self.values[k * nf + n] = v;
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            lattice: self.lattice,
            values: self.values.iter().map(|z| z * c).collect(),
        }
    }

    /// `sum |c|^2`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &CoefficientTable) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Frame bounds together with the canonical dual and Parseval windows.
#[derive(Clone, Debug)]
pub struct FrameInfo {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub dual_window: Signal,
    pub tight_window: Signal,
}

fn check_window(g: &Signal) -> Result<()> {
    if g.is_zero() {
        return Err(Error::ZeroWindow);
    }
    Ok(())
}

/// Windowed FFT rows for the time shifts `ks`, returned as `rows[i][n]` over all `n`.
fn windowed_rows(f: &Signal, g: &Signal, ks: impl Iterator<Item = usize>) -> Vec<Vec<Complex64>> {
    let len = f.len();
    let (fs, gs) = (f.as_slice(), g.as_slice());
    ks.map(|k| {
        let mut buf: Vec<Complex64> = (0..len)
            .map(|t| fs[t] * gs[(t + len - k) % len].conj())
            .collect();
        fft_in_place(&mut buf);
        buf
    })
    .collect()
}

/// `V_g f(k, n) = sum_t f(t) conj(g(t - k)) e^{-2 pi i t n / L}` on the full grid.
pub fn stft(f: &Signal, g: &Signal) -> Result<CoefficientTable> {
    ensure_same_len(f, g)?;
    check_window(g)?;
    let lattice = LatticeSpec::full(f.len())?;
    let values = windowed_rows(f, g, 0..f.len()).concat();
    CoefficientTable::new(lattice, values)
}

/// Gabor coefficients `<f, pi(alpha k, beta n) g>` on the lattice.
pub fn gabor_coeffs(f: &Signal, g: &Signal, lattice: &LatticeSpec) -> Result<CoefficientTable> {
    lattice.check_signal(f)?;
    lattice.check_signal(g)?;
    let (alpha, beta) = (lattice.alpha, lattice.beta);
    let rows = windowed_rows(f, g, (0..lattice.time_count()).map(|k| alpha * k));
    let values = rows
        .iter()
        .flat_map(|row| (0..lattice.freq_count()).map(move |n| row[beta * n]))
        .collect();
    CoefficientTable::new(*lattice, values)
}

/// Frame operator `S = sum_lambda pi(lambda) g (pi(lambda) g)^*`.
///
/// Assembled through the Walnut representation: the frequency sum collapses to
/// `(L / beta) [x = y mod L/beta]`, leaving a sum over time shifts only.
pub fn frame_operator(g: &Signal, lattice: &LatticeSpec) -> Result<Operator> {
    lattice.check_signal(g)?;
    check_window(g)?;
    let len = lattice.len;
    let period = lattice.freq_count();
    let scale = period as f64;
    let gs = g.as_slice();
    let m = DMatrix::from_fn(len, len, |x, y| {
        if !(x + len - y).is_multiple_of(period) {
            return Complex64::new(0.0, 0.0);
        }
        let s: Complex64 = (0..lattice.time_count())
            .map(|k| {
                let shift = lattice.alpha * k;
                gs[(x + len - shift) % len] * gs[(y + len - shift) % len].conj()
            })
            .sum();
        s * scale
    });
    Ok(Operator::new(m, Provenance::Frame))
}

/// `(A, B)` = extreme eigenvalues of a Hermitian PSD frame operator.
pub fn frame_bounds(s: &Operator) -> Result<(f64, f64)> {
    let asym = hermitian_asymmetry(s.matrix());
    if asym > HERMITIAN_TOL {
        return Err(Error::NonHermitian { asymmetry: asym });
    }
    let (vals, _) = hermitian_eigen(s.matrix());
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((min, max))
}

/// Applies `phi(S)` to `g` through the eigendecomposition of `S`, after the frame check.
fn spectral_apply(
    s: &Operator,
    g: &Signal,
    phi: impl Fn(f64) -> f64,
) -> Result<(Signal, f64, f64)> {
    let (vals, vecs) = hermitian_eigen(s.matrix());
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let threshold = FRAME_RTOL * max;
    if !(min > threshold) {
        return Err(Error::NotAFrame {
            min_eig: min,
            threshold,
        });
    }
    let len = g.len();
    let gv = nalgebra::DVector::from_column_slice(g.as_slice());
    // coefficients in the eigenbasis, rescaled by phi(lambda)
    let mut coeffs = vecs.adjoint() * gv;
    for (c, &lam) in coeffs.iter_mut().zip(vals.iter()) {
        *c *= phi(lam);
    }
    let out = vecs * coeffs;
    debug_assert_eq!(out.len(), len);
    Ok((Signal::from_vec_unchecked(out.as_slice().to_vec()), min, max))
}

/// Canonical dual window `gamma = S^{-1} g`.
pub fn canonical_dual(g: &Signal, lattice: &LatticeSpec) -> Result<Signal> {
    let s = frame_operator(g, lattice)?;
    spectral_apply(&s, g, |lam| 1.0 / lam).map(|r| r.0)
}

/// Parseval window `h = S^{-1/2} g`.
pub fn tight_window(g: &Signal, lattice: &LatticeSpec) -> Result<Signal> {
    let s = frame_operator(g, lattice)?;
    spectral_apply(&s, g, |lam| 1.0 / lam.sqrt()).map(|r| r.0)
}

/// Frame bounds, dual and tight windows from a single frame-operator eigendecomposition.
pub fn frame_info(g: &Signal, lattice: &LatticeSpec) -> Result<FrameInfo> {
    let s = frame_operator(g, lattice)?;
    let (dual_window, lower_bound, upper_bound) = spectral_apply(&s, g, |lam| 1.0 / lam)?;
    let (tight_window, _, _) = spectral_apply(&s, g, |lam| 1.0 / lam.sqrt())?;
    Ok(FrameInfo {
        lower_bound,
        upper_bound,
        dual_window,
        tight_window,
    })
}

/// Synthesis `sum_lambda c(lambda) pi(lambda) gamma`.
pub fn reconstruct(c: &CoefficientTable, gamma: &Signal, lattice: &LatticeSpec) -> Result<Signal> {
    if c.lattice() != lattice {
        return Err(Error::Schema(format!(
            "coefficient lattice {:?} does not match {:?}",
            c.lattice(),
            lattice
        )));
    }
    lattice.check_signal(gamma)?;
    let len = lattice.len;
    let gs = gamma.as_slice();
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for k in 0..lattice.time_count() {
        buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for n in 0..lattice.freq_count() {
            buf[lattice.beta * n] = c.get(k, n);
        }
        // sum_n c(k,n) e^{2 pi i beta n t / L}
        crate::signal::ifft_in_place(&mut buf);
        let shift = lattice.alpha * k;
        for t in 0..len {
            out[t] += buf[t] * (len as f64) * gs[(t + len - shift) % len];
        }
    }
    Signal::new(out)
}

/// The atom `pi(alpha k, beta n) g`.
pub fn atom(g: &Signal, lattice: &LatticeSpec, k: usize, n: usize) -> Signal {
    tf_shift(g, lattice.point(k, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gaussian_window;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn lattice_divisibility() {
        assert!(LatticeSpec::new(3, 3, 63).is_ok());
        assert!(matches!(
            LatticeSpec::new(4, 3, 63),
            Err(Error::Divisibility { step: 4, len: 63 })
        ));
        assert!(LatticeSpec::new(0, 1, 8).is_err());
        assert_eq!(LatticeSpec::new(3, 7, 63).unwrap().point_count(), 21 * 9);
    }

    #[test]
    fn stft_at_origin_is_energy() {
        let g = Signal::random(8, &mut rng());
        let v = stft(&g, &g).unwrap();
        assert!((v.get(0, 0).re - g.norm2().powi(2)).abs() < 1e-12);
        assert!(v.get(0, 0).im.abs() < 1e-12);
    }

    #[test]
    fn stft_of_deltas() {
        let d = Signal::delta(6, 0);
        let v = stft(&d, &d).unwrap();
        for k in 0..6 {
            for n in 0..6 {
                let expect = if k == 0 { 1.0 } else { 0.0 };
                assert!((v.get(k, n) - Complex64::new(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn stft_rejects_zero_window_and_mismatch() {
        let f = Signal::delta(6, 0);
        assert!(matches!(stft(&f, &Signal::zeros(6)), Err(Error::ZeroWindow)));
        assert!(matches!(
            stft(&f, &Signal::delta(7, 0)),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn full_grid_coeffs_equal_stft() {
        let mut r = rng();
        let f = Signal::random(10, &mut r);
        let g = Signal::random(10, &mut r);
        let lat = LatticeSpec::full(10).unwrap();
        let a = gabor_coeffs(&f, &g, &lat).unwrap();
        let b = stft(&f, &g).unwrap();
        assert_eq!(a, b);
        let z = gabor_coeffs(&Signal::zeros(10), &g, &lat).unwrap();
        assert!(z.values().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn coeffs_reject_length_mismatch() {
        let lat = LatticeSpec::new(2, 2, 8).unwrap();
        let f = Signal::delta(10, 0);
        assert!(gabor_coeffs(&f, &f, &lat).is_err());
    }

    #[test]
    fn full_grid_frame_operator_is_scaled_identity() {
        let g = Signal::random(8, &mut rng()).normalized().unwrap();
        let s = frame_operator(&g, &LatticeSpec::full(8).unwrap()).unwrap();
        let target = Operator::raw(DMatrix::identity(8, 8) * Complex64::new(8.0, 0.0));
        assert!(s.max_abs_diff(&target) < 1e-12);
        let (a, b) = frame_bounds(&s).unwrap();
        assert!((a - 8.0).abs() < 1e-10 && (b - 8.0).abs() < 1e-10);
    }

    #[test]
    fn single_point_lattice_is_not_a_frame() {
        let g = Signal::random(6, &mut rng()).normalized().unwrap();
        let lat = LatticeSpec::new(6, 6, 6).unwrap();
        let s = frame_operator(&g, &lat).unwrap();
        let p = crate::operator::outer(&g, &g);
        assert!(crate::operator::max_abs(&(s.matrix() - p)) < 1e-14);
        assert!(matches!(canonical_dual(&g, &lat), Err(Error::NotAFrame { .. })));
        assert!(matches!(tight_window(&g, &lat), Err(Error::NotAFrame { .. })));
    }

    #[test]
    fn identity_bounds() {
        assert_eq!(frame_bounds(&Operator::identity(5)).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn frame_bounds_rejects_non_hermitian() {
        let mut m = DMatrix::identity(3, 3);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            frame_bounds(&Operator::raw(m)),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn full_grid_dual_is_scaled_window() {
        let g = Signal::random(8, &mut rng()).normalized().unwrap();
        let gamma = canonical_dual(&g, &LatticeSpec::full(8).unwrap()).unwrap();
        assert!(gamma.max_abs_diff(&g.scaled(Complex64::new(1.0 / 8.0, 0.0))) < 1e-12);
        let h = tight_window(&g, &LatticeSpec::full(8).unwrap()).unwrap();
        assert!(h.max_abs_diff(&g.scaled(Complex64::new(1.0 / 8f64.sqrt(), 0.0))) < 1e-12);
    }

    #[test]
    fn gaussian_critical_lattice_reconstructs() {
        let lat = LatticeSpec::new(4, 4, 16).unwrap();
        let g = gaussian_window(16, 3.0, Some(8.5)).normalized().unwrap();
        let info = frame_info(&g, &lat).unwrap();
        assert!(info.lower_bound > 0.0);
        let f = Signal::random(16, &mut rng());
        let c = gabor_coeffs(&f, &g, &lat).unwrap();
        let back = reconstruct(&c, &info.dual_window, &lat).unwrap();
        assert!(back.sub(&f).norm2() <= 1e-10 * f.norm2());
    }

    #[test]
    fn reconstruct_zero_and_mismatch() {
        let lat = LatticeSpec::new(2, 2, 8).unwrap();
        let g = Signal::delta(8, 0);
        let out = reconstruct(&CoefficientTable::zeros(lat), &g, &lat).unwrap();
        assert!(out.is_zero());
        let other = LatticeSpec::new(4, 2, 8).unwrap();
        assert!(reconstruct(&CoefficientTable::zeros(other), &g, &lat).is_err());
    }
}
