//! Phase-space symbols, the discrete cross-Wigner distribution, Weyl operators
//! and localization operators on Z_L.
//!
//! Wigner and Weyl constructions need odd `L`, where `h = (L + 1) / 2` is the
//! inverse of 2 modulo `L` and replaces the continuum half-shift. With that
//! choice the map `(x, y) -> (h(x + y), x - y)` is a bijection of Z_L x Z_L and
//! the rank-one operator `u v^*` has Weyl symbol exactly `W(u, v)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{Operator, Provenance};
use crate::signal::{ensure_same_len, fft_in_place, ifft_in_place, reduce, tf_shift, unit_roots, Signal, TfPoint};

/// Complex function on Z_L x Z_L, row-major in `(k, n)` = (time, frequency).
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolGrid {
    len: usize,
    values: Vec<Complex64>,
}

impl SymbolGrid {
    pub fn new(len: usize, values: Vec<Complex64>) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidArgument(format!("symbol size must be >= 2, got {len}")));
        }
        if values.len() != len * len {
            return Err(Error::LengthMismatch {
                expected: len * len,
                got: values.len(),
            });
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite symbol value".into()));
        }
        Ok(Self { len, values })
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let values = (0..len * len).map(|i| f(i / len, i % len)).collect();
        Self::new(len, values)
    }

    pub fn constant(len: usize, c: Complex64) -> Self {
        Self {
            len,
            values: vec![c; len * len],
        }
    }

    /// Indicator of a single phase-space point.
    pub fn delta(len: usize, z: TfPoint) -> Self {
        let mut s = Self::constant(len, Complex64::new(0.0, 0.0));
        s.values[(z.k % len) * len + z.n % len] = Complex64::new(1.0, 0.0);
        s
    }

    #[inline]
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, k: usize, n: usize) -> Complex64 {
        self.values[k * self.len + n]
    }

    /// Cyclic access.
    #[inline]
    pub fn at(&self, k: i64, n: i64) -> Complex64 {
        self.get(reduce(k, self.len), reduce(n, self.len))
    }

    pub fn row(&self, k: usize) -> &[Complex64] {
        &self.values[k * self.len..(k + 1) * self.len]
    }

    pub fn conj(&self) -> Self {
        Self {
            len: self.len,
            values: self.values.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn add(&self, other: &SymbolGrid) -> Self {
        Self {
            len: self.len,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            len: self.len,
            values: self.values.iter().map(|z| z * c).collect(),
        }
    }

    /// `(k, n) -> a(k - u.k, n - u.n)`.
    pub fn translated(&self, u: TfPoint) -> Self {
        let (uk, un) = (u.k as i64, u.n as i64);
        let values = (0..self.len * self.len)
            .map(|i| self.at((i / self.len) as i64 - uk, (i % self.len) as i64 - un))
            .collect();
        Self {
            len: self.len,
            values,
        }
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|z| z.im == 0.0)
    }

    pub fn max_abs_diff(&self, other: &SymbolGrid) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn require_odd(len: usize) -> Result<usize> {
    if len.is_multiple_of(2) {
        return Err(Error::EvenLength(len));
    }
    Ok(len.div_ceil(2))
}

/// The inverse of 2 modulo an odd `len`.
pub fn half_mod(len: usize) -> Result<usize> {
    require_odd(len)
}

/// `W(f, g)(k, n) = sum_t f(k + h t) conj(g(k - h t)) e^{-2 pi i t n / L}`, `h = 2^{-1} mod L`.
pub fn cross_wigner(f: &Signal, g: &Signal) -> Result<SymbolGrid> {
    ensure_same_len(f, g)?;
    let len = f.len();
    let h = require_odd(len)?;
    let (fs, gs) = (f.as_slice(), g.as_slice());
    let mut values = Vec::with_capacity(len * len);
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for k in 0..len {
        for (t, slot) in buf.iter_mut().enumerate() {
            let ht = (h * t) % len;
            *slot = fs[(k + ht) % len] * gs[(k + len - ht) % len].conj();
        }
        fft_in_place(&mut buf);
        values.extend_from_slice(&buf);
    }
    SymbolGrid::new(len, values)
}

/// Row-wise inverse DFT: `out[k][d] = (1/L) sum_n a(k, n) e^{2 pi i d n / L}`.
fn rows_idft(a: &SymbolGrid) -> Vec<Vec<Complex64>> {
    (0..a.len)
        .map(|k| {
            let mut row = a.row(k).to_vec();
            ifft_in_place(&mut row);
            row
        })
        .collect()
}

/// Weyl operator `M(x, y) = (1/L) sum_n sigma(h(x + y), n) e^{2 pi i (x - y) n / L}`.
pub fn weyl_build(sigma: &SymbolGrid) -> Result<Operator> {
    let len = sigma.len;
    let h = require_odd(len)?;
    let kernels = rows_idft(sigma);
    let m = DMatrix::from_fn(len, len, |x, y| kernels[(h * (x + y)) % len][(x + len - y) % len]);
    Ok(Operator::new(m, Provenance::Weyl))
}

/// Localization operator `A f = (1/L) sum_z a(z) V_{phi1} f(z) pi(z) phi2` as a dense matrix.
///
/// Entry form: `A(x, y) = sum_k phi2(x - k) conj(phi1(y - k)) a_k(x - y)` where
/// `a_k` is the inverse DFT of the frequency row `a(k, .)`.
pub fn localization_build(a: &SymbolGrid, phi1: &Signal, phi2: &Signal) -> Result<Operator> {
    ensure_same_len(phi1, phi2)?;
    let len = phi1.len();
    if a.len != len {
        return Err(Error::LengthMismatch {
            expected: len,
            got: a.len,
        });
    }
    if phi1.is_zero() || phi2.is_zero() {
        return Err(Error::ZeroWindow);
    }
    let kernels = rows_idft(a);
    let (p1, p2) = (phi1.as_slice(), phi2.as_slice());
    let m = DMatrix::from_fn(len, len, |x, y| {
        let d = (x + len - y) % len;
        kernels
            .iter()
            .enumerate()
            .map(|(k, ker)| p2[(x + len - k) % len] * p1[(y + len - k) % len].conj() * ker[d])
            .sum()
    });
    Ok(Operator::new(m, Provenance::Localization))
}

/// Scalar `c_L` with `A_a^{phi1,phi2} = L_{c_L (a (*) W(phi2, phi1))}`.
///
/// Follows from the discrete Moyal identity `sum W(u,v) conj(W(g,f)) = L <u,g> <f,v>`.
pub fn correspondence_constant(len: usize) -> f64 {
    1.0 / len as f64
}

/// Cyclic convolution over Z_L x Z_L.
pub fn cyclic_convolve_2d(a: &SymbolGrid, b: &SymbolGrid) -> Result<SymbolGrid> {
    if a.len != b.len {
        return Err(Error::LengthMismatch {
            expected: a.len,
            got: b.len,
        });
    }
    let len = a.len;
    let nz: Vec<(usize, usize, Complex64)> = (0..len * len)
        .filter_map(|i| {
            let v = a.values[i];
            (v.re != 0.0 || v.im != 0.0).then_some((i / len, i % len, v))
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); len * len];
    for (uk, un, av) in nz {
        for k in 0..len {
            let bk = (k + len - uk) % len;
            let brow = &b.values[bk * len..(bk + 1) * len];
            let orow = &mut out[k * len..(k + 1) * len];
            for (n, o) in orow.iter_mut().enumerate() {
                *o += av * brow[(n + len - un) % len];
            }
        }
    }
    SymbolGrid::new(len, out)
}

/// Weyl symbol of the localization operator, `c_L (a (*) W(phi2, phi1))`.
pub fn localization_weyl_symbol(a: &SymbolGrid, phi1: &Signal, phi2: &Signal) -> Result<SymbolGrid> {
    ensure_same_len(phi1, phi2)?;
    require_odd(phi1.len())?;
    let w = cross_wigner(phi2, phi1)?;
    let conv = cyclic_convolve_2d(a, &w)?;
    Ok(conv.scaled(Complex64::new(correspondence_constant(a.len), 0.0)))
}

/// Short-time Fourier transform on the phase space Z_L x Z_L with the `1/L` phase-space measure:
/// `V_Phi sigma(p, zeta) = (1/L) sum_u sigma(u) conj(Phi(u - p)) e^{-2 pi i (u_1 zeta_1 + u_2 zeta_2) / L}`.
pub fn phase_space_stft(sigma: &SymbolGrid, window: &SymbolGrid, p: TfPoint, zeta: TfPoint) -> Result<Complex64> {
    if sigma.len != window.len {
        return Err(Error::LengthMismatch {
            expected: sigma.len,
            got: window.len,
        });
    }
    let len = sigma.len;
    let roots = unit_roots(len);
    let mut acc = Complex64::new(0.0, 0.0);
    for u1 in 0..len {
        for u2 in 0..len {
            let phase = roots[(u1 * zeta.k + u2 * zeta.n) % len].conj();
            let win = window.get((u1 + len - p.k % len) % len, (u2 + len - p.n % len) % len);
            acc += sigma.get(u1, u2) * win.conj() * phase;
        }
    }
    Ok(acc / len as f64)
}

/// Both sides of the kernel identity
/// `|<L_sigma pi(z) g, pi(w) g>| = |V_Phi sigma(h(z + w), j(w - z))|`, with `Phi = W(g, g)`
/// and `j(a, b) = (b, -a)`.
pub fn stft_mag_of_operator_kernel(
    sigma: &SymbolGrid,
    g: &Signal,
    z: TfPoint,
    w: TfPoint,
) -> Result<(f64, f64)> {
    let op = weyl_build(sigma)?;
    stft_mag_with_operator(&op, sigma, g, z, w)
}

/// As [`stft_mag_of_operator_kernel`] with a prebuilt `L_sigma`.
pub fn stft_mag_with_operator(
    op: &Operator,
    sigma: &SymbolGrid,
    g: &Signal,
    z: TfPoint,
    w: TfPoint,
) -> Result<(f64, f64)> {
    let len = sigma.len;
    let h = require_odd(len)?;
    if g.len() != len {
        return Err(Error::LengthMismatch {
            expected: len,
            got: g.len(),
        });
    }
    let lhs = op.apply(&tf_shift(g, z)).inner(&tf_shift(g, w)).norm();
    let phi = cross_wigner(g, g)?;
    let mid = TfPoint {
        k: (h * (z.k + w.k)) % len,
        n: (h * (z.n + w.n)) % len,
    };
    let diff = TfPoint::new(w.k as i64 - z.k as i64, w.n as i64 - z.n as i64, len);
    let j = TfPoint::new(diff.n as i64, -(diff.k as i64), len);
    let rhs = phase_space_stft(sigma, &phi, mid, j)?.norm();
    Ok((lhs, rhs))
}
