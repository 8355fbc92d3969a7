//! Window and symbol generators.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::quantize::SymbolGrid;
use crate::signal::{centered, Signal, TfPoint};

/// `g(t) = exp(-pi (t - c)^2 / s^2)` with `c = L/2` unless given.
pub fn gaussian_window(len: usize, s: f64, center: Option<f64>) -> Signal {
    let c = center.unwrap_or(len as f64 / 2.0);
    let data = (0..len)
        .map(|t| {
            let d = t as f64 - c;
            Complex64::new((-PI * d * d / (s * s)).exp(), 0.0)
        })
        .collect();
    Signal::from_vec_unchecked(data)
}

/// Periodic Hann window peaking at `L/2`.
pub fn hann_window(len: usize) -> Signal {
    let data = (0..len)
        .map(|t| Complex64::new(0.5 - 0.5 * (2.0 * PI * t as f64 / len as f64).cos(), 0.0))
        .collect();
    Signal::from_vec_unchecked(data)
}

/// Parses whitespace- or comma-separated numbers from a text file, skipping blank
/// lines and `#` comments. Each line holds `re [im]`.
fn read_complex_lines(path: &Path) -> Result<Vec<Complex64>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Schema(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        match nums.as_slice() {
            [re] => out.push(Complex64::new(*re, 0.0)),
            [re, im] => out.push(Complex64::new(*re, *im)),
            _ => {
                return Err(Error::Schema(format!(
                    "{}:{}: expected 're im', got {} numbers",
                    path.display(),
                    lineno + 1,
                    nums.len()
                )))
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum WindowGenerator {
    Gaussian { s: Option<f64>, center: Option<f64> },
    Hann,
    Delta { at: i64 },
    File { path: PathBuf },
}

impl WindowGenerator {
    pub fn generate(&self, len: usize) -> Result<Signal> {
        let sig = match self {
            WindowGenerator::Gaussian { s, center } => {
                let s = s.unwrap_or((len as f64).sqrt());
                if !(s > 0.0) {
                    return Err(Error::Schema(format!("gaussian width must be positive, got {s}")));
                }
                gaussian_window(len, s, *center)
            }
            WindowGenerator::Hann => hann_window(len),
            WindowGenerator::Delta { at } => Signal::delta(len, *at),
            WindowGenerator::File { path } => {
                let v = read_complex_lines(path)?;
                if v.len() != len {
                    return Err(Error::Schema(format!(
                        "window file {} has {} samples, expected {len}",
                        path.display(),
                        v.len()
                    )));
                }
                Signal::new(v)?
            }
        };
        if sig.is_zero() {
            return Err(Error::ZeroWindow);
        }
        Ok(sig)
    }
}

/// Signed cyclic offset of `k` from a real-valued center, in `[-L/2, L/2)`.
fn cyclic_offset(k: usize, center: f64, len: usize) -> f64 {
    let l = len as f64;
    let d = (k as f64 - center).rem_euclid(l);
    if d >= l / 2.0 {
        d - l
    } else {
        d
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SymbolGenerator {
    /// `exp(-pi |z - c|^2 / width^2)` with cyclic distance.
    Gaussian2d { center: Option<(f64, f64)>, width: Option<f64> },
    /// Indicator of the cyclic disk `|z - c| <= radius`.
    DiskIndicator { center: Option<(f64, f64)>, radius: Option<f64> },
    /// `|z~|^{-rho}` in centered coordinates, `1` at the origin.
    PowerDecay { rho: f64 },
    /// I.i.d. standard complex normal entries.
    RandomComplex { seed: Option<u64> },
    Delta { at: (i64, i64) },
    Constant { value: Complex64 },
    File { path: PathBuf },
}

impl SymbolGenerator {
    pub fn generate(&self, len: usize, scenario_seed: u64) -> Result<SymbolGrid> {
        let mid = len as f64 / 2.0;
        match self {
            SymbolGenerator::Gaussian2d { center, width } => {
                let (ck, cn) = center.unwrap_or((mid, mid));
                let w = width.unwrap_or(len as f64 / 6.0);
                if !(w > 0.0) {
                    return Err(Error::Schema(format!("gaussian2d width must be positive, got {w}")));
                }
                SymbolGrid::from_fn(len, |k, n| {
                    let dk = cyclic_offset(k, ck, len);
                    let dn = cyclic_offset(n, cn, len);
                    Complex64::new((-PI * (dk * dk + dn * dn) / (w * w)).exp(), 0.0)
                })
            }
            SymbolGenerator::DiskIndicator { center, radius } => {
                let (ck, cn) = center.unwrap_or((mid, mid));
                let r = radius.unwrap_or(len as f64 / 5.0);
                if !(r >= 0.0) {
                    return Err(Error::Schema(format!("disk radius must be nonnegative, got {r}")));
                }
                SymbolGrid::from_fn(len, |k, n| {
                    let dk = cyclic_offset(k, ck, len);
                    let dn = cyclic_offset(n, cn, len);
                    let inside = dk * dk + dn * dn <= r * r;
                    Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
                })
            }
            SymbolGenerator::PowerDecay { rho } => {
                if !(rho.is_finite() && *rho >= 0.0) {
                    return Err(Error::Schema(format!("power-decay rho must be >= 0, got {rho}")));
                }
                SymbolGrid::from_fn(len, |k, n| {
                    let (x, w) = (centered(k, len) as f64, centered(n, len) as f64);
                    let r2 = x * x + w * w;
                    let v = if r2 == 0.0 { 1.0 } else { r2.powf(-rho / 2.0) };
                    Complex64::new(v, 0.0)
                })
            }
            SymbolGenerator::RandomComplex { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(scenario_seed));
                let values = (0..len * len)
                    .map(|_| {
                        let re: f64 = rand::Rng::sample(&mut rng, StandardNormal);
                        let im: f64 = rand::Rng::sample(&mut rng, StandardNormal);
                        Complex64::new(re, im)
                    })
                    .collect();
                SymbolGrid::new(len, values)
            }
            SymbolGenerator::Delta { at } => Ok(SymbolGrid::delta(len, TfPoint::new(at.0, at.1, len))),
            SymbolGenerator::Constant { value } => Ok(SymbolGrid::constant(len, *value)),
            SymbolGenerator::File { path } => {
                let v = read_complex_lines(path)?;
                if v.len() != len * len {
                    return Err(Error::Schema(format!(
                        "symbol file {} has {} values, expected {}",
                        path.display(),
                        v.len(),
                        len * len
                    )));
                }
                SymbolGrid::new(len, v)
            }
        }
    }
}
