//! Brute-force reference implementations written straight from the defining sums.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tflocal::Signal;

pub type C = Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cis(x: f64) -> C {
    C::new(x.cos(), x.sin())
}

/// `e^{2 pi i m / L}` evaluated without modular reduction.
pub fn root(m: i64, len: usize) -> C {
    cis(2.0 * PI * m as f64 / len as f64)
}

pub fn cnormal(r: &mut ChaCha8Rng) -> C {
    C::new(r.sample(StandardNormal), r.sample(StandardNormal))
}

pub fn random_vec(len: usize, r: &mut ChaCha8Rng) -> Vec<C> {
    (0..len).map(|_| cnormal(r)).collect()
}

pub fn signal(v: &[C]) -> Signal {
    Signal::new(v.to_vec()).unwrap()
}

fn md(i: i64, len: usize) -> usize {
    i.rem_euclid(len as i64) as usize
}

/// `(pi(k, n) f)(t) = e^{2 pi i n t / L} f(t - k)`.
pub fn shift(f: &[C], k: i64, n: i64) -> Vec<C> {
    let len = f.len();
    (0..len)
        .map(|t| root(n * t as i64, len) * f[md(t as i64 - k, len)])
        .collect()
}

pub fn inner(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// `V_g f(k, n)`, row-major over `(k, n)`.
pub fn direct_stft(f: &[C], g: &[C]) -> Vec<C> {
    let len = f.len();
    let mut out = Vec::with_capacity(len * len);
    for k in 0..len as i64 {
        for n in 0..len as i64 {
            out.push(inner(f, &shift(g, k, n)));
        }
    }
    out
}

pub fn half(len: usize) -> i64 {
    assert!(len % 2 == 1);
    (len as i64 + 1) / 2
}

/// Cross-Wigner distribution from its defining sum.
pub fn wigner(f: &[C], g: &[C]) -> Vec<C> {
    let len = f.len();
    let h = half(len);
    let mut out = Vec::with_capacity(len * len);
    for k in 0..len as i64 {
        for n in 0..len as i64 {
            let mut acc = C::new(0.0, 0.0);
            for t in 0..len as i64 {
                acc += f[md(k + h * t, len)] * g[md(k - h * t, len)].conj() * root(-t * n, len);
            }
            out.push(acc);
        }
    }
    out
}

/// Weyl operator from the weak definition `<L_sigma f, g> = (1/L) sum sigma conj(W(g, f))`,
/// evaluated on basis vectors.
pub fn weyl(sigma: &[C], len: usize) -> DMatrix<C> {
    let e = |i: usize| -> Vec<C> { (0..len).map(|t| C::new((t == i) as u8 as f64, 0.0)).collect() };
    DMatrix::from_fn(len, len, |x, y| {
        let w = wigner(&e(x), &e(y));
        sigma.iter().zip(&w).map(|(s, wv)| s * wv.conj()).sum::<C>() / len as f64
    })
}

/// `(1/L) sum_z a(z) |pi(z) phi2><pi(z) phi1|`.
pub fn localization(a: &[C], phi1: &[C], phi2: &[C]) -> DMatrix<C> {
    let len = phi1.len();
    let mut m = DMatrix::from_element(len, len, C::new(0.0, 0.0));
    for k in 0..len {
        for n in 0..len {
            let c = a[k * len + n];
            if c == C::new(0.0, 0.0) {
                continue;
            }
            let u = shift(phi2, k as i64, n as i64);
            let v = shift(phi1, k as i64, n as i64);
            for x in 0..len {
                for y in 0..len {
                    m[(x, y)] += c * u[x] * v[y].conj() / len as f64;
                }
            }
        }
    }
    m
}

/// Two-dimensional cyclic convolution on Z_L x Z_L.
pub fn conv2d(a: &[C], b: &[C], len: usize) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); len * len];
    for k in 0..len {
        for n in 0..len {
            let mut acc = C::new(0.0, 0.0);
            for u in 0..len {
                for v in 0..len {
                    acc += a[u * len + v] * b[((k + len - u) % len) * len + (n + len - v) % len];
                }
            }
            out[k * len + n] = acc;
        }
    }
    out
}

/// Phase-space STFT with the `1/L` measure.
pub fn phase_stft(sigma: &[C], phi: &[C], len: usize, p: (i64, i64), zeta: (i64, i64)) -> C {
    let mut acc = C::new(0.0, 0.0);
    for u1 in 0..len as i64 {
        for u2 in 0..len as i64 {
            let w = phi[md(u1 - p.0, len) * len + md(u2 - p.1, len)];
            acc += sigma[(u1 as usize) * len + u2 as usize] * w.conj() * root(-(u1 * zeta.0 + u2 * zeta.1), len);
        }
    }
    acc / len as f64
}

pub fn max_abs(m: &DMatrix<C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues (ascending) of a Hermitian matrix by cyclic Jacobi on the real
/// symmetric embedding `[[Re, -Im], [Im, Re]]`; each eigenvalue appears twice.
pub fn jacobi_hermitian_eigenvalues(m: &DMatrix<C>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let z = m[(i % n, j % n)];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    });
    let size = 2 * n;
    for _sweep in 0..100 {
        let off: f64 = (0..size)
            .flat_map(|i| (0..size).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..size {
            for q in p + 1..size {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..size {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..size {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..size).map(|i| a[(i, i)]).collect();
    d.sort_by(f64::total_cmp);
    d
}

/// Tail energies of the sorted magnitudes, computed by brute force.
pub fn tails(sorted: &[f64]) -> Vec<f64> {
    (0..=sorted.len())
        .map(|n| sorted[n..].iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect()
}

/// Stechkin middle quantity from its definition.
pub fn stechkin_middle(sorted: &[f64], p: f64) -> f64 {
    let gamma = 1.0 / p - 0.5;
    let t = tails(sorted);
    (1..=sorted.len())
        .map(|n| ((n as f64).powf(gamma) * t[n - 1]).powf(p) / n as f64)
        .sum::<f64>()
        .powf(1.0 / p)
}
