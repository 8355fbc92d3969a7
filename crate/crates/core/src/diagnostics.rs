//! Decay diagnostics for signals and operator eigenfunctions: discrete
//! modulation quasi-norms, N-term approximation profiles, decay-exponent fits,
//! weighted studies and convolution-relation ratios.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gabor::{gabor_coeffs, tight_window, CoefficientTable, LatticeSpec};
use crate::operator::Operator;
use crate::seq::{check_exponent, lpq_norm, rearrange_desc, sigma_profile, young_exponents_ok, RatioReport, SortedMagnitudes, WeightSpec};
use crate::signal::{centered, Signal};
use crate::spectral::{eig, point_spectrum_nonzero, EigenSystem};

/// Tail values below this fraction of the full norm are excluded from the fit.
pub const FIT_FLOOR: f64 = 1e-14;

/// Exponents `p = q` of the unweighted quasi-norms reported per eigenfunction.
pub const STUDY_EXPONENTS: [f64; 3] = [1.0, 0.5, 0.25];

#[derive(Clone, Debug)]
pub struct DecayReport {
    pub sorted: SortedMagnitudes,
    /// `sigma~_N` for `N = 0..=M`.
    pub sigma_profile: Vec<f64>,
    pub fitted_exponent: Option<f64>,
    pub fit_range: (usize, usize),
    pub floor_hits: usize,
}

impl DecayReport {
    pub fn sigma(&self, n: usize) -> f64 {
        self.sigma_profile.get(n).copied().unwrap_or(0.0)
    }

    /// `sigma~_N / sigma~_0`, or 0 for the zero signal.
    pub fn relative_tail(&self, n: usize) -> f64 {
        let s0 = self.sigma(0);
        if s0 == 0.0 {
            0.0
        } else {
            self.sigma(n) / s0
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModNormReport {
    pub p: f64,
    pub q: f64,
    pub weight: WeightSpec,
    pub value: f64,
    #[serde(skip)]
    pub lattice: LatticeSpec,
    pub window_id: String,
}

/// Tight window of `(g, lattice)` cached for repeated analyses.
#[derive(Clone, Debug)]
pub struct GaborAnalyzer {
    lattice: LatticeSpec,
    tight: Signal,
    window_id: String,
}

impl GaborAnalyzer {
    pub fn new(g: &Signal, lattice: &LatticeSpec) -> Result<Self> {
        let tight = tight_window(g, lattice)?;
        let window_id = format!(
            "tight(L={}, alpha={}, beta={}, |g|={:.6e})",
            lattice.len(),
            lattice.alpha(),
            lattice.beta(),
            g.norm2()
        );
        Ok(Self {
            lattice: *lattice,
            tight,
            window_id,
        })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn tight_window(&self) -> &Signal {
        &self.tight
    }

    pub fn coeffs(&self, f: &Signal) -> Result<CoefficientTable> {
        gabor_coeffs(f, &self.tight, &self.lattice)
    }

    pub fn modulation_qnorm(&self, f: &Signal, p: f64, q: f64, m: &WeightSpec) -> Result<ModNormReport> {
        let value = lpq_norm(&self.coeffs(f)?, p, q, m)?;
        Ok(ModNormReport {
            p,
            q,
            weight: m.clone(),
            value,
            lattice: self.lattice,
            window_id: self.window_id.clone(),
        })
    }

    pub fn n_term_profile(&self, f: &Signal, fit_range: (usize, usize)) -> Result<DecayReport> {
        let c = self.coeffs(f)?;
        let m = c.values().len();
        let (lo, hi) = fit_range;
        if lo == 0 || lo > hi || hi > m {
            return Err(Error::InvalidArgument(format!(
                "fit range ({lo}, {hi}) must satisfy 1 <= lo <= hi <= {m}"
            )));
        }
        let sorted = rearrange_desc(&c);
        let profile = sigma_profile(&sorted);
        let floor = FIT_FLOOR * profile[0];
        let floor_hits = profile.iter().filter(|&&s| s < floor).count();
        let points: Vec<(f64, f64)> = (lo..=hi)
            .filter(|&n| profile[n] > 0.0 && profile[n] >= floor)
            .map(|n| ((n as f64).ln(), profile[n].ln()))
            .collect();
        let fitted_exponent = least_squares_slope(&points).map(|s| -s);
        Ok(DecayReport {
            sorted,
            sigma_profile: profile,
            fitted_exponent,
            fit_range,
            floor_hits,
        })
    }
}

/// OLS slope through the points; `None` with fewer than 3 points or no spread.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 3 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    slope.is_finite().then_some(slope)
}

/// Discrete modulation quasi-norm: `l^{p,q}_m` norm of the Gabor coefficients
/// with respect to the tight window of `(g, lattice)`.
pub fn modulation_qnorm(
    f: &Signal,
    g: &Signal,
    lattice: &LatticeSpec,
    p: f64,
    q: f64,
    m: &WeightSpec,
) -> Result<ModNormReport> {
    GaborAnalyzer::new(g, lattice)?.modulation_qnorm(f, p, q, m)
}

/// N-term approximation profile of `f` with respect to the tight window of `(g, lattice)`.
pub fn n_term_profile(f: &Signal, g: &Signal, lattice: &LatticeSpec, fit_range: (usize, usize)) -> Result<DecayReport> {
    GaborAnalyzer::new(g, lattice)?.n_term_profile(f, fit_range)
}

#[derive(Clone, Debug)]
pub struct EigenfunctionReport {
    pub index: usize,
    pub eigenvalue: Complex64,
    pub residual: f64,
    pub decay: DecayReport,
    pub norms: Vec<ModNormReport>,
}

#[derive(Clone, Debug)]
pub struct BaselineReport {
    pub seed: u64,
    pub signal: Signal,
    pub decay: DecayReport,
    pub norms: Vec<ModNormReport>,
}

#[derive(Clone, Debug)]
pub struct StudyConfig {
    pub fit_range: (usize, usize),
    pub floor: f64,
    pub top_k: Option<usize>,
    pub seed: u64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            fit_range: (4, 40),
            floor: 1e-8,
            top_k: None,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenDecayStudy {
    pub spectrum: EigenSystem,
    pub retained: EigenSystem,
    pub reports: Vec<EigenfunctionReport>,
    pub baseline: BaselineReport,
    /// Every eigenvector retained: no decaying eigenvalue sequence.
    pub non_compact_like: bool,
}

impl EigenDecayStudy {
    /// Smallest eigenfunction exponent minus the baseline exponent.
    pub fn decay_separation(&self) -> Option<f64> {
        let base = self.baseline.decay.fitted_exponent?;
        self.reports
            .iter()
            .map(|r| r.decay.fitted_exponent.map(|e| e - base))
            .collect::<Option<Vec<f64>>>()?
            .into_iter()
            .reduce(f64::min)
    }
}

/// Seeded random unit vector used as the incompressible reference.
pub fn baseline_signal(len: usize, seed: u64) -> Signal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Signal::random_unit(len, &mut rng)
}

fn unweighted_norms(an: &GaborAnalyzer, f: &Signal) -> Result<Vec<ModNormReport>> {
    STUDY_EXPONENTS
        .iter()
        .map(|&p| an.modulation_qnorm(f, p, p, &WeightSpec::Constant))
        .collect()
}

/// Eigendecomposition followed by per-eigenfunction N-term profiles and quasi-norms,
/// together with a seeded random baseline on the same lattice and window.
pub fn eigen_decay_study(a: &Operator, g: &Signal, lattice: &LatticeSpec, cfg: &StudyConfig) -> Result<EigenDecayStudy> {
    let spectrum = eig(a)?;
    eigen_decay_study_with(&spectrum, g, lattice, cfg)
}

/// As [`eigen_decay_study`] for a precomputed spectrum.
pub fn eigen_decay_study_with(
    spectrum: &EigenSystem,
    g: &Signal,
    lattice: &LatticeSpec,
    cfg: &StudyConfig,
) -> Result<EigenDecayStudy> {
    let an = GaborAnalyzer::new(g, lattice)?;
    let retained = point_spectrum_nonzero(spectrum, cfg.floor)?;
    let count = cfg.top_k.map_or(retained.len(), |k| k.min(retained.len()));
    let reports = (0..count)
        .into_par_iter()
        .map(|i| {
            let v = &retained.eigenvectors[i];
            Ok(EigenfunctionReport {
                index: i,
                eigenvalue: retained.eigenvalues[i],
                residual: retained.residuals[i],
                decay: an.n_term_profile(v, cfg.fit_range)?,
                norms: unweighted_norms(&an, v)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let signal = baseline_signal(g.len(), cfg.seed);
    let baseline = BaselineReport {
        seed: cfg.seed,
        decay: an.n_term_profile(&signal, cfg.fit_range)?,
        norms: unweighted_norms(&an, &signal)?,
        signal,
    };
    Ok(EigenDecayStudy {
        non_compact_like: retained.len() == spectrum.len(),
        spectrum: spectrum.clone(),
        retained,
        reports,
        baseline,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightedRow {
    /// Eigenfunction index, or `None` for the baseline.
    pub index: Option<usize>,
    pub s: f64,
    pub p: f64,
    pub weighted: f64,
    pub unweighted: f64,
    pub ratio: f64,
    /// `ratio` divided by the baseline's ratio at the same `s`.
    pub relative_to_baseline: f64,
}

#[derive(Clone, Debug)]
pub struct WeightedStudy {
    pub rows: Vec<WeightedRow>,
    pub retained: usize,
}

impl WeightedStudy {
    pub fn rows_for(&self, index: Option<usize>) -> impl Iterator<Item = &WeightedRow> {
        self.rows.iter().filter(move |r| r.index == index)
    }
}

fn weighted_ratio(an: &GaborAnalyzer, f: &Signal, s: f64, p: f64) -> Result<(f64, f64)> {
    let w = an.modulation_qnorm(f, p, p, &WeightSpec::Product { s, t: s })?.value;
    let u = an.modulation_qnorm(f, p, p, &WeightSpec::Constant)?.value;
    Ok((w, u))
}

/// Weighted (`v_s (x) v_s`) against unweighted quasi-norms of retained eigenfunctions,
/// each compared with the same ratio for the random baseline.
pub fn weighted_decay_study(
    spectrum: &EigenSystem,
    g: &Signal,
    lattice: &LatticeSpec,
    s_list: &[f64],
    p: f64,
    cfg: &StudyConfig,
) -> Result<WeightedStudy> {
    check_exponent("p", p)?;
    if let Some(s) = s_list.iter().find(|s| !(**s >= 0.0)) {
        return Err(Error::InvalidArgument(format!("weight exponents must be nonnegative, got {s}")));
    }
    let an = GaborAnalyzer::new(g, lattice)?;
    let retained = point_spectrum_nonzero(spectrum, cfg.floor)?;
    let count = cfg.top_k.map_or(retained.len(), |k| k.min(retained.len()));
    let base = baseline_signal(g.len(), cfg.seed);

    let mut rows = Vec::new();
    for &s in s_list {
        let (bw, bu) = weighted_ratio(&an, &base, s, p)?;
        let base_ratio = bw / bu;
        rows.push(WeightedRow {
            index: None,
            s,
            p,
            weighted: bw,
            unweighted: bu,
            ratio: base_ratio,
            relative_to_baseline: 1.0,
        });
        let eig_rows = (0..count)
            .into_par_iter()
            .map(|i| {
                let (w, u) = weighted_ratio(&an, &retained.eigenvectors[i], s, p)?;
                Ok(WeightedRow {
                    index: Some(i),
                    s,
                    p,
                    weighted: w,
                    unweighted: u,
                    ratio: w / u,
                    relative_to_baseline: (w / u) / base_ratio,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(eig_rows);
    }
    Ok(WeightedStudy { rows, retained: count })
}

/// Exponents of the convolution relation
/// `||f * h||_{M^{r,gamma}} <= C ||f||_{M^{p,u}_{1 (x) nu}} ||h||_{M^{q,t}_{1 (x) 1/nu}}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvExponents {
    pub p: f64,
    pub u: f64,
    pub q: f64,
    pub t: f64,
    pub r: f64,
    pub gamma: f64,
}

impl ConvExponents {
    pub fn validate(&self) -> Result<()> {
        for (name, e) in [
            ("p", self.p),
            ("u", self.u),
            ("q", self.q),
            ("t", self.t),
            ("r", self.r),
            ("gamma", self.gamma),
        ] {
            check_exponent(name, e)?;
        }
        let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
        if (inv(self.u) + inv(self.t) - inv(self.gamma)).abs() > 1e-12 {
            return Err(Error::ExponentConstraint(format!(
                "1/u + 1/t = 1/gamma fails for (u, t, gamma) = ({}, {}, {})",
                self.u, self.t, self.gamma
            )));
        }
        if !young_exponents_ok(self.p, self.q, self.r) {
            return Err(Error::ExponentConstraint(format!(
                "(p, q, r) = ({}, {}, {}) is in neither Young regime",
                self.p, self.q, self.r
            )));
        }
        Ok(())
    }
}

/// Cyclic convolution on Z_L, `(f * h)(x) = sum_y f(y) h(x - y)`.
pub fn cyclic_convolve(f: &Signal, h: &Signal) -> Result<Signal> {
    crate::signal::ensure_same_len(f, h)?;
    let len = f.len();
    let (fs, hs) = (f.as_slice(), h.as_slice());
    let out = (0..len)
        .map(|x| (0..len).map(|y| fs[y] * hs[(x + len - y) % len]).sum())
        .collect();
    Signal::new(out)
}

/// Tabulates `1 (x) nu` on the lattice, with `nu` read as a one-dimensional weight
/// at the centered frequency coordinate.
fn frequency_weight(nu: &WeightSpec, lattice: &LatticeSpec) -> Result<WeightSpec> {
    let (nt, nf) = (lattice.time_count(), lattice.freq_count());
    let mut values = Vec::with_capacity(nt * nf);
    for _k in 0..nt {
        for n in 0..nf {
            let w = lattice.beta() as f64 * centered(n, nf) as f64;
            values.push(nu.eval(n, w, 0.0)?);
        }
    }
    Ok(WeightSpec::Tabulated { values })
}

/// Ratio `||f * h||_{M^{r,gamma}} / (||f||_{M^{p,u}_{1 (x) nu}} ||h||_{M^{q,t}_{1 (x) 1/nu}})`.
pub fn convolution_relation_check(
    f: &Signal,
    h: &Signal,
    g: &Signal,
    lattice: &LatticeSpec,
    exps: &ConvExponents,
    nu: &WeightSpec,
) -> Result<RatioReport> {
    exps.validate()?;
    convolution_relation_with(&GaborAnalyzer::new(g, lattice)?, f, h, exps, nu)
}

/// As [`convolution_relation_check`] with a prebuilt analyzer.
pub fn convolution_relation_with(
    an: &GaborAnalyzer,
    f: &Signal,
    h: &Signal,
    exps: &ConvExponents,
    nu: &WeightSpec,
) -> Result<RatioReport> {
    exps.validate()?;
    let conv = cyclic_convolve(f, h)?;
    let lat = an.lattice();
    let m_f = frequency_weight(nu, lat)?;
    let m_h = frequency_weight(&nu.reciprocal(), lat)?;
    let lhs = an.modulation_qnorm(&conv, exps.r, exps.gamma, &WeightSpec::Constant)?.value;
    let nf = an.modulation_qnorm(f, exps.p, exps.u, &m_f)?.value;
    let nh = an.modulation_qnorm(h, exps.q, exps.t, &m_h)?.value;
    let rhs = nf * nh;
    Ok(RatioReport {
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}
