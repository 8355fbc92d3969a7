//! Built-in invariant suites run by `tflocal verify`.
//!
//! Fast suites use L <= 16; the full level adds the L = 32, 33 and 63 instances.
//! Suites run in a fixed order and all run even after a failure, so the report
//! names the first failing assertion in that order.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::diagnostics::{
    baseline_signal, convolution_relation_with, eigen_decay_study_with, weighted_decay_study, ConvExponents,
    GaborAnalyzer, StudyConfig,
};
use crate::error::Result;
use crate::gabor::{canonical_dual, frame_bounds, frame_operator, gabor_coeffs, reconstruct, tight_window, CoefficientTable, LatticeSpec};
use crate::generators::gaussian_window;
use crate::operator::{hermitian_asymmetry, Operator};
use crate::quantize::{
    correspondence_constant, cross_wigner, cyclic_convolve_2d, localization_build, localization_weyl_symbol,
    stft_mag_with_operator, weyl_build, SymbolGrid,
};
use crate::scenario::{build_scenario, list_presets, lookup, ScenarioSpec};
use crate::seq::{holder_check, lpq_norm, stechkin_ratio, young_check, SortedMagnitudes, WeightSpec};
use crate::signal::{commutation_phase, dft, dft_reference, idft, tf_shift, translate, Signal, TfPoint};
use crate::spectral::{eig, eig_tolerance, singular_values};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

/// Full-grid STFT implementation under test.
pub type StftImpl = fn(&Signal, &Signal) -> Result<CoefficientTable>;

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn total(&self) -> usize {
        self.passed + self.failures.len()
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::ok)
    }

    /// `(suite, assertion)` of the first failure in suite order.
    pub fn first_failure(&self) -> Option<(&'static str, &str)> {
        self.suites
            .iter()
            .find_map(|s| s.failures.first().map(|f| (s.name, f.as_str())))
    }
}

struct Suite {
    name: &'static str,
    passed: usize,
    failures: Vec<String>,
}

impl Suite {
    fn check(&mut self, label: impl Into<String>, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failures.push(label.into());
        }
    }

    fn check_le(&mut self, label: &str, value: f64, bound: f64) {
        self.check(format!("{label}: {value:e} <= {bound:e}"), value <= bound);
    }

    fn check_ge(&mut self, label: &str, value: f64, bound: f64) {
        self.check(format!("{label}: {value:e} >= {bound:e}"), value >= bound);
    }
}

type SuiteFn = fn(&mut Suite, StftImpl) -> Result<()>;

fn run_suite(name: &'static str, f: SuiteFn, stft: StftImpl) -> SuiteResult {
    let mut s = Suite {
        name,
        passed: 0,
        failures: Vec::new(),
    };
    if let Err(e) = f(&mut s, stft) {
        s.failures.push(format!("unexpected error: {e}"));
    }
    SuiteResult {
        name: s.name,
        passed: s.passed,
        failures: s.failures,
    }
}

const FAST: &[(&str, SuiteFn)] = &[
    ("stft-oracle", suite_stft_oracle),
    ("dft", suite_dft),
    ("tf-shift", suite_tf_shift),
    ("frames", suite_frames),
    ("reconstruction", suite_reconstruction),
    ("seq-norms", suite_seq_norms),
    ("young-holder", suite_young_holder),
    ("stechkin", suite_stechkin),
    ("wigner", suite_wigner),
    ("weyl", suite_weyl),
    ("localization", suite_localization),
    ("correspondence", suite_correspondence),
    ("kernel-identity", suite_kernel_identity),
    ("spectral", suite_spectral),
    ("presets", suite_presets),
    ("diagnostics", suite_diagnostics),
];

const FULL: &[(&str, SuiteFn)] = &[
    ("preset-spectra", suite_preset_spectra),
    ("correspondence-33", suite_correspondence_33),
    ("decay-separation", suite_decay_separation),
    ("weighted-decay", suite_weighted_decay),
    ("convolution-relation", suite_convolution_relation),
];

pub fn suite_names(level: Level) -> Vec<&'static str> {
    let mut v: Vec<_> = FAST.iter().map(|s| s.0).collect();
    if level == Level::Full {
        v.extend(FULL.iter().map(|s| s.0));
    }
    v
}

/// Runs the suites of `level` with the library STFT.
pub fn run(level: Level) -> VerifyReport {
    run_with(level, crate::gabor::stft, |_| {})
}

/// Runs the suites of `level` against `stft`, calling `progress` after each suite.
pub fn run_with(level: Level, stft: StftImpl, mut progress: impl FnMut(&SuiteResult)) -> VerifyReport {
    let mut list: Vec<(&'static str, SuiteFn)> = FAST.to_vec();
    if level == Level::Full {
        list.extend_from_slice(FULL);
    }
    let suites = list
        .into_iter()
        .map(|(name, f)| {
            let r = run_suite(name, f, stft);
            progress(&r);
            r
        })
        .collect();
    VerifyReport { suites }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cnormal(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal))
}

fn random_symbol(len: usize, r: &mut ChaCha8Rng) -> SymbolGrid {
    let v = (0..len * len).map(|_| cnormal(r)).collect();
    SymbolGrid::new(len, v).expect("finite symbol")
}

fn unit_gaussian(len: usize) -> Signal {
    gaussian_window(len, (len as f64).sqrt(), None)
        .normalized()
        .expect("nonzero window")
}

/// Direct O(L^3) evaluation of `sum_t f(t) conj(g(t - k)) e^{-2 pi i t n / L}`.
fn direct_stft(f: &Signal, g: &Signal) -> Vec<Complex64> {
    let len = f.len();
    let mut out = Vec::with_capacity(len * len);
    for k in 0..len {
        for n in 0..len {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..len {
                let ang = -2.0 * PI * ((t * n) % len) as f64 / len as f64;
                acc += f.as_slice()[t] * g.as_slice()[(t + len - k) % len].conj() * Complex64::from_polar(1.0, ang);
            }
            out.push(acc);
        }
    }
    out
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn suite_stft_oracle(s: &mut Suite, stft: StftImpl) -> Result<()> {
    let mut r = rng(101);
    for len in [8, 16] {
        for trial in 0..10 {
            let f = Signal::random(len, &mut r);
            let g = Signal::random(len, &mut r);
            let fast = stft(&f, &g)?;
            let err = max_diff(fast.values(), &direct_stft(&f, &g));
            s.check_le(&format!("L={len} trial {trial} max |V - direct|"), err, 1e-12);
        }
        let f = Signal::random(len, &mut r);
        let g = Signal::random(len, &mut r);
        let v = stft(&f, &g)?;
        let z = TfPoint::new(3, 5, len);
        let inner = f.inner(&tf_shift(&g, z));
        s.check_le(
            &format!("L={len} V_g f(z) = <f, pi(z) g>"),
            (v.get(z.k, z.n) - inner).norm(),
            1e-12,
        );
    }
    Ok(())
}

fn suite_dft(s: &mut Suite, _: StftImpl) -> Result<()> {
    let mut r = rng(102);
    for len in [2, 5, 8, 12, 16] {
        let f = Signal::random(len, &mut r);
        let fast = dft(&f);
        s.check_le(
            &format!("L={len} fft vs direct"),
            fast.max_abs_diff(&dft_reference(&f)),
            1e-12,
        );
        s.check_le(&format!("L={len} inverse"), idft(&fast).max_abs_diff(&f), 1e-12);
        let e = (fast.norm2().powi(2) - len as f64 * f.norm2().powi(2)).abs();
        s.check_le(&format!("L={len} Plancherel"), e, 1e-10);
    }
    Ok(())
}

fn suite_tf_shift(s: &mut Suite, _: StftImpl) -> Result<()> {
    let mut r = rng(103);
    let len = 12;
    let f = Signal::random(len, &mut r);
    for _ in 0..10 {
        let z = TfPoint::new(r.random_range(0..24), r.random_range(0..24), len);
        let w = TfPoint::new(r.random_range(0..24), r.random_range(0..24), len);
        let fz = tf_shift(&f, z);
        s.check_le("unitary", (fz.norm2() - f.norm2()).abs(), 1e-12);
        let lhs = tf_shift(&tf_shift(&f, w), z);
        let rhs = tf_shift(&tf_shift(&f, z), w).scaled(commutation_phase(z, w, len));
        s.check_le("commutation relation", lhs.max_abs_diff(&rhs), 1e-12);
    }
    s.check_le("translation period", translate(&f, len as i64).max_abs_diff(&f), 0.0);
    Ok(())
}

fn suite_frames(s: &mut Suite, _: StftImpl) -> Result<()> {
    let g = unit_gaussian(12);
    for (a, b) in [(1, 1), (2, 2), (3, 2), (4, 3)] {
        let lat = LatticeSpec::new(a, b, 12)?;
        let sop = frame_operator(&g, &lat)?;
        let (lo, hi) = frame_bounds(&sop)?;
        s.check(format!("({a},{b}) bounds {lo:e} <= {hi:e} positive"), lo > 0.0 && lo <= hi);
        let t = tight_window(&g, &lat)?;
        let st = frame_operator(&t, &lat)?;
        s.check_le(
            &format!("({a},{b}) tight frame operator is identity"),
            st.max_abs_diff(&Operator::identity(12)),
            1e-10,
        );
        let d = canonical_dual(&g, &lat)?;
        s.check_le(&format!("({a},{b}) S dual = g"), sop.apply(&d).max_abs_diff(&g), 1e-10);
    }
    let delta = Signal::delta(8, 0);
    let (lo, hi) = frame_bounds(&frame_operator(&delta, &LatticeSpec::full(8)?)?)?;
    s.check(format!("delta window on full lattice has A = B = L ({lo}, {hi})"), (lo - 8.0).abs() < 1e-12 && (hi - 8.0).abs() < 1e-12);
    Ok(())
}

fn suite_reconstruction(s: &mut Suite, _: StftImpl) -> Result<()> {
    let mut r = rng(105);
    let g = gaussian_window(16, 3.0, Some(8.5));
    let lat = LatticeSpec::new(4, 4, 16)?;
    let dual = canonical_dual(&g, &lat)?;
    let tight = tight_window(&g, &lat)?;
    for trial in 0..5 {
        let f = Signal::random(16, &mut r);
        let back = reconstruct(&gabor_coeffs(&f, &g, &lat)?, &dual, &lat)?;
        s.check_le(
            &format!("trial {trial} relative reconstruction error"),
            back.sub(&f).norm2() / f.norm2(),
            1e-10,
        );
        let c = gabor_coeffs(&f, &tight, &lat)?;
        s.check_le(
            &format!("trial {trial} Parseval"),
            (c.energy() - f.norm2().powi(2)).abs() / f.norm2().powi(2),
            1e-10,
        );
    }
    Ok(())
}

fn random_table(lat: LatticeSpec, r: &mut ChaCha8Rng) -> Result<CoefficientTable> {
    CoefficientTable::new(lat, (0..lat.point_count()).map(|_| cnormal(r)).collect())
}

fn suite_seq_norms(s: &mut Suite, _: StftImpl) -> Result<()> {
    let mut r = rng(106);
    let lat = LatticeSpec::new(2, 4, 16)?;
    for _ in 0..5 {
        let c = random_table(lat, &mut r)?;
        let fro = c.energy().sqrt();
        s.check_le("l^{2,2} is Frobenius", (lpq_norm(&c, 2.0, 2.0, &WeightSpec::Constant)? - fro).abs(), 1e-12 * fro);
        let n1 = lpq_norm(&c, 0.5, 1.0, &WeightSpec::Constant)?;
        let n2 = lpq_norm(&c, 1.0, 2.0, &WeightSpec::Constant)?;
        s.check("monotone in exponents", n2 <= n1 * (1.0 + 1e-12));
        let lam = Complex64::new(-1.5, 2.0);
        let w = WeightSpec::Product { s: 1.0, t: 2.0 };
        let a = lpq_norm(&c.scaled(lam), 0.5, 0.75, &w)?;
        let b = lam.norm() * lpq_norm(&c, 0.5, 0.75, &w)?;
        s.check_le("homogeneous", (a - b).abs(), 1e-12 * b);
    }
    Ok(())
}

fn nonneg_seq(len: usize, r: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..len).map(|_| Complex64::new(r.random::<f64>(), 0.0)).collect()
}

fn suite_young_holder(s: &mut Suite, _: StftImpl) -> Result<()> {
    let mut r = rng(107);
    let one = WeightSpec::Constant;
    for trial in 0..20 {
        let a = nonneg_seq(r.random_range(1..12), &mut r);
        let b = nonneg_seq(r.random_range(1..12), &mut r);
        let y1 = young_check(&a, &b, 1.0, 2.0, 2.0, &one, &one)?;
        s.check_le(&format!("trial {trial} Young (1,2,2)"), y1.ratio, 1.0 + 1e-12);
        let y2 = young_check(&a, &b, 0.5, 0.5, 0.5, &one, &one)?;
        s.check_le(&format!("trial {trial} Young (1/2,1/2,1/2)"), y2.ratio, 1.0 + 1e-12);
        let v = WeightSpec::Polynomial { s: 1.0 };
        let y3 = young_check(&a, &b, 1.0, 1.0, 1.0, &v, &v)?;
        s.check_le(&format!("trial {trial} weighted Young"), y3.ratio, 1.0 + 1e-12);
        let c = nonneg_seq(a.len(), &mut r);
        let h = holder_check(&a, &c, 3.0, 1.5, 1.0, &v)?;
        s.check_le(&format!("trial {trial} Holder"), h.ratio, 1.0 + 1e-12);
    }
    Ok(())
}

fn suite_stechkin(s: &mut Suite, _: StftImpl) -> Result<()> {
    let geometric = SortedMagnitudes::new((0..40).map(|m| 0.8f64.powi(m)).collect())?;
    let power = SortedMagnitudes::new((1..=40).map(|m| (m as f64).powf(-1.5)).collect())?;
    for (fam, seq) in [("geometric", &geometric), ("power-law", &power)] {
        for p in [0.5, 1.0, 1.5] {
            let rep = stechkin_ratio(seq, p)?;
            s.check(
                format!("{fam} p={p} ratio {} in [0.1, 10]", rep.ratio),
                (0.1..=10.0).contains(&rep.ratio),
            );
        }
    }
    Ok(())
}

fn suite_wigner(s: &mut Suite, _: StftImpl) -> Result<()> {
    let mut r = rng(109);
    for len in [3, 5, 9, 15] {
        let f = Signal::random(len, &mut r);
        let g = Signal::random(len, &mut r);
        let w = cross_wigner(&f, &f)?;
        s.check_le(&format!("L={len} auto-Wigner real"), w.max_imag(), 1e-12);
        let wfg = cross_wigner(&f, &g)?;
        let wgf = cross_wigner(&g, &f)?;
        s.check_le(&format!("L={len} W(g,f) = conj W(f,g)"), wgf.max_abs_diff(&wfg.conj()), 1e-12);
        let mut marg = 0.0f64;
        for k in 0..len {
            let sum: Complex64 = wfg.row(k).iter().sum();
            let want = f.as_slice()[k] * g.as_slice()[k].conj() * len as f64;
            marg = marg.max((sum - want).norm());
        }
        s.check_le(&format!("L={len} time marginal"), marg, 1e-10);
    }
    Ok(())
}

fn suite_weyl(s: &mut Suite, _: StftImpl) -> Result<()> {
    let mut r = rng(110);
    for len in [3, 5, 7, 11] {
        let one = weyl_build(&SymbolGrid::constant(len, Complex64::new(1.0, 0.0)))?;
        s.check_le(&format!("L={len} unit symbol"), one.max_abs_diff(&Operator::identity(len)), 1e-12);
        let sigma = random_symbol(len, &mut r);
        let op = weyl_build(&sigma)?;
        let f = Signal::random(len, &mut r);
        let g = Signal::random(len, &mut r);
        let lhs = op.apply(&f).inner(&g);
        let w = cross_wigner(&g, &f)?;
        let rhs: Complex64 = sigma
            .values()
            .iter()
            .zip(w.values())
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            / len as f64;
        s.check_le(&format!("L={len} weak pairing"), (lhs - rhs).norm(), 1e-10);
        let adj = weyl_build(&sigma.conj())?;
        s.check_le(&format!("L={len} adjoint symbol"), op.adjoint().max_abs_diff(&adj), 1e-12);
    }
    Ok(())
}

fn suite_localization(s: &mut Suite, _: StftImpl) -> Result<()> {
    let mut r = rng(111);
    for len in [6, 9, 16] {
        let g = unit_gaussian(len);
        let one = SymbolGrid::constant(len, Complex64::new(1.0, 0.0));
        let a = localization_build(&one, &g, &g)?;
        s.check_le(&format!("L={len} unit symbol"), a.max_abs_diff(&Operator::identity(len)), 1e-10);
        let sym = random_symbol(len, &mut r);
        let p1 = Signal::random(len, &mut r);
        let p2 = Signal::random(len, &mut r);
        let lhs = localization_build(&sym, &p1, &p2)?.adjoint();
        let rhs = localization_build(&sym.conj(), &p2, &p1)?;
        s.check_le(&format!("L={len} adjoint"), lhs.max_abs_diff(&rhs), 1e-12);
        let pos = SymbolGrid::from_fn(len, |_, _| Complex64::new(r.random::<f64>(), 0.0))?;
        let op = localization_build(&pos, &g, &g)?;
        s.check_le(&format!("L={len} real symbol Hermitian"), hermitian_asymmetry(op.matrix()), 1e-12);
        let e = eig(&op)?;
        let min = e.eigenvalues.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        s.check_ge(&format!("L={len} nonnegative symbol PSD"), min, -1e-10);
    }
    Ok(())
}

fn suite_correspondence(s: &mut Suite, _: StftImpl) -> Result<()> {
    let mut r = rng(112);
    for len in [3, 5, 7] {
        let g = unit_gaussian(len);
        let h = Signal::random(len, &mut r);
        for (p1, p2) in [(&g, &g), (&g, &h)] {
            let a = random_symbol(len, &mut r);
            let loc = localization_build(&a, p1, p2)?;
            let weyl = weyl_build(&localization_weyl_symbol(&a, p1, p2)?)?;
            s.check_le(&format!("L={len} A_a = L_sigma"), loc.max_abs_diff(&weyl), 1e-9);
        }
        // unconstrained least-squares fit of the scalar
        let a = random_symbol(len, &mut r);
        let x = weyl_build(&cyclic_convolve_2d(&a, &cross_wigner(&g, &g)?)?)?;
        let y = localization_build(&a, &g, &g)?;
        let num: Complex64 = x.matrix().iter().zip(y.matrix().iter()).map(|(u, v)| u.conj() * v).sum();
        let den: f64 = x.matrix().iter().map(|u| u.norm_sqr()).sum();
        let c = num / den;
        s.check_le(
            &format!("L={len} fitted constant times L"),
            (c * len as f64 - 1.0).norm(),
            1e-12,
        );
        s.check_le(
            &format!("L={len} library constant"),
            (correspondence_constant(len) - c.re).abs(),
            1e-12,
        );
    }
    Ok(())
}

fn suite_kernel_identity(s: &mut Suite, _: StftImpl) -> Result<()> {
    let mut r = rng(113);
    let len = 5;
    let g = Signal::random(len, &mut r);
    let sigma = random_symbol(len, &mut r);
    let op = weyl_build(&sigma)?;
    for _ in 0..10 {
        let z = TfPoint::new(r.random_range(0..5), r.random_range(0..5), len);
        let w = TfPoint::new(r.random_range(0..5), r.random_range(0..5), len);
        let (lhs, rhs) = stft_mag_with_operator(&op, &sigma, &g, z, w)?;
        s.check_le(&format!("z={z:?} w={w:?}"), (lhs - rhs).abs(), 1e-9);
    }
    Ok(())
}

fn random_matrix_op(n: usize, r: &mut ChaCha8Rng) -> Operator {
    Operator::raw(nalgebra::DMatrix::from_fn(n, n, |_, _| cnormal(r)))
}

fn suite_spectral(s: &mut Suite, _: StftImpl) -> Result<()> {
    let mut r = rng(114);
    for n in [1, 2, 5, 8, 16] {
        let a = random_matrix_op(n, &mut r);
        let e = eig(&a)?;
        s.check_le(&format!("n={n} general residuals"), e.max_residual(), eig_tolerance(&a));
        let h = Operator::raw(a.matrix() + a.matrix().adjoint());
        let eh = eig(&h)?;
        s.check_le(&format!("n={n} Hermitian residuals"), eh.max_residual(), eig_tolerance(&h));
        let im = eh.eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        s.check_le(&format!("n={n} Hermitian eigenvalues real"), im, 1e-10);
        let sv: f64 = singular_values(&a).iter().map(|x| x * x).sum();
        let fro = a.frobenius().powi(2);
        s.check_le(&format!("n={n} sum s_k^2 = Frobenius^2"), (sv - fro).abs() / fro, 1e-10);
        let tr: Complex64 = e.eigenvalues.iter().sum();
        s.check_le(&format!("n={n} eigenvalue sum is trace"), (tr - a.matrix().trace()).norm(), 1e-9 * a.frobenius());
    }
    Ok(())
}

/// Quantize-module invariants on a built scenario; shared by the preset suites.
fn check_scenario(s: &mut Suite, spec: &ScenarioSpec) -> Result<()> {
    let b = build_scenario(spec, None)?;
    let tag = &spec.name;
    let again = build_scenario(spec, None)?;
    s.check(format!("{tag} deterministic"), b.operator.content_hash() == again.operator.content_hash());
    let adj = localization_build(&b.symbol.conj(), &b.phi2, &b.phi1)?;
    s.check_le(&format!("{tag} adjoint identity"), b.operator.adjoint().max_abs_diff(&adj), 1e-12);
    let same_windows = b.phi1.max_abs_diff(&b.phi2) == 0.0;
    if same_windows && b.symbol.is_real() {
        s.check(format!("{tag} Hermitian"), b.operator.is_hermitian());
    }
    let (lo, _) = frame_bounds(&frame_operator(&b.phi1, &b.lattice)?)?;
    s.check(format!("{tag} window/lattice is a frame (A = {lo:e})"), lo > 0.0);
    Ok(())
}

fn suite_presets(s: &mut Suite, _: StftImpl) -> Result<()> {
    s.check("at least six presets", list_presets().len() >= 6);
    for p in list_presets() {
        let spec = lookup(p.name)?;
        s.check(format!("{} validates", p.name), spec.validate().is_ok());
    }
    s.check("unknown preset rejected", lookup("no-such-preset").is_err());
    check_scenario(s, &lookup("delta-window-8")?)?;
    Ok(())
}

fn suite_diagnostics(s: &mut Suite, _: StftImpl) -> Result<()> {
    let mut r = rng(116);
    let g = unit_gaussian(15);
    let lat = LatticeSpec::new(3, 3, 15)?;
    let an = GaborAnalyzer::new(&g, &lat)?;
    for _ in 0..5 {
        let f = Signal::random(15, &mut r);
        let n2 = an.modulation_qnorm(&f, 2.0, 2.0, &WeightSpec::Constant)?.value;
        s.check_le("Parseval norm", (n2 - f.norm2()).abs(), 1e-10 * f.norm2());
        let lam = cnormal(&mut r);
        let a = an.modulation_qnorm(&f.scaled(lam), 0.5, 0.5, &WeightSpec::Constant)?.value;
        let b = lam.norm() * an.modulation_qnorm(&f, 0.5, 0.5, &WeightSpec::Constant)?.value;
        s.check_le("homogeneous", (a - b).abs(), 1e-12 * b);
        let rep = an.n_term_profile(&f, (2, 20))?;
        s.check("profile nonincreasing", rep.sigma_profile.windows(2).all(|w| w[0] >= w[1]));
    }
    let id = eig(&Operator::identity(15))?;
    let cfg = StudyConfig {
        fit_range: (2, 20),
        ..StudyConfig::default()
    };
    let study = eigen_decay_study_with(&id, &g, &lat, &cfg)?;
    s.check("identity flagged non-compact-like", study.non_compact_like);
    let sym = SymbolGrid::from_fn(15, |k, n| {
        let (x, w) = (crate::signal::centered(k, 15) as f64, crate::signal::centered(n, 15) as f64);
        Complex64::new((-PI * (x * x + w * w) / 6.25).exp(), 0.0)
    })?;
    let a = localization_build(&sym, &g, &g)?;
    let e = eig(&a)?;
    let st = eigen_decay_study_with(&e, &g, &lat, &cfg)?;
    let kept: f64 = st.retained.eigenvalues.iter().map(|z| z.norm_sqr()).sum();
    s.check_le("retained eigenvalue energy <= Frobenius^2", kept, a.frobenius().powi(2) + 1e-8);
    Ok(())
}

fn suite_preset_spectra(s: &mut Suite, _: StftImpl) -> Result<()> {
    for p in list_presets() {
        let spec = lookup(p.name)?;
        check_scenario(s, &spec)?;
        let b = build_scenario(&spec, None)?;
        let e = eig(&b.operator)?;
        let tag = p.name;
        s.check_le(&format!("{tag} residuals"), e.max_residual(), eig_tolerance(&b.operator));
        let sv: f64 = singular_values(&b.operator).iter().map(|x| x * x).sum();
        let fro = b.operator.frobenius().powi(2);
        s.check_le(&format!("{tag} sum s_k^2 = Frobenius^2"), (sv - fro).abs() / fro, 1e-10);
        if b.operator.is_hermitian() {
            let im = e.eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            s.check_le(&format!("{tag} eigenvalues real"), im, 1e-10);
        }
        if tag == "disk-33" {
            let max = e.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            let min = e.eigenvalues.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
            s.check_le("disk-33 max eigenvalue", max, b.phi1.norm2().powi(2) + 1e-8);
            s.check_ge("disk-33 min eigenvalue", min, -1e-10);
        }
        if tag == "antiwick-gauss-63" {
            let min = e.eigenvalues.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
            s.check_ge("antiwick-gauss-63 PSD", min, -1e-10);
        }
    }
    for len in [33, 63] {
        let g = unit_gaussian(len);
        let one = localization_build(&SymbolGrid::constant(len, Complex64::new(1.0, 0.0)), &g, &g)?;
        s.check_le(&format!("L={len} unit symbol"), one.max_abs_diff(&Operator::identity(len)), 1e-10);
    }
    Ok(())
}

fn suite_correspondence_33(s: &mut Suite, _: StftImpl) -> Result<()> {
    let mut r = rng(118);
    let g = unit_gaussian(33);
    let a = random_symbol(33, &mut r);
    let loc = localization_build(&a, &g, &g)?;
    let weyl = weyl_build(&localization_weyl_symbol(&a, &g, &g)?)?;
    s.check_le("L=33 A_a = L_sigma", loc.max_abs_diff(&weyl), 1e-9);
    Ok(())
}

/// Eigenfunction and baseline decay numbers on the Gaussian-symbol preset.
#[derive(Clone, Debug)]
pub struct SeparationSummary {
    pub retained: usize,
    pub min_exponent: Option<f64>,
    pub max_tail_ratio: f64,
    pub baseline_exponent: Option<f64>,
    pub baseline_tail_ratio: f64,
    pub tail_index: usize,
}

pub fn decay_separation_summary(spec: &ScenarioSpec) -> Result<SeparationSummary> {
    let b = build_scenario(spec, None)?;
    let e = eig(&b.operator)?;
    let cfg = StudyConfig {
        fit_range: spec.options.fit_range,
        floor: spec.options.floor,
        top_k: spec.options.top_k,
        seed: spec.seed,
    };
    let st = eigen_decay_study_with(&e, &b.phi1, &b.lattice, &cfg)?;
    let tail_index = 64.min(b.lattice.point_count());
    let min_exponent = st
        .reports
        .iter()
        .map(|r| r.decay.fitted_exponent)
        .collect::<Option<Vec<f64>>>()
        .and_then(|v| v.into_iter().reduce(f64::min));
    Ok(SeparationSummary {
        retained: st.reports.len(),
        min_exponent,
        max_tail_ratio: st
            .reports
            .iter()
            .map(|r| r.decay.relative_tail(tail_index))
            .fold(0.0, f64::max),
        baseline_exponent: st.baseline.decay.fitted_exponent,
        baseline_tail_ratio: st.baseline.decay.relative_tail(tail_index),
        tail_index,
    })
}

fn suite_decay_separation(s: &mut Suite, _: StftImpl) -> Result<()> {
    let sum = decay_separation_summary(&lookup("antiwick-gauss-63")?)?;
    let nan = f64::NAN;
    s.check(format!("retained eigenfunctions ({})", sum.retained), sum.retained > 0);
    s.check_ge("min eigenfunction exponent", sum.min_exponent.unwrap_or(nan), 2.0);
    s.check_le("max eigenfunction tail ratio", sum.max_tail_ratio, 1e-4);
    s.check_le("baseline exponent", sum.baseline_exponent.unwrap_or(nan), 0.8);
    s.check_ge("baseline tail ratio", sum.baseline_tail_ratio, 0.3);
    let sep = sum.min_exponent.unwrap_or(nan) - sum.baseline_exponent.unwrap_or(nan);
    s.check_ge("exponent separation", sep, 1.5);
    Ok(())
}

fn suite_weighted_decay(s: &mut Suite, _: StftImpl) -> Result<()> {
    for (name, s_list, bound) in [("antiwick-gauss-63", vec![1.0, 2.0], 0.2), ("power-decay-63", vec![1.0], 1.0)] {
        let spec = lookup(name)?;
        let b = build_scenario(&spec, None)?;
        let e = eig(&b.operator)?;
        let cfg = StudyConfig {
            top_k: Some(1),
            seed: spec.seed,
            ..StudyConfig::default()
        };
        let st = weighted_decay_study(&e, &b.phi1, &b.lattice, &s_list, 1.0, &cfg)?;
        for row in st.rows_for(Some(0)) {
            s.check_le(
                &format!("{name} s={} top eigenfunction ratio / baseline ratio", row.s),
                row.relative_to_baseline,
                bound,
            );
        }
    }
    Ok(())
}

/// Ratios of the convolution relation on `trials` random unit-norm pairs at L = 32.
pub fn convolution_batch(exps: &ConvExponents, trials: usize, seed: u64) -> Result<Vec<f64>> {
    let len = 32;
    let g = unit_gaussian(len);
    let lat = LatticeSpec::new(4, 4, len)?;
    let an = GaborAnalyzer::new(&g, &lat)?;
    let mut r = rng(seed);
    (0..trials)
        .map(|_| {
            let f = Signal::random_unit(len, &mut r);
            let h = Signal::random_unit(len, &mut r);
            Ok(convolution_relation_with(&an, &f, &h, exps, &WeightSpec::Constant)?.ratio)
        })
        .collect()
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

pub const CONV_BANACH: ConvExponents = ConvExponents {
    p: 1.0,
    u: 2.0,
    q: 1.0,
    t: 2.0,
    r: 1.0,
    gamma: 1.0,
};

pub const CONV_QUASI: ConvExponents = ConvExponents {
    p: 0.5,
    u: 1.0,
    q: 0.5,
    t: 1.0,
    r: 0.5,
    gamma: 0.5,
};

fn suite_convolution_relation(s: &mut Suite, _: StftImpl) -> Result<()> {
    for (tag, exps) in [("banach", CONV_BANACH), ("quasi", CONV_QUASI)] {
        let batch = convolution_batch(&exps, 100, 808)?;
        let again = convolution_batch(&exps, 100, 808)?;
        let same = batch.iter().zip(&again).all(|(a, b)| a.to_bits() == b.to_bits());
        s.check(format!("{tag} batch reproducible"), same);
        let max = batch.iter().copied().fold(0.0, f64::max);
        let med = median(&batch);
        s.check(format!("{tag} ratios finite"), batch.iter().all(|x| x.is_finite() && *x > 0.0));
        s.check_le(&format!("{tag} max / median"), max / med, 100.0);
        if tag == "quasi" {
            s.check_le("quasi max / median (tight)", max / med, 20.0);
        }
    }
    let g = unit_gaussian(32);
    let lat = LatticeSpec::new(4, 4, 32)?;
    let an = GaborAnalyzer::new(&g, &lat)?;
    let delta = Signal::delta(32, 0);
    let h = baseline_signal(32, 5);
    let rep = convolution_relation_with(&an, &delta, &h, &CONV_BANACH, &WeightSpec::Constant)?;
    s.check(format!("delta factor ratio finite ({})", rep.ratio), rep.ratio.is_finite());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_level_passes() {
        let rep = run(Level::Fast);
        assert!(rep.suites.len() >= 10);
        assert!(rep.all_passed(), "{:?}", rep.first_failure());
    }

    fn conj_sign_stft(f: &Signal, g: &Signal) -> Result<CoefficientTable> {
        let good = crate::gabor::stft(f, g)?;
        let len = f.len();
        // flip the frequency axis: the transform with e^{+2 pi i t n / L}
        let mut out = good.clone();
        for k in 0..len {
            for n in 0..len {
                out.set(k, n, good.get(k, (len - n) % len));
            }
        }
        Ok(out)
    }

    #[test]
    fn wrong_sign_fails_stft_oracle_first() {
        let rep = run_with(Level::Fast, conj_sign_stft, |_| {});
        assert_eq!(rep.first_failure().map(|f| f.0), Some("stft-oracle"));
    }
}
