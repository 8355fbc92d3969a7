mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use tflocal::diagnostics::{modulation_qnorm, n_term_profile};
use tflocal::gabor::{canonical_dual, gabor_coeffs, reconstruct, stft, CoefficientTable};
use tflocal::generators::gaussian_window;
use tflocal::quantize::{localization_build, weyl_build};
use tflocal::scenario::{build_scenario, list_presets, lookup};
use tflocal::seq::{holder_check, lpq_norm, rearrange_desc, sigma_profile, young_check};
use tflocal::signal::{commutation_phase, tf_shift};
use tflocal::spectral::{eig, eig_tolerance, singular_values};
use tflocal::{LatticeSpec, Operator, Signal, SymbolGrid, TfPoint, WeightSpec};

const RATIO_SLACK: f64 = 1.0 + 1e-12;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

fn sig(len: usize, seed: u64) -> Signal {
    signal(&random_vec(len, &mut rng(seed)))
}

/// `(alpha, beta, L)` with both steps dividing `L`.
fn lattice_params() -> impl Strategy<Value = (usize, usize, usize)> {
    (1usize..5, 1usize..5, 2usize..5).prop_map(|(a, b, m)| (a, b, a * b * m))
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn tf_shift_is_unitary(len in 2usize..24, k in -40i64..40, n in -40i64..40, seed: u64) {
        let f = sig(len, seed);
        let g = tf_shift(&f, TfPoint::new(k, n, len));
        prop_assert!((g.norm2() - f.norm2()).abs() <= 1e-12 * f.norm2());
    }

    #[test]
    fn tf_shifts_commute_up_to_phase(len in 2usize..20, pts in prop::array::uniform4(-30i64..30), seed: u64) {
        let f = sig(len, seed);
        let z = TfPoint::new(pts[0], pts[1], len);
        let w = TfPoint::new(pts[2], pts[3], len);
        let lhs = tf_shift(&tf_shift(&f, w), z);
        let rhs = tf_shift(&tf_shift(&f, z), w).scaled(commutation_phase(z, w, len));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-11);
    }

    #[test]
    fn stft_is_linear(len in 2usize..16, seed: u64, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut r = rng(seed);
        let f1 = signal(&random_vec(len, &mut r));
        let f2 = signal(&random_vec(len, &mut r));
        let g = signal(&random_vec(len, &mut r));
        let (ca, cb) = (Complex64::new(a, b), Complex64::new(b, -a));
        let lhs = stft(&f1.scaled(ca).add(&f2.scaled(cb)), &g).unwrap();
        let s1 = stft(&f1, &g).unwrap();
        let s2 = stft(&f2, &g).unwrap();
        for (i, v) in lhs.values().iter().enumerate() {
            prop_assert!((v - (ca * s1.values()[i] + cb * s2.values()[i])).norm() <= 1e-10);
        }
    }

    #[test]
    fn dual_window_reconstructs((a, b, len) in lattice_params(), seed: u64) {
        let g = gaussian_window(len, (len as f64).sqrt(), None);
        let lat = LatticeSpec::new(a, b, len).unwrap();
        prop_assume!(a * b < len);
        let f = sig(len, seed);
        let Ok(dual) = canonical_dual(&g, &lat) else { return Ok(()); };
        let back = reconstruct(&gabor_coeffs(&f, &g, &lat).unwrap(), &dual, &lat).unwrap();
        prop_assert!(back.max_abs_diff(&f) <= 1e-8 * f.norm2());
    }

    #[test]
    fn tail_profile_nonincreasing((a, b, len) in lattice_params(), seed: u64) {
        let lat = LatticeSpec::new(a, b, len).unwrap();
        let table = CoefficientTable::new(lat, random_vec(lat.point_count(), &mut rng(seed))).unwrap();
        let sorted = rearrange_desc(&table);
        prop_assert!(sorted.values().windows(2).all(|w| w[0] >= w[1]));
        let prof = sigma_profile(&sorted);
        prop_assert!(prof.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(*prof.last().unwrap(), 0.0);
    }

    #[test]
    fn n_term_profile_nonincreasing(seed: u64) {
        let g = gaussian_window(16, 4.0, None);
        let lat = LatticeSpec::new(2, 2, 16).unwrap();
        let rep = n_term_profile(&sig(16, seed), &g, &lat, (2, 40)).unwrap();
        prop_assert!(rep.sigma_profile.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn modulation_norm_is_homogeneous(seed: u64, lam in 0.01f64..50.0, pi in 0usize..4, s in 0.0f64..2.0) {
        let p = [2.0, 1.0, 0.5, 0.25][pi];
        let g = gaussian_window(12, 12f64.sqrt(), None);
        let lat = LatticeSpec::new(2, 2, 12).unwrap();
        let f = sig(12, seed);
        let m = WeightSpec::Polynomial { s };
        let base = modulation_qnorm(&f, &g, &lat, p, p, &m).unwrap().value;
        let scaled = modulation_qnorm(&f.scaled(Complex64::new(0.0, lam)), &g, &lat, p, p, &m).unwrap().value;
        prop_assert!((scaled - lam * base).abs() <= 1e-10 * lam * base);
    }

    #[test]
    fn mixed_norm_decreases_in_exponent((a, b, len) in lattice_params(), seed: u64, i in 0usize..3) {
        let ps = [0.25, 0.5, 1.0, 2.0];
        let lat = LatticeSpec::new(a, b, len).unwrap();
        let table = CoefficientTable::new(lat, random_vec(lat.point_count(), &mut rng(seed))).unwrap();
        let small = lpq_norm(&table, ps[i], ps[i], &WeightSpec::Constant).unwrap();
        let large = lpq_norm(&table, ps[i + 1], ps[i + 1], &WeightSpec::Constant).unwrap();
        prop_assert!(large <= small * RATIO_SLACK);
        let inner_only = lpq_norm(&table, ps[i + 1], ps[i], &WeightSpec::Constant).unwrap();
        prop_assert!(inner_only <= small * RATIO_SLACK);
    }

    #[test]
    fn young_ratio_at_most_one(seed: u64, la in 1usize..20, lb in 1usize..20, case in 0usize..4, s in 0.0f64..2.0) {
        let (p, q, r) = [(1.0, 1.0, 1.0), (1.0, 2.0, 2.0), (2.0, 1.0, 2.0), (0.5, 0.5, 0.5)][case];
        let mut rr = rng(seed);
        let a = random_vec(la, &mut rr);
        let b = random_vec(lb, &mut rr);
        let m = WeightSpec::Polynomial { s };
        let rep = young_check(&a, &b, p, q, r, &m, &m).unwrap();
        prop_assert!(rep.ratio <= RATIO_SLACK, "ratio {}", rep.ratio);
    }

    #[test]
    fn holder_ratio_at_most_one(seed: u64, len in 1usize..30, case in 0usize..3, s in -2.0f64..2.0) {
        let (p, q, r) = [(2.0, 2.0, 1.0), (1.0, 1.0, 0.5), (0.5, 1.0, 1.0 / 3.0)][case];
        let mut rr = rng(seed);
        let a = random_vec(len, &mut rr);
        let b = random_vec(len, &mut rr);
        let rep = holder_check(&a, &b, p, q, r, &WeightSpec::Polynomial { s }).unwrap();
        prop_assert!(rep.ratio <= RATIO_SLACK, "ratio {}", rep.ratio);
    }

    #[test]
    fn localization_adjoint_swaps_windows(len in 2usize..10, seed: u64) {
        let mut r = rng(seed);
        let a = random_vec(len * len, &mut r);
        let p1 = signal(&random_vec(len, &mut r));
        let p2 = signal(&random_vec(len, &mut r));
        let abar: Vec<Complex64> = a.iter().map(|z| z.conj()).collect();
        let op = localization_build(&SymbolGrid::new(len, a).unwrap(), &p1, &p2).unwrap();
        let swapped = localization_build(&SymbolGrid::new(len, abar).unwrap(), &p2, &p1).unwrap();
        prop_assert!(op.adjoint().max_abs_diff(&swapped) <= 1e-12);
    }

    #[test]
    fn real_symbol_gives_hermitian_operators(half in 1usize..5, seed: u64) {
        let len = 2 * half + 1;
        let mut r = rng(seed);
        let a: Vec<Complex64> = random_vec(len * len, &mut r).iter().map(|z| Complex64::new(z.re, 0.0)).collect();
        let w = weyl_build(&SymbolGrid::new(len, a.clone()).unwrap()).unwrap();
        prop_assert!(w.is_hermitian());
        let g = signal(&random_vec(len, &mut r));
        let loc = localization_build(&SymbolGrid::new(len, a).unwrap(), &g, &g).unwrap();
        prop_assert!(loc.is_hermitian());
    }

    #[test]
    fn eigen_residuals_within_tolerance(n in 2usize..12, seed: u64, herm: bool) {
        let mut r = rng(seed);
        let m = DMatrix::from_fn(n, n, |_, _| cnormal(&mut r));
        let m = if herm { (&m + m.adjoint()) * Complex64::new(0.5, 0.0) } else { m };
        let op = Operator::raw(m);
        let e = eig(&op).unwrap();
        prop_assert_eq!(e.len(), n);
        prop_assert!(e.max_residual() <= eig_tolerance(&op));
        if herm {
            prop_assert!(e.eigenvalues.iter().all(|z| z.im.abs() <= 1e-10));
        }
    }

    #[test]
    fn singular_values_carry_frobenius_energy(n in 1usize..12, seed: u64) {
        let mut r = rng(seed);
        let op = Operator::raw(DMatrix::from_fn(n, n, |_, _| cnormal(&mut r)));
        let s2: f64 = singular_values(&op).iter().map(|s| s * s).sum();
        let f2 = op.frobenius().powi(2);
        prop_assert!((s2 - f2).abs() <= 1e-10 * f2);
    }
}

#[test]
fn presets_build_deterministically() {
    for info in list_presets() {
        let spec = lookup(info.name).unwrap();
        let a = build_scenario(&spec, None).unwrap();
        let b = build_scenario(&spec, None).unwrap();
        assert_eq!(a.operator.content_hash(), b.operator.content_hash(), "{}", info.name);
        assert_eq!(a.phi1.max_abs_diff(&b.phi1), 0.0);
    }
}
