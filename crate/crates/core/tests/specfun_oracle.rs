#![allow(clippy::excessive_precision)]

mod common;

use approx::{assert_abs_diff_eq, assert_relative_eq};
use proptest::prelude::*;
use raman_memory::specfun::{bessel_i0e, bessel_i1e, bessel_j0, bessel_j1, integrate_adaptive, Integrator};
use raman_memory::Error;

// Reference values computed at 30 digits with an arbitrary-precision library.
const J0_AT_10: f64 = -0.245_935_764_451_348_335_2;
const J1_AT_5: f64 = -0.327_579_137_591_465_222_04;
const I0E_AT_1: f64 = 0.465_759_607_593_640_436_5;
const RESIDUAL_AT_60: f64 = 0.102_791_179_362_638_559_07;
const J0_FIRST_ROOT: f64 = 2.404_825_557_695_772_768_6;

#[test]
fn oracle_agrees_with_high_precision_values() {
    assert_abs_diff_eq!(common::j0(10.0), J0_AT_10, epsilon = 1e-15);
    assert_abs_diff_eq!(common::j1(5.0), J1_AT_5, epsilon = 1e-15);
    assert_relative_eq!(common::scaled_i01(1.0).0, I0E_AT_1, max_relative = 1e-15);
}

#[test]
fn bessel_j_reference_points() {
    assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
    assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
    assert_abs_diff_eq!(bessel_j0(10.0).unwrap(), J0_AT_10, epsilon = 1e-15);
    assert_abs_diff_eq!(bessel_j1(5.0).unwrap(), J1_AT_5, epsilon = 1e-15);
    assert_relative_eq!(bessel_j1(1e-9).unwrap() / 1e-9, 0.5, max_relative = 1e-15);
}

#[test]
fn first_root_of_j0() {
    let root = common::bisect(common::j0, 2.0, 3.0);
    assert_abs_diff_eq!(root, J0_FIRST_ROOT, epsilon = 1e-14);
    assert!(bessel_j0(2.404_825_557_695_773).unwrap().abs() <= 1e-12);
}

#[test]
fn j0_j1_match_miller_oracle() {
    let mut x = 0.0;
    while x <= 100.0 {
        assert_abs_diff_eq!(bessel_j0(x).unwrap(), common::j0(x), epsilon = 1e-14);
        assert_abs_diff_eq!(bessel_j1(x).unwrap(), common::j1(x), epsilon = 1e-14);
        x += 0.173;
    }
    for &x in &[250.3, 999.9, 4321.0, 1e4] {
        assert_abs_diff_eq!(bessel_j0(x).unwrap(), common::j0(x), epsilon = 1e-12);
        assert_abs_diff_eq!(bessel_j1(x).unwrap(), common::j1(x), epsilon = 1e-12);
    }
}

#[test]
fn scaled_modified_reference_points() {
    assert_eq!(bessel_i0e(0.0).unwrap(), 1.0);
    assert_eq!(bessel_i1e(0.0).unwrap(), 0.0);
    assert_relative_eq!(bessel_i0e(1.0).unwrap(), I0E_AT_1, max_relative = 1e-14);
    let sum = bessel_i0e(60.0).unwrap() + bessel_i1e(60.0).unwrap();
    assert_relative_eq!(sum, RESIDUAL_AT_60, max_relative = 1e-13);
}

#[test]
fn scaled_modified_match_series_oracle() {
    let mut x = 0.0;
    while x <= 120.0 {
        let (i0, i1) = common::scaled_i01(x);
        assert_relative_eq!(bessel_i0e(x).unwrap(), i0, max_relative = 1e-13);
        if x > 0.0 {
            assert_relative_eq!(bessel_i1e(x).unwrap(), i1, max_relative = 1e-13);
        }
        x += 0.37;
    }
}

#[test]
fn scaled_modified_do_not_overflow() {
    for &x in &[700.0, 1e4, 1e6] {
        let (a, b) = (bessel_i0e(x).unwrap(), bessel_i1e(x).unwrap());
        assert!(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0);
    }
    assert!(matches!(bessel_i0e(-1.0), Err(Error::Domain(_))));
    assert!(matches!(bessel_j0(f64::NAN), Err(Error::Domain(_))));
}

proptest! {
    #[test]
    fn recurrence_j0_plus_j2(x in 1e-3f64..100.0) {
        let j2 = common::bessel_j012(x)[2];
        let lhs = bessel_j0(x).unwrap() + j2;
        let rhs = 2.0 * bessel_j1(x).unwrap() / x;
        prop_assert!((lhs - rhs).abs() <= 1e-10, "x = {x}: {lhs} vs {rhs}");
    }

    #[test]
    fn scaled_modified_ordering(x in 1e-6f64..1e5, dx in 1e-6f64..10.0) {
        let (i0, i1) = (bessel_i0e(x).unwrap(), bessel_i1e(x).unwrap());
        prop_assert!(i0 > 0.0 && i1 > 0.0);
        prop_assert!(i1 < i0);
        prop_assert!(bessel_i0e(x + dx).unwrap() <= i0);
        prop_assert!(bessel_i1e(x + dx).unwrap() + bessel_i0e(x + dx).unwrap() <= i0 + i1);
    }

    #[test]
    fn scaled_sum_asymptote(x in 500.0f64..1e6) {
        let sum = bessel_i0e(x).unwrap() + bessel_i1e(x).unwrap();
        let asym = (2.0 / (std::f64::consts::PI * x)).sqrt();
        prop_assert!((sum / asym - 1.0).abs() < 0.01);
    }

    #[test]
    fn quadrature_exact_on_quintics(
        c in prop::array::uniform6(-5.0f64..5.0),
        lo in -3.0f64..3.0,
        width in 0.01f64..6.0,
    ) {
        let hi = lo + width;
        let p = |x: f64| c.iter().rev().fold(0.0, |acc, &k| acc * x + k);
        let antideriv = |x: f64| c.iter().enumerate().rev().fold(0.0, |acc, (i, &k)| acc * x + k / (i + 1) as f64) * x;
        let exact = antideriv(hi) - antideriv(lo);
        let got = Integrator::new(1e-12).with_rel_tol(1e-13).integrate(p, lo, hi).unwrap();
        let scale = c.iter().map(|k| k.abs()).sum::<f64>() * (1.0 + lo.abs().max(hi.abs())).powi(6);
        prop_assert!((got.value - exact).abs() <= 1e-12 * scale.max(1.0), "{} vs {exact}", got.value);
        prop_assert!(got.error_estimate >= 0.0 && got.evaluations >= 1);
    }
}

#[test]
fn quadrature_reference_integrals() {
    let g = integrate_adaptive(|x| (-x * x).exp(), 0.0, f64::INFINITY, 1e-10).unwrap();
    assert_abs_diff_eq!(g.value, std::f64::consts::PI.sqrt() / 2.0, epsilon = 1e-10);
    let l = integrate_adaptive(|x| 1.0 / (1.0 + x * x), f64::NEG_INFINITY, f64::INFINITY, 1e-10).unwrap();
    assert_abs_diff_eq!(l.value, std::f64::consts::PI, epsilon = 1e-10);
}

#[test]
fn quadrature_matches_simpson_on_oscillatory_bessel() {
    let f = |x: f64| bessel_j0(x).unwrap() * (-0.1 * x).exp();
    let got = Integrator::new(1e-12).integrate(f, 0.0, 40.0).unwrap().value;
    let reference = common::simpson(|x| common::j0(x) * (-0.1 * x).exp(), 0.0, 40.0, 20_000);
    assert_abs_diff_eq!(got, reference, epsilon = 1e-10);
    // Laplace transform of J0: 1 / sqrt(1 + s^2) on the half line.
    let whole = Integrator::new(1e-11).integrate(f, 0.0, f64::INFINITY).unwrap().value;
    assert_abs_diff_eq!(whole, 1.0 / 1.01f64.sqrt(), epsilon = 1e-9);
}

#[test]
fn quadrature_budget_exhaustion_carries_estimate() {
    let err = Integrator::new(1e-14).with_max_intervals(3).integrate(|x| (1.0 / x).sin(), 1e-4, 1.0).unwrap_err();
    match err {
        Error::Convergence { estimate, error } => assert!(estimate.is_finite() && error > 0.0),
        other => panic!("unexpected {other:?}"),
    }
}
