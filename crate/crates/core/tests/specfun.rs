mod common;

use proptest::prelude::*;
use std::f64::consts::PI;
use tlincomb::specfun::*;

#[test]
fn log_gamma_examples() {
    assert_eq!(log_gamma(1.0).unwrap(), 0.0);
    assert!((log_gamma(0.5).unwrap() - 0.572_364_942_924_700_1).abs() < 1e-14);
    assert!((log_gamma(7.0).unwrap() - 6.579_251_212_010_101).abs() < 1e-13);
}

#[test]
fn log_gamma_matches_stirling_oracle() {
    for &x in &[1e-3, 0.01, 0.37, 1.5, 2.75, 9.99, 33.3, 171.2, 1e4] {
        let got = log_gamma(x).unwrap();
        let want = common::ln_gamma(x);
        assert!((got - want).abs() <= 1e-13 * want.abs().max(1.0), "x={x}: {got} vs {want}");
    }
    assert!(common::rel_err(gamma(1e-3).unwrap(), 999.423_772_484_595_5) < 1e-13);
}

#[test]
fn log_gamma_rejects_nonpositive() {
    assert!(log_gamma(0.0).is_err());
    assert!(log_gamma(-1.5).is_err());
}

#[test]
fn inc_beta_examples() {
    assert_eq!(reg_inc_beta(0.0, 2.0, 3.0).unwrap(), 0.0);
    assert_eq!(reg_inc_beta(1.0, 2.0, 3.0).unwrap(), 1.0);
    assert!((reg_inc_beta(0.5, 0.5, 0.5).unwrap() - 0.5).abs() < 1e-14);
}

#[test]
fn inc_beta_matches_quadrature() {
    for &(x, a, b) in &[(0.1, 0.5, 0.5), (0.3, 2.5, 0.5), (0.7, 10.0, 0.5), (0.95, 1.5, 3.0), (0.4, 30.0, 25.0)] {
        let got = reg_inc_beta(x, a, b).unwrap();
        let want = common::inc_beta(x, a, b);
        assert!(common::rel_err(got, want) < 1e-11, "({x},{a},{b}): {got} vs {want}");
    }
}

#[test]
fn inc_beta_rejects_bad_args() {
    assert!(reg_inc_beta(1.5, 1.0, 1.0).is_err());
    assert!(reg_inc_beta(0.5, 0.0, 1.0).is_err());
}

#[test]
fn bessel_half_order_closed_form() {
    assert!(common::rel_err(bessel_k(0.5, 1.0).unwrap(), 0.461_068_504_447_894_56) < 1e-13);
    assert!(common::rel_err(bessel_k(0.5, 2.0).unwrap(), 0.119_937_771_968_061_45) < 1e-13);
    for &x in &[0.01, 0.5, 3.0, 40.0] {
        let want = (PI / (2.0 * x)).sqrt() * (-x).exp();
        assert!(common::rel_err(bessel_k(0.5, x).unwrap(), want) < 1e-13);
    }
}

#[test]
fn bessel_matches_integral_oracle() {
    assert!(common::rel_err(bessel_k(1.25, 2.0).unwrap(), common::bessel_k(1.25, 2.0)) < 1e-10);
    for &(v, x) in &[(0.1, 0.05), (0.75, 1.9), (1.5, 2.1), (3.3, 0.2), (12.5, 6.0), (60.0, 30.0), (199.0, 80.0), (7.0, 700.0)] {
        let got = ln_bessel_k(v, x).unwrap();
        let want = common::ln_bessel_k(v, x);
        assert!((got - want).abs() < 1e-10 * want.abs().max(1.0), "K_{v}({x}): {got} vs {want}");
    }
}

#[test]
fn bessel_scaled_survives_underflow() {
    // K_2(2000) ~ e^{-2000} is far below f64::MIN_POSITIVE
    let s = bessel_k_scaled(2.0, 2000.0).unwrap();
    assert!(s.value() == 0.0);
    let want = common::ln_bessel_k(2.0, 2000.0);
    assert!((s.ln() - want).abs() < 1e-10 * want.abs());
}

#[test]
fn hyp2f1_examples() {
    assert_eq!(gauss_2f1(0.3, 1.7, 2.2, 0.0).unwrap(), 1.0);
    assert!(common::rel_err(gauss_2f1(1.0, 1.0, 2.0, 0.5).unwrap(), 1.386_294_361_119_890_6) < 1e-12);
    let want = common::hyp2f1_euler(2.0, 0.5, 3.0, -3.0);
    assert!(common::rel_err(gauss_2f1(2.0, 0.5, 3.0, -3.0).unwrap(), want) < 1e-9);
}

#[test]
fn hyp2f1_on_series_argument_patterns() {
    // (ν₂+1)/2, (ν₁+ν₂+2i−1)/2; (ν₁+ν₂+2i+1)/2 at −ω₂, and the I₁ pattern
    let cases = [
        (2.0, 2.5 + 5.0, 3.5 + 5.0, -0.4),
        (3.5, 4.0, 5.0, -7.0),
        (1.75, 2.25, 3.25, -120.0),
        (2.0, 0.5, 3.0, 1.0 - 1.0 / 9.0),
        (5.5, 0.5, 7.5, -15.0),
        (1.6, 0.5, 2.1, 0.97),
    ];
    for &(a, b, c, z) in &cases {
        let got = gauss_2f1(a, b, c, z).unwrap();
        let want = common::hyp2f1_euler(a, b, c, z);
        assert!(common::rel_err(got, want) < 1e-10, "2F1({a},{b};{c};{z}) = {got} vs {want}");
    }
}

#[test]
fn hyp2f1_rejects_bad_c() {
    assert!(gauss_2f1(1.0, 1.0, -2.0, 0.3).is_err());
    assert!(gauss_2f1(1.0, 1.0, 2.0, 1.5).is_err());
}

#[test]
fn accuracy_validation() {
    assert!(Accuracy::new(1e-10, 1000).is_ok());
    assert!(Accuracy::new(0.0, 1000).is_err());
    assert!(Accuracy::new(1e-3, 1000).is_err());
    assert!(Accuracy::new(1e-10, 10).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inc_beta_reflection(x in 0.0f64..=1.0, a in 1e-3f64..50.0, b in 1e-3f64..50.0) {
        let s = reg_inc_beta(x, a, b).unwrap() + reg_inc_beta(1.0 - x, b, a).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-12, "sum = {}", s);
    }

    #[test]
    fn bessel_recurrence(v in 0.5f64..20.0, x in 0.1f64..50.0) {
        let lhs = bessel_k(v + 1.0, x).unwrap();
        // K is even in its order
        let rhs = bessel_k((v - 1.0).abs(), x).unwrap() + 2.0 * v / x * bessel_k(v, x).unwrap();
        prop_assert!(((lhs - rhs) / lhs).abs() < 1e-8);
    }

    #[test]
    fn hyp2f1_matches_direct_series(a in 0.1f64..8.0, b in 0.1f64..8.0, c in 0.5f64..10.0, z in 0.0f64..=0.5) {
        let got = gauss_2f1(a, b, c, z).unwrap();
        let want = common::hyp2f1_series(a, b, c, z);
        prop_assert!(common::rel_err(got, want) < 1e-11, "{} vs {}", got, want);
    }

    #[test]
    fn gamma_recurrence(x in 0.05f64..60.0) {
        let d = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap() - x.ln();
        prop_assert!(d.abs() < 1e-12 * log_gamma(x + 1.0).unwrap().abs().max(1.0));
    }
}
