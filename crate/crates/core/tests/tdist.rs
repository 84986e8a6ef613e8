mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use tlincomb::tdist::ScaledT;
use tlincomb::Error;

fn t(sigma: f64, nu: f64) -> ScaledT {
    ScaledT::new(sigma, nu).unwrap()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[test]
fn rejects_bad_parameters() {
    assert!(matches!(ScaledT::new(0.0, 3.0), Err(Error::InvalidParameter(_))));
    assert!(ScaledT::new(1.0, -1.0).is_err());
    assert!(ScaledT::new(f64::NAN, 3.0).is_err());
    assert!(ScaledT::new(1.0, f64::INFINITY).is_err());
}

#[test]
fn pdf_at_origin() {
    assert!((t(1.0, 1.0).pdf(0.0) - 1.0 / PI).abs() < 1e-15);
    // Γ(3)/(Γ(2.5)√(5π)) to 20 digits
    let a5 = 0.379_606_689_822_494_431_2;
    assert!(common::rel_err(t(1.0, 5.0).pdf(0.0), a5) < 1e-14);
    assert!(common::rel_err(t(1.0, 5.0).alpha(), a5) < 1e-14);
    assert!(common::rel_err(t(2.0, 5.0).pdf(0.0), a5 / 2.0) < 1e-14);
}

#[test]
fn pdf_matches_oracle_and_is_even() {
    // the oracle's lnΓ difference costs a few digits at large ν
    for &(s, n, tol) in &[(1.0, 1.0, 1e-14), (0.3, 2.5, 1e-13), (2.0, 7.0, 1e-13), (1.0, 150.0, 1e-12)] {
        let d = t(s, n);
        for &x in &[0.0, 0.1, 1.0, 3.7, 40.0, 1e3] {
            assert!(common::rel_err(d.pdf(x), common::t_pdf(s, n, x)) < tol, "({s},{n}) x={x}");
            assert_eq!(d.pdf(x), d.pdf(-x));
            assert!(d.pdf(x) > 0.0);
        }
    }
}

#[test]
fn cdf_examples() {
    for &(s, n) in &[(1.0, 1.0), (3.0, 7.0), (0.5, 2.01)] {
        assert_eq!(t(s, n).cdf(0.0), 0.5);
    }
    assert!((t(1.0, 1.0).cdf(1.0) - 0.75).abs() < 1e-15);
    let want = common::t_cdf(1.0, 4.0, 2.0);
    assert!((t(1.0, 4.0).cdf(2.0) - want).abs() < 1e-10);
}

#[test]
fn cdf_matches_oracle() {
    for &(s, n) in &[(1.0, 3.0), (0.7, 2.2), (2.0, 12.0), (1.5, 60.0)] {
        let d = t(s, n);
        for &x in &[-30.0, -2.0, -0.2, 0.05, 1.0, 5.0, 200.0] {
            assert!((d.cdf(x) - common::t_cdf(s, n, x)).abs() < 1e-12, "({s},{n}) x={x}");
        }
    }
    for &x in &[-50.0, -1.0, 0.4, 9.0] {
        assert!((t(1.5, 3.0).cdf(x) - common::t3_cdf(1.5, x)).abs() < 1e-14);
    }
}

#[test]
fn cdf_tail_keeps_precision() {
    // survival function of the Cauchy: arctan(1/x)/π
    let c = t(1.0, 1.0);
    assert!(common::rel_err(c.sf(1e8), (1e-8f64).atan() / PI) < 1e-12);
    assert!(common::rel_err(c.cdf(-1e8), (1e-8f64).atan() / PI) < 1e-12);
}

#[test]
fn quantile_examples() {
    assert_eq!(t(2.0, 3.0).quantile(0.5).unwrap(), 0.0);
    assert!((t(1.0, 1.0).quantile(0.75).unwrap() - 1.0).abs() < 1e-12);
    let q = t(3.0, 7.0).quantile(0.9).unwrap();
    assert!((q - 3.0 * t(1.0, 7.0).quantile(0.9).unwrap()).abs() < 1e-11);
    assert!(t(1.0, 3.0).quantile(0.0).is_err());
    assert!(t(1.0, 3.0).quantile(1.0).is_err());
}

#[test]
fn cdf_inverts_quantile() {
    for &(s, n) in &[(1.0, 1.0), (1.0, 2.5), (0.2, 5.0), (4.0, 30.0), (1.0, 1e3)] {
        let d = t(s, n);
        for i in 1..=999 {
            let p = i as f64 / 1000.0;
            let x = d.quantile(p).unwrap();
            assert!((d.cdf(x) - p).abs() < 1e-10, "({s},{n}) p={p}");
        }
        for &p in &[1e-9, 1e-5, 1.0 - 1e-9] {
            let x = d.quantile(p).unwrap();
            assert!((d.cdf(x) - p).abs() <= 1e-12);
        }
    }
}

#[test]
fn density_integrates_to_one() {
    for &(s, n) in &[(1.0, 2.5), (2.0, 5.0), (0.5, 40.0)] {
        let d = t(s, n);
        let r = d.quantile(1.0 - 1e-8).unwrap();
        let mass = common::gauss_kronrod(|x| d.pdf(x), -r, r, 1e-12);
        assert!((mass - 1.0).abs() < 1e-6, "({s},{n}) {mass}");
    }
}

#[test]
fn moment_examples() {
    assert_eq!(t(1.0, 4.0).moment(2).unwrap(), 2.0);
    assert_eq!(t(1.0, 5.0).moment(3).unwrap(), 0.0);
    assert!((t(1.0, 5.0).moment(4).unwrap() - 25.0).abs() < 1e-12);
    // E[x⁴] has no finite variance at ν = 5, so check by quadrature rather than sampling
    assert!(common::rel_err(t(1.0, 5.0).moment(4).unwrap(), common::t_abs_moment(1.0, 5.0, 4.0)) < 1e-9);
    assert!(matches!(t(1.0, 4.0).moment(4), Err(Error::MomentNotFinite { .. })));
    assert!(t(1.0, 3.0).moment(5).is_err());
    assert_eq!(t(1.0, 3.0).moment(0).unwrap(), 1.0);
}

#[test]
fn abs_moment_examples() {
    let want = 2.0 * 3f64.sqrt() / PI;
    assert!(common::rel_err(t(1.0, 3.0).abs_moment(1.0).unwrap(), want) < 1e-13);
    assert!((t(1.0, 3.0).abs_moment(1.0).unwrap() - common::t_abs_moment(1.0, 3.0, 1.0)).abs() < 1e-10);
    assert!(common::rel_err(t(1.0, 5.0).abs_moment(2.0).unwrap(), 5.0 / 3.0) < 1e-13);
    assert!(common::rel_err(t(2.0, 3.0).abs_moment(1.0).unwrap(), 2.0 * want) < 1e-13);
    assert!(t(1.0, 3.0).abs_moment(3.0).is_err());
    assert!(t(1.0, 3.0).abs_moment(0.0).is_err());
}

#[test]
fn fractional_abs_moments_match_quadrature() {
    for &(s, n, m) in &[(1.0, 2.5, 0.5), (0.7, 4.0, 1.7), (3.0, 9.0, 6.3), (1.0, 1.5, 0.5)] {
        let got = t(s, n).abs_moment(m).unwrap();
        assert!(common::rel_err(got, common::t_abs_moment(s, n, m)) < 1e-9, "({s},{n},{m})");
    }
}

#[test]
fn cf_examples() {
    assert_eq!(t(1.3, 4.0).cf(0.0), 1.0);
    assert!((t(1.0, 1.0).cf(1.0) - (-1f64).exp()).abs() < 1e-14);
    let want = common::t_cf_oscillatory(1.0, 5.0, 0.7);
    assert!((t(1.0, 5.0).cf(0.7) - want).abs() < 1e-8);
}

#[test]
fn cf_matches_oscillatory_oracle() {
    for &(s, n, r) in &[(1.0, 2.5, 0.3), (2.0, 3.0, 1.1), (0.5, 10.0, 2.0), (1.0, 7.5, 4.0)] {
        let want = common::t_cf_oscillatory(s, n, r);
        assert!((t(s, n).cf(r) - want).abs() < 1e-8, "({s},{n},{r})");
    }
}

#[test]
fn cf_large_argument_stays_in_log_space() {
    let d = t(1.0, 4.0);
    let r = 1e4;
    assert_eq!(d.cf(r), 0.0);
    let ln = d.ln_cf(r);
    assert!(ln.is_finite() && ln < -700.0);
    // ν = 1 reduces to −σ|r|
    assert!((t(2.0, 1.0).ln_cf(500.0) + 1000.0).abs() < 1e-9);
}

#[test]
fn cf_at_large_nu_matches_references() {
    // 30-digit mpmath, except the last pair (scipy's exponentially scaled K)
    let cases = [
        (200.0, 1.0, -0.002_525_219_991_176_116_012_9),
        (200.0, 30.0, -2.247_162_410_395_872_955_1),
        (600.0, 1.0, -0.000_836_119_228_360_105_735_1),
        (999.0, 30.0, -0.451_149_565_722_764_065_1),
        (1000.0, 30.0, -0.450_697_921_162_239_015_6),
        (1001.0, 30.0, -0.450_247_179_569_051_843_3),
        (1e4, 0.5 * 1e4f64.sqrt(), -0.125_023_441_302_476_677_4),
        (1e6, 0.5 * 1e6f64.sqrt(), -0.125_000_234_375_380_208_7),
        (1000.0, 2000.0, -1_091.954_516_437_522_7),
        (3000.0, 1e5, -93_231.013_330_530_84),
    ];
    for &(nu, x, want) in &cases {
        let got = t(1.0, nu).ln_cf(x / nu.sqrt());
        assert!(common::rel_err(got, want) < 1e-13, "nu={nu} x={x}: {got} vs {want}");
    }
}

#[test]
fn sample_is_deterministic() {
    let d = t(1.5, 3.5);
    assert_eq!(d.sample(5, 42), d.sample(5, 42));
    assert_ne!(d.sample(5, 42), d.sample(5, 43));
    // a prefix of a longer stream is the shorter stream
    let long = d.sample(100_000, 7);
    assert_eq!(&long[..10], &d.sample(10, 7)[..]);
}

#[test]
fn sample_second_moment() {
    let xs = t(1.0, 5.0).sample(1_000_000, 1);
    let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let (m, se) = mean_and_se(&sq);
    assert!((m - 5.0 / 3.0).abs() < 3.0 * se, "{m} ± {se}");
}

#[test]
fn sample_abs_mean() {
    let d = t(2.0, 5.0);
    let xs = d.sample(1_000_000, 2);
    let abs: Vec<f64> = xs.iter().map(|x| x.abs()).collect();
    let (m, se) = mean_and_se(&abs);
    assert!((m - d.abs_moment(1.0).unwrap()).abs() < 3.0 * se, "{m} ± {se}");
}

#[test]
fn sample_follows_cdf() {
    let d = t(0.8, 2.7);
    let mut xs = d.sample(200_000, 3);
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let ks = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = d.cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max);
    // 99.9% Kolmogorov critical value
    assert!(ks < 1.95 / n.sqrt(), "ks = {ks}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cf_is_even_and_bounded(s in 0.01f64..10.0, n in 0.5f64..80.0, r in -20.0f64..20.0) {
        let d = t(s, n);
        prop_assert_eq!(d.cf(r), d.cf(-r));
        prop_assert!(d.cf(r) <= 1.0 && d.cf(r) >= 0.0);
    }

    // t is a scale mixture of normals, so Jensen puts its CF above the Gaussian of equal variance
    #[test]
    fn cf_dominates_matched_gaussian(n in 2.1f64..1e8, r in 0.0f64..10.0) {
        let d = t(1.0, n);
        let gauss = -0.5 * r * r * d.moment(2).unwrap();
        prop_assert!(d.ln_cf(r) >= gauss * (1.0 + 1e-13), "{} < {}", d.ln_cf(r), gauss);
    }

    #[test]
    fn second_abs_moment_is_second_moment(s in 0.01f64..10.0, n in 2.01f64..200.0) {
        let d = t(s, n);
        prop_assert!(common::rel_err(d.abs_moment(2.0).unwrap(), d.moment(2).unwrap()) < 1e-12);
    }

    #[test]
    fn cdf_is_monotone_and_symmetric(s in 0.1f64..5.0, n in 0.5f64..50.0, x in 0.0f64..100.0, dx in 0.0f64..1.0) {
        let d = t(s, n);
        prop_assert!(d.cdf(x + dx) >= d.cdf(x));
        prop_assert!((d.cdf(-x) - (1.0 - d.cdf(x))).abs() < 1e-15);
    }
}
