//! Fast invariant checks behind `tlincomb selftest`.

use std::f64::consts::{LN_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::fitting::{
    fit_absmoment_k2, fit_cf_bisect, fit_cf_closed_with, fit_moment4, g_exact, h_exact, CfConstants,
    RationalApprox, CF_CONSTANTS, H_APPROX,
};
use crate::lincomb::{abs_moment_iid, abs_moment_k2, LinComb, TTerm};
use crate::specfun::{bessel_k, gauss_2f1, log_gamma, reg_inc_beta, Accuracy};
use crate::tdist::ScaledT;

/// Largest `|h(ν) − h_approx(ν)|` on `(2, 50]` with the closed-form constants,
/// measured once from the exact `h` (0.136071) and rounded up.
pub const H_APPROX_MAX_ERROR: f64 = 0.1361;

/// Everything a selftest run may be pointed at; the defaults are the shipped constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelftestInputs {
    pub cf: CfConstants,
    pub h: RationalApprox,
    pub h_bound: f64,
}

impl Default for SelftestInputs {
    fn default() -> Self {
        SelftestInputs {
            cf: CF_CONSTANTS,
            h: H_APPROX,
            h_bound: H_APPROX_MAX_ERROR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Recorder(Vec<Check>);

impl Recorder {
    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.0.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    fn close(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs();
        self.check(name, err <= tol, format!("got {got:.15e}, want {want:.15e}, |diff| {err:.3e} (tol {tol:.1e})"));
    }
}

pub fn run() -> SelftestReport {
    run_with(&SelftestInputs::default())
}

pub fn run_with(inputs: &SelftestInputs) -> SelftestReport {
    let mut r = Recorder(Vec::new());
    constants(&mut r, inputs);
    limits(&mut r, inputs);
    special_functions(&mut r);
    moments(&mut r);
    fits(&mut r, inputs);
    SelftestReport { checks: r.0 }
}

fn constants(r: &mut Recorder, inp: &SelftestInputs) {
    let cf = &inp.cf;
    let exact = cf.p1 == 0.607 && cf.p2 == -0.7606 && cf.p3 == -1.5466 && cf.sigma_a == 1.6775 && cf.sigma_b == 3.4111;
    r.check("cf constants as printed", exact, format!("{cf:?}"));
    // p3 = 2 p1 + p2 − 2 from the ν → 2 boundary
    r.close("cf boundary relation p3 = 2p1 + p2 - 2", cf.p3, 2.0 * cf.p1 + cf.p2 - 2.0, 1e-9);
    let d = 2.0 * cf.p1 + cf.p2;
    r.close("1.6775 = 0.7606 / 0.4534", cf.sigma_a, -cf.p2 / d, 1e-3);
    r.close("3.4111 = 1.5466 / 0.4534", cf.sigma_b, -cf.p3 / d, 1e-3);
    let h = &inp.h;
    r.check(
        "abs constants sqrt2, -2sqrt2, -sqrt(pi)",
        h.p1 == SQRT_2 && h.p2 == -2.0 * SQRT_2 && (h.p3 + PI.sqrt()).abs() < 1e-15,
        format!("{h:?}"),
    );
    // The ν_z closed form must invert the rational approximation of h.
    let mut worst: f64 = 0.0;
    for &ratio in &[0.3, 0.8, 1.2, 1.4] {
        let m2: f64 = 2.0;
        let m1 = ratio * m2.sqrt() / PI.sqrt();
        if let Ok(f) = fit_absmoment_k2(m2, m1) {
            worst = worst.max((h.eval(f.nu()) - ratio).abs());
        } else {
            worst = f64::INFINITY;
        }
    }
    r.check("nu_z closed form inverts h approximation", worst < 1e-12, format!("max residual {worst:.3e}"));
}

fn limits(r: &mut Recorder, inp: &SelftestInputs) {
    r.close("h(1e6) -> sqrt2", h_exact(1e6).unwrap_or(f64::NAN), SQRT_2, 1e-5);
    r.close("h(2+1e-6) -> 0", h_exact(2.0 + 1e-6).unwrap_or(f64::NAN), 0.0, 2e-3);
    r.close("g(2+1e-6) -> 1", g_exact(2.0 + 1e-6, 1.0).unwrap_or(f64::NAN), 1.0, 1e-3);
    r.close("g(1e6) -> 0.607", g_exact(1e6, 1.0).unwrap_or(f64::NAN), inp.cf.p1, 5e-4);
    let mut worst: f64 = 0.0;
    let n = 20_000;
    for k in 1..=n {
        let nu = 2.0 + 48.0 * k as f64 / n as f64;
        worst = worst.max((h_exact(nu).unwrap_or(f64::NAN) - inp.h.eval(nu)).abs());
    }
    r.check(
        "h approximation error within stored bound on (2, 50]",
        worst <= inp.h_bound,
        format!("max error {worst:.6} vs bound {}", inp.h_bound),
    );
}

fn special_functions(r: &mut Recorder) {
    let mut worst: f64 = 0.0;
    for &x in &[0.3, 1.7, 4.25, 12.5, 80.0] {
        let lhs = log_gamma(2.0 * x).unwrap();
        let rhs = log_gamma(x).unwrap() + log_gamma(x + 0.5).unwrap() + (2.0 * x - 1.0) * LN_2 - 0.5 * PI.ln();
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
    }
    r.check("log_gamma duplication formula", worst < 1e-11, format!("max rel err {worst:.3e}"));

    let mut worst: f64 = 0.0;
    for &(x, a, b) in &[(0.2, 0.5, 3.0), (0.7, 12.0, 0.5), (0.5, 40.0, 45.0), (0.95, 2.5, 7.0)] {
        let s = reg_inc_beta(x, a, b).unwrap() + reg_inc_beta(1.0 - x, b, a).unwrap();
        worst = worst.max((s - 1.0).abs());
    }
    r.check("incomplete beta reflection", worst < 1e-12, format!("max err {worst:.3e}"));

    let mut worst: f64 = 0.0;
    for &(v, x) in &[(1.7, 0.1), (2.5, 1.0), (7.3, 3.0), (15.0, 40.0)] {
        let lhs = bessel_k(v + 1.0, x).unwrap();
        let rhs = bessel_k(v - 1.0, x).unwrap() + 2.0 * v / x * bessel_k(v, x).unwrap();
        worst = worst.max(((lhs - rhs) / lhs).abs());
    }
    r.check("Bessel K recurrence", worst < 1e-8, format!("max rel err {worst:.3e}"));

    let z: f64 = -3.0;
    let got = gauss_2f1(1.0, 1.0, 2.0, z).unwrap();
    r.close("2F1(1,1;2;z) = -ln(1-z)/z", got, -(1.0 - z).ln() / z, 1e-12);
}

fn moments(r: &mut Recorder) {
    let d = ScaledT::new(1.3, 5.5).unwrap();
    r.close("abs_moment(2) = moment(2)", d.abs_moment(2.0).unwrap(), d.moment(2).unwrap(), 1e-12);
    let acc = Accuracy::default();
    for &nu in &[3.0, 5.0] {
        let t = TTerm::new(1.0, nu).unwrap();
        let (v, _) = abs_moment_k2(&t, &t, &acc).unwrap();
        let want = abs_moment_iid(1.0, nu, 2).unwrap();
        r.close(&format!("K=2 absolute moment vs i.i.d. closed form, nu={nu}"), v / want, 1.0, 1e-8);
    }
}

fn fits(r: &mut Recorder, inp: &SelftestInputs) {
    let z = LinComb::from_pairs(&[(1.0, 6.0)]).unwrap();
    match fit_moment4(&z) {
        Ok(f) => r.close("MOMENT4 exact on scaled t (nu=6)", f.nu(), 6.0, 1e-10),
        Err(e) => r.check("MOMENT4 exact on scaled t (nu=6)", false, e.to_string()),
    }
    let z = LinComb::from_pairs(&[(0.5, 2.5), (1.0, 3.0), (1.5, 3.5)]).unwrap();
    let m2 = z.second_moment();
    let closed = fit_cf_closed_with(&z, &inp.cf);
    let bisect = fit_cf_bisect(&z, 1.0 / m2.sqrt());
    for (name, f) in [("CF_CLOSED", &closed), ("CF_BISECT", &bisect)] {
        match f {
            Ok(f) => {
                let back = f.sigma() * f.sigma() * f.nu() / (f.nu() - 2.0);
                r.close(&format!("{name} preserves E[Z^2]"), back / m2, 1.0, 1e-9);
            }
            Err(e) => r.check(&format!("{name} preserves E[Z^2]"), false, e.to_string()),
        }
    }
    if let (Ok(c), Ok(b)) = (&closed, &bisect) {
        r.close("closed form vs bisection nu_z", c.nu(), b.nu(), 0.15);
    }
}
