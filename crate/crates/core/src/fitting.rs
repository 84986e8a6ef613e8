//! Fitting `Z` with a single scaled Student's t law `σ_z T(ν_z)`.
//!
//! All paths match `E[Z²]` exactly, so `σ_z = sqrt((ν_z − 2) E[Z²] / ν_z)`.
//! The second statistic is `E|Z|` (absolute-moment path), the
//! characteristic function at one point (CF paths), or `E[Z⁴]` (benchmark).

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lincomb::{abs_moment_k2, LinComb, SeriesDiag, TTerm};
use crate::roots::bisect;
use crate::specfun::{ln_gamma_ratio, Accuracy};
use crate::tdist::{t_cf_from_x, ScaledT};

/// Lower end of every fitted ν_z range.
pub const NU_MIN: f64 = 2.0 + 1e-6;
/// Upper end of the bisection bracket; fits landing here are flagged effectively Gaussian.
pub const NU_MAX: f64 = 1e4;
/// Bisection stops once the bracket is narrower than this.
pub const BISECT_WIDTH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    AbsMoment,
    CfClosed,
    CfBisect,
    Moment4,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::AbsMoment, Method::CfClosed, Method::CfBisect, Method::Moment4];

    pub fn name(&self) -> &'static str {
        match self {
            Method::AbsMoment => "ABS_MOMENT",
            Method::CfClosed => "CF_CLOSED",
            Method::CfBisect => "CF_BISECT",
            Method::Moment4 => "MOMENT4",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        Method::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown method '{s}' (expected ABS_MOMENT, CF_CLOSED, CF_BISECT or MOMENT4)"
                ))
            })
    }
}

/// Record of a bisection solve of `g(ν_z) = CF_Z(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisectionTrace {
    pub iterations: usize,
    pub bracket_width: f64,
    /// `g(ν_max)`
    pub g_upper_nu: f64,
    /// `g(2 + ε)`
    pub g_lower_nu: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Series record of the (last) absolute-moment evaluation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<SeriesDiag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bisection: Option<BisectionTrace>,
    /// `√π E|Z| / sqrt(E[Z²])`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moment_ratio: Option<f64>,
    /// `CF_Z(r_used)`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cf_value: Option<f64>,
    /// `E[Z⁴] / E[Z²]²`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kurtosis: Option<f64>,
    /// σ_z from the printed closed form with 1.6775 and 3.4111.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_printed: Option<f64>,
    pub effectively_gaussian: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub fitted: ScaledT,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_used: Option<f64>,
    pub iterations: usize,
    pub diagnostics: Diagnostics,
}

impl FitReport {
    pub fn sigma(&self) -> f64 {
        self.fitted.sigma()
    }

    pub fn nu(&self) -> f64 {
        self.fitted.nu()
    }
}

/// `(p₁ν + p₂) / (ν + p₃)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RationalApprox {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl RationalApprox {
    pub fn eval(&self, nu: f64) -> f64 {
        (self.p1 * nu + self.p2) / (nu + self.p3)
    }
}

/// Constants of the absolute-moment closed forms: `h(ν) ≈ (√2 ν − 2√2)/(ν − √π)`.
pub const H_APPROX: RationalApprox = RationalApprox {
    p1: SQRT_2,
    p2: -2.0 * SQRT_2,
    p3: -1.772_453_850_905_516,
};

/// Constants of the CF closed forms at `r = E[Z²]^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfConstants {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    /// Numerator constant of the printed σ_z formula.
    pub sigma_a: f64,
    /// Slope constant of the printed σ_z formula.
    pub sigma_b: f64,
}

pub const CF_CONSTANTS: CfConstants = CfConstants {
    p1: 0.607,
    p2: -0.7606,
    p3: -1.5466,
    sigma_a: 1.6775,
    sigma_b: 3.4111,
};

impl CfConstants {
    pub fn approx(&self) -> RationalApprox {
        RationalApprox {
            p1: self.p1,
            p2: self.p2,
            p3: self.p3,
        }
    }

    /// `ν_z = (0.7606 − 1.5466 c) / (0.607 − c)`
    pub fn nu_z(&self, c: f64) -> f64 {
        (-self.p2 + self.p3 * c) / (self.p1 - c)
    }

    /// `σ_z = sqrt((c − 1) E[Z²] / (1.6775 − 3.4111 c))`
    pub fn sigma_z_printed(&self, c: f64, m2: f64) -> f64 {
        ((c - 1.0) * m2 / (self.sigma_a - self.sigma_b * c)).sqrt()
    }
}

fn isolate_sigma(nu: f64, m2: f64) -> f64 {
    ((nu - 2.0) * m2 / nu).sqrt()
}

fn check_nu(nu: f64, routine: &'static str) -> Result<()> {
    if !(nu > 2.0) || !nu.is_finite() {
        return Err(Error::domain(routine, format!("nu_z = {nu} must exceed 2")));
    }
    Ok(())
}

/// `h(ν) = Γ((ν−1)/2) sqrt(ν−2) / Γ(ν/2)`, rising from 0 at `ν = 2` to `√2`.
pub fn h_exact(nu_z: f64) -> Result<f64> {
    check_nu(nu_z, "h_exact")?;
    Ok((ln_gamma_ratio(0.5 * (nu_z - 1.0), 0.5 * nu_z) + 0.5 * (nu_z - 2.0).ln()).exp())
}

/// `g(ν) = x^{ν/2} K_{ν/2}(x) / (2^{ν/2−1} Γ(ν/2))` with `x = rE sqrt(ν−2)`.
pub fn g_exact(nu_z: f64, r_e: f64) -> Result<f64> {
    check_nu(nu_z, "g_exact")?;
    if !(r_e > 0.0) || !r_e.is_finite() {
        return Err(Error::domain("g_exact", format!("rE = {r_e} must be positive")));
    }
    Ok(t_cf_from_x(nu_z, r_e * (nu_z - 2.0).sqrt()))
}

fn check_positive(x: f64, what: &str) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!("{what} must be positive and finite (got {x})")));
    }
    Ok(())
}

/// Closed-form fit from `m2 = E[Z²]` and `m1abs = E|Z|`.
pub fn fit_absmoment_k2(m2: f64, m1abs: f64) -> Result<FitReport> {
    check_positive(m2, "E[Z^2]")?;
    check_positive(m1abs, "E|Z|")?;
    let ratio = PI.sqrt() * m1abs / m2.sqrt();
    if !(ratio < SQRT_2) {
        return Err(Error::InfeasibleRatio { ratio });
    }
    let root2m2 = (2.0 * m2).sqrt();
    let nu = (PI * m1abs - 2.0 * root2m2) / (PI.sqrt() * m1abs - root2m2);
    if !(nu > NU_MIN) || !nu.is_finite() {
        return Err(Error::InfeasibleRatio { ratio });
    }
    let sigma = ((PI - 2.0 * PI.sqrt()) * m1abs * m2 / (PI * m1abs - 2.0 * root2m2)).sqrt();
    Ok(FitReport {
        fitted: ScaledT::new(sigma, nu)?,
        method: Method::AbsMoment,
        r_used: None,
        iterations: 0,
        diagnostics: Diagnostics {
            moment_ratio: Some(ratio),
            ..Diagnostics::default()
        },
    })
}

/// Absolute-moment fit for any `K`, folding in one addend at a time.
pub fn fit_absmoment_iter(zc: &LinComb) -> Result<FitReport> {
    fit_absmoment_iter_with(zc, &Accuracy::default())
}

pub fn fit_absmoment_iter_with(zc: &LinComb, acc: &Accuracy) -> Result<FitReport> {
    let terms = zc.terms();
    let mut current = terms[0];
    let mut report = FitReport {
        fitted: current.dist(),
        method: Method::AbsMoment,
        r_used: None,
        iterations: 0,
        diagnostics: Diagnostics::default(),
    };
    for step in 1..terms.len() {
        let at = |e: Error| Error::AtStep {
            step,
            source: Box::new(e),
        };
        let m2 = LinComb::new(terms[..=step].to_vec())?.second_moment();
        let (m1, diag) = abs_moment_k2(&current, &terms[step], acc).map_err(at)?;
        report = fit_absmoment_k2(m2, m1).map_err(at)?;
        report.iterations = step;
        report.diagnostics.series = Some(diag);
        current = TTerm::new(report.sigma(), report.nu()).map_err(at)?;
    }
    Ok(report)
}

/// Closed-form CF fit at `r = E[Z²]^{-1/2}` with the given constants.
pub fn fit_cf_closed_with(zc: &LinComb, k: &CfConstants) -> Result<FitReport> {
    let m2 = zc.second_moment();
    let r = 1.0 / m2.sqrt();
    let c = zc.cf_z(r);
    if !(c > k.p1 + 1e-9 && c < 1.0 - 1e-12) {
        return Err(Error::InfeasibleCf { cf: c });
    }
    let nu = k.nu_z(c);
    if !(nu > NU_MIN) || !nu.is_finite() {
        return Err(Error::InfeasibleCf { cf: c });
    }
    Ok(FitReport {
        fitted: ScaledT::new(isolate_sigma(nu, m2), nu)?,
        method: Method::CfClosed,
        r_used: Some(r),
        iterations: 0,
        diagnostics: Diagnostics {
            cf_value: Some(c),
            sigma_printed: Some(k.sigma_z_printed(c, m2)),
            ..Diagnostics::default()
        },
    })
}

pub fn fit_cf_closed(zc: &LinComb) -> Result<FitReport> {
    fit_cf_closed_with(zc, &CF_CONSTANTS)
}

/// Solves `g(ν_z) = CF_Z(r)` by bisection on `[2 + 1e-6, 1e4]`.
pub fn fit_cf_bisect(zc: &LinComb, r: f64) -> Result<FitReport> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("r must be positive and finite (got {r})")));
    }
    let m2 = zc.second_moment();
    let r_e = r * m2.sqrt();
    let c = zc.cf_z(r);
    let g = |nu: f64| t_cf_from_x(nu, r_e * (nu - 2.0).sqrt());
    let g_lo = g(NU_MIN);
    let g_hi = g(NU_MAX);
    let gaussian = (-0.5 * r_e * r_e).exp();
    if !(c < g_lo) || !(c > gaussian) {
        return Err(Error::NoSolution {
            cf: c,
            lower: gaussian.min(g_hi),
            upper: g_lo,
        });
    }
    let (nu, trace, flat) = if c <= g_hi {
        let trace = BisectionTrace {
            iterations: 0,
            bracket_width: 0.0,
            g_upper_nu: g_hi,
            g_lower_nu: g_lo,
        };
        (NU_MAX, trace, true)
    } else {
        let b = bisect(|nu| g(nu) - c, NU_MIN, NU_MAX, BISECT_WIDTH, 200);
        let trace = BisectionTrace {
            iterations: b.iterations,
            bracket_width: b.width,
            g_upper_nu: g_hi,
            g_lower_nu: g_lo,
        };
        (b.root, trace, false)
    };
    Ok(FitReport {
        fitted: ScaledT::new(isolate_sigma(nu, m2), nu)?,
        method: Method::CfBisect,
        r_used: Some(r),
        iterations: trace.iterations,
        diagnostics: Diagnostics {
            bisection: Some(trace),
            cf_value: Some(c),
            effectively_gaussian: flat,
            ..Diagnostics::default()
        },
    })
}

/// Second- and fourth-moment benchmark: `ν_z = (4κ − 6)/(κ − 3)`.
pub fn fit_moment4(zc: &LinComb) -> Result<FitReport> {
    let m4 = zc.fourth_moment()?;
    let m2 = zc.second_moment();
    let kappa = m4 / (m2 * m2);
    if !(kappa > 3.0) {
        return Err(Error::InfeasibleKurtosis { kappa });
    }
    let nu = (4.0 * kappa - 6.0) / (kappa - 3.0);
    Ok(FitReport {
        fitted: ScaledT::new(isolate_sigma(nu, m2), nu)?,
        method: Method::Moment4,
        r_used: None,
        iterations: 0,
        diagnostics: Diagnostics {
            kurtosis: Some(kappa),
            ..Diagnostics::default()
        },
    })
}

/// Runs `method`; `r` is only consulted by `CfBisect` and defaults to `E[Z²]^{-1/2}`.
pub fn fit(zc: &LinComb, method: Method, r: Option<f64>) -> Result<FitReport> {
    match method {
        Method::AbsMoment => fit_absmoment_iter(zc),
        Method::CfClosed => fit_cf_closed(zc),
        Method::CfBisect => fit_cf_bisect(zc, r.unwrap_or_else(|| 1.0 / zc.second_moment().sqrt())),
        Method::Moment4 => fit_moment4(zc),
    }
}

/// Which exact curve `refit_rational` approximates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RationalTarget {
    H,
    G { r_e: f64 },
}

const REFIT_POINTS: usize = 200;

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Least-squares rational fit of `h` or `g` over `domain`, with `p₁` pinned
/// to the `ν → ∞` limit and the `ν → 2` boundary relation imposed; the one
/// remaining constant is fitted on a 200-point log-spaced grid.
pub fn refit_rational(target: RationalTarget, domain: (f64, f64)) -> Result<RationalApprox> {
    let (lo, hi) = (domain.0.max(NU_MIN), domain.1);
    if !(hi >= lo) || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!("bad refit domain ({}, {})", domain.0, domain.1)));
    }
    let grid: Vec<f64> = if hi == lo {
        vec![lo]
    } else {
        let step = (hi / lo).ln() / (REFIT_POINTS - 1) as f64;
        (0..REFIT_POINTS).map(|k| lo * (step * k as f64).exp()).collect()
    };
    match target {
        RationalTarget::H => {
            let ys = grid.iter().map(|&v| h_exact(v)).collect::<Result<Vec<_>>>()?;
            let (p1, p2) = (SQRT_2, -2.0 * SQRT_2);
            let p3 = if grid.len() == 1 {
                (p1 * grid[0] + p2) / ys[0] - grid[0]
            } else {
                let sse = |p3: f64| sse(&grid, &ys, RationalApprox { p1, p2, p3 });
                golden_min(sse, -1.99, 0.0, 1e-12)
            };
            Ok(RationalApprox { p1, p2, p3 })
        }
        RationalTarget::G { r_e } => {
            let ys = grid.iter().map(|&v| g_exact(v, r_e)).collect::<Result<Vec<_>>>()?;
            let p1 = (-0.5 * r_e * r_e).exp();
            let p2 = if grid.len() == 1 {
                let (v, y) = (grid[0], ys[0]);
                (y * (v + 2.0 * p1 - 2.0) - p1 * v) / (1.0 - y)
            } else {
                let sse = |p2: f64| {
                    sse(&grid, &ys, RationalApprox {
                        p1,
                        p2,
                        p3: 2.0 * p1 + p2 - 2.0,
                    })
                };
                golden_min(sse, -1.2, -0.3, 1e-12)
            };
            Ok(RationalApprox {
                p1,
                p2,
                p3: 2.0 * p1 + p2 - 2.0,
            })
        }
    }
}

fn sse(grid: &[f64], ys: &[f64], m: RationalApprox) -> f64 {
    grid.iter().zip(ys).map(|(&v, &y)| (m.eval(v) - y).powi(2)).sum()
}
