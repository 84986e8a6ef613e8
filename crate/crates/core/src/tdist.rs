//! The scaled Student's t law `σ·T(ν)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::specfun::{lgam, ln_bessel_k, ln_gamma_ratio, reg_inc_beta_pair, stirling_correction, Accuracy};

/// `σ·T` with `T` a standard Student's t variable with `ν` degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScaledT")]
pub struct ScaledT {
    sigma: f64,
    nu: f64,
}

#[derive(Deserialize)]
struct RawScaledT {
    sigma: f64,
    nu: f64,
}

impl TryFrom<RawScaledT> for ScaledT {
    type Error = Error;
    fn try_from(raw: RawScaledT) -> Result<Self> {
        ScaledT::new(raw.sigma, raw.nu)
    }
}

impl ScaledT {
    /// Requires `sigma > 0` and `nu > 0`, both finite.
    pub fn new(sigma: f64, nu: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma must be positive (got {sigma})")));
        }
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::InvalidParameter(format!("nu must be positive (got {nu})")));
        }
        Ok(ScaledT { sigma, nu })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Normalising constant `α_ν = Γ((ν+1)/2) / (Γ(ν/2) √(νπ))` of the unit-scale density.
    pub fn alpha(&self) -> f64 {
        ln_alpha(self.nu).exp()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let t = x / self.sigma;
        let nu = self.nu;
        (ln_alpha(nu) - self.sigma.ln() - 0.5 * (nu + 1.0) * (t * t / nu).ln_1p()).exp()
    }

    /// Upper tail `P(σT > x)`.
    pub fn sf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 1.0 - self.sf(-x);
        }
        let t = x / self.sigma;
        let t2 = t * t;
        let denom = t2 + self.nu;
        let (xb, yb) = (self.nu / denom, t2 / denom);
        match reg_inc_beta_pair(xb, yb, 0.5 * self.nu, 0.5, &Accuracy::default()) {
            Ok(v) => 0.5 * v,
            Err(_) => f64::NAN,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            self.sf(-x)
        } else {
            1.0 - self.sf(x)
        }
    }

    /// Inverse CDF for `0 < p < 1`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain("quantile", format!("p = {p} outside (0, 1)")));
        }
        if p == 0.5 {
            return Ok(0.0);
        }
        if p < 0.5 {
            Ok(-self.upper_point(p))
        } else {
            Ok(self.upper_point(1.0 - p))
        }
    }

    /// The `y >= 0` with `sf(y) = q`, `0 < q < 1/2`.
    fn upper_point(&self, q: f64) -> f64 {
        // Cauchy quantile as the first guess.
        let guess = self.sigma * (PI * (0.5 - q)).tan();
        let mut lo = 0.0;
        let mut hi = guess.max(self.sigma);
        while self.sf(hi) > q {
            lo = hi;
            hi *= 2.0;
        }
        let mut x = guess.clamp(lo, hi);
        for _ in 0..400 {
            let f = self.sf(x) - q;
            if f.abs() <= 1e-15 + 1e-13 * q {
                return x;
            }
            if f > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let newton = x + f / self.pdf(x);
            x = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                break;
            }
        }
        x
    }

    /// `E[(σT)^m]` for a positive integer `m < ν`.
    pub fn moment(&self, m: u32) -> Result<f64> {
        if m == 0 {
            return Ok(1.0);
        }
        if f64::from(m) >= self.nu {
            return Err(Error::MomentNotFinite {
                order: f64::from(m),
                nu: self.nu,
            });
        }
        if m % 2 == 1 {
            return Ok(0.0);
        }
        let mut prod = 1.0;
        for i in 1..=m / 2 {
            let i = f64::from(i);
            prod *= self.nu * (2.0 * i - 1.0) / (self.nu - 2.0 * i);
        }
        Ok(self.sigma.powi(m as i32) * prod)
    }

    /// `E[|σT|^m]` for real `0 < m < ν`.
    pub fn abs_moment(&self, m: f64) -> Result<f64> {
        if !(m > 0.0) {
            return Err(Error::domain("abs_moment", format!("order m = {m} must be positive")));
        }
        if m >= self.nu {
            return Err(Error::MomentNotFinite { order: m, nu: self.nu });
        }
        let nu = self.nu;
        let ln = m * self.sigma.ln() + 0.5 * m * nu.ln() + ln_gamma_ratio(0.5 * (nu - m), 0.5 * nu)
            + lgam(0.5 * (m + 1.0))
            - 0.5 * PI.ln();
        Ok(ln.exp())
    }

    /// Characteristic function; real, even in `r`, equal to 1 at `r = 0`.
    pub fn cf(&self, r: f64) -> f64 {
        t_cf_from_x(self.nu, self.nu.sqrt() * self.sigma * r.abs())
    }

    /// `ln CF(r)`, finite even where the CF itself underflows.
    pub fn ln_cf(&self, r: f64) -> f64 {
        ln_t_cf_from_x(self.nu, self.nu.sqrt() * self.sigma * r.abs())
    }

    /// `n` draws as `σ G / sqrt(C/ν)` with `G` standard normal and `C ~ χ²_ν`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        rng::t_stream(self.sigma, self.nu, n, seed, 0)
    }
}

fn ln_alpha(nu: f64) -> f64 {
    ln_gamma_ratio(0.5 * (nu + 1.0), 0.5 * nu) - 0.5 * (nu * PI).ln()
}

/// `ln[x^{ν/2} K_{ν/2}(x) / (2^{ν/2−1} Γ(ν/2))]`, the log of the unit t CF
/// kernel evaluated at `x = √ν σ |r|`.
pub(crate) fn ln_t_cf_from_x(nu: f64, x: f64) -> f64 {
    // Below this the kernel equals 1 to double precision for every nu of interest.
    if x < 1e-100 {
        return 0.0;
    }
    let half = 0.5 * nu;
    if half >= DEBYE_MIN_HALF_NU {
        return ln_t_cf_debye(half, x).min(0.0);
    }
    match ln_bessel_k(half, x) {
        Ok(lk) => (half * x.ln() + lk - (half - 1.0) * std::f64::consts::LN_2 - lgam(half)).min(0.0),
        Err(_) => 0.0,
    }
}

const DEBYE_MIN_HALF_NU: f64 = 100.0;

// Debye's expansion of K_h(hz) merged with Stirling's series for Γ(h); the
// h·ln h terms cancel exactly, which the direct form cannot do in floating point.
fn ln_t_cf_debye(h: f64, x: f64) -> f64 {
    let z = x / h;
    let s = z.hypot(1.0);
    let a = z * z / (1.0 + s);
    let p = 1.0 / s;
    let p2 = p * p;
    let u1 = p * (3.0 - 5.0 * p2) / 24.0;
    let u2 = p2 * (81.0 + p2 * (-462.0 + p2 * 385.0)) / 1152.0;
    let u3 = p * p2 * (30375.0 + p2 * (-369603.0 + p2 * (765765.0 - p2 * 425425.0))) / 414720.0;
    let u4 = p2
        * p2
        * (4465125.0 + p2 * (-94121676.0 + p2 * (349922430.0 + p2 * (-446185740.0 + p2 * 185910725.0))))
        / 39813120.0;
    let u5 = p * p2
        * p2
        * (1519035525.0
            + p2 * (-49286948607.0
                + p2 * (284499769554.0 + p2 * (-614135872350.0 + p2 * (566098157625.0 - p2 * 188699385875.0)))))
        / 6688604160.0;
    let inv = 1.0 / h;
    let series = inv * (-u1 + inv * (u2 + inv * (-u3 + inv * (u4 - inv * u5))));
    h * ((0.5 * a).ln_1p() - a) - 0.25 * (z * z).ln_1p() + series.ln_1p() - stirling_correction(h)
}

pub(crate) fn t_cf_from_x(nu: f64, x: f64) -> f64 {
    ln_t_cf_from_x(nu, x).exp()
}
