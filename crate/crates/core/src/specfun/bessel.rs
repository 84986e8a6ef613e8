//! Modified Bessel function of the second kind, real non-negative order.
//!
//! The order is split as `order = n + mu` with `|mu| <= 1/2`. `K_mu` and
//! `K_{mu+1}` come from Temme's series when `x <= 2` and from Steed's
//! continued fraction otherwise; the forward recurrence
//! `K_{v+1} = K_{v-1} + (2v/x) K_v` (stable for K) then climbs to the
//! requested order. Values are carried as a mantissa and a natural-log
//! scale so that orders in the thousands neither overflow near zero nor
//! underflow for large `x`.

use std::f64::consts::PI;

use super::gamma::{rgamma1p, RGAMMA_TAYLOR};
use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 100_000;
const RESCALE_AT: f64 = 1e280;

/// A positive value stored as `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl Scaled {
    pub fn ln(&self) -> f64 {
        self.mantissa.ln() + self.log_scale
    }

    /// The plain value; may overflow to infinity or underflow to zero.
    pub fn value(&self) -> f64 {
        self.mantissa * self.log_scale.exp()
    }
}

/// Temme's `gamma1(mu) = (1/Γ(1−mu) − 1/Γ(1+mu)) / (2mu)` and
/// `gamma2(mu) = (1/Γ(1−mu) + 1/Γ(1+mu)) / 2`, both from the even/odd
/// parts of the reciprocal-gamma Taylor series.
fn temme_gammas(mu: f64) -> (f64, f64) {
    let mu2 = mu * mu;
    let mut g1 = 0.0;
    let mut g2 = 0.0;
    // c_k sits at index k-1; even k feed gamma1, odd k feed gamma2.
    for k in (1..=RGAMMA_TAYLOR.len()).rev() {
        let c = RGAMMA_TAYLOR[k - 1];
        if k % 2 == 0 {
            g1 = g1 * mu2 + c;
        } else {
            g2 = g2 * mu2 + c;
        }
    }
    (-g1, g2)
}

/// `(K_mu(x), K_{mu+1}(x))` by Temme's series, `|mu| <= 1/2`, `0 < x <= 2`.
fn temme_series(mu: f64, x: f64) -> Result<(f64, f64)> {
    let x2 = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
    let (gam1, gam2) = temme_gammas(mu);
    let gampl = rgamma1p(mu);
    let gammi = rgamma1p(-mu);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    for i in 1..=MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu * mu);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        let del1 = c * (p - fi * ff);
        sum1 += del1;
        if del.abs() < sum.abs() * EPS {
            return Ok((sum, sum1 * 2.0 / x));
        }
    }
    Err(Error::NonConvergence {
        routine: "bessel_k (series)",
        terms: MAX_ITER,
        diag: None,
    })
}

/// `(e^x K_mu(x), e^x K_{mu+1}(x))` by Steed's continued fraction, `x > 2`.
fn steed_cf(mu: f64, x: f64) -> Result<(f64, f64)> {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu * mu;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..=MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            let h = a1 * h;
            let kmu = (PI / (2.0 * x)).sqrt() / s;
            let k1 = kmu * (mu + x + 0.5 - h) / x;
            return Ok((kmu, k1));
        }
    }
    Err(Error::NonConvergence {
        routine: "bessel_k (continued fraction)",
        terms: MAX_ITER,
        diag: None,
    })
}

fn check_args(order: f64, x: f64) -> Result<()> {
    if !(order >= 0.0) || !order.is_finite() {
        return Err(Error::domain("bessel_k", format!("order = {order} must be non-negative")));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("bessel_k", format!("x = {x} must be positive and finite")));
    }
    Ok(())
}

/// `K_order(x)` in scaled form; never overflows or underflows.
pub fn bessel_k_scaled(order: f64, x: f64) -> Result<Scaled> {
    check_args(order, x)?;
    let n = (order + 0.5).floor();
    let mu = order - n;
    let (mut kmu, mut k1, mut log_scale) = if x <= 2.0 {
        let (a, b) = temme_series(mu, x)?;
        (a, b, 0.0)
    } else {
        let (a, b) = steed_cf(mu, x)?;
        (a, b, -x)
    };
    let two_over_x = 2.0 / x;
    let steps = n as u64;
    for i in 1..=steps {
        let next = (mu + i as f64) * two_over_x * k1 + kmu;
        kmu = k1;
        k1 = next;
        if k1 > RESCALE_AT {
            kmu /= RESCALE_AT;
            k1 /= RESCALE_AT;
            log_scale += RESCALE_AT.ln();
        }
    }
    if !(kmu > 0.0) || !kmu.is_finite() {
        // The starting pair overflowed (x extremely small with mu near 1/2).
        return Err(Error::Overflow { routine: "bessel_k" });
    }
    Ok(Scaled {
        mantissa: kmu,
        log_scale,
    })
}

/// `ln K_order(x)`.
pub fn ln_bessel_k(order: f64, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(order, x)?.ln())
}

/// `K_order(x)`; signals overflow when the value exceeds `f64::MAX`.
pub fn bessel_k(order: f64, x: f64) -> Result<f64> {
    let v = bessel_k_scaled(order, x)?.value();
    if v.is_infinite() {
        return Err(Error::Overflow { routine: "bessel_k" });
    }
    Ok(v)
}
