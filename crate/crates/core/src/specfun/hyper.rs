//! Gauss hypergeometric function `₂F₁(a, b; c; z)` for real `z <= 1`.
//!
//! Negative arguments go through the Pfaff transformation
//! `₂F₁(a,b;c;z) = (1−z)^{−a} ₂F₁(a, c−b; c; z/(z−1))`, which maps them
//! into `[0, 1)`. On `[0, 1)` the power series is summed directly, except
//! within 0.05 of 1 where the `c−a−b` connection formula is used whenever
//! `c−a−b` is safely away from an integer. At `z = 1` Gauss's summation
//! theorem applies.

use super::gamma::ln_gamma_signed;
use super::Accuracy;
use crate::error::{Error, Result};

const CONNECTION_WINDOW: f64 = 0.05;
const INTEGER_GUARD: f64 = 0.05;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Sum of the hypergeometric power series for `0 <= x < 1`.
fn power_series(a: f64, b: f64, c: f64, x: f64, acc: &Accuracy) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    // Terms may change sign while n < -a or n < -b; no stopping before that.
    let settle = (-a).max(-b).max(0.0).ceil() as usize + 2;
    for n in 0..acc.max_terms {
        let fn_ = n as f64;
        let ratio = (a + fn_) * (b + fn_) / ((c + fn_) * (fn_ + 1.0)) * x;
        term *= ratio;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        // Once the term ratio has settled below one the remaining tail is
        // bounded by a geometric series with ratio max(|ratio|, x).
        let rho = ratio.abs().max(x);
        if rho < 1.0 && n >= settle {
            let next = term.abs() * rho;
            if next / (1.0 - rho) <= 0.01 * acc.rel_tol * sum.abs() {
                return Ok(sum);
            }
        }
    }
    Err(Error::NonConvergence {
        routine: "gauss_2f1",
        terms: acc.max_terms,
        diag: None,
    })
}

/// `Γ(n1) Γ(n2) / (Γ(d1) Γ(d2))` with signs; zero if a denominator sits on a pole.
fn gamma_quotient(n1: f64, n2: f64, d1: f64, d2: f64) -> Option<f64> {
    let (ln1, s1) = ln_gamma_signed(n1)?;
    let (ln2, s2) = ln_gamma_signed(n2)?;
    let (lnd1, sd1) = match ln_gamma_signed(d1) {
        Some(v) => v,
        None => return Some(0.0),
    };
    let (lnd2, sd2) = match ln_gamma_signed(d2) {
        Some(v) => v,
        None => return Some(0.0),
    };
    Some(s1 * s2 * sd1 * sd2 * (ln1 + ln2 - lnd1 - lnd2).exp())
}

fn near_integer(x: f64, guard: f64) -> bool {
    (x - x.round()).abs() < guard
}

/// `₂F₁` for `0 <= x <= 1`.
fn unit_interval(a: f64, b: f64, c: f64, x: f64, acc: &Accuracy) -> Result<f64> {
    let s = c - a - b;
    if x == 1.0 {
        if s <= 0.0 {
            return Err(Error::domain(
                "gauss_2f1",
                format!("series diverges at z = 1 with c - a - b = {s}"),
            ));
        }
        return gamma_quotient(c, s, c - a, c - b).ok_or_else(|| {
            Error::domain("gauss_2f1", "pole in Gauss summation")
        });
    }
    let y = 1.0 - x;
    if y < CONNECTION_WINDOW && !near_integer(s, INTEGER_GUARD) {
        let first = gamma_quotient(c, s, c - a, c - b);
        let second = gamma_quotient(c, -s, a, b);
        if let (Some(ga), Some(gb)) = (first, second) {
            let fa = if ga == 0.0 {
                0.0
            } else {
                ga * power_series(a, b, 1.0 - s, y, acc)?
            };
            let fb = if gb == 0.0 {
                0.0
            } else {
                gb * y.powf(s) * power_series(c - a, c - b, 1.0 + s, y, acc)?
            };
            return Ok(fa + fb);
        }
    }
    power_series(a, b, c, x, acc)
}

/// `₂F₁(a, b; c; z)` with default accuracy.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    gauss_2f1_with(a, b, c, z, &Accuracy::default())
}

/// `₂F₁(a, b; c; z)` for `z <= 1`, `c` not a non-positive integer.
pub fn gauss_2f1_with(a: f64, b: f64, c: f64, z: f64, acc: &Accuracy) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(Error::domain("gauss_2f1", "non-finite argument"));
    }
    if is_nonpositive_integer(c) {
        return Err(Error::domain("gauss_2f1", format!("c = {c} is a non-positive integer")));
    }
    if z > 1.0 {
        return Err(Error::domain("gauss_2f1", format!("z = {z} exceeds 1")));
    }
    if z == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    if z < 0.0 {
        let w = z / (z - 1.0);
        let scale = (-a * (-z).ln_1p()).exp();
        return Ok(scale * unit_interval(a, c - b, c, w, acc)?);
    }
    unit_interval(a, b, c, z, acc)
}
