//! Exact statistics of `Z = Σ σᵢ Tᵢ` for independent Student's t addends.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{gauss_2f1_with, lgam, ln_beta, ln_gamma_ratio, Accuracy};
use crate::tdist::{ln_t_cf_from_x, ScaledT};

/// One addend `σ T(ν)` with `σ > 0`, `ν > 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTerm")]
pub struct TTerm {
    sigma: f64,
    nu: f64,
}

#[derive(Deserialize)]
struct RawTerm {
    sigma: f64,
    nu: f64,
}

impl TryFrom<RawTerm> for TTerm {
    type Error = Error;
    fn try_from(raw: RawTerm) -> Result<Self> {
        TTerm::new(raw.sigma, raw.nu)
    }
}

impl TTerm {
    pub fn new(sigma: f64, nu: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma must be positive (got {sigma})")));
        }
        if !(nu > 2.0) || !nu.is_finite() {
            return Err(Error::InvalidParameter(format!("nu must exceed 2 (got {nu})")));
        }
        Ok(TTerm { sigma, nu })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn dist(&self) -> ScaledT {
        ScaledT::new(self.sigma, self.nu).expect("TTerm invariants imply ScaledT invariants")
    }

    /// `E[(σT)²] = σ²ν/(ν−2)`.
    pub fn second_moment(&self) -> f64 {
        self.sigma * self.sigma * self.nu / (self.nu - 2.0)
    }
}

impl From<TTerm> for ScaledT {
    fn from(t: TTerm) -> ScaledT {
        t.dist()
    }
}

/// Truncation record of a series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesDiag {
    pub terms_used: usize,
    pub last_rel_term: f64,
    pub converged: bool,
}

/// The non-empty, ordered list of addends of `Z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinComb {
    terms: Vec<TTerm>,
}

impl LinComb {
    pub fn new(terms: Vec<TTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("a linear combination needs at least one term".into()));
        }
        Ok(LinComb { terms })
    }

    /// `K` copies of `σ T(ν)`.
    pub fn iid(sigma: f64, nu: f64, k: usize) -> Result<Self> {
        let t = TTerm::new(sigma, nu)?;
        if k == 0 {
            return Err(Error::InvalidParameter("K must be at least 1".into()));
        }
        Ok(LinComb { terms: vec![t; k] })
    }

    /// Builds from `(sigma, nu)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let terms = pairs
            .iter()
            .map(|&(s, n)| TTerm::new(s, n))
            .collect::<Result<Vec<_>>>()?;
        LinComb::new(terms)
    }

    pub fn terms(&self) -> &[TTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Every scale multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| TTerm::new(c * t.sigma, t.nu))
            .collect::<Result<Vec<_>>>()?;
        LinComb::new(terms)
    }

    // Symmetric statistics are summed in a canonical order so that they do
    // not depend on how the caller listed the terms.
    fn canonical(&self) -> Vec<TTerm> {
        let mut v = self.terms.clone();
        v.sort_by(|a, b| a.sigma.total_cmp(&b.sigma).then(a.nu.total_cmp(&b.nu)));
        v
    }

    /// `E[Z²] = Σ σᵢ² νᵢ / (νᵢ − 2)`.
    pub fn second_moment(&self) -> f64 {
        self.canonical().iter().map(TTerm::second_moment).sum()
    }

    /// `E[Z⁴] = Σ σᵢ⁴ E[Tᵢ⁴] + 6 Σ_{i<j} σᵢ² σⱼ² E[Tᵢ²] E[Tⱼ²]`; needs every `νᵢ > 4`.
    pub fn fourth_moment(&self) -> Result<f64> {
        let terms = self.canonical();
        let mut fourth = 0.0;
        let mut m2 = Vec::with_capacity(terms.len());
        for t in &terms {
            fourth += t.dist().moment(4)?;
            m2.push(t.second_moment());
        }
        let mut cross = 0.0;
        for i in 0..m2.len() {
            for j in i + 1..m2.len() {
                cross += m2[i] * m2[j];
            }
        }
        Ok(fourth + 6.0 * cross)
    }

    /// `ln CF_Z(r)`.
    pub fn ln_cf_z(&self, r: f64) -> f64 {
        self.canonical()
            .iter()
            .map(|t| ln_t_cf_from_x(t.nu, t.nu.sqrt() * t.sigma * r.abs()))
            .sum()
    }

    /// `CF_Z(r) = Π CF_{σᵢTᵢ}(r)`, accumulated in log space.
    pub fn cf_z(&self, r: f64) -> f64 {
        self.ln_cf_z(r).exp()
    }
}

/// Characteristic function of a sum of independent scaled t laws with any
/// `νᵢ > 0`, accumulated in log space.
pub fn cf_of_sum(dists: &[ScaledT], r: f64) -> f64 {
    let mut v: Vec<ScaledT> = dists.to_vec();
    v.sort_by(|a, b| a.sigma().total_cmp(&b.sigma()).then(a.nu().total_cmp(&b.nu())));
    v.iter().map(|d| d.ln_cf(r)).sum::<f64>().exp()
}

/// `E|σT| = σ √ν Γ((ν−1)/2) / (Γ(ν/2) √π)`, i.e. `2σ I₂,₁` when `σ = 1`.
fn i21(nu: f64) -> f64 {
    (0.5 * nu.ln() + ln_gamma_ratio(0.5 * (nu - 1.0), 0.5 * nu) - 0.5 * PI.ln()).exp() / 2.0
}

fn ln_alpha(nu: f64) -> f64 {
    ln_gamma_ratio(0.5 * (nu + 1.0), 0.5 * nu) - 0.5 * (nu * PI).ln()
}

/// `ln ₂F₁(a, b; c; z)` for positive parameters and `z < 1`. The Pfaff
/// factor for negative `z` is kept in log form so that large `a` cannot
/// overflow it.
fn ln_2f1(a: f64, b: f64, c: f64, z: f64, acc: &Accuracy) -> Result<f64> {
    if z < 0.0 {
        let w = z / (z - 1.0);
        Ok(-a * (-z).ln_1p() + gauss_2f1_with(a, c - b, c, w, acc)?.ln())
    } else {
        Ok(gauss_2f1_with(a, b, c, z, acc)?.ln())
    }
}

/// Pieces of the K=2 absolute moment that do not involve the infinite series.
struct K2Setup {
    nu1: f64,
    nu2: f64,
    omega2: f64,
    ln_omega1: f64,
    /// `2 / (√π B(ν₁/2, ½))`
    prefactor: f64,
}

impl K2Setup {
    fn new(t1: &TTerm, t2: &TTerm) -> Self {
        let (s1, nu1, s2, nu2) = (t1.sigma, t1.nu, t2.sigma, t2.nu);
        let ln_omega1 = -0.5 * (nu2 - 1.0) * (nu1.ln() + 2.0 * (s1 / s2).ln()) + 0.5 * (nu2 + 1.0) * nu2.ln();
        let omega2 = nu2 * s2 * s2 / (nu1 * s1 * s1) - 1.0;
        let prefactor = 2.0 / (PI.sqrt() * ln_beta(0.5 * nu1, 0.5).exp());
        K2Setup {
            nu1,
            nu2,
            omega2,
            ln_omega1,
            prefactor,
        }
    }

    /// Summand `i` of the series, without the common prefactor.
    fn term(&self, i: usize, gamma_ratio: f64, acc: &Accuracy) -> Result<f64> {
        let fi = i as f64;
        let a = 0.5 * (self.nu2 + 1.0);
        let b = 0.5 * (self.nu1 + self.nu2 + 2.0 * fi - 1.0);
        let ln_f = if self.omega2 == 0.0 {
            0.0
        } else {
            ln_2f1(a, b, b + 1.0, -self.omega2, acc)?
        };
        Ok(gamma_ratio * (self.ln_omega1 + ln_f).exp()
            / ((self.nu1 + 2.0 * fi) * (self.nu1 + self.nu2 + 2.0 * fi - 1.0)))
    }
}

/// Running partial sums `S_N` of the series for `I'₂,₂`, prefactor included.
struct PartialSums<'a> {
    setup: &'a K2Setup,
    acc: &'a Accuracy,
    next: usize,
    /// `Γ(i + ½) / i!` for the next index.
    gamma_ratio: f64,
    sum: f64,
    last_term: f64,
}

impl<'a> PartialSums<'a> {
    fn new(setup: &'a K2Setup, acc: &'a Accuracy) -> Self {
        PartialSums {
            setup,
            acc,
            next: 0,
            gamma_ratio: PI.sqrt(),
            sum: 0.0,
            last_term: 0.0,
        }
    }

    fn advance(&mut self) -> Result<()> {
        let t = self.setup.term(self.next, self.gamma_ratio, self.acc)?;
        if !t.is_finite() {
            return Err(Error::Overflow { routine: "abs_moment_k2" });
        }
        self.sum += t;
        self.last_term = t;
        let fi = self.next as f64;
        self.gamma_ratio *= (fi + 0.5) / (fi + 1.0);
        self.next += 1;
        Ok(())
    }

    fn advance_to(&mut self, n: usize) -> Result<()> {
        while self.next < n {
            self.advance()?;
        }
        Ok(())
    }

    fn value(&self) -> f64 {
        self.setup.prefactor * self.sum
    }
}

/// First partial sums of the `I'₂,₂` series: entry `n − 1` holds the sum of
/// the first `n` terms (prefactor included).
pub fn i22_partial_sums(t1: &TTerm, t2: &TTerm, n: usize) -> Result<Vec<f64>> {
    let setup = K2Setup::new(t1, t2);
    let acc = Accuracy::default();
    let mut ps = PartialSums::new(&setup, &acc);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        ps.advance()?;
        out.push(ps.value());
    }
    Ok(out)
}

/// `I'₂,₂` by plain truncation: stop once `|term_i| / |S_i| < rel_tol` with `i >= 5`.
///
/// The summands decay like `i^{-5/2}`, so the neglected tail is of order
/// `i · |term_i|` and this rule leaves a relative error well above `rel_tol`.
pub fn i22_truncated(t1: &TTerm, t2: &TTerm, acc: &Accuracy) -> Result<(f64, SeriesDiag)> {
    let setup = K2Setup::new(t1, t2);
    let mut ps = PartialSums::new(&setup, acc);
    let mut rel = f64::INFINITY;
    while ps.next < acc.max_terms {
        ps.advance()?;
        rel = (ps.last_term / ps.sum).abs();
        if ps.next > 5 && rel < acc.rel_tol {
            return Ok((
                ps.value(),
                SeriesDiag {
                    terms_used: ps.next,
                    last_rel_term: rel,
                    converged: true,
                },
            ));
        }
    }
    Err(non_convergence(acc.max_terms, rel))
}

fn non_convergence(terms: usize, rel: f64) -> Error {
    Error::NonConvergence {
        routine: "abs_moment_k2",
        terms,
        diag: Some(SeriesDiag {
            terms_used: terms,
            last_rel_term: rel,
            converged: false,
        }),
    }
}

const RICHARDSON_START: usize = 8;
const RICHARDSON_DEPTH: usize = 6;

/// `I'₂,₂` from partial sums at `N = 8·2^j`, extrapolated in `N` with the
/// tail exponents `3/2, 5/2, 7/2, …`. `last_rel_term` reports the relative
/// change between the last two extrapolated estimates.
pub fn i22_prime(t1: &TTerm, t2: &TTerm, acc: &Accuracy) -> Result<(f64, SeriesDiag)> {
    let setup = K2Setup::new(t1, t2);
    let mut ps = PartialSums::new(&setup, acc);
    let mut prev_row: Vec<f64> = Vec::new();
    let mut n = RICHARDSON_START;
    let mut rel = f64::INFINITY;
    let mut j = 0;
    while n <= acc.max_terms {
        ps.advance_to(n)?;
        let mut row = vec![ps.value()];
        for k in 1..=j.min(RICHARDSON_DEPTH) {
            let factor = 2f64.powf(0.5 + k as f64) - 1.0;
            let v = row[k - 1] + (row[k - 1] - prev_row[k - 1]) / factor;
            row.push(v);
        }
        let best = *row.last().unwrap();
        if j >= 1 {
            let prev_best = prev_row[prev_row.len() - 1];
            rel = ((best - prev_best) / best).abs();
            if j >= 2 && rel <= acc.rel_tol {
                return Ok((
                    best,
                    SeriesDiag {
                        terms_used: n,
                        last_rel_term: rel,
                        converged: true,
                    },
                ));
            }
        }
        prev_row = row;
        n *= 2;
        j += 1;
    }
    Err(non_convergence(ps.next, rel))
}

/// `E|σ₁T₁ + σ₂T₂| = 2σ₁I₁ + 2σ₂(I₂,₁ − α_{ν₂} I'₂,₂)`.
///
/// The value is symmetric in the two addends; they are ordered so that
/// `ν₂σ₂² >= ν₁σ₁²` (`ω₂ >= 0`). With `ω₂` near −1 the series summands
/// reach their asymptotic `i^{-5/2}` regime only after `~1/(1+ω₂)` terms.
pub fn abs_moment_k2(t1: &TTerm, t2: &TTerm, acc: &Accuracy) -> Result<(f64, SeriesDiag)> {
    let weight = |t: &TTerm| t.nu * t.sigma * t.sigma;
    if weight(t2) < weight(t1) {
        abs_moment_k2_ordered(t2, t1, acc)
    } else {
        abs_moment_k2_ordered(t1, t2, acc)
    }
}

/// The K=2 assembly in the orientation given.
pub fn abs_moment_k2_ordered(t1: &TTerm, t2: &TTerm, acc: &Accuracy) -> Result<(f64, SeriesDiag)> {
    let (s1, nu1, s2, nu2) = (t1.sigma, t1.nu, t2.sigma, t2.nu);
    let ln_i1 = ln_alpha(nu1) + ln_alpha(nu2) + ln_beta(0.5, 0.5 * (nu1 + nu2 - 1.0)) + (s1 / s2).ln()
        + 1.5 * nu1.ln()
        - (nu1 - 1.0).ln()
        + ln_2f1(
            0.5 * (nu2 + 1.0),
            0.5,
            0.5 * (nu1 + nu2),
            1.0 - nu1 * s1 * s1 / (nu2 * s2 * s2),
            acc,
        )?;
    let (i22p, diag) = i22_prime(t1, t2, acc)?;
    let value = 2.0 * s1 * ln_i1.exp() + 2.0 * s2 * (i21(nu2) - ln_alpha(nu2).exp() * i22p);
    Ok((value, diag))
}

/// `E|Z|` for two i.i.d. addends `σ T(ν)`:
/// `σ √ν Γ((ν−1)/2) Γ(ν−½) / (2^{ν−2} Γ(ν/2)³)`. Only `K = 2` has a closed form.
pub fn abs_moment_iid(sigma: f64, nu: f64, k: usize) -> Result<f64> {
    if k != 2 {
        return Err(Error::UnsupportedK(k));
    }
    let t = TTerm::new(sigma, nu)?;
    let ln = t.sigma.ln() + 0.5 * nu.ln() + ln_gamma_ratio(0.5 * (nu - 1.0), 0.5 * nu)
        + ln_gamma_ratio(nu - 0.5, 0.5 * nu)
        - lgam(0.5 * nu)
        - (nu - 2.0) * std::f64::consts::LN_2;
    Ok(ln.exp())
}
