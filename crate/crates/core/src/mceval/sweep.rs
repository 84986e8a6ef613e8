use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_histogram, evaluate_samples, sample_z, Histogram};
use crate::error::{Error, Result};
use crate::fitting::{fit, fit_cf_bisect, FitReport, Method};
use crate::lincomb::LinComb;
use crate::rng::hash_words;

/// Monte-Carlo settings shared by every cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Samples per cell; `0` skips the Monte-Carlo part and reports fits only.
    pub n: usize,
    pub bins: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n: super::DEFAULT_SAMPLES,
            bins: super::DEFAULT_BINS,
            seed: 1,
        }
    }
}

/// One `(ν, K, r, method)` cell; i.i.d. addends with `σ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub nu: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub r: Option<f64>,
    pub method: Method,
    pub sigma_z: Option<f64>,
    pub nu_z: Option<f64>,
    pub d_b: Option<f64>,
    pub ks: Option<f64>,
    pub status: String,
}

impl SweepRow {
    fn failed(nu: f64, k: usize, r: Option<f64>, method: Method, err: &Error) -> Self {
        SweepRow {
            nu,
            k,
            r,
            method,
            sigma_z: None,
            nu_z: None,
            d_b: None,
            ks: None,
            status: err.name().to_string(),
        }
    }
}

/// Seed of the sample set shared by all methods and `r` values of a `(ν, K)` cell.
fn cell_seed(seed: u64, nu: f64, k: usize) -> u64 {
    hash_words(&[seed, nu.to_bits(), k as u64])
}

struct Cell {
    zc: LinComb,
    mc: Option<(Vec<f64>, Histogram, u64)>,
}

fn prepare(nu: f64, k: usize, cfg: &SweepConfig) -> Result<Cell> {
    let zc = LinComb::iid(1.0, nu, k)?;
    let mc = if cfg.n == 0 {
        None
    } else {
        let seed = cell_seed(cfg.seed, nu, k);
        let samples = sample_z(&zc, cfg.n, seed);
        let hist = build_histogram(&samples, cfg.bins)?;
        Some((samples, hist, seed))
    };
    Ok(Cell { zc, mc })
}

fn row(nu: f64, k: usize, cell: &Cell, method: Method, result: Result<FitReport>) -> SweepRow {
    let report = match result {
        Ok(r) => r,
        Err(e) => return SweepRow::failed(nu, k, None, method, &e),
    };
    let (d_b, ks) = match &cell.mc {
        Some((samples, hist, seed)) => {
            let ev = evaluate_samples(samples, hist, &report.fitted, *seed);
            (Some(ev.bhattacharyya.d_b), Some(ev.ks))
        }
        None => (None, None),
    };
    SweepRow {
        nu,
        k,
        r: report.r_used,
        method,
        sigma_z: Some(report.sigma()),
        nu_z: Some(report.nu()),
        d_b,
        ks,
        status: if report.diagnostics.effectively_gaussian {
            "effectively_gaussian".into()
        } else {
            "ok".into()
        },
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter(format!("{name} grid is empty")));
    }
    Ok(())
}

fn check_k(set: &[usize]) -> Result<()> {
    if set.is_empty() || set.contains(&0) {
        return Err(Error::InvalidParameter("K values must be non-empty and at least 1".into()));
    }
    Ok(())
}

/// d_B per `(ν, K, method)` for i.i.d. sums with `σ = 1`.
pub fn sweep_nu(nu_grid: &[f64], k_set: &[usize], methods: &[Method], cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    check_grid("nu", nu_grid)?;
    check_k(k_set)?;
    if methods.is_empty() {
        return Err(Error::InvalidParameter("no methods selected".into()));
    }
    let cells: Vec<(f64, usize)> = nu_grid
        .iter()
        .flat_map(|&nu| k_set.iter().map(move |&k| (nu, k)))
        .collect();
    let rows: Vec<Vec<SweepRow>> = cells
        .par_iter()
        .map(|&(nu, k)| match prepare(nu, k, cfg) {
            Ok(cell) => methods
                .iter()
                .map(|&m| row(nu, k, &cell, m, fit(&cell.zc, m, None)))
                .collect(),
            Err(e) => methods.iter().map(|&m| SweepRow::failed(nu, k, None, m, &e)).collect(),
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// `γ₁ K^{γ₂} + γ₃`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub rmse: f64,
}

impl ScalingFit {
    pub fn eval(&self, k: f64) -> f64 {
        self.gamma1 * k.powf(self.gamma2) + self.gamma3
    }

    /// `γ₁ > 0` and `0 < γ₂ <= 1.2`.
    pub fn is_sane(&self) -> bool {
        self.gamma1 > 0.0 && self.gamma2 > 0.0 && self.gamma2 <= 1.2
    }
}

const GAMMA2_RANGE: (f64, f64) = (1e-3, 3.0);

/// For fixed `γ₂` the model is linear in `(γ₁, γ₃)`; returns those and the SSE.
fn linear_part(ks: &[f64], ys: &[f64], g2: f64) -> (f64, f64, f64) {
    let n = ks.len() as f64;
    let xs: Vec<f64> = ks.iter().map(|k| k.powf(g2)).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let g1 = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let g3 = my - g1 * mx;
    let sse = xs.iter().zip(ys).map(|(x, y)| (g1 * x + g3 - y).powi(2)).sum();
    (g1, g3, sse)
}

/// Least-squares `γ₁ K^{γ₂} + γ₃`, profiling `γ₂` over `[1e-3, 3]`.
pub fn fit_scaling(ks: &[f64], ys: &[f64]) -> Result<ScalingFit> {
    if ks.len() != ys.len() || ks.len() < 3 {
        return Err(Error::InvalidParameter("scaling fit needs at least 3 points".into()));
    }
    let sse = |g2: f64| linear_part(ks, ys, g2).2;
    let (lo, hi) = GAMMA2_RANGE;
    let coarse = 600;
    let step = (hi - lo) / coarse as f64;
    let best = (0..=coarse)
        .map(|i| lo + step * i as f64)
        .min_by(|a, b| sse(*a).total_cmp(&sse(*b)))
        .unwrap();
    let (mut a, mut b) = ((best - step).max(lo), (best + step).min(hi));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-10 {
        let c = b - inv_phi * (b - a);
        let d = a + inv_phi * (b - a);
        if sse(c) < sse(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let g2 = 0.5 * (a + b);
    let (g1, g3, s) = linear_part(ks, ys, g2);
    Ok(ScalingFit {
        gamma1: g1,
        gamma2: g2,
        gamma3: g3,
        rmse: (s / ks.len() as f64).sqrt(),
    })
}

/// Scaling-law fits of the σ_z and ν_z traces for one `ν`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingTrace {
    pub nu: f64,
    pub sigma_z: Option<ScalingFit>,
    pub nu_z: Option<ScalingFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSweep {
    pub rows: Vec<SweepRow>,
    pub scaling: Vec<ScalingTrace>,
}

/// CF-fitted `(σ_z, ν_z)` against `K`, solved exactly at `r = E[Z²]^{-1/2}`.
pub fn sweep_k(k_grid: &[usize], nu_set: &[f64], cfg: &SweepConfig) -> Result<KSweep> {
    check_k(k_grid)?;
    check_grid("nu", nu_set)?;
    if k_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("K grid must be increasing".into()));
    }
    let cells: Vec<(f64, usize)> = nu_set
        .iter()
        .flat_map(|&nu| k_grid.iter().map(move |&k| (nu, k)))
        .collect();
    let rows: Vec<SweepRow> = cells
        .par_iter()
        .map(|&(nu, k)| match prepare(nu, k, cfg) {
            Ok(cell) => row(nu, k, &cell, Method::CfBisect, fit(&cell.zc, Method::CfBisect, None)),
            Err(e) => SweepRow::failed(nu, k, None, Method::CfBisect, &e),
        })
        .collect();
    let scaling = nu_set
        .iter()
        .map(|&nu| {
            let trace: Vec<&SweepRow> = rows.iter().filter(|r| r.nu == nu && r.sigma_z.is_some()).collect();
            let ks: Vec<f64> = trace.iter().map(|r| r.k as f64).collect();
            let fit_of = |get: fn(&SweepRow) -> Option<f64>| {
                let ys: Vec<f64> = trace.iter().filter_map(|r| get(r)).collect();
                fit_scaling(&ks, &ys).ok()
            };
            ScalingTrace {
                nu,
                sigma_z: fit_of(|r| r.sigma_z),
                nu_z: fit_of(|r| r.nu_z),
            }
        })
        .collect();
    Ok(KSweep { rows, scaling })
}

/// Summary of one `(ν, K)` trace of an r-sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RTrace {
    pub nu: f64,
    #[serde(rename = "K")]
    pub k: usize,
    /// The cell at `r = E[Z²]^{-1/2}`.
    pub canonical: SweepRow,
    /// Grid value with the smallest d_B, if any cell succeeded.
    pub argmin_r: Option<f64>,
    pub min_d_b: Option<f64>,
    pub max_d_b: Option<f64>,
    /// The minimiser is neither the first nor the last grid point.
    pub interior_minimum: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RSweep {
    pub rows: Vec<SweepRow>,
    pub traces: Vec<RTrace>,
}

/// d_B of the bisection CF fit as a function of `r`.
pub fn sweep_r(r_grid: &[f64], nu_set: &[f64], k_set: &[usize], cfg: &SweepConfig) -> Result<RSweep> {
    check_grid("r", r_grid)?;
    check_grid("nu", nu_set)?;
    check_k(k_set)?;
    if r_grid.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return Err(Error::InvalidParameter("r grid must be positive".into()));
    }
    let cells: Vec<(f64, usize)> = nu_set
        .iter()
        .flat_map(|&nu| k_set.iter().map(move |&k| (nu, k)))
        .collect();
    let per_cell: Vec<(Vec<SweepRow>, RTrace)> = cells
        .par_iter()
        .map(|&(nu, k)| {
            let cell = match prepare(nu, k, cfg) {
                Ok(c) => c,
                Err(e) => {
                    let rows: Vec<SweepRow> = r_grid
                        .iter()
                        .map(|&r| SweepRow::failed(nu, k, Some(r), Method::CfBisect, &e))
                        .collect();
                    let canonical = SweepRow::failed(nu, k, None, Method::CfBisect, &e);
                    let trace = RTrace {
                        nu,
                        k,
                        canonical,
                        argmin_r: None,
                        min_d_b: None,
                        max_d_b: None,
                        interior_minimum: false,
                    };
                    return (rows, trace);
                }
            };
            let run = |r: f64| {
                let mut out = row(nu, k, &cell, Method::CfBisect, fit_cf_bisect(&cell.zc, r));
                out.r = Some(r);
                out
            };
            let rows: Vec<SweepRow> = r_grid.iter().map(|&r| run(r)).collect();
            let canonical = run(1.0 / cell.zc.second_moment().sqrt());
            let scored: Vec<(usize, f64)> = rows
                .iter()
                .enumerate()
                .filter_map(|(i, r)| r.d_b.map(|d| (i, d)))
                .collect();
            let min = scored.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1));
            let max = scored.iter().map(|s| s.1).max_by(f64::total_cmp);
            let trace = RTrace {
                nu,
                k,
                canonical,
                argmin_r: min.map(|(i, _)| r_grid[i]),
                min_d_b: min.map(|m| m.1),
                max_d_b: max,
                interior_minimum: min.is_some_and(|(i, _)| i > 0 && i + 1 < r_grid.len()),
            };
            (rows, trace)
        })
        .collect();
    let mut rows = Vec::new();
    let mut traces = Vec::new();
    for (r, t) in per_cell {
        rows.extend(r);
        traces.push(t);
    }
    Ok(RSweep { rows, traces })
}
