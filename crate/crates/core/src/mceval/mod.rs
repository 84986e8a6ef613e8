//! Monte-Carlo evaluation of fitted laws: sampling `Z`, histograms,
//! Bhattacharyya and Kolmogorov–Smirnov distances, and parameter sweeps.

mod distance;
mod histogram;
mod sweep;

pub use distance::{bhattacharyya, ks_distance, BhattaEstimate};
pub use histogram::{build_histogram, Histogram, SPAN};
pub use sweep::{
    fit_scaling, sweep_k, sweep_nu, sweep_r, KSweep, RSweep, RTrace, ScalingFit, ScalingTrace, SweepConfig,
    SweepRow,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lincomb::LinComb;
use crate::rng;
use crate::tdist::ScaledT;

pub const DEFAULT_BINS: usize = 1000;
pub const DEFAULT_SAMPLES: usize = 1_000_000;

/// `n` draws of `Z = Σ σᵢ Tᵢ`; addend `i` reads stream `(seed, i)`.
pub fn sample_z(zc: &LinComb, n: usize, seed: u64) -> Vec<f64> {
    let mut terms = zc.terms().iter().enumerate();
    let (_, first) = terms.next().expect("LinComb is non-empty");
    let mut z = rng::t_stream(first.sigma(), first.nu(), n, seed, 0);
    for (i, t) in terms {
        let draws = rng::t_stream(t.sigma(), t.nu(), n, seed, i as u64);
        for (acc, x) in z.iter_mut().zip(draws) {
            *acc += x;
        }
    }
    z
}

/// Distances of a fitted law to a Monte-Carlo sample of `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub bhattacharyya: BhattaEstimate,
    pub ks: f64,
}

/// Distances of `fit` to already drawn samples.
pub fn evaluate_samples(samples: &[f64], hist: &Histogram, fit: &ScaledT, seed: u64) -> Evaluation {
    let mut b = bhattacharyya(hist, fit);
    b.seed = Some(seed);
    Evaluation {
        bhattacharyya: b,
        ks: ks_distance(samples, fit),
    }
}

/// Draws `n` samples of `zc` with `seed` and measures `fit` against them.
pub fn evaluate(zc: &LinComb, fit: &ScaledT, n: usize, bins: usize, seed: u64) -> Result<Evaluation> {
    let samples = sample_z(zc, n, seed);
    let hist = build_histogram(&samples, bins)?;
    Ok(evaluate_samples(&samples, &hist, fit, seed))
}
