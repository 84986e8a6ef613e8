use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::histogram::Histogram;
use crate::tdist::ScaledT;

/// Binned Bhattacharyya distance of a histogram to a fitted law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BhattaEstimate {
    pub d_b: f64,
    pub bins: usize,
    pub n_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Probability mass of `fit` on `[a, b]`, taken from whichever tail is more accurate.
fn mass(fit: &ScaledT, a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        fit.sf(a) - fit.sf(b)
    } else {
        fit.cdf(b) - fit.cdf(a)
    }
}

/// `d_B = −ln Σ √(p_i q_i)` over the bins and the two tail cells.
pub fn bhattacharyya(h: &Histogram, fit: &ScaledT) -> BhattaEstimate {
    let e = &h.edges;
    let inner: f64 = h
        .masses
        .iter()
        .enumerate()
        .map(|(i, &p)| (p * mass(fit, e[i], e[i + 1]).max(0.0)).sqrt())
        .sum();
    let q_under = fit.cdf(e[0]);
    let q_over = fit.sf(e[e.len() - 1]);
    let bc = inner + (h.underflow * q_under).sqrt() + (h.overflow * q_over).sqrt();
    BhattaEstimate {
        d_b: (-bc.min(1.0).ln()).max(0.0),
        bins: h.bins(),
        n_samples: h.n_samples,
        seed: None,
    }
}

/// Kolmogorov–Smirnov distance `sup |F_n − F|`; tied samples form a single step.
pub fn ks_distance(samples: &[f64], fit: &ScaledT) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    // (value, count strictly below, count at or below)
    let mut steps = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        steps.push((sorted[i], i, j));
        i = j;
    }
    steps
        .par_iter()
        .map(|&(x, below, upto)| {
            let f = fit.cdf(x);
            (upto as f64 / n - f).abs().max((f - below as f64 / n).abs())
        })
        .reduce(|| 0.0, f64::max)
}
