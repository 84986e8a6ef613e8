use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower and upper empirical quantiles spanned by the equal-width bins.
pub const SPAN: (f64, f64) = (0.0005, 0.9995);

/// Equal-width histogram over an empirical quantile span, with the mass
/// outside the span kept in two tail cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub masses: Vec<f64>,
    pub underflow: f64,
    pub overflow: f64,
    pub n_samples: usize,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum::<f64>() + self.underflow + self.overflow
    }
}

/// Type-7 empirical quantile of sorted data.
fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let i = h.floor() as usize;
    let frac = h - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

pub fn build_histogram(samples: &[f64], bins: usize) -> Result<Histogram> {
    if bins < 10 {
        return Err(Error::InvalidParameter(format!("bins = {bins} must be at least 10")));
    }
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("samples must be finite".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut lo = empirical_quantile(&sorted, SPAN.0);
    let mut hi = empirical_quantile(&sorted, SPAN.1);
    if !(hi > lo) {
        // Mass concentrated on a point; fall back to the full range.
        lo = sorted[0];
        hi = sorted[sorted.len() - 1];
        if !(hi > lo) {
            return Err(Error::DegenerateRange);
        }
    }
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..=bins).map(|k| lo + width * k as f64).collect();
    edges[bins] = hi;
    let mut counts = vec![0u64; bins];
    let (mut under, mut over) = (0u64, 0u64);
    for &x in samples {
        if x < lo {
            under += 1;
        } else if x > hi {
            over += 1;
        } else {
            let mut i = (((x - lo) / width) as usize).min(bins - 1);
            // Rounding in the division can land one cell off near an edge.
            while i > 0 && x < edges[i] {
                i -= 1;
            }
            while i + 1 < bins && x >= edges[i + 1] {
                i += 1;
            }
            counts[i] += 1;
        }
    }
    let n = samples.len() as f64;
    Ok(Histogram {
        edges,
        masses: counts.iter().map(|&c| c as f64 / n).collect(),
        underflow: under as f64 / n,
        overflow: over as f64 / n,
        n_samples: samples.len(),
    })
}
