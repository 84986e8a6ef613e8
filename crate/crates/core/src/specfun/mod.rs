//! Real-valued special functions: log-gamma, regularized incomplete beta,
//! modified Bessel K of real order, and Gauss's hypergeometric ₂F₁.

mod bessel;
mod beta;
mod gamma;
mod hyper;

pub use bessel::{bessel_k, bessel_k_scaled, ln_bessel_k, Scaled};
pub use beta::{reg_inc_beta, reg_inc_beta_with};
pub use gamma::{gamma, ln_beta, ln_gamma_ratio, log_gamma};
pub use hyper::{gauss_2f1, gauss_2f1_with};

pub(crate) use beta::reg_inc_beta_pair;
pub(crate) use gamma::{lgam, stirling_correction};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation control for series and continued fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Accuracy {
    /// Validated constructor: `rel_tol` in `(0, 1e-6]`, `max_terms >= 100`.
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol <= 1e-6) {
            return Err(Error::InvalidParameter(format!(
                "rel_tol = {rel_tol} must lie in (0, 1e-6]"
            )));
        }
        if max_terms < 100 {
            return Err(Error::InvalidParameter(format!(
                "max_terms = {max_terms} must be at least 100"
            )));
        }
        Ok(Accuracy { rel_tol, max_terms })
    }
}

impl Default for Accuracy {
    fn default() -> Self {
        Accuracy {
            rel_tol: 1e-12,
            max_terms: 100_000,
        }
    }
}
