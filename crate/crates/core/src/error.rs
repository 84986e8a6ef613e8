use thiserror::Error;

use crate::lincomb::SeriesDiag;

/// Errors produced by the numerical kernels, the statistics of linear
/// combinations and the fitting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the routine.
    #[error("domain error in {routine}: {detail}")]
    Domain {
        routine: &'static str,
        detail: String,
    },

    /// A series or continued fraction exhausted its term budget.
    #[error("{routine} did not converge within {terms} terms")]
    NonConvergence {
        routine: &'static str,
        terms: usize,
        diag: Option<SeriesDiag>,
    },

    /// The result is not representable as a finite `f64`.
    #[error("overflow in {routine}")]
    Overflow { routine: &'static str },

    /// A moment of order `order` was requested from a law with `nu <= order`.
    #[error("moment of order {order} does not exist for nu = {nu}")]
    MomentNotFinite { order: f64, nu: f64 },

    /// A parameter violates a type invariant (scale, degrees of freedom, counts).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A closed form is only available for a specific number of addends.
    #[error("unsupported number of addends K = {0}")]
    UnsupportedK(usize),

    /// The normalised absolute moment lies outside the range reachable by a scaled t.
    #[error("infeasible moment ratio {ratio} (must lie in (0, sqrt 2))")]
    InfeasibleRatio { ratio: f64 },

    /// The characteristic-function value is outside the closed-form range.
    #[error("infeasible characteristic-function value {cf}")]
    InfeasibleCf { cf: f64 },

    /// The kurtosis ratio is not larger than the Gaussian value 3.
    #[error("infeasible kurtosis ratio {kappa} (must exceed 3)")]
    InfeasibleKurtosis { kappa: f64 },

    /// The matching equation has no root in the bisection bracket.
    #[error("no solution: CF value {cf:e} outside ({lower:e}, {upper:e})")]
    NoSolution { cf: f64, lower: f64, upper: f64 },

    /// All samples are equal, so no histogram span exists.
    #[error("degenerate sample range")]
    DegenerateRange,

    /// An error raised while folding in addend `step` of an iterative fit.
    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(routine: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            routine,
            detail: detail.into(),
        }
    }

    /// Stable machine-readable name of the error kind.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "DomainError",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::Overflow { .. } => "Overflow",
            Error::MomentNotFinite { .. } => "MomentNotFinite",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::UnsupportedK(_) => "UnsupportedK",
            Error::InfeasibleRatio { .. } => "InfeasibleRatio",
            Error::InfeasibleCf { .. } => "InfeasibleCf",
            Error::InfeasibleKurtosis { .. } => "InfeasibleKurtosis",
            Error::NoSolution { .. } => "NoSolution",
            Error::DegenerateRange => "DegenerateRange",
            Error::AtStep { source, .. } => source.name(),
        }
    }

    /// True for errors that mean "no scaled t matches these statistics",
    /// as opposed to bad input or numerical failure.
    pub fn is_infeasible(&self) -> bool {
        match self {
            Error::InfeasibleRatio { .. }
            | Error::InfeasibleCf { .. }
            | Error::InfeasibleKurtosis { .. }
            | Error::NoSolution { .. }
            | Error::MomentNotFinite { .. } => true,
            Error::AtStep { source, .. } => source.is_infeasible(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
