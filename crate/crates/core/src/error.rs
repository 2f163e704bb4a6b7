//! Shared error type for all numerical modules.

use thiserror::Error;

/// Errors surfaced by the numerical layers.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A parameter violates a documented precondition.
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    /// Moment integrals of a weight fail to converge on its interval.
    #[error("moment integrals diverge: {0}")]
    MomentDivergence(String),

    /// Discretized recurrence coefficients failed to stabilize under refinement.
    #[error("recurrence coefficients did not stabilize after {refinements} refinements (last relative change {last_change:.3e})")]
    StieltjesUnstable { refinements: u32, last_change: f64 },

    /// A degree beyond the stored recurrence depth was requested.
    #[error("degree {requested} exceeds available coefficient count {available}")]
    DegreeOutOfRange { requested: usize, available: usize },

    /// The tridiagonal eigensolver hit its iteration cap.
    #[error("tridiagonal eigensolver failed to converge within {0} iterations")]
    EigensolveFailure(usize),

    /// A Christoffel-type sum varied too much between adjacent grid points.
    #[error("grid too coarse near the sup of the Christoffel sum: adjacent variation {variation:.1}% exceeds 10%")]
    GridTooCoarse { variation: f64 },

    /// An evaluation point lies outside a kernel or weight domain.
    #[error("domain violation: {0}")]
    DomainViolation(String),

    /// The expansion point is not admissible for the kernel.
    #[error("unsupported expansion point: {0}")]
    UnsupportedPoint(String),

    /// Adaptive quadrature failed to reach its tolerance.
    #[error("quadrature did not converge: error estimate {estimate:.3e} above tolerance {tolerance:.3e}")]
    QuadratureNonConvergence { estimate: f64, tolerance: f64 },

    /// A parameter combination is infeasible for the requested experiment.
    #[error("infeasible parameters: {0}")]
    ParameterInfeasible(String),

    /// A kernel was paired with data it cannot consume.
    #[error("kernel mismatch: {0}")]
    KernelMismatch(String),

    /// Dyadic arithmetic exceeded the available bit range.
    #[error("dyadic overflow: {0}")]
    Overflow(String),

    /// The mass outside a dyadic truncation box is too large to ignore.
    #[error("tail mass {tail:.3e} outside the dyadic box exceeds the threshold {threshold:.3e}")]
    TailTooHeavy { tail: f64, threshold: f64 },
}

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, CoreError>;
