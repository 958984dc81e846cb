//! Error type shared by every solver in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation outside the mathematical domain (potential at 0, origin of
    /// the continuum displacement, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A field carries the wrong closure for the requested operator.
    #[error("closure error: {0}")]
    Closure(String),

    /// Operator evaluation requested at or past a grid edge.
    #[error("grid edge: {0}")]
    GridEdge(String),

    /// Ill-formed argument (unsorted positions, non-monotone profile, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An iterative solver exhausted its budget or lost a structural
    /// property it is required to preserve.
    #[error("solver error: {0}")]
    Solver(String),

    /// Requested time step exceeds the stability bound of the scheme.
    #[error("stability error: dt = {dt:e} exceeds bound {bound:e}")]
    Stability { dt: f64, bound: f64 },

    /// Particle ordering was violated during integration.
    #[error("collision error: ordering violated at t = {t:e} (tolerance too loose?)")]
    Collision { t: f64 },

    /// Adaptive step size underflowed.
    #[error("stiffness error: step size underflow at t = {t:e}")]
    Stiffness { t: f64 },

    /// A field left its sanity bounds during evolution.
    #[error("divergence error: {0}")]
    Divergence(String),

    /// Front extraction found the wrong number of level crossings.
    #[error("front extraction error: {0}")]
    FrontExtraction(String),

    /// Drift measurement did not converge.
    #[error("averaging error: {0}")]
    Averaging(String),

    /// Flux table construction or lookup failure.
    #[error("flux table error: {0}")]
    Table(String),

    /// Lookup outside the convex hull of a tabulated function.
    #[error("extrapolation error: {0}")]
    Extrapolation(String),

    /// Requested time lies outside the computed trajectory.
    #[error("range error: {0}")]
    Range(String),
}

pub type Result<T> = std::result::Result<T, Error>;
