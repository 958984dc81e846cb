//! Shared physical ingredients: on-site potentials, applied stresses, the
//! regularized logarithmic interaction and the scale parameters tying the
//! four models together.

mod assumptions;
mod log_potential;
mod potential;
mod stress;

pub use assumptions::{validate_assumptions, AssumptionCheck, AssumptionReport};
pub use log_potential::{eval_vdelta_force, RegularizedLogPotential};
pub use potential::{make_sinusoidal_potential, PeriodicPotential};
pub use stress::{StressField, StressMode};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The three scale ratios of the coupled limit scheme plus the interaction
/// cutoff. eps1 drives lattice -> phase field, eps2 phase field ->
/// particles, eps3 particles -> density.
#[derive(Debug, Clone, Copy)]
pub struct ScaleParams<S> {
    pub eps1: S,
    pub eps2: S,
    pub eps3: S,
    pub delta: S,
}

impl<S: Scalar> ScaleParams<S> {
    pub fn new(eps1: S, eps2: S, eps3: S, delta: S) -> Result<Self> {
        for (name, v) in [("eps1", eps1), ("eps2", eps2), ("eps3", eps3)] {
            if !(v > S::zero() && v <= S::one()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must lie in (0, 1], got {}",
                    v.as_f64()
                )));
            }
        }
        if !(delta > S::zero()) {
            return Err(Error::InvalidArgument(format!(
                "delta must be positive, got {}",
                delta.as_f64()
            )));
        }
        Ok(Self {
            eps1,
            eps2,
            eps3,
            delta,
        })
    }
}
