//! Multiscale dislocation dynamics on a single slip line.
//!
//! Four models of the same physics live here, ordered from the atomic to
//! the macroscopic scale, together with the numerical bridges between them:
//!
//! * [`lattice`] -- a generalized Frenkel-Kontorova half-lattice with an
//!   overdamped boundary row and a harmonic bulk;
//! * [`pn`] -- the reduced Peierls-Nabarro phase-field evolution on the
//!   line, its layer profile, damping constant and corrector;
//! * [`ddd`] -- discrete dislocation particle dynamics with logarithmic
//!   interactions;
//! * [`dd`] -- the homogenized dislocation-density model driven by an
//!   effective flux measured from periodic cell problems.
//!
//! Everything is generic over the scalar type through [`scalar::Scalar`];
//! the `*64` aliases at the crate root pin the common double-precision
//! instantiations.

pub mod dd;
pub mod ddd;
pub mod error;
pub mod experiments;
pub mod field;
pub mod lattice;
pub mod model;
pub mod nonlocal;
pub mod pn;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision instantiations of the main carriers.
pub type LineField64 = field::LineField<f64>;
pub type StepProfile64 = field::StepProfile<f64>;
pub type PeriodicPotential64 = model::PeriodicPotential<f64>;
pub type StressField64 = model::StressField<f64>;
pub type RegularizedLogPotential64 = model::RegularizedLogPotential<f64>;
pub type ScaleParams64 = model::ScaleParams<f64>;
