//! Nonlocal operators on the slip line: the Levy-Khintchine generator, its
//! gradient-periodic variant, the regularized front operator M_delta and
//! periodized interaction kernels.

mod levy;
mod mdelta;
mod periodic;

pub use levy::{
    levy_khintchine_apply, periodized_l, LevyOperator, PeriodicLevyOperator, QuadratureSpec,
};
pub use mdelta::{mdelta_apply, odd_integer_part};
pub use periodic::periodic_interaction_force;
