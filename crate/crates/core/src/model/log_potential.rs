//! The logarithmic two-body interaction V(x) = -(1/2 pi) ln|x| and its
//! short-distance regularization V_delta.
//!
//! V_delta agrees with V for |x| >= delta and continues linearly into the
//! cutoff with slope +-V'(delta), so the force stays continuous at the
//! matching points and bounded by 1/(2 pi delta).

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct RegularizedLogPotential<S> {
    delta: S,
}

impl<S: Scalar> RegularizedLogPotential<S> {
    pub fn new(delta: S) -> Result<Self> {
        if !(delta > S::zero()) {
            return Err(Error::InvalidArgument(format!(
                "cutoff must be positive, got {}",
                delta.as_f64()
            )));
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> S {
        self.delta
    }

    /// The singular potential V(x) = -(1/2 pi) ln|x|.
    pub fn singular_value(x: S) -> S {
        -x.abs().ln() / S::TAU()
    }

    /// The singular force V'(x) = -1/(2 pi x).
    pub fn singular_force(x: S) -> S {
        -(S::TAU() * x).recip()
    }

    /// V_delta(x); even, continuous, defined for all x including 0.
    pub fn value(&self, x: S) -> S {
        let r = x.abs();
        if r >= self.delta {
            Self::singular_value(x)
        } else {
            // Linear continuation: V(delta) + V'(delta) (r - delta).
            Self::singular_value(self.delta) + Self::singular_force(self.delta) * (r - self.delta)
        }
    }

    /// V_delta'(x). Equals V'(x) outside the cutoff and the constant
    /// +-V'(delta) inside; undefined at x = 0.
    pub fn force(&self, x: S) -> Result<S> {
        if x == S::zero() {
            return Err(Error::Domain(
                "V_delta is not differentiable at x = 0".into(),
            ));
        }
        Ok(self.force_nonzero(x))
    }

    /// Same as [`force`](Self::force) with the x != 0 precondition assumed.
    pub fn force_nonzero(&self, x: S) -> S {
        if x.abs() >= self.delta {
            Self::singular_force(x)
        } else if x > S::zero() {
            Self::singular_force(self.delta)
        } else {
            -Self::singular_force(self.delta)
        }
    }

    /// Kernel V''(z) = 1/(2 pi z^2), valid for |z| > delta.
    pub fn kernel_second_derivative(&self, z: S) -> Result<S> {
        if z.abs() <= self.delta {
            return Err(Error::Domain(format!(
                "kernel requested inside the cutoff: |{}| <= {}",
                z.as_f64(),
                self.delta.as_f64()
            )));
        }
        Ok((S::TAU() * z * z).recip())
    }
}

/// V_delta'(x) as a checked operation.
pub fn eval_vdelta_force<S: Scalar>(pot: &RegularizedLogPotential<S>, x: S) -> Result<S> {
    pot.force(x)
}
