//! Periodic on-site potentials.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

type Eval<S> = Arc<dyn Fn(S) -> S + Send + Sync>;

/// Smooth 1-periodic on-site potential W with W(Z) = 0 and alpha = W''(0) > 0.
///
/// Supplied as closed-form evaluators for W, W' and W'' so derivatives are
/// exact; user-supplied instances are guarded by
/// [`validate_assumptions`](crate::model::validate_assumptions).
#[derive(Clone)]
pub struct PeriodicPotential<S> {
    w: Eval<S>,
    dw: Eval<S>,
    ddw: Eval<S>,
    alpha: S,
    sup_curvature: S,
    tag: String,
}

impl<S: Scalar> PeriodicPotential<S> {
    /// Wraps closed-form evaluators. `alpha` is read off as W''(0) and the
    /// curvature bound is sampled over one period.
    pub fn new(
        tag: impl Into<String>,
        w: impl Fn(S) -> S + Send + Sync + 'static,
        dw: impl Fn(S) -> S + Send + Sync + 'static,
        ddw: impl Fn(S) -> S + Send + Sync + 'static,
    ) -> Result<Self> {
        let alpha = ddw(S::zero());
        if !(alpha > S::zero()) {
            return Err(Error::InvalidArgument(format!(
                "potential minimum must be non-degenerate: W''(0) = {}",
                alpha.as_f64()
            )));
        }
        let n = 4096;
        let sup_curvature = (0..n)
            .map(|i| ddw(S::cast(i as f64 / n as f64)).abs())
            .fold(S::zero(), S::max);
        Ok(Self {
            w: Arc::new(w),
            dw: Arc::new(dw),
            ddw: Arc::new(ddw),
            alpha,
            sup_curvature,
            tag: tag.into(),
        })
    }

    /// The sinusoidal potential W(v) = (1 - cos 2 pi v) / (4 pi^2),
    /// normalized so that alpha = W''(0) = 1. Its layer profile is known in
    /// closed form, which anchors most of the test oracles.
    pub fn sinusoidal() -> Self {
        let four_pi2 = S::cast(4.0) * S::PI() * S::PI();
        Self::new(
            "sinusoidal",
            move |v: S| (S::one() - (S::TAU() * v).cos()) / four_pi2,
            |v: S| (S::TAU() * v).sin() / S::TAU(),
            |v: S| (S::TAU() * v).cos(),
        )
        .expect("sinusoidal potential is well formed")
    }

    /// W(a).
    pub fn w(&self, a: S) -> S {
        (self.w)(a)
    }

    /// W'(a).
    pub fn dw(&self, a: S) -> S {
        (self.dw)(a)
    }

    /// W''(a).
    pub fn ddw(&self, a: S) -> S {
        (self.ddw)(a)
    }

    /// alpha = W''(0).
    pub fn alpha(&self) -> S {
        self.alpha
    }

    /// Sampled bound on |W''| over one period, used by time-step bounds.
    pub fn sup_curvature(&self) -> S {
        self.sup_curvature
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }
}

impl<S: std::fmt::Debug> std::fmt::Debug for PeriodicPotential<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicPotential")
            .field("tag", &self.tag)
            .field("alpha", &self.alpha)
            .finish()
    }
}

/// Builds the sinusoidal reference potential.
pub fn make_sinusoidal_potential<S: Scalar>() -> PeriodicPotential<S> {
    PeriodicPotential::sinusoidal()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinusoidal_closed_form_values() {
        let pot = make_sinusoidal_potential::<f64>();
        assert_eq!(pot.w(0.0), 0.0);
        // W(1/2) = 1/(2 pi^2)
        let expect = 1.0 / (2.0 * std::f64::consts::PI.powi(2));
        assert!((pot.w(0.5) - expect).abs() < 1e-15);
        assert!((expect - 0.050660).abs() < 1e-5);
        // alpha = W''(0) = 1
        assert!((pot.alpha() - 1.0).abs() < 1e-15);
        // W'(v) = sin(2 pi v) / (2 pi)
        assert!((pot.dw(0.25) - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_minimum() {
        // W = a^4-like near 0 has W''(0) = 0.
        let r = PeriodicPotential::<f64>::new(
            "quartic",
            |a| (a - a.round()).powi(4),
            |a| 4.0 * (a - a.round()).powi(3),
            |a| 12.0 * (a - a.round()).powi(2),
        );
        assert!(r.is_err());
    }

    #[test]
    fn sup_curvature_is_one_for_sinusoidal() {
        let pot = make_sinusoidal_potential::<f64>();
        assert!((pot.sup_curvature() - 1.0).abs() < 1e-6);
    }
}
