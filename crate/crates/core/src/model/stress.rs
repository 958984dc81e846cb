//! Applied resolved shear stress fields.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Regularity regime the stress claims to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StressMode {
    /// Bounded with bounded first and second derivatives.
    Bounded,
    /// Additionally 1-periodic: sigma(x + 1) = sigma(x).
    Periodic,
}

/// Resolved shear stress sigma(x), dimensionless.
#[derive(Clone)]
pub struct StressField<S> {
    sigma: Arc<dyn Fn(S) -> S + Send + Sync>,
    mode: StressMode,
    bound: S,
    tag: String,
}

impl<S: Scalar> StressField<S> {
    pub fn new(
        tag: impl Into<String>,
        mode: StressMode,
        bound: S,
        sigma: impl Fn(S) -> S + Send + Sync + 'static,
    ) -> Self {
        Self {
            sigma: Arc::new(sigma),
            mode,
            bound,
            tag: tag.into(),
        }
    }

    /// sigma = 0, trivially periodic.
    pub fn zero() -> Self {
        Self::new("zero", StressMode::Periodic, S::one(), |_| S::zero())
    }

    /// Constant stress, bounded mode.
    pub fn constant(c: S) -> Self {
        Self::new(
            format!("const:{}", c.as_f64()),
            StressMode::Bounded,
            c.abs() + S::one(),
            move |_| c,
        )
    }

    /// amplitude * sin(2 pi x), the 1-periodic obstacle field used in the
    /// pinning experiments.
    pub fn sinusoidal(amplitude: S) -> Self {
        let bound = amplitude.abs() * S::TAU() * S::TAU() + S::one();
        Self::new(
            format!("sin:{}", amplitude.as_f64()),
            StressMode::Periodic,
            bound,
            move |x: S| amplitude * (S::TAU() * x).sin(),
        )
    }

    pub fn eval(&self, x: S) -> S {
        (self.sigma)(x)
    }

    pub fn mode(&self) -> StressMode {
        self.mode
    }

    pub fn bound(&self) -> S {
        self.bound
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn is_periodic(&self) -> bool {
        self.mode == StressMode::Periodic
    }

    /// Mean over one period (trapezoid, 4096 panels). Only meaningful in
    /// periodic mode.
    pub fn mean_over_period(&self) -> Result<S> {
        if !self.is_periodic() {
            return Err(Error::InvalidArgument(
                "mean over period requires a periodic stress".into(),
            ));
        }
        let n = 4096usize;
        let h = S::one() / S::cast(n as f64);
        let mut acc = S::zero();
        for i in 0..n {
            acc = acc + self.eval(h * S::cast(i as f64));
        }
        Ok(acc * h)
    }
}

impl<S> std::fmt::Debug for StressField<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StressField")
            .field("tag", &self.tag)
            .field("mode", &self.mode)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinusoidal_is_mean_zero_and_periodic() {
        let s = StressField::<f64>::sinusoidal(0.8);
        assert!(s.is_periodic());
        assert!(s.mean_over_period().unwrap().abs() < 1e-12);
        assert!((s.eval(0.25) - 0.8).abs() < 1e-15);
        assert!((s.eval(1.25) - s.eval(0.25)).abs() < 1e-12);
    }

    #[test]
    fn constant_mode_rejects_period_mean() {
        let s = StressField::<f64>::constant(0.3);
        assert!(s.mean_over_period().is_err());
    }
}
