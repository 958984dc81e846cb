//! Initial particle positions from a macroscopic density profile: the
//! abscissas where floor(w0(eps x) / eps) jumps, i.e. the solutions of
//! w0(eps x) = k eps for k = 1 .. floor(sup w0 / eps).

use std::sync::Arc;

use crate::ddd::ParticleSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A nondecreasing strain profile with w0(-inf) = 0 and finite supremum,
/// supplied as a closed-form evaluator.
#[derive(Clone)]
pub struct DensityProfile<S> {
    f: Arc<dyn Fn(S) -> S + Send + Sync>,
    sup: S,
}

impl<S: Scalar> DensityProfile<S> {
    pub fn new(sup: S, f: impl Fn(S) -> S + Send + Sync + 'static) -> Result<Self> {
        if !(sup > S::zero()) {
            return Err(Error::InvalidArgument(
                "density profile supremum must be positive".into(),
            ));
        }
        Ok(Self { f: Arc::new(f), sup })
    }

    /// sup * (1 + tanh(x / width)) / 2: smooth, strictly increasing ramp.
    pub fn tanh_ramp(sup: S, width: S) -> Result<Self> {
        if !(width > S::zero()) {
            return Err(Error::InvalidArgument("ramp width must be positive".into()));
        }
        Self::new(sup, move |x: S| {
            sup * (S::one() + (x / width).tanh()) * S::cast(0.5)
        })
    }

    pub fn eval(&self, x: S) -> S {
        (self.f)(x)
    }

    pub fn sup(&self) -> S {
        self.sup
    }

    /// Sampled monotonicity check over [-span, span].
    fn validate_monotone(&self, span: S) -> Result<()> {
        let n = 4000;
        let mut prev = self.eval(-span);
        for i in 1..=n {
            let x = -span + (span + span) * S::cast(i as f64 / n as f64);
            let v = self.eval(x);
            if v < prev - S::identity_tol() {
                return Err(Error::InvalidArgument(format!(
                    "density profile decreases near x = {}",
                    x.as_f64()
                )));
            }
            prev = v;
        }
        Ok(())
    }
}

impl<S: std::fmt::Debug> std::fmt::Debug for DensityProfile<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DensityProfile").field("sup", &self.sup).finish()
    }
}

/// Builds the particle set whose step function equals
/// floor(w0(eps3 x) / eps3). An empty set (sup w0 < eps3) is returned as
/// N = 0 rather than an error so parameter sweeps can proceed.
pub fn positions_from_density<S: Scalar>(
    w0: &DensityProfile<S>,
    eps3: S,
) -> Result<ParticleSet<S>> {
    if !(eps3 > S::zero()) {
        return Err(Error::InvalidArgument("eps3 must be positive".into()));
    }
    w0.validate_monotone(S::cast(100.0))?;
    let count = (w0.sup() / eps3 + S::cast(1e-12))
        .floor()
        .to_usize()
        .ok_or_else(|| Error::InvalidArgument("density level count overflow".into()))?;
    let mut positions = Vec::with_capacity(count);
    for k in 1..=count {
        let level = S::cast(k as f64) * eps3;
        match bracketed_root(|x| w0.eval(eps3 * x) - level) {
            Some(x) => positions.push(x),
            // Levels at or above the attained supremum never cross.
            None => break,
        }
    }
    ParticleSet::from_sorted(positions)
}

/// Leftmost solution of g(x) = 0 for nondecreasing g, by expanding bracket
/// plus bisection. Returns None when no sign change is found.
fn bracketed_root<S: Scalar>(g: impl Fn(S) -> S) -> Option<S> {
    let mut lo = S::cast(-1.0);
    let mut hi = S::one();
    let mut span = S::one();
    for _ in 0..60 {
        if g(lo) < S::zero() {
            break;
        }
        span = span + span;
        lo = lo - span;
    }
    for _ in 0..60 {
        if g(hi) >= S::zero() {
            break;
        }
        span = span + span;
        hi = hi + span;
    }
    if !(g(lo) < S::zero() && g(hi) >= S::zero()) {
        return None;
    }
    for _ in 0..200 {
        let mid = (lo + hi) * S::cast(0.5);
        if g(mid) >= S::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= S::cast(1e-14) * (S::one() + hi.abs()) {
            break;
        }
    }
    Some((lo + hi) * S::cast(0.5))
}
