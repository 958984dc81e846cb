//! The reduced Peierls-Nabarro evolution on the slip line,
//!
//!   v_t = (1/eps) { L v - (1/eps) W'(v) + 2 sigma(x) },
//!
//! together with layer-sum initial data and sharp-interface front
//! extraction. Calling the solver with eps = 1 and a pre-scaled stress
//! recovers the unrescaled form v_t = L v - W'(v) + 2 sigma.

mod corrector;
mod layer;

pub use corrector::{solve_corrector, Corrector};
pub use layer::{layer_tail_check, solve_layer, LayerGrid, LayerSolution};

use crate::error::{Error, Result};
use crate::field::{Closure, LineField};
use crate::model::{PeriodicPotential, StressField};
use crate::nonlocal::{LevyOperator, QuadratureSpec};
use crate::scalar::Scalar;

/// Phase field state at time t.
#[derive(Debug, Clone)]
pub struct PnState<S> {
    pub v: LineField<S>,
    pub t: S,
    pub eps2: S,
}

/// Largest monotone (comparison-preserving) Euler step for the given state:
/// the reciprocal of the stiff on-site term plus the operator diagonal.
pub fn pn_stability_bound<S: Scalar>(
    state: &PnState<S>,
    pot: &PeriodicPotential<S>,
    spec: &QuadratureSpec<S>,
) -> Result<S> {
    let op = LevyOperator::new(state.v.h(), spec)?;
    let eps = state.eps2;
    Ok((pot.sup_curvature() / (eps * eps) + op.stiffness() / eps).recip())
}

/// Advances the phase field to t_end by explicit Euler steps of size dt,
/// applying the Levy-Khintchine operator at every grid point each step.
/// Returns the final state; snapshots at the requested times are appended
/// to `snapshots` when provided.
pub fn pn_evolve<S: Scalar>(
    state: &PnState<S>,
    pot: &PeriodicPotential<S>,
    sigma: &StressField<S>,
    dt: S,
    t_end: S,
    spec: &QuadratureSpec<S>,
    mut snapshots: Option<(&[S], &mut Vec<(S, LineField<S>)>)>,
) -> Result<PnState<S>> {
    let bound = pn_stability_bound(state, pot, spec)?;
    if dt > bound {
        return Err(Error::Stability {
            dt: dt.as_f64(),
            bound: bound.as_f64(),
        });
    }
    let op = LevyOperator::new(state.v.h(), spec)?;
    let eps = state.eps2;
    let inv_eps = eps.recip();
    let n = state.v.len();
    let (_, far_right) = state.v.far_field()?;
    let hi_bound = far_right + S::cast(0.6);
    let lo_bound = S::cast(-0.6);

    let drive: Vec<S> = (0..n)
        .map(|i| sigma.eval(state.v.x(i)) * S::cast(2.0) * inv_eps)
        .collect();

    let mut v = state.v.clone();
    let mut t = state.t;
    let mut next_snap = 0usize;
    record_snapshot(&mut snapshots, &mut next_snap, t, &v, dt);
    while t < t_end - dt * S::cast(0.5) {
        let lv = op.apply_all(&v)?;
        {
            let values = v.values_mut();
            for i in 1..n - 1 {
                let rate = inv_eps * (lv[i] - inv_eps * pot.dw(values[i])) + drive[i];
                values[i] = values[i] + dt * rate;
            }
        }
        t = t + dt;
        let (mut lo, mut hi) = (S::infinity(), S::neg_infinity());
        for &x in v.values() {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        if lo < lo_bound || hi > hi_bound {
            return Err(Error::Divergence(format!(
                "phase field left [{}, {}] at t = {}",
                lo_bound.as_f64(),
                hi_bound.as_f64(),
                t.as_f64()
            )));
        }
        record_snapshot(&mut snapshots, &mut next_snap, t, &v, dt);
    }
    Ok(PnState { v, t, eps2: eps })
}

fn record_snapshot<S: Scalar>(
    snapshots: &mut Option<(&[S], &mut Vec<(S, LineField<S>)>)>,
    next: &mut usize,
    t: S,
    v: &LineField<S>,
    dt: S,
) {
    if let Some((times, sink)) = snapshots {
        while *next < times.len() && times[*next] <= t + dt * S::cast(0.5) {
            sink.push((times[*next], v.clone()));
            *next += 1;
        }
    }
}

/// Builds the layer-sum initial condition
///
///   v0(x) = (eps/alpha) 2 sigma(x) + sum_i phi((x - x_i)/eps)
///
/// on the given grid, with far-field limits (0, N).
pub fn build_a3_initial<S: Scalar>(
    positions: &[S],
    layer: &LayerSolution<S>,
    sigma: &StressField<S>,
    eps2: S,
    x0: S,
    h: S,
    n: usize,
) -> Result<PnState<S>> {
    if positions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "initial positions must be strictly increasing".into(),
        ));
    }
    let count = S::cast(positions.len() as f64);
    let pref = eps2 / layer.alpha * S::cast(2.0);
    let v = LineField::from_fn(
        x0,
        h,
        n,
        Closure::FarField { left: S::zero(), right: count },
        |x: S| {
            let mut acc = pref * sigma.eval(x);
            for &xi in positions {
                acc = acc + layer.eval((x - xi) / eps2);
            }
            acc
        },
    )?;
    Ok(PnState {
        v,
        t: S::zero(),
        eps2,
    })
}

/// Extracts the n_expected half-integer level crossings of a monotone
/// transition field, by linear interpolation between bracketing grid
/// points. Signals an extraction error when a level is crossed more or
/// fewer times than once (front collision or under-resolution).
pub fn extract_fronts<S: Scalar>(state: &PnState<S>, n_expected: usize) -> Result<Vec<S>> {
    let v = &state.v;
    let half = S::cast(0.5);
    let mut fronts = Vec::with_capacity(n_expected);
    for k in 1..=n_expected {
        let level = S::cast(k as f64) - half;
        let mut found: Option<S> = None;
        let mut count = 0usize;
        for i in 0..v.len() - 1 {
            let a = v.value(i) - level;
            let b = v.value(i + 1) - level;
            let up = a <= S::zero() && b > S::zero();
            let down = a >= S::zero() && b < S::zero();
            if up || down {
                count += 1;
                let frac = -a / (b - a);
                found = Some(v.x(i) + v.h() * frac);
            }
        }
        match (count, found) {
            (1, Some(x)) => fronts.push(x),
            _ => {
                return Err(Error::FrontExtraction(format!(
                    "level {} crossed {} times, expected exactly once",
                    level.as_f64(),
                    count
                )))
            }
        }
    }
    Ok(fronts)
}
