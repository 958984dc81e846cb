//! Discrete dislocation dynamics: N repulsive particles on the slip line,
//!
//!   dx_i/dt = -gamma ( sigma(x_i) + l/2 + sum_{j != i} V'(x_i - x_j) ),
//!
//! integrated adaptively, with singular, regularized or periodized
//! logarithmic interactions.

mod density;
mod integrator;

pub use density::{positions_from_density, DensityProfile};
pub use integrator::{integrate_dopri5, OdeOptions};

use crate::error::{Error, Result};
use crate::field::StepProfile;
use crate::model::{RegularizedLogPotential, StressField};
use crate::nonlocal::periodic_interaction_force;
use crate::scalar::Scalar;

/// Ordered particle positions sharing one Burgers sign.
#[derive(Debug, Clone)]
pub struct ParticleSet<S> {
    positions: Vec<S>,
    pub t: S,
}

impl<S: Scalar> ParticleSet<S> {
    /// Builds a set from strictly increasing positions; N >= 1.
    pub fn new(positions: Vec<S>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidArgument(
                "a particle set needs at least one particle".into(),
            ));
        }
        Self::from_sorted(positions)
    }

    /// Like [`new`](Self::new) but tolerates the empty set, which density
    /// sweeps produce when the profile stays below one quantum.
    pub fn from_sorted(positions: Vec<S>) -> Result<Self> {
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "particle positions must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            positions,
            t: S::zero(),
        })
    }

    pub fn positions(&self) -> &[S] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// The sharp-interface profile sum_i H(x - x_i).
    pub fn step_profile(&self) -> StepProfile<S> {
        StepProfile::new(self.positions.clone()).expect("ordered positions")
    }
}

/// Interaction kernel selection.
#[derive(Debug, Clone, Copy)]
pub enum Interaction<S> {
    /// Bare V'(x) = -1/(2 pi x).
    Singular,
    /// Short-distance regularized V_delta'.
    Regularized(RegularizedLogPotential<S>),
    /// All periodic images in a box of the given length, regularized inside
    /// the cutoff.
    Periodized {
        pot: RegularizedLogPotential<S>,
        box_length: S,
    },
}

/// Physics and integration parameters for one run.
#[derive(Debug, Clone)]
pub struct DddConfig<S> {
    /// Inverse damping factor; from the layer solution when bridging from
    /// the phase field, 4 pi for the sinusoidal default.
    pub gamma: S,
    pub interaction: Interaction<S>,
    pub sigma: StressField<S>,
    /// Constant l/2 added to the stress in cell problems.
    pub extra_stress: S,
    /// Integrator relative tolerance, in (0, 1e-3].
    pub tolerance: S,
}

impl<S: Scalar> DddConfig<S> {
    pub fn new(
        gamma: S,
        interaction: Interaction<S>,
        sigma: StressField<S>,
        extra_stress: S,
        tolerance: S,
    ) -> Result<Self> {
        if !(gamma > S::zero()) {
            return Err(Error::InvalidArgument("gamma must be positive".into()));
        }
        if !(tolerance > S::zero() && tolerance <= S::cast(1e-3)) {
            return Err(Error::InvalidArgument(
                "integrator tolerance must lie in (0, 1e-3]".into(),
            ));
        }
        Ok(Self {
            gamma,
            interaction,
            sigma,
            extra_stress,
            tolerance,
        })
    }

    pub fn free_pair_default(gamma: S) -> Result<Self> {
        Self::new(
            gamma,
            Interaction::Singular,
            StressField::zero(),
            S::zero(),
            S::cast(1e-10),
        )
    }
}

fn pair_force<S: Scalar>(interaction: &Interaction<S>, dx: S) -> Result<S> {
    match interaction {
        Interaction::Singular => {
            if dx == S::zero() {
                return Err(Error::Domain("coincident particles".into()));
            }
            Ok(RegularizedLogPotential::singular_force(dx))
        }
        Interaction::Regularized(pot) => pot.force(dx),
        Interaction::Periodized { pot, box_length } => {
            periodic_interaction_force(dx, *box_length, pot)
        }
    }
}

/// Resolved Peach-Koehler force on particle i: applied stress plus the
/// uniform drive plus the pairwise interactions.
pub fn peach_koehler_force<S: Scalar>(
    ps: &ParticleSet<S>,
    i: usize,
    cfg: &DddConfig<S>,
) -> Result<S> {
    let xs = ps.positions();
    if i >= xs.len() {
        return Err(Error::InvalidArgument(format!(
            "particle index {i} out of range {}",
            xs.len()
        )));
    }
    let mut force = cfg.sigma.eval(xs[i]) + cfg.extra_stress;
    for (j, &xj) in xs.iter().enumerate() {
        if j != i {
            force = force + pair_force(&cfg.interaction, xs[i] - xj)?;
        }
    }
    Ok(force)
}

fn velocities<S: Scalar>(xs: &[S], cfg: &DddConfig<S>, out: &mut [S]) {
    for (i, slot) in out.iter_mut().enumerate() {
        let mut force = cfg.sigma.eval(xs[i]) + cfg.extra_stress;
        for (j, &xj) in xs.iter().enumerate() {
            if j != i {
                // Inside a run the kernels are evaluated unchecked;
                // ordering is asserted on every accepted step instead.
                force = force
                    + match &cfg.interaction {
                        Interaction::Singular => {
                            RegularizedLogPotential::singular_force(xs[i] - xj)
                        }
                        Interaction::Regularized(pot) => pot.force_nonzero(xs[i] - xj),
                        Interaction::Periodized { pot, box_length } => {
                            periodic_interaction_force(xs[i] - xj, *box_length, pot)
                                .unwrap_or_else(|_| S::nan())
                        }
                    };
            }
        }
        *slot = -cfg.gamma * force;
    }
}

/// A sampled integration run.
#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    pub times: Vec<S>,
    /// One row of positions per sample time.
    pub samples: Vec<Vec<S>>,
    pub gamma: S,
}

impl<S: Scalar> Trajectory<S> {
    /// Positions at an arbitrary time within the sampled range, linearly
    /// interpolated between samples.
    pub fn positions_at(&self, t: S) -> Result<Vec<S>> {
        let times = &self.times;
        if times.is_empty() || t < times[0] || t > *times.last().unwrap() {
            return Err(Error::Range(format!(
                "time {} outside sampled range",
                t.as_f64()
            )));
        }
        let k = times.partition_point(|&s| s <= t);
        if k == 0 {
            return Ok(self.samples[0].clone());
        }
        if k >= times.len() {
            return Ok(self.samples.last().unwrap().clone());
        }
        let (t0, t1) = (times[k - 1], times[k]);
        let lam = if t1 > t0 { (t - t0) / (t1 - t0) } else { S::zero() };
        Ok(self.samples[k - 1]
            .iter()
            .zip(&self.samples[k])
            .map(|(a, b)| *a + (*b - *a) * lam)
            .collect())
    }

    /// Minimal pairwise separation at each sample (+inf for N <= 1).
    pub fn min_separation(&self) -> Vec<(S, S)> {
        self.times
            .iter()
            .zip(&self.samples)
            .map(|(&t, xs)| {
                let d = xs
                    .windows(2)
                    .map(|w| w[1] - w[0])
                    .fold(S::infinity(), S::min);
                (t, d)
            })
            .collect()
    }
}

/// Flags samples violating the lower envelope d(0) e^{-C gamma t}.
/// Monitoring only; the constant C is supplied by the caller.
pub fn separation_violations<S: Scalar>(traj: &Trajectory<S>, c: S) -> Vec<(S, S, S)> {
    let series = traj.min_separation();
    if series.is_empty() {
        return Vec::new();
    }
    let d0 = series[0].1;
    let t0 = series[0].0;
    series
        .into_iter()
        .filter(|&(t, d)| d < d0 * (-c * traj.gamma * (t - t0)).exp())
        .map(|(t, d)| (t, d, d0 * (-c * traj.gamma * (t - t0)).exp()))
        .collect()
}

/// Integrates the particle system to t_end, sampling at the requested
/// times (strictly increasing; t_end is always sampled). Ordering is
/// asserted at every accepted step.
pub fn ddd_evolve<S: Scalar>(
    ps: &ParticleSet<S>,
    cfg: &DddConfig<S>,
    t_end: S,
    sample_times: &[S],
) -> Result<Trajectory<S>> {
    if sample_times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "sample times must be strictly increasing".into(),
        ));
    }
    let mut times = vec![ps.t];
    let mut samples = vec![ps.positions().to_vec()];
    if ps.is_empty() {
        return Ok(Trajectory {
            times,
            samples,
            gamma: cfg.gamma,
        });
    }

    let opts = OdeOptions::with_tolerance(cfg.tolerance);
    let mut pending: Vec<S> = sample_times
        .iter()
        .copied()
        .filter(|&s| s > ps.t && s < t_end)
        .collect();
    pending.push(t_end);

    let cfg_f = cfg.clone();
    let next = std::cell::Cell::new(0usize);
    let t_now = std::cell::Cell::new(ps.t);
    integrate_dopri5(
        ps.t,
        ps.positions(),
        t_end,
        &opts,
        move |_, y, dy| velocities(y, &cfg_f, dy),
        |h| {
            // Land exactly on the next sample time.
            if next.get() < pending.len() {
                let gap = pending[next.get()] - t_now.get();
                if gap > S::zero() && gap < h {
                    return gap;
                }
            }
            h
        },
        |t, y| {
            t_now.set(t);
            if y.windows(2).any(|w| w[1] <= w[0]) || y.iter().any(|v| !v.is_finite()) {
                return Err(Error::Collision { t: t.as_f64() });
            }
            while next.get() < pending.len()
                && pending[next.get()] <= t + S::cast(1e-12) * (S::one() + t.abs())
            {
                times.push(pending[next.get()]);
                samples.push(y.to_vec());
                next.set(next.get() + 1);
            }
            Ok(())
        },
    )?;

    Ok(Trajectory {
        times,
        samples,
        gamma: cfg.gamma,
    })
}
