//! The periodic cell problem measuring the effective flux g(rho, l).
//!
//! n particles per box of m stress periods are driven by sigma + l/2 with
//! periodized interactions; after a transient the mean drift velocity v is
//! read off by linear regression of the total displacement, and
//! g_delta(rho, l) = -v rho. This is Orowan's law: plastic strain rate =
//! density times mean velocity.

use crate::ddd::{ddd_evolve, DddConfig, Interaction, ParticleSet};
use crate::error::{Error, Result};
use crate::model::{RegularizedLogPotential, StressField};
use crate::scalar::Scalar;

/// One cell-problem configuration with rational density rho = n/m.
#[derive(Debug, Clone)]
pub struct CellProblemSpec<S> {
    /// Particles per box.
    pub numer: u32,
    /// Box length in stress periods.
    pub denom: u32,
    /// Imposed long-range term; enters the drive as l/2.
    pub l: S,
    /// Interaction cutoff.
    pub delta: S,
    /// Discarded start-up time.
    pub t_transient: S,
    /// Averaging window; at least 10 transients.
    pub t_average: S,
    pub gamma: S,
    /// Phase shift of the equi-spaced initial configuration.
    pub initial_phase: S,
    /// Integrator tolerance.
    pub tolerance: S,
}

impl<S: Scalar> CellProblemSpec<S> {
    pub fn new(
        numer: u32,
        denom: u32,
        l: S,
        delta: S,
        t_transient: S,
        t_average: S,
        gamma: S,
    ) -> Result<Self> {
        if numer == 0 || denom == 0 {
            return Err(Error::InvalidArgument(
                "density must be a positive rational n/m".into(),
            ));
        }
        if t_average < S::cast(10.0) * t_transient {
            return Err(Error::InvalidArgument(
                "averaging window must cover at least 10 transients".into(),
            ));
        }
        Ok(Self {
            numer,
            denom,
            l,
            delta,
            t_transient,
            t_average,
            gamma,
            initial_phase: S::zero(),
            tolerance: S::cast(1e-8),
        })
    }

    /// Transient 50/gamma and averaging window 500/gamma.
    pub fn standard(numer: u32, denom: u32, l: S, delta: S, gamma: S) -> Result<Self> {
        let t_tr = S::cast(50.0) / gamma;
        Self::new(numer, denom, l, delta, t_tr, S::cast(10.0) * t_tr, gamma)
    }

    pub fn rho(&self) -> S {
        S::cast(self.numer as f64) / S::cast(self.denom as f64)
    }

    pub fn with_phase(mut self, phase: S) -> Self {
        self.initial_phase = phase;
        self
    }

    pub fn with_averaging(mut self, t_transient: S, t_average: S) -> Result<Self> {
        if t_average < S::cast(10.0) * t_transient {
            return Err(Error::InvalidArgument(
                "averaging window must cover at least 10 transients".into(),
            ));
        }
        self.t_transient = t_transient;
        self.t_average = t_average;
        Ok(self)
    }
}

/// Best rational approximation n/m to a positive density with bounded
/// denominator, by continued fractions. The flag reports whether the
/// approximation is exact to rounding.
pub fn density_to_rational<S: Scalar>(rho: S, max_denom: u32) -> Result<(u32, u32, bool)> {
    if !(rho > S::zero()) {
        return Err(Error::InvalidArgument("density must be positive".into()));
    }
    let target = rho.as_f64();
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut x = target;
    for _ in 0..64 {
        let a = x.floor() as u64;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        if q2 > max_denom as u64 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = x - a as f64;
        if frac.abs() < 1e-12 {
            break;
        }
        x = 1.0 / frac;
    }
    if p1 == 0 || q1 == 0 {
        return Err(Error::InvalidArgument(format!(
            "no rational approximation of {target} within denominator {max_denom}"
        )));
    }
    let exact = (p1 as f64 / q1 as f64 - target).abs() <= 1e-12 * target.abs();
    Ok((p1 as u32, q1 as u32, exact))
}

/// Outcome of a single cell problem.
#[derive(Debug, Clone, Copy)]
pub struct CellFlux<S> {
    /// g_delta(rho, l) = -v rho.
    pub g: S,
    /// Measured mean drift velocity.
    pub drift_velocity: S,
    /// |v| below the pinned threshold 1e-4 gamma.
    pub pinned: bool,
    /// Relative disagreement of the two half-window drift estimates.
    pub split_disagreement: S,
    /// Minimal inter-particle separation seen while averaging.
    pub min_separation: S,
}

/// Runs the cell problem and measures the effective flux.
pub fn cell_problem_g<S: Scalar>(
    spec: &CellProblemSpec<S>,
    sigma: &StressField<S>,
) -> Result<CellFlux<S>> {
    if !sigma.is_periodic() {
        return Err(Error::InvalidArgument(
            "the cell problem requires a 1-periodic stress".into(),
        ));
    }
    let n = spec.numer as usize;
    let box_length = S::cast(spec.denom as f64);
    let spacing = box_length / S::cast(n as f64);
    let positions: Vec<S> = (0..n)
        .map(|i| spec.initial_phase + spacing * S::cast(i as f64))
        .collect();
    let ps = ParticleSet::new(positions)?;
    let pot = RegularizedLogPotential::new(spec.delta)?;
    let cfg = DddConfig::new(
        spec.gamma,
        Interaction::Periodized {
            pot,
            box_length,
        },
        sigma.clone(),
        spec.l * S::cast(0.5),
        spec.tolerance,
    )?;

    // Transient, then sampled averaging window.
    let warm = ddd_evolve(&ps, &cfg, spec.t_transient, &[])?;
    let mut started = ParticleSet::new(warm.samples.last().unwrap().clone())?;
    started.t = spec.t_transient;
    let samples = 400usize;
    let t_end = spec.t_transient + spec.t_average;
    let grid: Vec<S> = (1..samples)
        .map(|k| spec.t_transient + spec.t_average * S::cast(k as f64 / samples as f64))
        .collect();
    let traj = ddd_evolve(&started, &cfg, t_end, &grid)?;

    // Linear regression of total displacement on time.
    let rows: Vec<(S, S)> = traj
        .times
        .iter()
        .zip(&traj.samples)
        .map(|(&t, xs)| (t, xs.iter().copied().sum::<S>()))
        .collect();
    let slope_all = regression_slope(&rows);
    let half = rows.len() / 2;
    let s1 = regression_slope(&rows[..half]);
    let s2 = regression_slope(&rows[half..]);
    let v = slope_all / S::cast(n as f64);
    let v_scale = spec.gamma * (S::one() + spec.l.abs());
    let split = ((s1 - s2) / S::cast(n as f64)).abs();
    let split_disagreement = split / v.abs().max(S::cast(1e-3) * v_scale);
    if split > S::cast(0.05) * v.abs().max(S::cast(1e-3) * v_scale) {
        return Err(Error::Averaging(format!(
            "drift not converged: half-window velocities {:.4e} and {:.4e}",
            (s1 / S::cast(n as f64)).as_f64(),
            (s2 / S::cast(n as f64)).as_f64()
        )));
    }

    let min_separation = traj
        .min_separation()
        .into_iter()
        .map(|(_, d)| d)
        .fold(S::infinity(), S::min)
        .min(if n > 1 { S::infinity() } else { box_length });
    let pinned = v.abs() < S::cast(1e-4) * spec.gamma;
    Ok(CellFlux {
        g: -v * spec.rho(),
        drift_velocity: v,
        pinned,
        split_disagreement,
        min_separation,
    })
}

fn regression_slope<S: Scalar>(rows: &[(S, S)]) -> S {
    let n = S::cast(rows.len() as f64);
    let mut st = S::zero();
    let mut sx = S::zero();
    for &(t, x) in rows {
        st = st + t;
        sx = sx + x;
    }
    let (mt, mx) = (st / n, sx / n);
    let mut num = S::zero();
    let mut den = S::zero();
    for &(t, x) in rows {
        num = num + (t - mt) * (x - mx);
        den = den + (t - mt) * (t - mt);
    }
    num / den
}

/// g_delta for a decreasing ladder of cutoffs, with successive differences.
#[derive(Debug, Clone)]
pub struct DeltaReport<S> {
    pub entries: Vec<(S, S)>,
    pub diffs: Vec<S>,
    pub diffs_decreasing: bool,
}

pub fn delta_robustness<S: Scalar>(
    spec: &CellProblemSpec<S>,
    sigma: &StressField<S>,
    deltas: &[S],
) -> Result<DeltaReport<S>> {
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(
            "cutoffs must be strictly decreasing".into(),
        ));
    }
    let mut entries = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let mut s = spec.clone();
        s.delta = d;
        let flux = cell_problem_g(&s, sigma)?;
        entries.push((d, flux.g));
    }
    let diffs: Vec<S> = entries
        .windows(2)
        .map(|w| (w[0].1 - w[1].1).abs())
        .collect();
    let diffs_decreasing = diffs.windows(2).all(|w| w[1] <= w[0]);
    Ok(DeltaReport {
        entries,
        diffs,
        diffs_decreasing,
    })
}
