//! The homogenized dislocation-density model
//!
//!   w_t = g(w_x, L w + 2 sigma_mean),
//!
//! solved by an explicit monotone scheme: upwinded gradient (direction
//! chosen by the sign of dg/drho from the table), nonlocal term from the
//! periodized or far-field Levy operator, flux values interpolated from the
//! measured table.

mod cell;
mod flux_table;

pub use cell::{
    cell_problem_g, delta_robustness, density_to_rational, CellFlux, CellProblemSpec,
    DeltaReport,
};
pub use flux_table::{build_flux_table, EffectiveFluxTable, FluxTableBuild};

use crate::ddd::Trajectory;
use crate::error::{Error, Result};
use crate::field::{Closure, LineField};
use crate::nonlocal::{LevyOperator, PeriodicLevyOperator, QuadratureSpec};
use crate::scalar::Scalar;

/// Macroscopic plastic-strain state; w_x is the dislocation density, so w
/// must stay nondecreasing.
#[derive(Debug, Clone)]
pub struct MacroState<S> {
    pub w: LineField<S>,
    pub t: S,
}

impl<S: Scalar> MacroState<S> {
    pub fn new(w: LineField<S>) -> Result<Self> {
        if !w.is_nondecreasing(S::bookkeeping_tol()) {
            return Err(Error::InvalidArgument(
                "macroscopic strain must be nondecreasing".into(),
            ));
        }
        Ok(Self { w, t: S::zero() })
    }
}

/// Scheme controls.
#[derive(Debug, Clone, Copy)]
pub struct DdOptions<S> {
    /// Mean of the microscopic stress, entering the flux slot as
    /// 2 sigma_mean. Zero in the pinning experiments.
    pub sigma_mean: S,
    /// Tail radius of the nonlocal quadrature for far-field states.
    pub tail_radius: S,
}

impl<S: Scalar> DdOptions<S> {
    pub fn mean_zero(tail_radius: S) -> Self {
        Self {
            sigma_mean: S::zero(),
            tail_radius,
        }
    }
}

enum NonlocalOp<S> {
    Periodic {
        op: PeriodicLevyOperator<S>,
        rho_bar: S,
        shift: S,
    },
    FarField {
        op: LevyOperator<S>,
        left: S,
        right: S,
    },
}

impl<S: Scalar> NonlocalOp<S> {
    fn for_state(w: &LineField<S>, opts: &DdOptions<S>) -> Result<Self> {
        match w.closure() {
            Closure::GradientPeriod { period, shift } => {
                let cells = w.len() - 1;
                let op = PeriodicLevyOperator::new(w.h(), cells)?;
                Ok(NonlocalOp::Periodic {
                    op,
                    rho_bar: shift / period,
                    shift,
                })
            }
            Closure::FarField { left, right } => {
                let spec = QuadratureSpec::for_grid(w.h(), opts.tail_radius)?;
                let op = LevyOperator::new(w.h(), &spec)?;
                Ok(NonlocalOp::FarField { op, left, right })
            }
        }
    }

    fn stiffness(&self) -> S {
        match self {
            NonlocalOp::Periodic { op, .. } => op.stiffness(),
            NonlocalOp::FarField { op, .. } => op.stiffness(),
        }
    }

    /// L w at every node that the scheme updates.
    fn apply(&self, w: &LineField<S>) -> Vec<S> {
        match self {
            NonlocalOp::Periodic { op, rho_bar, .. } => {
                let cells = w.len() - 1;
                let p: Vec<S> = (0..cells)
                    .map(|i| w.value(i) - *rho_bar * w.x(i))
                    .collect();
                let mut out: Vec<S> = (0..cells).map(|i| op.apply_periodic(&p, i)).collect();
                out.push(out[0]);
                out
            }
            NonlocalOp::FarField { op, left, right } => (0..w.len())
                .map(|i| {
                    if i == 0 || i + 1 == w.len() {
                        S::zero()
                    } else {
                        op.apply_raw(w.values(), *left, *right, i)
                    }
                })
                .collect(),
        }
    }
}

/// Monotone-scheme step bound 0.25 min(h / Lip_rho, 1 / (Lip_l |kernel|)).
pub fn dd_cfl_bound<S: Scalar>(
    state: &MacroState<S>,
    table: &EffectiveFluxTable<S>,
    opts: &DdOptions<S>,
) -> Result<S> {
    let op = NonlocalOp::for_state(&state.w, opts)?;
    let h = state.w.h();
    let lip_r = table.lipschitz_rho().max(S::cast(1e-12));
    let lip_l = table.lipschitz_l().max(S::cast(1e-12));
    Ok(S::cast(0.25) * (h / lip_r).min((lip_l * op.stiffness()).recip()))
}

/// Advances the macroscopic model to t_end with explicit steps of size dt.
/// Appends (t, energy) rows to `energy_log` when provided (gradient-
/// periodic states only).
pub fn dd_evolve<S: Scalar>(
    state: &MacroState<S>,
    table: &EffectiveFluxTable<S>,
    dt: S,
    t_end: S,
    opts: &DdOptions<S>,
    mut energy_log: Option<&mut Vec<(S, S)>>,
) -> Result<MacroState<S>> {
    let bound = dd_cfl_bound(state, table, opts)?;
    if dt > bound {
        return Err(Error::Stability {
            dt: dt.as_f64(),
            bound: bound.as_f64(),
        });
    }
    let op = NonlocalOp::for_state(&state.w, opts)?;
    let mut w = state.w.clone();
    let mut t = state.t;
    let h = w.h();
    let n = w.len();
    let two_mean = opts.sigma_mean * S::cast(2.0);

    if let Some(log) = energy_log.as_deref_mut() {
        log.push((t, energy_of(&w, &op, opts.sigma_mean)?));
    }

    while t < t_end - dt * S::cast(0.5) {
        let lw = op.apply(&w);
        let mut rates = vec![S::zero(); n];
        match &op {
            NonlocalOp::Periodic { shift, .. } => {
                let cells = n - 1;
                for i in 0..cells {
                    let w_prev = if i == 0 {
                        w.value(cells - 1) - *shift
                    } else {
                        w.value(i - 1)
                    };
                    let w_next = w.value(i + 1);
                    rates[i] = node_rate(
                        table,
                        w_prev,
                        w.value(i),
                        w_next,
                        h,
                        lw[i] + two_mean,
                    )?;
                }
                rates[cells] = rates[0];
            }
            NonlocalOp::FarField { .. } => {
                for i in 1..n - 1 {
                    rates[i] = node_rate(
                        table,
                        w.value(i - 1),
                        w.value(i),
                        w.value(i + 1),
                        h,
                        lw[i] + two_mean,
                    )?;
                }
            }
        }
        {
            let values = w.values_mut();
            for i in 0..n {
                values[i] = values[i] + dt * rates[i];
            }
        }
        t = t + dt;
        if !w.is_nondecreasing(S::cast(1e-12)) {
            return Err(Error::Solver(format!(
                "scheme lost monotonicity of w at t = {}",
                t.as_f64()
            )));
        }
        if let Some(log) = energy_log.as_deref_mut() {
            log.push((t, energy_of(&w, &op, opts.sigma_mean)?));
        }
    }
    Ok(MacroState { w, t })
}

/// One-node update rate g(w_x_upwind, l_slot).
fn node_rate<S: Scalar>(
    table: &EffectiveFluxTable<S>,
    w_prev: S,
    w_here: S,
    w_next: S,
    h: S,
    l_slot: S,
) -> Result<S> {
    let fwd = (w_next - w_here) / h;
    let bwd = (w_here - w_prev) / h;
    let central = (w_next - w_prev) / (h + h);
    // Upwind direction from the sign of dg/drho at the central probe;
    // probe arguments are clamped into the hull, the actual evaluation is
    // not.
    let rl = table.rho_grid();
    let ll = table.l_grid();
    let probe_r = central.max(rl[0]).min(*rl.last().unwrap());
    let probe_l = l_slot.max(ll[0]).min(*ll.last().unwrap());
    let slope = table.dg_drho(probe_r, probe_l)?;
    let grad = if slope >= S::zero() { fwd } else { bwd };
    table.value(grad, l_slot)
}

fn energy_of<S: Scalar>(w: &LineField<S>, op: &NonlocalOp<S>, sigma_mean: S) -> Result<S> {
    match op {
        NonlocalOp::Periodic { .. } => {
            let lw = op.apply(w);
            let h = w.h();
            let n = w.len();
            let quarter = S::cast(0.25);
            let mut acc = S::zero();
            for i in 0..n {
                let tw = if i == 0 || i + 1 == n {
                    S::cast(0.5)
                } else {
                    S::one()
                };
                acc = acc + tw * h * (-quarter * w.value(i) * lw[i] - sigma_mean * w.value(i));
            }
            Ok(acc)
        }
        NonlocalOp::FarField { .. } => Err(Error::Closure(
            "the energy functional is defined per gradient period".into(),
        )),
    }
}

/// Elastic energy of a gradient-periodic state over one period:
/// int -1/4 w L w - sigma_mean w.
pub fn dd_energy<S: Scalar>(state: &MacroState<S>, sigma_mean: S) -> Result<S> {
    let opts = DdOptions {
        sigma_mean,
        tail_radius: S::one(),
    };
    let op = NonlocalOp::for_state(&state.w, &opts)?;
    energy_of(&state.w, &op, sigma_mean)
}

/// Builds the rescaled empirical strain fields w_eps(x, t) =
/// eps * #{i : x_i(t/eps) <= x/eps} on the given macroscopic grid, one per
/// requested time.
pub fn rescale_ddd<S: Scalar>(
    traj: &Trajectory<S>,
    eps3: S,
    x0: S,
    h: S,
    n: usize,
    times: &[S],
) -> Result<Vec<(S, LineField<S>)>> {
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let micro = traj.positions_at(t / eps3)?;
        let count = S::cast(micro.len() as f64);
        let field = LineField::from_fn(
            x0,
            h,
            n,
            Closure::FarField {
                left: S::zero(),
                right: eps3 * count,
            },
            |x: S| {
                let y = x / eps3;
                let k = micro.partition_point(|&a| a <= y);
                eps3 * S::cast(k as f64)
            },
        )?;
        out.push((t, field));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddd::{ddd_evolve, DddConfig, Interaction, ParticleSet};
    use crate::model::StressField;
    use std::f64::consts::PI;

    const GAMMA: f64 = 4.0 * PI;

    fn periodic_state(cells: usize, rho: f64, amp: f64) -> MacroState<f64> {
        let h = 1.0 / cells as f64;
        let w = LineField::from_fn(
            0.0,
            h,
            cells + 1,
            Closure::GradientPeriod { period: 1.0, shift: rho },
            |x| rho * x + amp * (2.0 * PI * x).sin(),
        )
        .unwrap();
        MacroState::new(w).unwrap()
    }

    fn orowan_table() -> EffectiveFluxTable<f64> {
        EffectiveFluxTable::orowan(
            GAMMA,
            vec![0.05, 0.5, 1.0, 1.5, 2.0],
            vec![-8.0, -4.0, 0.0, 4.0, 8.0],
        )
        .unwrap()
        .with_zero_density_row()
    }

    #[test]
    fn affine_state_is_stationary() {
        // w = rho x exactly: L w = 0 and g(rho, 0) = 0.
        let state = periodic_state(64, 1.0, 0.0);
        let table = orowan_table();
        let opts = DdOptions::mean_zero(1.0);
        let dt = 0.5 * dd_cfl_bound(&state, &table, &opts).unwrap();
        let out = dd_evolve(&state, &table, dt, 0.05, &opts, None).unwrap();
        let dev = out.w.sup_distance(&state.w).unwrap();
        assert!(dev < 1e-12, "affine state moved by {dev:e}");
    }

    #[test]
    fn perturbation_decays_at_the_fourier_rate() {
        // Linearizing w_t = (gamma rho / 2) L w around w = rho x gives
        // mode decay exp(-gamma rho pi t) for the 2 pi mode (|k| = 2 pi,
        // g_l = gamma rho / 2).
        let rho = 1.0;
        let amp = 1e-3;
        let state = periodic_state(128, rho, amp);
        let table = orowan_table();
        let opts = DdOptions::mean_zero(1.0);
        let dt = 0.9 * dd_cfl_bound(&state, &table, &opts).unwrap();
        let t_end = 0.02;
        let out = dd_evolve(&state, &table, dt, t_end, &opts, None).unwrap();
        // Measure the remaining perturbation amplitude at the quarter point.
        let i = out.w.index_near(0.25).unwrap();
        let residual = out.w.value(i) - rho * 0.25;
        let steps = (t_end / dt).round();
        let expect = amp * (-GAMMA * rho * PI * dt * steps).exp();
        assert!(
            (residual - expect).abs() < 0.05 * amp,
            "residual {residual:e} vs {expect:e}"
        );
    }

    #[test]
    fn energy_of_cosine_perturbation_matches_quadrature_oracle() {
        // Oracle: L cos(2 pi x) = -2 pi cos(2 pi x), so
        // E = -1/4 int (rho x + a cos)(L(a cos)) = pi a^2 / 4 on one period
        // (the rho x cross term integrates to zero).
        let rho = 0.7;
        let a = 0.05;
        let cells = 256;
        let h = 1.0 / cells as f64;
        let w = LineField::from_fn(
            0.0,
            h,
            cells + 1,
            Closure::GradientPeriod { period: 1.0, shift: rho },
            |x| rho * x + a * (2.0 * PI * x).cos(),
        )
        .unwrap();
        let state = MacroState::new(w).unwrap();
        let e = dd_energy(&state, 0.0).unwrap();
        let expect = PI * a * a / 4.0;
        assert!(
            ((e - expect) / expect).abs() < 5e-3,
            "energy {e:e} vs {expect:e}"
        );

        // Brute-force cross-check with a dense direct quadrature of the
        // periodized kernel (independent of PeriodicLevyOperator).
        let mut direct = 0.0;
        let m = 512;
        let hh = 1.0 / m as f64;
        let wf = |x: f64| rho * x + a * (2.0 * PI * x).cos();
        for i in 0..m {
            let x = i as f64 * hh;
            let mut lw = 0.0;
            for j in 1..=(m / 2) {
                let z = j as f64 * hh;
                let k = PI / (PI * z).sin().powi(2);
                let pair = wf(x + z) + wf(x - z) - 2.0 * wf(x)
                    - rho * z - rho * (-z);
                let tw = if j == m / 2 { 0.5 } else { 1.0 };
                lw += tw * hh * k * pair;
            }
            direct += hh * (-0.25) * wf(x) * lw;
        }
        assert!(
            ((direct - expect) / expect).abs() < 2e-2,
            "direct quadrature {direct:e} vs {expect:e}"
        );
    }

    #[test]
    fn affine_energy_is_zero() {
        let state = periodic_state(64, 1.3, 0.0);
        let e = dd_energy(&state, 0.0).unwrap();
        assert!(e.abs() < 1e-12);
    }

    #[test]
    fn energy_decays_along_the_flow() {
        let state = periodic_state(96, 1.0, 0.02);
        let table = orowan_table();
        let opts = DdOptions::mean_zero(1.0);
        let dt = 0.9 * dd_cfl_bound(&state, &table, &opts).unwrap();
        let mut log = Vec::new();
        dd_evolve(&state, &table, dt, 0.01, &opts, Some(&mut log)).unwrap();
        assert!(log.len() > 10);
        for pair in log.windows(2) {
            assert!(
                pair[1].1 <= pair[0].1 + 1e-10,
                "energy rose: {} -> {}",
                pair[0].1,
                pair[1].1
            );
        }
    }

    #[test]
    fn comparison_principle_for_ordered_states() {
        let lo = periodic_state(64, 1.0, 0.015);
        // Raise by a constant and deform slightly: still ordered.
        let hi = {
            let mut w = lo.w.clone();
            for (i, v) in w.values_mut().iter_mut().enumerate() {
                *v = *v + 0.04 + 0.01 * (2.0 * PI * (i as f64 / 64.0)).cos();
            }
            MacroState::new(w).unwrap()
        };
        assert!(lo.w.values().iter().zip(hi.w.values()).all(|(a, b)| a < b));
        let table = orowan_table();
        let opts = DdOptions::mean_zero(1.0);
        let dt = 0.8 * dd_cfl_bound(&lo, &table, &opts).unwrap();
        let lo1 = dd_evolve(&lo, &table, dt, 0.01, &opts, None).unwrap();
        let hi1 = dd_evolve(&hi, &table, dt, 0.01, &opts, None).unwrap();
        assert!(lo1
            .w
            .values()
            .iter()
            .zip(hi1.w.values())
            .all(|(a, b)| *a <= *b + 1e-12));
    }

    #[test]
    fn cfl_guard_rejects_large_steps() {
        let state = periodic_state(64, 1.0, 0.01);
        let table = orowan_table();
        let opts = DdOptions::mean_zero(1.0);
        let bound = dd_cfl_bound(&state, &table, &opts).unwrap();
        assert!(matches!(
            dd_evolve(&state, &table, 2.0 * bound, 0.1, &opts, None),
            Err(Error::Stability { .. })
        ));
    }

    #[test]
    fn rescaled_staircase_tracks_the_density_profile() {
        // Equi-spaced particles with spacing eps/rho produce a staircase
        // within eps of rho x on compacts, and halving eps halves the gap.
        let rho = 1.0;
        let mut gaps = Vec::new();
        for &eps in &[0.1, 0.05] {
            let n = (2.0 / eps) as usize;
            let spacing = 1.0 / rho;
            // Centered so the staircase midline is rho x + eps n / 2.
            let xs: Vec<f64> = (0..n)
                .map(|i| (i as f64 + 0.5 - n as f64 / 2.0) * spacing)
                .collect();
            let ps = ParticleSet::new(xs).unwrap();
            let cfg = DddConfig::new(
                GAMMA,
                Interaction::Singular,
                StressField::zero(),
                0.0,
                1e-8,
            )
            .unwrap();
            // No evolution: inspect the t = 0 snapshot.
            let traj = ddd_evolve(&ps, &cfg, 1e-9, &[]).unwrap();
            let fields = rescale_ddd(&traj, eps, -0.5, 0.01, 101, &[0.0]).unwrap();
            let (_, field) = &fields[0];
            let midline = eps * n as f64 / 2.0;
            let gap = (0..field.len())
                .map(|i| {
                    let x = field.x(i);
                    (field.value(i) - (rho * x + midline)).abs()
                })
                .fold(0.0f64, f64::max);
            assert!(gap <= eps + 1e-9, "eps = {eps}: gap {gap}");
            gaps.push(gap);
        }
        assert!(gaps[1] <= 0.6 * gaps[0]);
    }

    #[test]
    fn single_particle_rescaling() {
        let ps = ParticleSet::new(vec![0.0]).unwrap();
        let cfg = DddConfig::free_pair_default(GAMMA).unwrap();
        let traj = ddd_evolve(&ps, &cfg, 1e-9, &[]).unwrap();
        for &eps in &[0.1, 0.025] {
            let fields = rescale_ddd(&traj, eps, -1.0, 0.05, 41, &[0.0]).unwrap();
            let (_, f) = &fields[0];
            for i in 0..f.len() {
                let expect = if f.x(i) >= 0.0 { eps } else { 0.0 };
                assert_eq!(f.value(i), expect);
            }
        }
        // Requesting a time beyond the trajectory is a range error.
        assert!(rescale_ddd(&traj, 0.1, -1.0, 0.05, 41, &[1.0]).is_err());
    }
}
