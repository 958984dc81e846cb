//! The layer solution: the monotone profile connecting 0 to 1 that solves
//!
//!   0 = L phi - W'(phi),   phi(-inf) = 0, phi(0) = 1/2, phi(+inf) = 1,
//!
//! computed as the long-time limit of the gradient flow
//! phi_t = L phi - W'(phi) from an arctan initial guess, re-centered after
//! every sweep so phi(0) = 1/2. The damping constant gamma = 2 / int (phi')^2
//! and the corrector weight eta = int (phi')^2 / W''(0) come out of the same
//! profile by trapezoid quadrature.

use crate::error::{Error, Result};
use crate::field::{Closure, LineField};
use crate::model::PeriodicPotential;
use crate::nonlocal::{LevyOperator, QuadratureSpec};
use crate::scalar::Scalar;

/// Grid and iteration controls for the layer solve.
#[derive(Debug, Clone, Copy)]
pub struct LayerGrid<S> {
    /// Half-extent of the symmetric grid [-extent, extent].
    pub extent: S,
    pub h: S,
    /// Tail radius of the quadrature.
    pub tail_radius: S,
    /// Sup-norm residual target for the discrete stationarity equation.
    pub residual_tol: S,
    pub max_iters: usize,
}

impl<S: Scalar> LayerGrid<S> {
    pub fn standard() -> Self {
        Self {
            extent: S::cast(80.0),
            h: S::cast(0.05),
            tail_radius: S::cast(50.0),
            residual_tol: S::cast(1e-6),
            max_iters: 40_000,
        }
    }
}

/// The layer profile with its derived constants.
#[derive(Debug, Clone)]
pub struct LayerSolution<S> {
    pub phi: LineField<S>,
    /// Inverse damping factor gamma = 2 (int (phi')^2)^{-1}.
    pub gamma: S,
    /// Corrector weight eta = (1/W''(0)) int (phi')^2.
    pub eta: S,
    /// alpha = W''(0) of the potential the layer was solved for.
    pub alpha: S,
    /// Sup-norm residual of the discrete stationarity equation.
    pub residual: S,
}

impl<S: Scalar> LayerSolution<S> {
    /// Evaluates the profile anywhere. Beyond the grid the algebraic tail
    /// phi(x) - H(x) ~ -1/(alpha pi x) continues the sampled values.
    pub fn eval(&self, x: S) -> S {
        if x < self.phi.x0() {
            -(self.alpha * S::PI() * x).recip()
        } else if x > self.phi.x_end() {
            S::one() - (self.alpha * S::PI() * x).recip()
        } else {
            self.phi.eval(x)
        }
    }

    /// int (phi')^2 recomputed from the stored profile.
    pub fn kinetic_integral(&self) -> S {
        kinetic_integral(&self.phi)
    }
}

fn kinetic_integral<S: Scalar>(phi: &LineField<S>) -> S {
    let h = phi.h();
    let mut acc = S::zero();
    for i in 1..phi.len() - 1 {
        let d = (phi.value(i + 1) - phi.value(i - 1)) / (h + h);
        acc = acc + d * d;
    }
    acc * h
}

/// Abscissa where the profile crosses 1/2, by linear interpolation.
fn half_crossing<S: Scalar>(phi: &LineField<S>) -> Result<S> {
    let half = S::cast(0.5);
    for i in 0..phi.len() - 1 {
        let a = phi.value(i) - half;
        let b = phi.value(i + 1) - half;
        if a <= S::zero() && b > S::zero() {
            let frac = -a / (b - a);
            return Ok(phi.x(i) + phi.h() * frac);
        }
    }
    Err(Error::Solver("profile does not cross 1/2".into()))
}

/// Translates the sampled profile so that it crosses 1/2 at x = 0. Samples
/// shifted past a grid end take the closure constant; the flow repairs the
/// resulting edge defect within a few sweeps.
fn recenter<S: Scalar>(phi: &mut LineField<S>, shift: S) {
    let n = phi.len();
    let shifted: Vec<S> = (0..n).map(|i| phi.eval(phi.x(i) + shift)).collect();
    phi.values_mut().copy_from_slice(&shifted);
}

/// Solves the layer equation for the given potential.
pub fn solve_layer<S: Scalar>(
    pot: &PeriodicPotential<S>,
    grid: &LayerGrid<S>,
) -> Result<LayerSolution<S>> {
    let h = grid.h;
    let n = (grid.extent / h * S::cast(2.0))
        .round()
        .to_usize()
        .ok_or_else(|| Error::InvalidArgument("bad grid extent".into()))?
        + 1;
    let spec = QuadratureSpec::new(h, grid.tail_radius, grid.residual_tol)?;
    let op = LevyOperator::new(h, &spec)?;

    // Arctan initial guess with the sinusoidal core width.
    let mut phi = LineField::from_fn(
        -grid.extent,
        h,
        n,
        Closure::FarField { left: S::zero(), right: S::one() },
        |x: S| S::cast(0.5) + x.atan() * S::FRAC_1_PI(),
    )?;

    let dt = S::cast(0.3) / (op.stiffness() + pot.sup_curvature());
    let mut residual = S::infinity();
    let mut iter = 0usize;
    let mut rates = vec![S::zero(); n];
    while iter < grid.max_iters {
        // The edge samples evolve too, with the closure constants standing
        // in as exterior neighbors; pinning them would force a kink.
        let mut sup = S::zero();
        for (i, slot) in rates.iter_mut().enumerate() {
            let r = op.apply_raw(phi.values(), S::zero(), S::one(), i) - pot.dw(phi.value(i));
            sup = sup.max(r.abs());
            *slot = r;
        }
        {
            let values = phi.values_mut();
            for i in 0..n {
                values[i] = values[i] + dt * rates[i];
            }
        }
        // Keep the normalization phi(0) = 1/2.
        let shift = half_crossing(&phi)?;
        if shift.abs() > S::cast(1e-13) {
            recenter(&mut phi, shift);
        }
        residual = sup;
        if sup <= grid.residual_tol {
            break;
        }
        iter += 1;
    }
    if residual > grid.residual_tol {
        return Err(Error::Solver(format!(
            "layer flow stalled at residual {:e} after {} iterations",
            residual.as_f64(),
            grid.max_iters
        )));
    }
    if !phi.values().windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::Solver(
            "layer flow lost strict monotonicity".into(),
        ));
    }

    let kinetic = kinetic_integral(&phi);
    let gamma = S::cast(2.0) / kinetic;
    let alpha = pot.alpha();
    let eta = kinetic / alpha;
    Ok(LayerSolution {
        phi,
        gamma,
        eta,
        alpha,
        residual,
    })
}

/// Tail-law diagnostic: max over x in [10, 40] of
/// |alpha pi x (phi(x) - 1) + 1|, which measures how well the profile obeys
/// phi(x) - H(x) ~ -1/(alpha pi x).
pub fn layer_tail_check<S: Scalar>(layer: &LayerSolution<S>) -> S {
    let phi = &layer.phi;
    let api = layer.alpha * S::PI();
    let mut worst = S::zero();
    for i in 0..phi.len() {
        let x = phi.x(i);
        if x < S::cast(10.0) || x > S::cast(40.0) {
            continue;
        }
        let v = (api * x * (phi.value(i) - S::one()) + S::one()).abs();
        worst = worst.max(v);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_sinusoidal_potential;
    use std::f64::consts::PI;

    fn quick_grid() -> LayerGrid<f64> {
        LayerGrid {
            extent: 60.0,
            h: 0.1,
            tail_radius: 40.0,
            residual_tol: 1e-5,
            max_iters: 20_000,
        }
    }

    #[test]
    fn sinusoidal_layer_is_the_arctan_profile() {
        let pot = make_sinusoidal_potential::<f64>();
        let layer = solve_layer(&pot, &quick_grid()).unwrap();
        let mut worst = 0.0f64;
        for i in 0..layer.phi.len() {
            let x = layer.phi.x(i);
            if x.abs() > 40.0 {
                continue;
            }
            let exact = 0.5 + x.atan() / PI;
            worst = worst.max((layer.phi.value(i) - exact).abs());
        }
        assert!(worst < 5e-3, "sup deviation from arctan: {worst:.3e}");
        // Normalization.
        let mid = layer.phi.index_near(0.0).unwrap();
        assert!((layer.phi.value(mid) - 0.5).abs() < 1e-8);
    }

    #[test]
    fn damping_constant_matches_closed_form() {
        // int (phi')^2 = 1/(2 pi) for the arctan layer, so gamma = 4 pi and
        // eta = 1/(2 pi).
        let pot = make_sinusoidal_potential::<f64>();
        let layer = solve_layer(&pot, &quick_grid()).unwrap();
        assert!(
            (layer.gamma - 4.0 * PI).abs() < 0.01 * 4.0 * PI,
            "gamma = {}",
            layer.gamma
        );
        assert!((layer.eta - 1.0 / (2.0 * PI)).abs() < 0.01 / (2.0 * PI));
    }

    #[test]
    fn tail_law_holds() {
        let pot = make_sinusoidal_potential::<f64>();
        let layer = solve_layer(&pot, &quick_grid()).unwrap();
        let worst = layer_tail_check(&layer);
        assert!(worst <= 0.15, "tail-law violation {worst}");
    }

    #[test]
    fn eval_extends_with_algebraic_tail() {
        let pot = make_sinusoidal_potential::<f64>();
        let layer = solve_layer(&pot, &quick_grid()).unwrap();
        let y = 500.0;
        assert!((layer.eval(y) - (1.0 - 1.0 / (PI * y))).abs() < 1e-12);
        assert!((layer.eval(-y) - 1.0 / (PI * y)).abs() < 1e-12);
    }
}
