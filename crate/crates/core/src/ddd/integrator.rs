//! Adaptive embedded Runge-Kutta integration (Dormand-Prince 5(4)) for the
//! particle systems. Steps are clipped to requested sample times, so the
//! trajectory is evaluated exactly where it is sampled.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// Fifth-order weights (identical to the last stage row: FSAL).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];

/// Embedded fourth-order weights.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Controls for one integration run.
pub struct OdeOptions<S> {
    /// Per-step relative error target.
    pub rel_tol: S,
    /// Absolute floor for the error scale.
    pub abs_tol: S,
    pub initial_step: S,
    pub max_steps: usize,
}

impl<S: Scalar> OdeOptions<S> {
    pub fn with_tolerance(tol: S) -> Self {
        Self {
            rel_tol: tol,
            abs_tol: tol * S::cast(1e-2),
            initial_step: S::cast(1e-4),
            max_steps: 50_000_000,
        }
    }
}

/// Integrates y' = f(t, y) from (t0, y0) to t_end, invoking `observe` at
/// every accepted step (with the step endpoint). `f` writes the derivative
/// into its output slice. `accept` can veto a state (ordering checks); a
/// veto aborts with the produced error.
pub fn integrate_dopri5<S: Scalar>(
    t0: S,
    y0: &[S],
    t_end: S,
    opts: &OdeOptions<S>,
    mut f: impl FnMut(S, &[S], &mut [S]),
    mut clip: impl FnMut(S) -> S,
    mut on_step: impl FnMut(S, &[S]) -> Result<()>,
) -> Result<Vec<S>> {
    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut k: Vec<Vec<S>> = (0..7).map(|_| vec![S::zero(); dim]).collect();
    let mut y_stage = vec![S::zero(); dim];
    let mut y5 = vec![S::zero(); dim];
    let mut h = opts.initial_step.min((t_end - t0).abs()).max(S::cast(1e-12));
    let order_pow = S::cast(0.2);
    let safety = S::cast(0.9);

    if dim == 0 || t_end <= t0 {
        return Ok(y);
    }

    f(t, &y, &mut k[0]);
    let mut steps = 0usize;
    while t < t_end {
        if steps >= opts.max_steps {
            return Err(Error::Solver(format!(
                "integration exceeded {} steps at t = {}",
                opts.max_steps,
                t.as_f64()
            )));
        }
        steps += 1;
        let remaining = t_end - t;
        let mut h_try = h.min(remaining);
        h_try = clip(h_try.min(remaining)).min(h_try);
        if h_try < S::cast(1e-14) * (S::one() + t.abs()) {
            return Err(Error::Stiffness { t: t.as_f64() });
        }

        for s in 1..7 {
            for i in 0..dim {
                let mut acc = S::zero();
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s - 1][j];
                    if a != 0.0 {
                        acc = acc + S::cast(a) * kj[i];
                    }
                }
                y_stage[i] = y[i] + h_try * acc;
            }
            let t_stage = if s == 6 { t + h_try } else {
                let c = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0][s - 1];
                t + h_try * S::cast(c)
            };
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            f(t_stage, &y_stage, &mut tail[0]);
        }

        // 5th-order solution and embedded error estimate.
        let mut err_norm = S::zero();
        for i in 0..dim {
            let mut acc5 = S::zero();
            let mut acc4 = S::zero();
            for (j, kj) in k.iter().enumerate() {
                if B5[j] != 0.0 {
                    acc5 = acc5 + S::cast(B5[j]) * kj[i];
                }
                if B4[j] != 0.0 {
                    acc4 = acc4 + S::cast(B4[j]) * kj[i];
                }
            }
            y5[i] = y[i] + h_try * acc5;
            let e = h_try * (acc5 - acc4);
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y5[i].abs());
            let r = e / scale;
            err_norm = err_norm + r * r;
        }
        err_norm = (err_norm / S::cast(dim as f64)).sqrt();

        if err_norm <= S::one() {
            t = t + h_try;
            std::mem::swap(&mut y, &mut y5);
            // FSAL: last stage is the derivative at the new point.
            let last = k[6].clone();
            k[0].copy_from_slice(&last);
            on_step(t, &y)?;
        }

        let factor = if err_norm > S::zero() {
            safety * err_norm.powf(-order_pow)
        } else {
            S::cast(5.0)
        };
        h = h_try * factor.max(S::cast(0.2)).min(S::cast(5.0));
    }
    Ok(y)
}
