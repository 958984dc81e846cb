//! The regularized nonlocal operator acting on step profiles,
//!
//!   M_delta[w](x) = int_{|z| > delta} dz V_delta''(z) E(w(x+z) - w(x)),
//!
//! with the odd integer part E(a) = 1/2 + k for k <= a < k+1, so E(0) = 1/2
//! and oddness holds almost everywhere.
//!
//! For a nondecreasing step profile the integrand is piecewise constant
//! between consecutive jump offsets, so the integral is evaluated exactly
//! from the antiderivative of V''(z) = 1/(2 pi z^2). The operator is read
//! only at jump points with the upper-value convention; there the
//! single-particle self-force vanishes exactly and an N-step profile
//! reproduces the pairwise regularized forces sum_{j != i} V_delta'(x_i - x_j).

use crate::error::{Error, Result};
use crate::field::StepProfile;
use crate::model::RegularizedLogPotential;
use crate::scalar::Scalar;

/// Odd integer part: E(a) = 1/2 + floor(a), with the half-open convention
/// at the integers.
pub fn odd_integer_part<S: Scalar>(a: S) -> S {
    S::cast(0.5) + a.floor()
}

/// Evaluates M_delta for a step profile at a jump point.
///
/// `x_eval` must coincide with one of the jump abscissas; evaluation off
/// the jumps would pick up an additive constant of order 1/(2 pi delta)
/// and is rejected.
pub fn mdelta_apply<S: Scalar>(
    steps: &StepProfile<S>,
    x_eval: S,
    pot: &RegularizedLogPotential<S>,
) -> Result<S> {
    let jumps = steps.jumps();
    let scale = S::one() + x_eval.abs();
    let is_jump = jumps
        .iter()
        .any(|&a| (a - x_eval).abs() <= S::identity_tol() * scale);
    if !is_jump {
        return Err(Error::InvalidArgument(format!(
            "M_delta is only defined at jump points; {} is not one",
            x_eval.as_f64()
        )));
    }
    let delta = pot.delta();

    // w(x_eval + z) - w(x_eval) as a function of z jumps exactly at the
    // offsets a_j - x_eval. Integrate each constant piece of E against
    // V''(z) = 1/(2 pi z^2) on |z| > delta, whose antiderivative is
    // -1/(2 pi z).
    let base = steps.count_upto(x_eval) as i64;
    let half = S::cast(0.5);

    // Positive axis: breakpoints above delta, pieces carry the running jump
    // count (jumps inside the cutoff are already included in the count at
    // the first breakpoint).
    let mut acc = S::zero();
    {
        let mut z_lo = delta;
        let mut count = steps.count_upto(x_eval + delta) as i64 - base;
        let mut upcoming: Vec<S> = jumps
            .iter()
            .filter(|&&a| a - x_eval > delta)
            .copied()
            .collect();
        upcoming.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for a in upcoming {
            let z_hi = a - x_eval;
            let e = half + S::cast(count as f64);
            acc = acc + e * segment_integral(z_lo, z_hi);
            count += 1;
            z_lo = z_hi;
        }
        let e = half + S::cast(count as f64);
        acc = acc + e * tail_integral(z_lo);
    }

    // Negative axis, mirrored: V'' is even.
    {
        let mut z_lo = delta; // |z|
        let mut count = base - steps.count_upto(x_eval - delta) as i64;
        let mut upcoming: Vec<S> = jumps
            .iter()
            .filter(|&&a| x_eval - a > delta)
            .map(|&a| x_eval - a)
            .collect();
        upcoming.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for r in upcoming {
            let e = half - S::cast(count as f64);
            acc = acc + e * segment_integral(z_lo, r);
            count += 1;
            z_lo = r;
        }
        let e = half - S::cast(count as f64);
        acc = acc + e * tail_integral(z_lo);
    }

    Ok(acc)
}

/// int_{z_lo}^{z_hi} dz / (2 pi z^2).
fn segment_integral<S: Scalar>(z_lo: S, z_hi: S) -> S {
    (z_lo.recip() - z_hi.recip()) / S::TAU()
}

/// int_{z_lo}^{inf} dz / (2 pi z^2).
fn tail_integral<S: Scalar>(z_lo: S) -> S {
    z_lo.recip() / S::TAU()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pot(delta: f64) -> RegularizedLogPotential<f64> {
        RegularizedLogPotential::new(delta).unwrap()
    }

    #[test]
    fn odd_integer_part_convention() {
        assert_eq!(odd_integer_part(0.0f64), 0.5);
        assert_eq!(odd_integer_part(0.7f64), 0.5);
        assert_eq!(odd_integer_part(1.0f64), 1.5);
        assert_eq!(odd_integer_part(-0.3f64), -0.5);
        assert_eq!(odd_integer_part(-1.0f64), -0.5);
    }

    #[test]
    fn single_step_self_force_vanishes() {
        let s = StepProfile::new(vec![0.7f64]).unwrap();
        let v = mdelta_apply(&s, 0.7, &pot(0.01)).unwrap();
        assert!(v.abs() < 1e-15, "self force {v}");
    }

    #[test]
    fn two_steps_reproduce_neighbor_force() {
        // Steps at a and b = a + 1, evaluated at a: the operator returns
        // V'(a - b) = 1/(2 pi), the shear stress exerted by the neighbor.
        let a = -0.35;
        let s = StepProfile::new(vec![a, a + 1.0]).unwrap();
        let v = mdelta_apply(&s, a, &pot(0.01)).unwrap();
        assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-14, "got {v}");
        // And at b the sign flips.
        let vb = mdelta_apply(&s, a + 1.0, &pot(0.01)).unwrap();
        assert!((vb + 1.0 / (2.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn matches_pairwise_regularized_forces() {
        // N-step profile at jump i equals sum_{j!=i} V_delta'(x_i - x_j),
        // including pairs inside the cutoff.
        let pot = pot(0.05);
        let xs = vec![-1.2, -0.3, -0.27, 0.4, 2.0, 2.02];
        let s = StepProfile::new(xs.clone()).unwrap();
        for (i, &xi) in xs.iter().enumerate() {
            let direct: f64 = xs
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, &xj)| pot.force_nonzero(xi - xj))
                .sum();
            let m = mdelta_apply(&s, xi, &pot).unwrap();
            assert!(
                (m - direct).abs() < 1e-12,
                "particle {i}: M_delta {m} vs pairwise {direct}"
            );
        }
    }

    #[test]
    fn symmetric_staircase_is_force_free_at_center() {
        // Equispaced symmetric steps mimic an affine profile; E is odd
        // against the even kernel, so the center jump feels nothing.
        let xs: Vec<f64> = (-5..=5).map(|k| k as f64 * 0.2).collect();
        let s = StepProfile::new(xs).unwrap();
        let v = mdelta_apply(&s, 0.0, &pot(0.01)).unwrap();
        assert!(v.abs() < 1e-13, "center force {v}");
    }

    #[test]
    fn rejects_off_jump_evaluation() {
        let s = StepProfile::new(vec![0.0f64, 1.0]).unwrap();
        assert!(mdelta_apply(&s, 0.5, &pot(0.01)).is_err());
    }
}
