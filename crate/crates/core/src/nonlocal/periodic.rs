//! Periodized pairwise interaction for cell problems.
//!
//! Summing the singular force over all periodic images telescopes into a
//! cotangent:
//!
//!   sum_k V'(x + k L) = -(1/2L) cot(pi x / L),
//!
//! since sum_k 1/(x + kL) = (pi/L) cot(pi x / L). Inside the cutoff the
//! k = 0 image is swapped for its regularized counterpart.

use crate::error::{Error, Result};
use crate::model::RegularizedLogPotential;
use crate::scalar::Scalar;

/// Force at separation x exerted by a particle and all its periodic images
/// in a box of length `box_length`.
pub fn periodic_interaction_force<S: Scalar>(
    x: S,
    box_length: S,
    pot: &RegularizedLogPotential<S>,
) -> Result<S> {
    if !(box_length > S::zero()) {
        return Err(Error::InvalidArgument("box length must be positive".into()));
    }
    // Nearest-image representative in (-L/2, L/2].
    let l = box_length;
    let r = x - (x / l).round() * l;
    let r = if r + r > l { r - l } else { r };
    if r.abs() <= S::cast(1e-14) * l.max(S::one()) {
        return Err(Error::Domain(format!(
            "periodized force is singular on the image lattice: x = {}",
            x.as_f64()
        )));
    }
    let arg = S::PI() * r / l;
    let cot = arg.cos() / arg.sin();
    let lattice_sum = -cot / (l + l);
    if r.abs() >= pot.delta() {
        Ok(lattice_sum)
    } else {
        // Replace the k = 0 term by its regularized version.
        Ok(lattice_sum - RegularizedLogPotential::singular_force(r) + pot.force_nonzero(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pot() -> RegularizedLogPotential<f64> {
        RegularizedLogPotential::new(0.01).unwrap()
    }

    /// Direct lattice sum of V'(x + kL) over |k| <= cut, plus the analytic
    /// remainder of the two tails (sum_{k>cut} 2x / (k^2 L^2 - x^2) ~
    /// integral), used as an independent oracle for the cotangent form.
    fn direct_sum(x: f64, l: f64, cut: i64) -> f64 {
        let mut s = 0.0;
        for k in -cut..=cut {
            s += -1.0 / (2.0 * PI * (x + k as f64 * l));
        }
        // Tail estimate: pairs k and -k combine to -x/(pi (k^2 l^2 - x^2)),
        // summed explicitly for a while and closed with the midpoint
        // integral remainder.
        let mut tail = 0.0;
        let mut k = cut + 1;
        let k_stop = cut + 200_000;
        while k < k_stop {
            let kl = k as f64 * l;
            tail += x / (PI * (kl * kl - x * x));
            k += 1;
        }
        tail += x / (PI * l * l * (k_stop as f64 - 0.5));
        s + tail
    }

    #[test]
    fn matches_direct_summation() {
        let p = pot();
        for &(x, l) in &[(0.25, 1.0), (0.1, 1.0), (0.7, 2.0), (-0.3, 1.5)] {
            let exact = periodic_interaction_force(x, l, &p).unwrap();
            let direct = direct_sum(x, l, 1_000_000);
            assert!(
                (exact - direct).abs() < 1e-8,
                "x={x} l={l}: {exact} vs {direct}"
            );
        }
    }

    #[test]
    fn quarter_box_value() {
        // x = L/4, L = 1: -(1/2) cot(pi/4) = -1/2.
        let v = periodic_interaction_force(0.25, 1.0, &pot()).unwrap();
        assert!((v + 0.5).abs() < 1e-14);
        let vm = periodic_interaction_force(-0.25, 1.0, &pot()).unwrap();
        assert!((vm - 0.5).abs() < 1e-14);
    }

    #[test]
    fn symmetry_points_vanish() {
        let p = pot();
        let v = periodic_interaction_force(0.5, 1.0, &p).unwrap();
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn periodicity_and_oddness() {
        let p = pot();
        for &x in &[0.13, 0.41, 0.77] {
            let v = periodic_interaction_force(x, 1.0, &p).unwrap();
            let vs = periodic_interaction_force(x + 3.0, 1.0, &p).unwrap();
            let vo = periodic_interaction_force(-x, 1.0, &p).unwrap();
            // Odd about L/2 as well: F(L - x) = -F(x).
            let vh = periodic_interaction_force(1.0 - x, 1.0, &p).unwrap();
            assert!((v - vs).abs() < 1e-12);
            assert!((v + vo).abs() < 1e-12);
            assert!((v + vh).abs() < 1e-12);
        }
    }

    #[test]
    fn image_lattice_is_singular() {
        let p = pot();
        assert!(periodic_interaction_force(0.0, 1.0, &p).is_err());
        assert!(periodic_interaction_force(3.0, 1.0, &p).is_err());
    }

    #[test]
    fn cutoff_swaps_in_regularized_force() {
        let p = RegularizedLogPotential::new(0.2f64).unwrap();
        let x = 0.05;
        let v = periodic_interaction_force(x, 1.0, &p).unwrap();
        // Composition: cotangent sum minus singular k=0 plus capped k=0.
        let cot = -0.5 * (PI * x).cos() / (PI * x).sin();
        let expect = cot + 1.0 / (2.0 * PI * x) - 1.0 / (2.0 * PI * 0.2);
        assert!((v - expect).abs() < 1e-12);
    }
}
