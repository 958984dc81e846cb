//! Continuum-elasticity companions of the lattice model: the energy per
//! unit cell of an affine displacement, the resulting Hooke law, and the
//! displacement / stress of a single dislocation used as far-field data.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Gradient (a1, a2) of an affine displacement along the slip direction,
/// with the derived strain components e11 = a1, e12 = e21 = a2 / 2.
#[derive(Debug, Clone, Copy)]
pub struct AffineStrain<S> {
    pub a1: S,
    pub a2: S,
}

impl<S: Scalar> AffineStrain<S> {
    pub fn e11(&self) -> S {
        self.a1
    }

    pub fn e12(&self) -> S {
        self.a2 * S::cast(0.5)
    }

    /// Hooke stress sigma0 = [[e11, 2 e12], [2 e21, 0]].
    pub fn hooke_stress(&self) -> [[S; 2]; 2] {
        let s12 = self.a2;
        [[self.e11(), s12], [s12, S::zero()]]
    }
}

/// Energy per unit cell of an affine displacement:
/// E = e11^2 / 2 + 2 e12^2 = (a1^2 + a2^2) / 2.
pub fn affine_energy_density<S: Scalar>(s: &AffineStrain<S>) -> S {
    let half = S::cast(0.5);
    half * s.e11() * s.e11() + S::cast(2.0) * s.e12() * s.e12()
}

/// Continuum displacement of a single dislocation at the origin,
/// U0(X) = arctan(X1/X2) / (2 pi) + sgn(X2) / 4. On the slip line X2 = 0
/// the trace limit from above is returned: 0 for X1 < 0, 1/2 for X1 > 0.
pub fn continuum_displacement_u0<S: Scalar>(x1: S, x2: S) -> Result<S> {
    if x1 == S::zero() && x2 == S::zero() {
        return Err(Error::Domain(
            "the dislocation displacement is singular at the origin".into(),
        ));
    }
    if x2 == S::zero() {
        return Ok(if x1 > S::zero() { S::cast(0.5) } else { S::zero() });
    }
    let quarter = S::cast(0.25);
    Ok((x1 / x2).atan() / S::TAU() + quarter * x2.signum())
}

/// Asymptotic shear stress on the slip line created by a single
/// dislocation at the origin: sigma12(X1, 0) = -1 / (2 pi X1).
pub fn single_dislocation_stress<S: Scalar>(x1: S) -> Result<S> {
    if x1 == S::zero() {
        return Err(Error::Domain("stress is singular at the core".into()));
    }
    Ok(-(S::TAU() * x1).recip())
}
