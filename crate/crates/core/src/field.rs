//! Sampled line fields and step profiles on the slip line.
//!
//! [`LineField`] is the shared carrier for every one-dimensional field in
//! the crate: phase fields, layer profiles, correctors, boundary traces and
//! macroscopic strain profiles. A field is a uniform grid of samples plus a
//! *closure* describing its behaviour beyond the grid, which the nonlocal
//! operators need to evaluate their tail integrals.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How a sampled field continues outside its grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Closure<S> {
    /// Constant limits at -inf and +inf.
    FarField { left: S, right: S },
    /// Gradient periodicity: w(x + period) = w(x) + shift.
    /// The mean slope is shift / period.
    GradientPeriod { period: S, shift: S },
}

/// A real function sampled on a uniform grid, with far-field closure data.
#[derive(Debug, Clone)]
pub struct LineField<S> {
    x0: S,
    h: S,
    values: Vec<S>,
    closure: Closure<S>,
}

impl<S: Scalar> LineField<S> {
    /// Builds a field from samples on the grid x0 + i*h.
    ///
    /// For a gradient-periodic closure the grid must span exactly one
    /// period, last sample = first sample + shift.
    pub fn from_values(x0: S, h: S, values: Vec<S>, closure: Closure<S>) -> Result<Self> {
        if !(h > S::zero()) {
            return Err(Error::InvalidArgument(format!(
                "grid spacing must be positive, got {}",
                h.as_f64()
            )));
        }
        if values.len() < 3 {
            return Err(Error::InvalidArgument(
                "a line field needs at least 3 samples".into(),
            ));
        }
        if let Closure::GradientPeriod { period, shift } = closure {
            let span = h * S::cast((values.len() - 1) as f64);
            if ((span - period) / period).abs() > S::identity_tol() {
                return Err(Error::Closure(format!(
                    "grid span {} does not match gradient period {}",
                    span.as_f64(),
                    period.as_f64()
                )));
            }
            let jump = *values.last().unwrap() - values[0];
            if (jump - shift).abs() > S::bookkeeping_tol() * (S::one() + shift.abs()) {
                return Err(Error::Closure(format!(
                    "values across one period differ by {}, declared shift {}",
                    jump.as_f64(),
                    shift.as_f64()
                )));
            }
        }
        Ok(Self {
            x0,
            h,
            values,
            closure,
        })
    }

    /// Builds a field by sampling `f` at n points starting at x0.
    pub fn from_fn(
        x0: S,
        h: S,
        n: usize,
        closure: Closure<S>,
        f: impl Fn(S) -> S,
    ) -> Result<Self> {
        let values = (0..n).map(|i| f(x0 + h * S::cast(i as f64))).collect();
        Self::from_values(x0, h, values, closure)
    }

    /// Builds a field from explicit abscissas, validating uniform spacing.
    pub fn from_points(xs: &[S], values: Vec<S>, closure: Closure<S>) -> Result<Self> {
        if xs.len() != values.len() || xs.len() < 3 {
            return Err(Error::InvalidArgument(
                "abscissa and value lists must have equal length >= 3".into(),
            ));
        }
        let h = xs[1] - xs[0];
        if !(h > S::zero()) {
            return Err(Error::InvalidArgument("grid must be increasing".into()));
        }
        for i in 1..xs.len() {
            let step = xs[i] - xs[i - 1];
            if ((step - h) / h).abs() > S::identity_tol() * S::cast(1e3) {
                return Err(Error::InvalidArgument(format!(
                    "grid not uniform at index {i}: step {} vs {}",
                    step.as_f64(),
                    h.as_f64()
                )));
            }
        }
        Self::from_values(xs[0], h, values, closure)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn h(&self) -> S {
        self.h
    }

    pub fn x0(&self) -> S {
        self.x0
    }

    pub fn x_end(&self) -> S {
        self.x(self.len() - 1)
    }

    pub fn x(&self, i: usize) -> S {
        self.x0 + self.h * S::cast(i as f64)
    }

    pub fn value(&self, i: usize) -> S {
        self.values[i]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [S] {
        &mut self.values
    }

    pub fn closure(&self) -> Closure<S> {
        self.closure
    }

    pub fn far_field(&self) -> Result<(S, S)> {
        match self.closure {
            Closure::FarField { left, right } => Ok((left, right)),
            Closure::GradientPeriod { .. } => Err(Error::Closure(
                "field has gradient-period closure, far-field limits requested".into(),
            )),
        }
    }

    pub fn gradient_period(&self) -> Result<(S, S)> {
        match self.closure {
            Closure::GradientPeriod { period, shift } => Ok((period, shift)),
            Closure::FarField { .. } => Err(Error::Closure(
                "field has far-field closure, gradient period requested".into(),
            )),
        }
    }

    /// Mean slope shift/period of a gradient-periodic field.
    pub fn mean_slope(&self) -> Result<S> {
        let (period, shift) = self.gradient_period()?;
        Ok(shift / period)
    }

    /// Index of the grid point nearest to x, if x lies on the grid up to a
    /// small snap tolerance.
    pub fn index_near(&self, x: S) -> Option<usize> {
        let fi = ((x - self.x0) / self.h).round();
        let i = fi.to_isize()?;
        if i < 0 || i as usize >= self.len() {
            return None;
        }
        let xi = self.x(i as usize);
        if (x - xi).abs() <= self.h * S::cast(1e-6) {
            Some(i as usize)
        } else {
            None
        }
    }

    /// Evaluates the field anywhere by linear interpolation, using the
    /// closure beyond the grid.
    pub fn eval(&self, x: S) -> S {
        match self.closure {
            Closure::FarField { left, right } => {
                if x <= self.x0 {
                    if x == self.x0 {
                        return self.values[0];
                    }
                    return left;
                }
                if x >= self.x_end() {
                    if x == self.x_end() {
                        return *self.values.last().unwrap();
                    }
                    return right;
                }
                self.interp_interior(x)
            }
            Closure::GradientPeriod { period, shift } => {
                let k = ((x - self.x0) / period).floor();
                let xr = x - k * period;
                // Guard rounding at the right end of the cell.
                let xr = if xr >= self.x_end() { self.x_end() } else { xr };
                self.interp_interior(xr) + k * shift
            }
        }
    }

    fn interp_interior(&self, x: S) -> S {
        let t = (x - self.x0) / self.h;
        let i = t.floor().to_usize().unwrap_or(0).min(self.len() - 2);
        let frac = t - S::cast(i as f64);
        self.values[i] + (self.values[i + 1] - self.values[i]) * frac
    }

    /// Centered finite-difference derivative at interior index i.
    pub fn deriv(&self, i: usize) -> Result<S> {
        if i == 0 || i + 1 >= self.len() {
            return Err(Error::GridEdge(format!(
                "derivative stencil needs interior index, got {i} of {}",
                self.len()
            )));
        }
        Ok((self.values[i + 1] - self.values[i - 1]) / (self.h + self.h))
    }

    /// Centered second difference at interior index i.
    pub fn second_deriv(&self, i: usize) -> Result<S> {
        if i == 0 || i + 1 >= self.len() {
            return Err(Error::GridEdge(format!(
                "second-difference stencil needs interior index, got {i} of {}",
                self.len()
            )));
        }
        Ok((self.values[i + 1] - self.values[i] - self.values[i] + self.values[i - 1])
            / (self.h * self.h))
    }

    /// True if the samples are nondecreasing (up to -tol backlash).
    pub fn is_nondecreasing(&self, tol: S) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0] - tol)
    }

    /// Sup-norm distance to another field sampled on the same grid.
    pub fn sup_distance(&self, other: &Self) -> Result<S> {
        if self.len() != other.len() {
            return Err(Error::InvalidArgument(
                "sup distance requires equal grids".into(),
            ));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).abs())
            .fold(S::zero(), S::max))
    }
}

/// A nondecreasing step function sum_i H(x - jumps[i]) with unit jumps,
/// evaluated with the upper (right-continuous) convention.
#[derive(Debug, Clone)]
pub struct StepProfile<S> {
    jumps: Vec<S>,
}

impl<S: Scalar> StepProfile<S> {
    pub fn new(jumps: Vec<S>) -> Result<Self> {
        if jumps.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument(
                "step profile jumps must be nondecreasing".into(),
            ));
        }
        Ok(Self { jumps })
    }

    pub fn jumps(&self) -> &[S] {
        &self.jumps
    }

    pub fn len(&self) -> usize {
        self.jumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty()
    }

    /// Number of jumps at or left of x (upper-value convention).
    pub fn count_upto(&self, x: S) -> usize {
        self.jumps.partition_point(|a| *a <= x)
    }

    /// Value of the step function at x.
    pub fn value(&self, x: S) -> S {
        S::cast(self.count_upto(x) as f64)
    }

    /// Samples the profile onto a grid, producing a far-field line field.
    pub fn to_line_field(&self, x0: S, h: S, n: usize) -> Result<LineField<S>> {
        let right = S::cast(self.jumps.len() as f64);
        LineField::from_fn(x0, h, n, Closure::FarField { left: S::zero(), right }, |x| {
            self.value(x)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonuniform_grid() {
        let xs = [0.0, 0.1, 0.25, 0.3];
        let err = LineField::from_points(
            &xs,
            vec![0.0; 4],
            Closure::FarField { left: 0.0, right: 0.0 },
        );
        assert!(err.is_err());
    }

    #[test]
    fn gradient_period_requires_consistent_shift() {
        // Values claim shift 1 but rise by 2 over the period.
        let bad = LineField::from_fn(
            0.0,
            0.25,
            5,
            Closure::GradientPeriod { period: 1.0, shift: 1.0 },
            |x| 2.0 * x,
        );
        assert!(bad.is_err());
        let good = LineField::from_fn(
            0.0,
            0.25,
            5,
            Closure::GradientPeriod { period: 1.0, shift: 2.0 },
            |x| 2.0 * x,
        );
        assert!(good.is_ok());
    }

    #[test]
    fn eval_uses_closure() {
        let f = LineField::<f64>::from_fn(
            -1.0,
            0.5,
            5,
            Closure::FarField { left: -3.0, right: 7.0 },
            |x| x,
        )
        .unwrap();
        assert_eq!(f.eval(-10.0), -3.0);
        assert_eq!(f.eval(10.0), 7.0);
        assert!((f.eval(0.25) - 0.25).abs() < 1e-14);

        let g = LineField::<f64>::from_fn(
            0.0,
            0.25,
            5,
            Closure::GradientPeriod { period: 1.0, shift: 0.5 },
            |x| 0.5 * x,
        )
        .unwrap();
        // w(x + k) = w(x) + 0.5 k
        assert!((g.eval(2.25) - (0.125 + 1.0)).abs() < 1e-12);
        assert!((g.eval(-0.75) - (0.125 - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn step_profile_counts_with_upper_convention() {
        let s = StepProfile::new(vec![-1.0f64, 0.0, 2.0]).unwrap();
        assert_eq!(s.count_upto(-1.0), 1);
        assert_eq!(s.count_upto(-0.5), 1);
        assert_eq!(s.count_upto(0.0), 2);
        assert_eq!(s.count_upto(5.0), 3);
        assert_eq!(s.count_upto(-2.0), 0);
    }

    #[test]
    fn f32_instantiation_compiles_and_runs() {
        let f = LineField::<f32>::from_fn(
            0.0,
            0.5,
            5,
            Closure::FarField { left: 0.0, right: 1.0 },
            |x| x / 2.0,
        )
        .unwrap();
        assert!((f.eval(1.0) - 0.5).abs() < 1e-6);
    }
}
