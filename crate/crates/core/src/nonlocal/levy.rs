//! Quadrature evaluation of the Levy-Khintchine operator
//!
//!   (Lw)(x) = (1/pi) int dz/z^2 [ w(x+z) - w(x) - z w'(x) 1_{|z|<=1} ]
//!
//! which is the half-Laplacian arising as the Dirichlet-to-Neumann map of
//! the harmonic extension into the upper half plane.
//!
//! The integral is split into three zones:
//!   * |z| < inner_cutoff: the integrand is replaced by its Taylor value
//!     w''(x)/2, contributing w''(x) * inner_cutoff / pi;
//!   * inner_cutoff <= |z| <= tail_radius: composite trapezoid rule with
//!     nodes on multiples of the grid spacing, so w(x+z) is read off the
//!     grid exactly (no interpolation error near the singularity);
//!   * |z| > tail_radius: w(x+z) is replaced by the far-field constants,
//!     giving the analytic tail (w_left + w_right - 2 w(x)) / (pi T).
//!
//! With symmetric nodes the odd compensator z w'(x) cancels identically, so
//! the quadrature sums the paired samples w(x+z) + w(x-z) - 2 w(x).

use crate::error::{Error, Result};
use crate::field::LineField;
use crate::scalar::Scalar;

/// Discretization parameters for the singular integral.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec<S> {
    /// Radius below which the singular part is closed by the Taylor value.
    pub inner_cutoff: S,
    /// Radius beyond which the far-field closure is used.
    pub tail_radius: S,
    /// Target accuracy, used by convergence diagnostics.
    pub tolerance: S,
}

impl<S: Scalar> QuadratureSpec<S> {
    pub fn new(inner_cutoff: S, tail_radius: S, tolerance: S) -> Result<Self> {
        if !(S::zero() < inner_cutoff && inner_cutoff < tail_radius) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < inner_cutoff < tail_radius, got {} and {}",
                inner_cutoff.as_f64(),
                tail_radius.as_f64()
            )));
        }
        if !(tolerance > S::zero()) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        Ok(Self {
            inner_cutoff,
            tail_radius,
            tolerance,
        })
    }

    /// Inner cutoff at one grid spacing, tail at the given radius.
    pub fn for_grid(h: S, tail_radius: S) -> Result<Self> {
        Self::new(h, tail_radius, S::cast(1e-6))
    }
}

/// Precomputed quadrature weights for one (grid spacing, spec) pair.
///
/// Building the operator once and applying it to many points or fields
/// amortizes the kernel evaluations; `apply` stays a plain weighted sum.
#[derive(Debug, Clone)]
pub struct LevyOperator<S> {
    h: S,
    /// Inner cutoff in grid units (>= 1).
    m_inner: usize,
    /// Tail radius in grid units.
    m_tail: usize,
    /// weights[k] multiplies w(x + (m_inner+k) h) + w(x - (m_inner+k) h).
    weights: Vec<S>,
    /// Coefficient of w''(x) from the Taylor closure.
    inner_coeff: S,
    /// 1 / (pi * T) for the analytic tail.
    tail_coeff: S,
}

impl<S: Scalar> LevyOperator<S> {
    pub fn new(h: S, spec: &QuadratureSpec<S>) -> Result<Self> {
        if !(h > S::zero()) {
            return Err(Error::InvalidArgument("grid spacing must be positive".into()));
        }
        // Snap the zone boundaries onto grid multiples: the inner cutoff up,
        // the tail radius down, so quadrature nodes land on grid points.
        let m_inner = (spec.inner_cutoff / h - S::cast(1e-9))
            .ceil()
            .to_usize()
            .unwrap_or(1)
            .max(1);
        let m_tail = (spec.tail_radius / h + S::cast(1e-9))
            .floor()
            .to_usize()
            .unwrap_or(0);
        if m_tail <= m_inner + 1 {
            return Err(Error::InvalidArgument(format!(
                "tail radius {} leaves no quadrature nodes above inner cutoff {} at h = {}",
                spec.tail_radius.as_f64(),
                spec.inner_cutoff.as_f64(),
                h.as_f64()
            )));
        }
        let inv_pi = S::FRAC_1_PI();
        let mut weights = Vec::with_capacity(m_tail - m_inner + 1);
        for m in m_inner..=m_tail {
            let z = h * S::cast(m as f64);
            let trap = if m == m_inner || m == m_tail {
                S::cast(0.5)
            } else {
                S::one()
            };
            weights.push(inv_pi * trap * h / (z * z));
        }
        let a = h * S::cast(m_inner as f64);
        let t = h * S::cast(m_tail as f64);
        Ok(Self {
            h,
            m_inner,
            m_tail,
            weights,
            inner_coeff: inv_pi * a,
            tail_coeff: inv_pi / t,
        })
    }

    pub fn h(&self) -> S {
        self.h
    }

    /// Snapped tail radius.
    pub fn tail_radius(&self) -> S {
        self.h * S::cast(self.m_tail as f64)
    }

    /// Magnitude of the diagonal coefficient of the discretized operator;
    /// explicit schemes bound their step by the reciprocal of this.
    pub fn stiffness(&self) -> S {
        let two = S::cast(2.0);
        let sum: S = self.weights.iter().copied().sum();
        // w'' closure carries -2/h^2, the quadrature -2 sum(weights), the
        // tail -2/(pi T).
        self.inner_coeff * two / (self.h * self.h) + two * sum + two * self.tail_coeff
    }

    /// Applies the operator to field `w` at grid index `i`.
    pub fn apply(&self, w: &LineField<S>, i: usize) -> Result<S> {
        let (left, right) = w.far_field()?;
        if i == 0 || i + 1 >= w.len() {
            return Err(Error::GridEdge(format!(
                "operator needs an interior point, got index {i} of {}",
                w.len()
            )));
        }
        Ok(self.apply_raw(w.values(), left, right, i))
    }

    /// Same weighted sum on a bare sample slice with explicit far-field
    /// constants. Valid at every index: edge stencils read the closure
    /// constants as exterior samples.
    pub fn apply_raw(&self, values: &[S], left: S, right: S, i: usize) -> S {
        let n = values.len();
        let wi = values[i];
        let sample = |j: isize| -> S {
            if j < 0 {
                left
            } else if j as usize >= n {
                right
            } else {
                values[j as usize]
            }
        };

        let ii = i as isize;
        let second = (sample(ii + 1) - wi - wi + sample(ii - 1)) / (self.h * self.h);
        let mut acc = self.inner_coeff * second;
        for (k, wgt) in self.weights.iter().enumerate() {
            let m = (self.m_inner + k) as isize;
            let pair = sample(ii + m) + sample(ii - m) - wi - wi;
            acc = acc + *wgt * pair;
        }
        acc + self.tail_coeff * (left + right - wi - wi)
    }

    /// Applies the operator at every interior grid point. Edge entries are
    /// filled with zero; callers holding the edges at their far-field
    /// values never read them.
    pub fn apply_all(&self, w: &LineField<S>) -> Result<Vec<S>> {
        w.far_field()?;
        let mut out = vec![S::zero(); w.len()];
        for (i, slot) in out.iter_mut().enumerate().take(w.len() - 1).skip(1) {
            *slot = self.apply(w, i)?;
        }
        Ok(out)
    }
}

/// One-shot evaluation of (Lw)(x) for a far-field closed field.
///
/// `x` is snapped to the nearest grid point; it must be an interior one.
pub fn levy_khintchine_apply<S: Scalar>(
    w: &LineField<S>,
    x: S,
    spec: &QuadratureSpec<S>,
) -> Result<S> {
    let i = w.index_near(x).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "evaluation point {} does not lie on the field grid",
            x.as_f64()
        ))
    })?;
    let op = LevyOperator::new(w.h(), spec)?;
    op.apply(w, i)
}

/// Precomputed circulant weights for the operator on gradient-periodic
/// fields, where the kernel sums to (pi/X)^2 / sin^2(pi z / X).
#[derive(Debug, Clone)]
pub struct PeriodicLevyOperator<S> {
    h: S,
    /// Number of distinct sample points per period.
    cells: usize,
    /// weights[k] multiplies p(x + (k+1) h) + p(x - (k+1) h); the last entry
    /// corresponds to the symmetric cell edge.
    weights: Vec<S>,
    /// Coefficient of p''(x) from the Taylor closure.
    inner_coeff: S,
}

impl<S: Scalar> PeriodicLevyOperator<S> {
    /// Builds the operator for a field sampled on `cells` intervals of
    /// width `h` covering one period X = cells * h.
    pub fn new(h: S, cells: usize) -> Result<Self> {
        if cells < 4 {
            return Err(Error::InvalidArgument(
                "periodized operator needs at least 4 cells per period".into(),
            ));
        }
        let period = h * S::cast(cells as f64);
        let inv_pi = S::FRAC_1_PI();
        let kernel = |z: S| -> S {
            let s = (S::PI() * z / period).sin();
            inv_pi * (S::PI() / period) * (S::PI() / period) / (s * s)
        };
        // Symmetric cell z in [-X/2, X/2]; inner closure on |z| < h, then
        // trapezoid nodes at multiples of h up to X/2. For odd cell counts a
        // final sliver reaches the half-period with an interpolated sample.
        let m_half = cells / 2;
        let mut weights = Vec::with_capacity(m_half + 1);
        for m in 1..=m_half {
            let z = h * S::cast(m as f64);
            let trap = if m == 1 || m == m_half {
                S::cast(0.5)
            } else {
                S::one()
            };
            weights.push(trap * h * kernel(z));
        }
        if cells % 2 == 1 {
            // Close [m_half h, X/2] with a trapezoid panel of width h/2 per
            // side. The two half-period endpoints coincide modulo the
            // period, so their per-side quarter weights merge into one.
            let z_last = h * S::cast(m_half as f64);
            let z_edge = period * S::cast(0.5);
            let quarter = S::cast(0.25);
            *weights.last_mut().unwrap() =
                *weights.last().unwrap() + quarter * h * kernel(z_last);
            weights.push(S::cast(0.5) * h * kernel(z_edge));
        }
        Ok(Self {
            h,
            cells,
            weights,
            inner_coeff: inv_pi * h,
        })
    }

    /// Applies the periodized operator to the periodic perturbation `p`
    /// (one sample per cell, index wraps) at index i.
    pub fn apply_periodic(&self, p: &[S], i: usize) -> S {
        debug_assert_eq!(p.len(), self.cells);
        let n = self.cells;
        let pi_ = p[i];
        let second =
            (p[(i + 1) % n] - pi_ - pi_ + p[(i + n - 1) % n]) / (self.h * self.h);
        let mut acc = self.inner_coeff * second;
        let m_half = n / 2;
        for m in 1..=m_half {
            let pair = p[(i + m) % n] + p[(i + n - m) % n] - pi_ - pi_;
            acc = acc + self.weights[m - 1] * pair;
        }
        if n % 2 == 1 {
            // Interpolated half-period sample: midpoint of the two samples
            // straddling x_i + X/2.
            let a = p[(i + m_half) % n];
            let b = p[(i + m_half + 1) % n];
            let edge = (a + b) * S::cast(0.5);
            acc = acc + *self.weights.last().unwrap() * (edge - pi_);
        }
        acc
    }

    /// Diagonal magnitude, for explicit time-step bounds.
    pub fn stiffness(&self) -> S {
        let two = S::cast(2.0);
        let sum: S = self.weights.iter().copied().sum();
        self.inner_coeff * two / (self.h * self.h) + two * sum
    }
}

/// Applies L to a gradient-periodic field at x, using the periodized kernel
/// against the periodic perturbation p(x) = w(x) - mean_slope * x.
pub fn periodized_l<S: Scalar>(w: &LineField<S>, x: S) -> Result<S> {
    let (_, _) = w.gradient_period()?;
    let rho_bar = w.mean_slope()?;
    let i = w.index_near(x).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "evaluation point {} does not lie on the field grid",
            x.as_f64()
        ))
    })?;
    let cells = w.len() - 1;
    let p: Vec<S> = (0..cells)
        .map(|j| w.value(j) - rho_bar * w.x(j))
        .collect();
    let op = PeriodicLevyOperator::new(w.h(), cells)?;
    Ok(op.apply_periodic(&p, i % cells))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Closure;
    use std::f64::consts::PI;

    fn arctan_layer(extent: f64, h: f64) -> LineField<f64> {
        let n = (2.0 * extent / h).round() as usize + 1;
        LineField::from_fn(
            -extent,
            h,
            n,
            Closure::FarField { left: 0.0, right: 1.0 },
            |x| 0.5 + x.atan() / PI,
        )
        .unwrap()
    }

    #[test]
    fn annihilates_constants_and_affine() {
        let spec = QuadratureSpec::new(0.05, 30.0, 1e-8).unwrap();
        let c = LineField::<f64>::from_fn(
            -40.0,
            0.05,
            1601,
            Closure::FarField { left: 3.25, right: 3.25 },
            |_| 3.25,
        )
        .unwrap();
        assert!(levy_khintchine_apply(&c, 1.0, &spec).unwrap().abs() < 1e-12);

        // Affine with matching far-field treated through its sampled window:
        // the tail closure sees the symmetric continuation, so the principal
        // value vanishes.
        let a = LineField::<f64>::from_fn(
            -40.0,
            0.05,
            1601,
            Closure::FarField { left: -81.0, right: 79.0 },
            |x| 2.0 * x - 1.0,
        )
        .unwrap();
        assert!(levy_khintchine_apply(&a, 0.0, &spec).unwrap().abs() < 1e-10);
    }

    #[test]
    fn arctan_profile_matches_harmonic_extension() {
        // Oracle: the harmonic extension of 1/2 + arctan(x)/pi into the half
        // plane has normal derivative -x / (pi (1 + x^2)) on the boundary.
        let w = arctan_layer(80.0, 0.05);
        let spec = QuadratureSpec::new(0.05, 60.0, 1e-6).unwrap();
        let op = LevyOperator::new(0.05, &spec).unwrap();
        let mut worst = 0.0f64;
        for i in 0..w.len() {
            let x = w.x(i);
            if x.abs() > 10.0 {
                continue;
            }
            let lw = op.apply(&w, i).unwrap();
            let exact = -x / (PI * (1.0 + x * x));
            worst = worst.max((lw - exact).abs());
        }
        assert!(worst < 1e-4, "sup deviation {worst:.3e}");
        // Spot value at x = 1: -1/(2 pi).
        let v = levy_khintchine_apply(&w, 1.0, &spec).unwrap();
        assert!((v + 1.0 / (2.0 * PI)).abs() < 1e-4);
    }

    #[test]
    fn linearity_and_translation_equivariance() {
        let spec = QuadratureSpec::new(0.05, 40.0, 1e-6).unwrap();
        let h = 0.05;
        let n = 2401;
        let f1 = |x: f64| 0.5 + x.atan() / PI;
        let f2 = |x: f64| 1.0 / (1.0 + x * x);
        let (a, b) = (0.7, -1.3);
        let w1 = LineField::from_fn(-60.0, h, n, Closure::FarField { left: 0.0, right: 1.0 }, f1)
            .unwrap();
        let w2 = LineField::from_fn(-60.0, h, n, Closure::FarField { left: 0.0, right: 0.0 }, f2)
            .unwrap();
        let combo = LineField::from_fn(
            -60.0,
            h,
            n,
            Closure::FarField { left: 0.0, right: a },
            |x| a * f1(x) + b * f2(x),
        )
        .unwrap();
        for &x in &[-2.0, 0.55, 3.1] {
            let lc = levy_khintchine_apply(&combo, x, &spec).unwrap();
            let l1 = levy_khintchine_apply(&w1, x, &spec).unwrap();
            let l2 = levy_khintchine_apply(&w2, x, &spec).unwrap();
            assert!((lc - (a * l1 + b * l2)).abs() < 1e-10);
        }

        // Shift by an exact multiple of h.
        let c = 37.0 * h;
        let shifted = LineField::from_fn(
            -60.0,
            h,
            n,
            Closure::FarField { left: 0.0, right: 0.0 },
            |x| f2(x - c),
        )
        .unwrap();
        for &x in &[-1.0, 0.0, 2.0] {
            let ls = levy_khintchine_apply(&shifted, x + c, &spec).unwrap();
            let l0 = levy_khintchine_apply(&w2, x, &spec).unwrap();
            assert!((ls - l0).abs() < 1e-5, "shift mismatch {}", (ls - l0).abs());
        }
    }

    #[test]
    fn quadrature_refinement_converges() {
        // Successive values under (h, inner_cutoff) halving must contract
        // like the O(h^2) scheme they come from; the fixed tail radius
        // cancels out of the differences.
        let f = |x: f64| 0.5 + x.atan() / PI;
        let x = 2.0;
        let mut vals = Vec::new();
        for &h in &[0.2, 0.1, 0.05] {
            let n = (120.0 / h) as usize + 1;
            let w = LineField::from_fn(
                -60.0,
                h,
                n,
                Closure::FarField { left: 0.0, right: 1.0 },
                f,
            )
            .unwrap();
            let spec = QuadratureSpec::new(h, 50.0, 1e-6).unwrap();
            vals.push(levy_khintchine_apply(&w, x, &spec).unwrap());
        }
        let d1 = (vals[1] - vals[0]).abs();
        let d2 = (vals[2] - vals[1]).abs();
        assert!(d2 <= 0.35 * d1, "refinement not contracting: {d1:.3e} -> {d2:.3e}");
    }

    #[test]
    fn grid_edge_is_rejected() {
        let w = arctan_layer(10.0, 0.1);
        let spec = QuadratureSpec::new(0.1, 5.0, 1e-6).unwrap();
        assert!(matches!(
            levy_khintchine_apply(&w, -10.0, &spec),
            Err(Error::GridEdge(_))
        ));
        // Off-grid point.
        assert!(levy_khintchine_apply(&w, 0.123, &spec).is_err());
        // Gradient-periodic closure is the wrong closure for this operator.
        let g = LineField::from_fn(
            0.0,
            0.1,
            11,
            Closure::GradientPeriod { period: 1.0, shift: 1.0 },
            |x| x,
        )
        .unwrap();
        assert!(matches!(
            levy_khintchine_apply(&g, 0.5, &spec),
            Err(Error::Closure(_))
        ));
    }

    #[test]
    fn periodized_kernel_reproduces_fourier_eigenvalues() {
        // Oracle: L e^{ikx} = -|k| e^{ikx}. A cosine perturbation of unit
        // period has k = 2 pi, so L cos(2 pi x) = -2 pi cos(2 pi x).
        let cells = 400;
        let h = 1.0 / cells as f64;
        let rho_bar = 0.7;
        let w = LineField::from_fn(
            0.0,
            h,
            cells + 1,
            Closure::GradientPeriod { period: 1.0, shift: rho_bar },
            |x| rho_bar * x + (2.0 * PI * x).cos(),
        )
        .unwrap();
        let v0 = periodized_l(&w, 0.0).unwrap();
        assert!(
            (v0 + 2.0 * PI).abs() < 2.0 * PI * 1e-3,
            "eigenvalue mismatch: {v0}"
        );

        // Translated mode: sin(2 pi x) at x = 1/4 also gives -2 pi.
        let ws = LineField::from_fn(
            0.0,
            h,
            cells + 1,
            Closure::GradientPeriod { period: 1.0, shift: 0.0 },
            |x| (2.0 * PI * x).sin(),
        )
        .unwrap();
        let vq = periodized_l(&ws, 0.25).unwrap();
        assert!((vq + 2.0 * PI).abs() < 2.0 * PI * 1e-3);
    }

    #[test]
    fn periodized_kernel_on_affine_field_vanishes() {
        let cells = 128;
        let h = 1.0 / cells as f64;
        let w = LineField::from_fn(
            0.0,
            h,
            cells + 1,
            Closure::GradientPeriod { period: 1.0, shift: 0.3 },
            |x| 0.3 * x,
        )
        .unwrap();
        for &x in &[0.0, 0.25, 0.5078125] {
            assert!(periodized_l(&w, x).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn periodized_kernel_odd_cell_count() {
        // Same eigenvalue check on an odd grid exercises the sliver panel.
        let cells = 401;
        let h = 1.0 / cells as f64;
        let w = LineField::from_fn(
            0.0,
            h,
            cells + 1,
            Closure::GradientPeriod { period: 1.0, shift: 0.0 },
            |x| (2.0 * PI * x).cos(),
        )
        .unwrap();
        let v0 = periodized_l(&w, 0.0).unwrap();
        assert!((v0 + 2.0 * PI).abs() < 2.0 * PI * 2e-3, "odd-grid value {v0}");
    }

    #[test]
    fn direct_quadrature_cross_check_of_eigenrelation() {
        // Independent route: dense direct quadrature of the line integral
        // with the raw 1/z^2 kernel against the cosine mode, principal
        // value by symmetric pairing around z = 0.
        let x = 0.3;
        let p = |y: f64| (2.0 * PI * y).cos();
        let hz = 1e-4;
        let mut acc = 0.0;
        let mut m = 1usize;
        loop {
            let z = m as f64 * hz;
            if z > 2000.0 {
                break;
            }
            acc += (p(x + z) + p(x - z) - 2.0 * p(x)) / (z * z) * hz;
            m += 1;
        }
        let direct = acc / PI;
        let expect = -2.0 * PI * p(x);
        assert!(
            (direct - expect).abs() < 2e-2 * expect.abs(),
            "direct {direct} vs {expect}"
        );
    }
}
