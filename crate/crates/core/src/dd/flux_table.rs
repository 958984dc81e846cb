//! Sampled effective flux g(rho, l) with bilinear interpolation.
//!
//! Rows are measured from the cell problem on a (rho, l) product grid,
//! in parallel with deterministic assembly order. Monotonicity in l --
//! the structural assumption on the macroscopic flux -- is enforced by
//! isotonic clamping, with the largest adjustment recorded; adjustments
//! beyond averaging noise fail the build.

use rayon::prelude::*;

use crate::dd::cell::{cell_problem_g, density_to_rational, CellProblemSpec};
use crate::error::{Error, Result};
use crate::model::StressField;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct EffectiveFluxTable<S> {
    rho_grid: Vec<S>,
    l_grid: Vec<S>,
    /// Row-major [rho][l].
    g: Vec<S>,
    /// Per-node isotonic adjustment magnitudes.
    clamped_by: Vec<S>,
    max_clamp: S,
}

impl<S: Scalar> EffectiveFluxTable<S> {
    /// Builds a table from an explicit function (used for exact fluxes and
    /// in tests).
    pub fn from_fn(rho_grid: Vec<S>, l_grid: Vec<S>, f: impl Fn(S, S) -> S) -> Result<Self> {
        validate_grid(&rho_grid, "rho")?;
        validate_grid(&l_grid, "l")?;
        let mut g = Vec::with_capacity(rho_grid.len() * l_grid.len());
        for &r in &rho_grid {
            for &l in &l_grid {
                g.push(f(r, l));
            }
        }
        let clamped_by = vec![S::zero(); g.len()];
        Ok(Self {
            rho_grid,
            l_grid,
            g,
            clamped_by,
            max_clamp: S::zero(),
        })
    }

    /// The exact zero-obstacle flux g = gamma rho l / 2.
    pub fn orowan(gamma: S, rho_grid: Vec<S>, l_grid: Vec<S>) -> Result<Self> {
        Self::from_fn(rho_grid, l_grid, |r, l| gamma * r * l * S::cast(0.5))
    }

    pub fn rho_grid(&self) -> &[S] {
        &self.rho_grid
    }

    pub fn l_grid(&self) -> &[S] {
        &self.l_grid
    }

    pub fn max_clamp(&self) -> S {
        self.max_clamp
    }

    pub fn node(&self, i: usize, j: usize) -> S {
        self.g[i * self.l_grid.len() + j]
    }

    pub fn clamped_by(&self, i: usize, j: usize) -> S {
        self.clamped_by[i * self.l_grid.len() + j]
    }

    /// Extends the density hull down to rho = 0 with the physical zero-flux
    /// row (no dislocations, no plastic flow).
    pub fn with_zero_density_row(mut self) -> Self {
        if self.rho_grid[0] > S::zero() {
            self.rho_grid.insert(0, S::zero());
            let mut g = vec![S::zero(); self.l_grid.len()];
            g.extend_from_slice(&self.g);
            self.g = g;
            let mut c = vec![S::zero(); self.l_grid.len()];
            c.extend_from_slice(&self.clamped_by);
            self.clamped_by = c;
        }
        self
    }

    fn bracket(grid: &[S], x: S) -> Option<(usize, S)> {
        if x < grid[0] || x > *grid.last().unwrap() {
            return None;
        }
        let k = grid.partition_point(|&v| v <= x).min(grid.len() - 1);
        let i = k.saturating_sub(1);
        let (a, b) = (grid[i], grid[i + 1]);
        Some((i, (x - a) / (b - a)))
    }

    /// Bilinear interpolation; outside the hull is an extrapolation error.
    pub fn value(&self, rho: S, l: S) -> Result<S> {
        let (i, u) = Self::bracket(&self.rho_grid, rho).ok_or_else(|| {
            Error::Extrapolation(format!(
                "rho = {} outside table hull [{}, {}]",
                rho.as_f64(),
                self.rho_grid[0].as_f64(),
                self.rho_grid.last().unwrap().as_f64()
            ))
        })?;
        let (j, v) = Self::bracket(&self.l_grid, l).ok_or_else(|| {
            Error::Extrapolation(format!(
                "l = {} outside table hull [{}, {}]",
                l.as_f64(),
                self.l_grid[0].as_f64(),
                self.l_grid.last().unwrap().as_f64()
            ))
        })?;
        let g00 = self.node(i, j);
        let g01 = self.node(i, j + 1);
        let g10 = self.node(i + 1, j);
        let g11 = self.node(i + 1, j + 1);
        let one = S::one();
        Ok(g00 * (one - u) * (one - v)
            + g10 * u * (one - v)
            + g01 * (one - u) * v
            + g11 * u * v)
    }

    /// Partial derivative dg/drho of the bilinear patch at (rho, l).
    pub fn dg_drho(&self, rho: S, l: S) -> Result<S> {
        let (i, _) = Self::bracket(&self.rho_grid, rho)
            .ok_or_else(|| Error::Extrapolation("rho outside hull".into()))?;
        let (j, v) = Self::bracket(&self.l_grid, l)
            .ok_or_else(|| Error::Extrapolation("l outside hull".into()))?;
        let drho = self.rho_grid[i + 1] - self.rho_grid[i];
        let lo = (self.node(i + 1, j) - self.node(i, j)) / drho;
        let hi = (self.node(i + 1, j + 1) - self.node(i, j + 1)) / drho;
        Ok(lo + (hi - lo) * v)
    }

    /// Largest |dg/drho| over adjacent nodes.
    pub fn lipschitz_rho(&self) -> S {
        let mut worst = S::zero();
        for i in 0..self.rho_grid.len() - 1 {
            let dr = self.rho_grid[i + 1] - self.rho_grid[i];
            for j in 0..self.l_grid.len() {
                worst = worst.max(((self.node(i + 1, j) - self.node(i, j)) / dr).abs());
            }
        }
        worst
    }

    /// Largest |dg/dl| over adjacent nodes.
    pub fn lipschitz_l(&self) -> S {
        let mut worst = S::zero();
        for i in 0..self.rho_grid.len() {
            for j in 0..self.l_grid.len() - 1 {
                let dl = self.l_grid[j + 1] - self.l_grid[j];
                worst = worst.max(((self.node(i, j + 1) - self.node(i, j)) / dl).abs());
            }
        }
        worst
    }

    /// The row l -> g(rho_i, l).
    pub fn row(&self, i: usize) -> Vec<(S, S)> {
        self.l_grid
            .iter()
            .enumerate()
            .map(|(j, &l)| (l, self.node(i, j)))
            .collect()
    }

    /// Width of the zero plateau {l : |g(rho_i, l)| <= tol} of a row.
    pub fn plateau_width(&self, i: usize, tol: S) -> S {
        let row = self.row(i);
        let mut lo = S::infinity();
        let mut hi = S::neg_infinity();
        for (l, g) in row {
            if g.abs() <= tol {
                lo = lo.min(l);
                hi = hi.max(l);
            }
        }
        if hi > lo {
            hi - lo
        } else {
            S::zero()
        }
    }
}

fn validate_grid<S: Scalar>(grid: &[S], name: &str) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "{name} grid needs at least two nodes"
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(format!("{name} grid must be sorted")));
    }
    Ok(())
}

/// Build controls shared by every node of a table run.
#[derive(Debug, Clone)]
pub struct FluxTableBuild<S> {
    pub delta: S,
    pub gamma: S,
    pub t_transient: S,
    pub t_average: S,
    /// Raw pre-clamp monotonicity violations above this value fail the
    /// build instead of being silently clamped.
    pub max_violation: S,
    pub max_denominator: u32,
    pub tolerance: S,
}

impl<S: Scalar> FluxTableBuild<S> {
    pub fn standard(delta: S, gamma: S) -> Self {
        let t_tr = S::cast(50.0) / gamma;
        Self {
            delta,
            gamma,
            t_transient: t_tr,
            t_average: S::cast(10.0) * t_tr,
            max_violation: S::cast(5e-3) * gamma,
            max_denominator: 64,
            tolerance: S::cast(1e-8),
        }
    }
}

/// Measures g on the product grid (in parallel, deterministic order),
/// asserts pinning for mean-zero stresses, and isotonic-clamps each row
/// in l.
pub fn build_flux_table<S: Scalar>(
    rho_grid: &[S],
    l_grid: &[S],
    sigma: &StressField<S>,
    build: &FluxTableBuild<S>,
) -> Result<EffectiveFluxTable<S>> {
    validate_grid(rho_grid, "rho")?;
    validate_grid(l_grid, "l")?;
    if rho_grid[0] <= S::zero() {
        return Err(Error::InvalidArgument(
            "rho grid must be strictly positive; use with_zero_density_row for the origin"
                .into(),
        ));
    }
    let mean_zero = sigma.is_periodic()
        && sigma.mean_over_period()?.abs() < S::cast(1e-10);

    let nodes: Vec<(usize, usize)> = (0..rho_grid.len())
        .flat_map(|i| (0..l_grid.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<Result<S>> = nodes
        .par_iter()
        .map(|&(i, j)| {
            let (numer, denom, _) = density_to_rational(rho_grid[i], build.max_denominator)?;
            let mut spec = CellProblemSpec::new(
                numer,
                denom,
                l_grid[j],
                build.delta,
                build.t_transient,
                build.t_average,
                build.gamma,
            )?;
            spec.tolerance = build.tolerance;
            cell_problem_g(&spec, sigma)
                .map(|flux| flux.g)
                .map_err(|e| Error::Table(format!("node (rho={}, l={}): {e}", rho_grid[i].as_f64(), l_grid[j].as_f64())))
        })
        .collect();

    let mut g = Vec::with_capacity(nodes.len());
    for r in results {
        g.push(r?);
    }

    // Pinning assertion for mean-zero obstacles.
    if mean_zero {
        if let Some(j0) = l_grid.iter().position(|&l| l == S::zero()) {
            for (i, &rho) in rho_grid.iter().enumerate() {
                let v = g[i * l_grid.len() + j0];
                if v.abs() > S::cast(1e-4) * build.gamma * rho {
                    return Err(Error::Table(format!(
                        "pinning violated: g({}, 0) = {:e}",
                        rho.as_f64(),
                        v.as_f64()
                    )));
                }
            }
        }
    }

    // Isotonic clamp in l per density row (pool adjacent violators).
    let mut clamped_by = vec![S::zero(); g.len()];
    let mut max_clamp = S::zero();
    for i in 0..rho_grid.len() {
        let row = &mut g[i * l_grid.len()..(i + 1) * l_grid.len()];
        let raw = row.to_vec();
        isotonic_increasing(row);
        for (j, (&r, &c)) in raw.iter().zip(row.iter()).enumerate() {
            let adj = (c - r).abs();
            clamped_by[i * l_grid.len() + j] = adj;
            max_clamp = max_clamp.max(adj);
            if adj > build.max_violation {
                return Err(Error::Table(format!(
                    "monotonicity violation {:e} at (rho={}, l={}) exceeds noise budget {:e}",
                    adj.as_f64(),
                    rho_grid[i].as_f64(),
                    l_grid[j].as_f64(),
                    build.max_violation.as_f64()
                )));
            }
        }
    }

    Ok(EffectiveFluxTable {
        rho_grid: rho_grid.to_vec(),
        l_grid: l_grid.to_vec(),
        g,
        clamped_by,
        max_clamp,
    })
}

/// Pool-adjacent-violators projection onto nondecreasing sequences.
fn isotonic_increasing<S: Scalar>(values: &mut [S]) {
    let n = values.len();
    let mut level: Vec<S> = Vec::with_capacity(n);
    let mut weight: Vec<S> = Vec::with_capacity(n);
    for k in 0..n {
        level.push(values[k]);
        weight.push(S::one());
        while level.len() >= 2 {
            let m = level.len();
            if level[m - 2] <= level[m - 1] {
                break;
            }
            let w = weight[m - 2] + weight[m - 1];
            let v = (level[m - 2] * weight[m - 2] + level[m - 1] * weight[m - 1]) / w;
            level.truncate(m - 1);
            weight.truncate(m - 1);
            level[m - 2] = v;
            weight[m - 2] = w;
        }
    }
    let mut k = 0usize;
    for (lv, w) in level.into_iter().zip(weight) {
        let reps = w.to_usize().unwrap_or(1);
        for _ in 0..reps {
            values[k] = lv;
            k += 1;
        }
    }
}
