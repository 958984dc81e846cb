//! Mechanized checks of the structural assumptions on potentials and
//! stresses: periodicity and non-degenerate minima of W, boundedness of
//! sigma and its first two derivatives, and 1-periodicity of sigma when
//! claimed.

use crate::model::potential::PeriodicPotential;
use crate::model::stress::StressField;
use crate::scalar::Scalar;

/// Default sampled-check resolution per period.
pub const SAMPLES_PER_PERIOD: usize = 10_000;

#[derive(Debug, Clone)]
pub struct AssumptionCheck {
    pub name: String,
    pub passed: bool,
    /// Worst sampled violation (0 when the check passes cleanly).
    pub worst: f64,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct AssumptionReport {
    pub checks: Vec<AssumptionCheck>,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{:4}  {:40}  worst {:>12.4e}  {}\n",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.worst,
                c.detail
            ));
        }
        out
    }
}

/// Report-only validation of the potential and stress assumptions.
pub fn validate_assumptions<S: Scalar>(
    pot: &PeriodicPotential<S>,
    sigma: &StressField<S>,
) -> AssumptionReport {
    let mut checks = Vec::new();
    let n = SAMPLES_PER_PERIOD;
    let tol = S::identity_tol().as_f64();

    // Periodicity of W over one period.
    let mut worst = 0.0f64;
    for i in 0..n {
        let a = S::cast(i as f64 / n as f64);
        let d = (pot.w(a + S::one()) - pot.w(a)).abs().as_f64();
        worst = worst.max(d);
    }
    checks.push(AssumptionCheck {
        name: "W periodic: W(a+1) = W(a)".into(),
        passed: worst <= tol,
        worst,
        detail: format!("{n} samples, tol {tol:.1e}"),
    });

    // Minimum exactly on the integers.
    let mut worst = 0.0f64;
    for k in -2i32..=2 {
        worst = worst.max(pot.w(S::cast(k as f64)).abs().as_f64());
    }
    checks.push(AssumptionCheck {
        name: "W vanishes on Z".into(),
        passed: worst <= tol,
        worst,
        detail: "k in -2..=2".into(),
    });

    // Strict positivity away from the integers.
    let mut min_off = f64::INFINITY;
    for i in 1..n {
        let a = S::cast(i as f64 / n as f64);
        let frac = a.as_f64().fract();
        if frac > 1e-3 && frac < 1.0 - 1e-3 {
            min_off = min_off.min(pot.w(a).as_f64());
        }
    }
    checks.push(AssumptionCheck {
        name: "W > 0 off Z".into(),
        passed: min_off > 0.0,
        worst: if min_off > 0.0 { 0.0 } else { -min_off },
        detail: format!("min sampled value {min_off:.4e}"),
    });

    // Non-degenerate minimum.
    let alpha = pot.alpha().as_f64();
    checks.push(AssumptionCheck {
        name: "alpha = W''(0) > 0".into(),
        passed: alpha > 0.0,
        worst: if alpha > 0.0 { 0.0 } else { -alpha },
        detail: format!("alpha = {alpha:.6}"),
    });

    // Supplied W' consistent with finite differences of W.
    let h = S::cast(1e-5);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let a = S::cast(i as f64 * 0.005 - 0.5);
        let fd = (pot.w(a + h) - pot.w(a - h)) / (h + h);
        worst = worst.max((fd - pot.dw(a)).abs().as_f64());
    }
    checks.push(AssumptionCheck {
        name: "W' matches finite differences of W".into(),
        passed: worst <= 1e-6f64.max(tol * 1e4),
        worst,
        detail: "O(h^2) cross-check, h = 1e-5".into(),
    });

    // Stress bounds |sigma|, |sigma_x|, |sigma_xx| <= C on a window, with
    // derivatives by central differences.
    let c = sigma.bound().as_f64();
    let hs = S::cast(1e-4);
    let mut worst = 0.0f64;
    let window = 50.0;
    let m = 2001;
    for i in 0..m {
        let x = S::cast(-window + 2.0 * window * i as f64 / (m - 1) as f64);
        let s0 = sigma.eval(x).abs().as_f64();
        let s1 = ((sigma.eval(x + hs) - sigma.eval(x - hs)) / (hs + hs))
            .abs()
            .as_f64();
        let s2 = ((sigma.eval(x + hs) - sigma.eval(x) - sigma.eval(x) + sigma.eval(x - hs))
            / (hs * hs))
            .abs()
            .as_f64();
        let excess = (s0 - c).max(s1 - c).max(s2 - c).max(0.0);
        worst = worst.max(excess);
    }
    checks.push(AssumptionCheck {
        name: "|sigma|, |sigma_x|, |sigma_xx| <= C".into(),
        passed: worst <= 1e-3,
        worst,
        detail: format!("C = {c}, window [-{window}, {window}]"),
    });

    // 1-periodicity when claimed.
    if sigma.is_periodic() {
        let mut worst = 0.0f64;
        for i in 0..n {
            let x = S::cast(i as f64 / n as f64);
            worst = worst.max((sigma.eval(x + S::one()) - sigma.eval(x)).abs().as_f64());
        }
        checks.push(AssumptionCheck {
            name: "sigma periodic: sigma(x+1) = sigma(x)".into(),
            passed: worst <= tol,
            worst,
            detail: format!("{n} samples"),
        });
    }

    AssumptionReport { checks }
}
