//! Quadrature rules, scalar search and the numerical configuration shared by
//! every integral in the crate.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{EpiError, Result};

/// Numerical settings governing truncation, grid resolution and tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Half-width of the computational support, in standard deviations.
    pub support_radius_multiplier: f64,
    /// Number of nodes of every uniform grid. Power of two, at least 2^10.
    pub grid_points: usize,
    /// Absolute tolerance of quantile bisection.
    pub cdf_bisection_tol: f64,
    pub integral_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            support_radius_multiplier: 12.0,
            grid_points: 1 << 16,
            cdf_bisection_tol: 1e-12,
            integral_tol: 1e-9,
        }
    }
}

impl QuadratureConfig {
    pub fn with_grid_points(mut self, grid_points: usize) -> Self {
        self.grid_points = grid_points;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.grid_points.is_power_of_two() || self.grid_points < 1 << 10 {
            return Err(EpiError::Config(format!(
                "grid_points must be a power of two >= 1024, got {}",
                self.grid_points
            )));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.support_radius_multiplier)
            || !positive(self.cdf_bisection_tol)
            || !positive(self.integral_tol)
        {
            return Err(EpiError::Config(
                "support multiplier and tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Nodes and weights of an n-point rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss-Legendre rule on [-1, 1], Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            dp = nf * (z * p1 - p2) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

/// Probabilists' Gauss-Hermite rule: `sum w_i f(x_i)` approximates `E f(Z)`
/// for a standard Gaussian `Z`. Weights sum to one.
pub fn gauss_hermite(n: usize) -> Rule {
    assert!(n >= 1);
    let nf = n as f64;
    let pim4 = PI.powf(-0.25);
    let mut z_nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut z = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * z_nodes[0],
            3 => 1.91 * z - 0.91 * z_nodes[1],
            _ => 2.0 * z - z_nodes[i - 2],
        };
        let mut dp = 0.0;
        for _ in 0..200 {
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            dp = (2.0 * nf).sqrt() * p2;
            let step = p1 / dp;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        z_nodes[i] = z;
        z_nodes[n - 1 - i] = -z;
        let w = 2.0 / (dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    let sqrt_pi = PI.sqrt();
    let mut rule = Rule {
        nodes: z_nodes
            .iter()
            .rev()
            .map(|z| z * std::f64::consts::SQRT_2)
            .collect(),
        weights: weights.iter().rev().map(|w| w / sqrt_pi).collect(),
    };
    // exact symmetry
    for i in 0..n / 2 {
        let x = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
    }
    if n % 2 == 1 {
        rule.nodes[n / 2] = 0.0;
    }
    rule
}

const PANEL_ORDER: usize = 10;

pub(crate) fn panel_rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

/// Gauss-Legendre integral of `f` over `[a, b]` with the fixed panel rule.
pub(crate) fn gl_panel<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> f64 {
    let rule = panel_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Composite Gauss-Legendre over `panels` equal panels.
pub fn composite_gl(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| gl_panel(&f, a + k as f64 * h, a + (k + 1) as f64 * h))
        .sum()
}

/// Integral of `f` over `[0, radius]`: geometric panels towards the origin
/// (integrable kinks and cusps at 0) followed by uniform panels of width
/// at most `width`.
pub(crate) fn integrate_half_line(f: impl Fn(f64) -> f64, radius: f64, width: f64) -> f64 {
    let w0 = width.min(radius);
    let mut total = 0.0;
    let mut hi = w0;
    for _ in 0..60 {
        let lo = 0.5 * hi;
        total += gl_panel(&f, lo, hi);
        hi = lo;
    }
    let panels = ((radius - w0) / width).ceil().max(0.0) as usize;
    if panels > 0 {
        total += composite_gl(&f, w0, radius, panels);
    }
    total
}

/// Smallest `x` in `[lo, hi]` with `g(x) >= target` for nondecreasing `g`,
/// by bisection to absolute tolerance `tol`. The caller guarantees
/// `g(lo) < target <= g(hi)`.
pub(crate) fn bisect_increasing(
    g: impl Fn(f64) -> f64,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
///
/// Returns `(x_min, f_min)`.
pub fn golden_section_minimize(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iters = 0;
    while (b - a).abs() > tol && iters < 500 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        iters += 1;
    }
    // endpoints can win for monotone objectives
    let candidates = [(x1, f1), (x2, f2), (a, f(a)), (b, f(b))];
    candidates
        .into_iter()
        .fold((x1, f1), |best, c| if c.1 < best.1 { c } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre(10);
        let integral: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * x.powi(18))
            .sum();
        assert!((integral - 2.0 / 19.0).abs() < 1e-14);
        assert!((rule.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn hermite_reproduces_gaussian_moments() {
        for n in [16, 64, 128] {
            let rule = gauss_hermite(n);
            let m = |p: i32| -> f64 {
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(x, w)| w * x.powi(p))
                    .sum()
            };
            assert!((m(0) - 1.0).abs() < 1e-13, "n={n}");
            assert!((m(2) - 1.0).abs() < 1e-12, "n={n}");
            assert!((m(4) - 3.0).abs() < 1e-11, "n={n}");
            assert!((m(6) - 15.0).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn golden_section_finds_quadratic_minimum() {
        let (x, fx) = golden_section_minimize(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-14);
    }

    #[test]
    fn half_line_integral_handles_cusp() {
        // ∫_0^1 sqrt(x) dx = 2/3
        let v = integrate_half_line(|x| x.sqrt(), 1.0, 0.25);
        assert!((v - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        assert!(QuadratureConfig::default()
            .with_grid_points(1000)
            .validate()
            .is_err());
        assert!(QuadratureConfig::default()
            .with_grid_points(512)
            .validate()
            .is_err());
    }
}
