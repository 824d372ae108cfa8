use super::{Density1D, Law1D};
use crate::error::{EpiError, Result};
use crate::quadrature::QuadratureConfig;

const CHECK_POINTS: usize = 10_000;

/// Infimum of `-(log f)''` over a 10^4-point grid spanning the configured
/// support. Kink points of the Laplace law are skipped.
pub fn log_concavity_modulus(d: &Density1D, cfg: &QuadratureConfig) -> Result<f64> {
    let r = d.support_radius(cfg);
    let mut best = f64::INFINITY;
    for k in 0..CHECK_POINTS {
        let x = -r + 2.0 * r * k as f64 / (CHECK_POINTS - 1) as f64;
        match d.log_pdf_second_derivative(x) {
            Ok(v) => best = best.min(-v),
            Err(EpiError::NonSmooth { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}

/// Verifies `-(log f)'' >= eta` on the check grid.
pub fn certify_bakry_emery(d: &Density1D, eta: f64, cfg: &QuadratureConfig) -> Result<()> {
    let modulus = log_concavity_modulus(d, cfg)?;
    if modulus < eta - 1e-12 * eta.abs().max(1.0) {
        return Err(EpiError::Hypothesis(format!(
            "log-concavity modulus {modulus:.6e} is below the required {eta}"
        )));
    }
    Ok(())
}

/// Mass under `d` of the region where `-(log f)'' >= threshold`. Region
/// boundaries are located by a sign scan refined with bisection.
pub fn curvature_region_mass(d: &Density1D, threshold: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let g = |x: f64| d.log_pdf_second_derivative(x).map(|v| -v - threshold);
    let r = d.support_radius(cfg);
    let n = 20_000;
    let xs: Vec<f64> = (0..=n)
        .map(|k| -r + 2.0 * r * k as f64 / n as f64)
        .collect();
    let vals = xs.iter().map(|&x| g(x)).collect::<Result<Vec<_>>>()?;

    // crossing points, each tagged with whether the region starts there
    let mut edges: Vec<(f64, bool)> = Vec::new();
    for k in 0..n {
        let (a, b) = (vals[k] >= 0.0, vals[k + 1] >= 0.0);
        if a != b {
            let (mut lo, mut hi) = (xs[k], xs[k + 1]);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if (g(mid)? >= 0.0) == a {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            edges.push((0.5 * (lo + hi), b));
        }
    }
    let mut mass = 0.0;
    let mut start = if vals[0] >= 0.0 {
        Some(f64::NEG_INFINITY)
    } else {
        None
    };
    for (x, entering) in edges {
        if entering {
            start = Some(x);
        } else if let Some(s) = start.take() {
            mass += interval_mass(d, s, x);
        }
    }
    if let Some(s) = start {
        mass += interval_mass(d, s, f64::INFINITY);
    }
    Ok(mass)
}

fn interval_mass(d: &Density1D, a: f64, b: f64) -> f64 {
    let below = |x: f64| {
        if x == f64::NEG_INFINITY {
            0.0
        } else {
            d.cdf(x)
        }
    };
    let above = |x: f64| if x == f64::INFINITY { 0.0 } else { d.sf(x) };
    // complement form keeps precision when the interval holds most of the mass
    (1.0 - below(a) - above(b)).max(0.0)
}
