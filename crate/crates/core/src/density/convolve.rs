use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{Density1D, GridDensity, Law1D};
use crate::error::{domain, EpiError, Result};
use crate::quadrature::QuadratureConfig;

/// Node `k` of the standard layout sits at `(k - n/2) h`, so the origin is a node.
fn layout(radius: f64, n: usize) -> (f64, f64) {
    let h = radius / (n / 2 - 1) as f64;
    (-((n / 2) as f64) * h, h)
}

fn sample(d: &Density1D, coeff: f64, lo: f64, h: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let x = lo + k as f64 * h;
            d.pdf(x / coeff) / coeff
        })
        .collect()
}

/// Samples `d` on the configured grid and renormalizes.
pub fn to_grid(d: &Density1D, cfg: &QuadratureConfig) -> Result<Density1D> {
    cfg.validate()?;
    let n = cfg.grid_points;
    let (lo, h) = layout(d.support_radius(cfg), n);
    Ok(Density1D::Grid(GridDensity::new(
        lo,
        h,
        sample(d, 1.0, lo, h, n),
    )?))
}

/// Density of `c1 X + c2 Y` for independent `X ~ d1`, `Y ~ d2`.
pub fn scaled_sum(
    d1: &Density1D,
    c1: f64,
    d2: &Density1D,
    c2: f64,
    cfg: &QuadratureConfig,
) -> Result<Density1D> {
    cfg.validate()?;
    if !(c1 > 0.0 && c2 > 0.0 && c1.is_finite() && c2.is_finite()) {
        return Err(domain("scaling coefficients must be positive"));
    }
    let n = cfg.grid_points;
    let combined = (c1 * c1 * d1.second_moment() + c2 * c2 * d2.second_moment()).sqrt();
    let radius = (cfg.support_radius_multiplier * combined)
        .max(c1 * d1.support_radius(cfg))
        .max(c2 * d2.support_radius(cfg));
    let (lo, h) = layout(radius, n);
    let finest = (c1 * d1.feature_scale()).min(c2 * d2.feature_scale());
    if h > finest / 8.0 {
        let needed = (16.0 * radius / finest).log2().ceil().exp2() as u64;
        return Err(EpiError::Config(format!(
            "grid of {n} points over support [-{radius:.3}, {radius:.3}] cannot resolve features of \
             width {finest:.3e}; need at least {needed} grid points"
        )));
    }
    let a = sample(d1, c1, lo, h, n);
    let b = sample(d2, c2, lo, h, n);

    let m = 2 * n;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut fa: Vec<Complex<f64>> = a.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fa.resize(m, Complex::new(0.0, 0.0));
    let mut fb: Vec<Complex<f64>> = b.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fb.resize(m, Complex::new(0.0, 0.0));
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    inv.process(&mut fa);
    // linear convolution index k + n/2 lands on node k of the same layout
    let scale = h / m as f64;
    let out: Vec<f64> = (0..n)
        .map(|k| (fa[k + n / 2].re * scale).max(0.0))
        .collect();
    Ok(Density1D::Grid(GridDensity::new(lo, h, out)?))
}

/// Density of `X + sqrt(s) Z` with `Z` standard Gaussian.
pub fn gaussian_smooth(d: &Density1D, s: f64, cfg: &QuadratureConfig) -> Result<Density1D> {
    if !(s.is_finite() && s > 0.0) {
        return Err(domain(format!(
            "smoothing variance must be positive, got {s}"
        )));
    }
    scaled_sum(d, 1.0, &Density1D::Gaussian { variance: s }, 1.0, cfg)
}
