use std::f64::consts::SQRT_2;
use std::sync::OnceLock;

use serde::Serialize;
use statrs::function::erf::erfc_inv;

use crate::density::{Density1D, Law1D};
use crate::error::Result;
use crate::quadrature::{gauss_legendre, gl_panel, golden_section_minimize, QuadratureConfig};

/// A quadrature node in probability space. Upper nodes carry the tail
/// level `v = 1 - u` so that quantiles near 1 keep full precision.
#[derive(Debug, Clone, Copy)]
struct LevelNode {
    level: f64,
    upper: bool,
    weight: f64,
}

const LEVEL_PANELS: i32 = 72;
const LEVEL_ORDER: usize = 12;
const LEVEL_SPLITS: usize = 8;

/// Geometric panels `[2^-(k+2), 2^-(k+1)]` on each half of `(0, 1)`, each
/// split into equal pieces, reaching levels near `1e-22`.
fn level_nodes() -> &'static [LevelNode] {
    static NODES: OnceLock<Vec<LevelNode>> = OnceLock::new();
    NODES.get_or_init(|| {
        let rule = gauss_legendre(LEVEL_ORDER);
        let mut nodes = Vec::with_capacity(2 * LEVEL_PANELS as usize * LEVEL_SPLITS * LEVEL_ORDER);
        for upper in [false, true] {
            for k in 0..LEVEL_PANELS {
                let top = 0.5 * 0.5f64.powi(k);
                let step = 0.5 * top / LEVEL_SPLITS as f64;
                for j in 0..LEVEL_SPLITS {
                    let lo = 0.5 * top + j as f64 * step;
                    let half = 0.5 * step;
                    let mid = lo + half;
                    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                        nodes.push(LevelNode {
                            level: mid + half * x,
                            upper,
                            weight: w * half,
                        });
                    }
                }
            }
        }
        nodes
    })
}

fn quantile_at<L: Law1D + ?Sized>(law: &L, node: &LevelNode, tol: f64) -> Result<f64> {
    if node.upper {
        law.quantile_upper_tol(node.level, tol)
    } else {
        law.quantile_tol(node.level, tol)
    }
}

fn std_normal_at(node: &LevelNode) -> f64 {
    let z = SQRT_2 * erfc_inv(2.0 * node.level);
    if node.upper {
        z
    } else {
        -z
    }
}

/// Squared quadratic Wasserstein distance through the quantile coupling.
pub fn w2_1d<A: Law1D + ?Sized, B: Law1D + ?Sized>(
    a: &A,
    b: &B,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let mut acc = 0.0;
    for node in level_nodes() {
        let d = quantile_at(a, node, cfg.cdf_bisection_tol)?
            - quantile_at(b, node, cfg.cdf_bisection_tol)?;
        acc += node.weight * d * d;
    }
    Ok(acc)
}

/// First Wasserstein distance, `integral |F_a - F_b|`. Survival functions
/// are used on the right half-line; panels containing a crossing are
/// split at the crossing.
pub fn w1_1d(a: &Density1D, b: &Density1D, cfg: &QuadratureConfig) -> Result<f64> {
    let radius = a.support_radius(cfg).max(b.support_radius(cfg));
    let diff = |x: f64| {
        if x < 0.0 {
            a.cdf(x) - b.cdf(x)
        } else {
            b.sf(x) - a.sf(x)
        }
    };
    let panels = 8192usize;
    let h = 2.0 * radius / panels as f64;
    let abs_diff = |x: f64| diff(x).abs();
    let mut total = 0.0;
    let mut prev = diff(-radius);
    for k in 0..panels {
        let x0 = -radius + k as f64 * h;
        let x1 = x0 + h;
        let next = diff(x1);
        if prev * next < 0.0 {
            let (mut lo, mut hi) = (x0, x1);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if diff(mid) * prev > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let c = 0.5 * (lo + hi);
            total += gl_panel(&abs_diff, x0, c) + gl_panel(&abs_diff, c, x1);
        } else {
            total += gl_panel(&abs_diff, x0, x1);
        }
        prev = next;
    }
    Ok(total)
}

/// Best centered Gaussian approximation in `W2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianFit {
    /// Variance of the closest Gaussian.
    pub s_star: f64,
    /// Squared distance to it.
    pub dw2_sq: f64,
    /// `integral q(u) Phi^-1(u) du`.
    pub inner_product: f64,
    pub second_moment: f64,
}

pub fn gaussian_fit_w2<L: Law1D + ?Sized>(
    d: &L,
    second_moment: f64,
    cfg: &QuadratureConfig,
) -> Result<GaussianFit> {
    let c = quantile_inner_product(d, cfg)?;
    let s_star = c.max(0.0).powi(2);
    let dw2_sq = (second_moment + s_star - 2.0 * s_star.sqrt() * c).max(0.0);
    Ok(GaussianFit {
        s_star,
        dw2_sq,
        inner_product: c,
        second_moment,
    })
}

/// Gaussian fit of a [`Density1D`], using its exact second moment.
pub fn gaussian_fit(d: &Density1D, cfg: &QuadratureConfig) -> Result<GaussianFit> {
    gaussian_fit_w2(d, d.second_moment(), cfg)
}

fn quantile_inner_product<L: Law1D + ?Sized>(d: &L, cfg: &QuadratureConfig) -> Result<f64> {
    let mut acc = 0.0;
    for node in level_nodes() {
        acc += node.weight * quantile_at(d, node, cfg.cdf_bisection_tol)? * std_normal_at(node);
    }
    Ok(acc)
}

/// Minimizer of `W2^2(mu, g1) + W2^2(nu, g2) + W2^2(g1, g2)` over centered
/// Gaussians `g1 = N(0, s1)`, `g2 = N(0, s2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaInf {
    pub s1_star: f64,
    pub s2_star: f64,
    pub value: f64,
}

pub fn delta_inf(d1: &Density1D, d2: &Density1D, cfg: &QuadratureConfig) -> Result<DeltaInf> {
    let f1 = gaussian_fit(d1, cfg)?;
    let f2 = gaussian_fit(d2, cfg)?;
    Ok(delta_from_fits(&f1, &f2))
}

/// Nested golden-section search over the standard deviations of the two
/// Gaussians, on the box `[0, 4 sd1 + 4 sd2]^2`.
pub fn delta_from_fits(f1: &GaussianFit, f2: &GaussianFit) -> DeltaInf {
    let (c1, c2) = (f1.inner_product, f2.inner_product);
    let floor = (f1.second_moment - c1 * c1).max(0.0) + (f2.second_moment - c2 * c2).max(0.0);
    let objective = |a: f64, b: f64| floor + (a - c1).powi(2) + (b - c2).powi(2) + (a - b).powi(2);
    let upper = 4.0 * f1.second_moment.sqrt() + 4.0 * f2.second_moment.sqrt();
    let tol = 1e-11 * upper.max(1.0);
    let inner = |a: f64| golden_section_minimize(|b| objective(a, b), 0.0, upper, tol);
    let (a, value) = golden_section_minimize(|a| inner(a).1, 0.0, upper, tol);
    let (b, _) = inner(a);
    DeltaInf {
        s1_star: a * a,
        s2_star: b * b,
        value: value.max(0.0),
    }
}
