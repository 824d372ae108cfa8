//! Centered one-dimensional probability densities.

mod convolve;
mod curvature;
mod grid;
mod table;

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use libm::{erfc, tgamma as gamma};

use crate::error::{domain, EpiError, Result};
use crate::quadrature::{bisect_increasing, integrate_half_line, QuadratureConfig};

pub use convolve::{gaussian_smooth, scaled_sum, to_grid};
pub use curvature::{certify_bakry_emery, curvature_region_mass, log_concavity_modulus};
pub use grid::GridDensity;
pub(crate) use table::{CumulativeTable, Profile};

/// Default absolute tolerance of quantile bisection.
pub const DEFAULT_BISECTION_TOL: f64 = 1e-12;

/// A law on the real line with distribution-function access.
pub trait Law1D {
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    fn sf(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }
    /// Interval where quantile searches start; expanded if too narrow.
    fn search_interval(&self) -> (f64, f64);

    /// Generalized inverse of the cdf, by bisection.
    fn quantile_tol(&self, u: f64, tol: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(domain(format!("quantile level {u} outside (0, 1)")));
        }
        let (mut lo, mut hi) = self.search_interval();
        let mut width = hi - lo;
        for _ in 0..200 {
            if self.cdf(lo) < u {
                break;
            }
            lo -= width;
            width *= 2.0;
        }
        for _ in 0..200 {
            if self.cdf(hi) >= u {
                break;
            }
            hi += width;
            width *= 2.0;
        }
        if !(self.cdf(lo) < u && self.cdf(hi) >= u) {
            return Err(domain(format!("cannot bracket quantile level {u}")));
        }
        Ok(bisect_increasing(|x| self.cdf(x), u, lo, hi, tol))
    }

    /// Point `x` with `sf(x) = v`, accurate for tiny `v`.
    fn quantile_upper_tol(&self, v: f64, tol: f64) -> Result<f64> {
        if !(v > 0.0 && v < 1.0) {
            return Err(domain(format!("upper quantile level {v} outside (0, 1)")));
        }
        let (mut lo, mut hi) = self.search_interval();
        let mut width = hi - lo;
        for _ in 0..200 {
            if self.sf(hi) <= v {
                break;
            }
            hi += width;
            width *= 2.0;
        }
        for _ in 0..200 {
            if self.sf(lo) > v {
                break;
            }
            lo -= width;
            width *= 2.0;
        }
        if !(self.sf(lo) > v && self.sf(hi) <= v) {
            return Err(domain(format!("cannot bracket upper quantile level {v}")));
        }
        Ok(bisect_increasing(|x| -self.sf(x), -v, lo, hi, tol))
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        self.quantile_tol(u, DEFAULT_BISECTION_TOL)
    }

    fn quantile_upper(&self, v: f64) -> Result<f64> {
        self.quantile_upper_tol(v, DEFAULT_BISECTION_TOL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub variance: f64,
}

/// Uniformly log-concave perturbation of the Gaussian: density of `scale * Y`
/// where `Y` has density proportional to `exp(-y^2/2 - a y^4)`.
#[derive(Debug, Clone)]
pub struct QuarticGibbs {
    a: f64,
    scale: f64,
    log_normalizer: f64,
    second_moment: f64,
    table: Arc<CumulativeTable>,
}

impl PartialEq for QuarticGibbs {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.scale == other.scale
    }
}

impl QuarticGibbs {
    fn new(a: f64, scale: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(domain(format!("quartic coefficient must be >= 0, got {a}")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(domain(format!("scale must be positive, got {scale}")));
        }
        // exp(-750) underflows: the table covers all representable mass
        let radius = if a > 0.0 {
            ((-0.5 + (0.25 + 3000.0 * a).sqrt()) / (2.0 * a)).sqrt()
        } else {
            1500f64.sqrt()
        };
        let profile: Profile = Arc::new(move |y: f64| {
            let y2 = y * y;
            (-0.5 * y2 - a * y2 * y2).exp()
        });
        let table = CumulativeTable::build(profile, -radius, radius, 4096)?;
        let second_moment = table.expectation(|y| y * y);
        Ok(Self {
            a,
            scale,
            log_normalizer: table.norm().ln(),
            second_moment,
            table: Arc::new(table),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Log of the integral of `exp(-y^2/2 - a y^4)` over the line.
    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }
}

/// A centered probability density on the real line.
#[derive(Debug, Clone, PartialEq)]
pub enum Density1D {
    Gaussian { variance: f64 },
    Mixture { components: Vec<MixtureComponent> },
    Laplace { scale: f64 },
    QuarticGibbs(QuarticGibbs),
    Grid(GridDensity),
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn gauss_cdf(x: f64, variance: f64) -> f64 {
    0.5 * erfc(-x / (variance.sqrt() * SQRT_2))
}

fn gauss_pdf(x: f64, variance: f64) -> f64 {
    (-0.5 * x * x / variance).exp() / (2.0 * PI * variance).sqrt()
}

fn gauss_abs_moment(variance: f64, p: f64) -> f64 {
    (2.0 * variance).powf(0.5 * p) * gamma(0.5 * (p + 1.0)) / PI.sqrt()
}

impl Density1D {
    pub fn gaussian(variance: f64) -> Result<Self> {
        Ok(Self::Gaussian {
            variance: positive("variance", variance)?,
        })
    }

    pub fn standard_gaussian() -> Self {
        Self::Gaussian { variance: 1.0 }
    }

    pub fn laplace(scale: f64) -> Result<Self> {
        Ok(Self::Laplace {
            scale: positive("scale", scale)?,
        })
    }

    pub fn quartic(a: f64) -> Result<Self> {
        Ok(Self::QuarticGibbs(QuarticGibbs::new(a, 1.0)?))
    }

    pub fn quartic_scaled(a: f64, scale: f64) -> Result<Self> {
        Ok(Self::QuarticGibbs(QuarticGibbs::new(a, scale)?))
    }

    pub fn mixture(components: Vec<MixtureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(domain("mixture needs at least one component"));
        }
        let mut total = 0.0;
        for c in &components {
            if !(c.weight > 0.0 && c.weight <= 1.0) {
                return Err(domain(format!(
                    "mixture weight {} outside (0, 1]",
                    c.weight
                )));
            }
            positive("component variance", c.variance)?;
            total += c.weight;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(Self::Mixture { components })
    }

    /// The two-component family `eps N(0, 1/(2 eps)) + (1 - eps) N(0, 1/(2(1 - eps)))`,
    /// which has unit variance for every `eps`.
    pub fn mixture_counterexample(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(domain(format!("eps = {eps} outside (0, 1)")));
        }
        Self::mixture(vec![
            MixtureComponent {
                weight: eps,
                variance: 0.5 / eps,
            },
            MixtureComponent {
                weight: 1.0 - eps,
                variance: 0.5 / (1.0 - eps),
            },
        ])
    }

    pub fn grid(grid: GridDensity) -> Self {
        Self::Grid(grid)
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self, Self::Grid(_))
    }

    pub fn as_grid(&self) -> Option<&GridDensity> {
        match self {
            Self::Grid(g) => Some(g),
            _ => None,
        }
    }

    /// Density value, rejecting non-finite arguments.
    pub fn pdf_checked(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(domain(format!("pdf evaluated at non-finite x = {x}")));
        }
        Ok(self.pdf(x))
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Grid(g) => g.mean(),
            _ => 0.0,
        }
    }

    pub fn second_moment(&self) -> f64 {
        match self {
            Self::Gaussian { variance } => *variance,
            Self::Mixture { components } => components.iter().map(|c| c.weight * c.variance).sum(),
            Self::Laplace { scale } => 2.0 * scale * scale,
            Self::QuarticGibbs(q) => q.scale * q.scale * q.second_moment,
            Self::Grid(g) => g.expectation(|x| x * x),
        }
    }

    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        (self.second_moment() - m * m).max(0.0).sqrt()
    }

    /// Standard deviation governing tail truncation: the widest mixture
    /// component for mixtures, the plain standard deviation otherwise.
    pub fn tail_scale(&self) -> f64 {
        match self {
            Self::Mixture { components } => components
                .iter()
                .map(|c| c.variance)
                .fold(0.0, f64::max)
                .sqrt(),
            _ => self.std_dev(),
        }
    }

    /// Smallest length scale that a grid must resolve.
    pub fn feature_scale(&self) -> f64 {
        match self {
            Self::Mixture { components } => components
                .iter()
                .map(|c| c.variance)
                .fold(f64::INFINITY, f64::min)
                .sqrt(),
            Self::Laplace { scale } => *scale,
            _ => self.std_dev(),
        }
    }

    /// Half-width of the computational support under `cfg`.
    pub fn support_radius(&self, cfg: &QuadratureConfig) -> f64 {
        let r = cfg.support_radius_multiplier * self.tail_scale();
        match self {
            // exponential tails need more than 12 standard deviations
            Self::Laplace { scale } => r.max(45.0 * scale),
            Self::Grid(g) => r.max(g.lo().abs()).max(g.hi().abs()),
            _ => r,
        }
    }

    /// Density of `c X`.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        let c = positive("rescaling factor", c)?;
        Ok(match self {
            Self::Gaussian { variance } => Self::Gaussian {
                variance: variance * c * c,
            },
            Self::Mixture { components } => Self::Mixture {
                components: components
                    .iter()
                    .map(|m| MixtureComponent {
                        weight: m.weight,
                        variance: m.variance * c * c,
                    })
                    .collect(),
            },
            Self::Laplace { scale } => Self::Laplace { scale: scale * c },
            Self::QuarticGibbs(q) => Self::QuarticGibbs(QuarticGibbs {
                scale: q.scale * c,
                ..q.clone()
            }),
            Self::Grid(g) => Self::Grid(g.rescaled(c)?),
        })
    }

    /// Exact second derivative of `log pdf`.
    pub fn log_pdf_second_derivative(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(domain(format!("non-finite x = {x}")));
        }
        match self {
            Self::Gaussian { variance } => Ok(-1.0 / variance),
            Self::Mixture { components } => {
                let logs: Vec<f64> = components
                    .iter()
                    .map(|c| {
                        c.weight.ln()
                            - 0.5 * (2.0 * PI * c.variance).ln()
                            - 0.5 * x * x / c.variance
                    })
                    .collect();
                let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let z: f64 = logs.iter().map(|l| (l - top).exp()).sum();
                let (mut m1, mut m2) = (0.0, 0.0);
                for (c, l) in components.iter().zip(&logs) {
                    let r = (l - top).exp() / z;
                    m1 += r / c.variance;
                    m2 += r / (c.variance * c.variance);
                }
                Ok(x * x * (m2 - m1 * m1).max(0.0) - m1)
            }
            Self::Laplace { .. } if x == 0.0 => Err(EpiError::NonSmooth { x }),
            Self::Laplace { .. } => Ok(0.0),
            Self::QuarticGibbs(q) => {
                let y = x / q.scale;
                Ok(-(1.0 + 12.0 * q.a * y * y) / (q.scale * q.scale))
            }
            Self::Grid(_) => Err(EpiError::Unsupported(
                "log-density curvature of a gridded density".into(),
            )),
        }
    }

    /// `E|X|^p`.
    pub fn absolute_moment(&self, p: f64) -> Result<f64> {
        if !(p.is_finite() && p > 0.0) {
            return Err(domain(format!("moment order must be positive, got {p}")));
        }
        Ok(match self {
            Self::Gaussian { variance } => gauss_abs_moment(*variance, p),
            Self::Mixture { components } => components
                .iter()
                .map(|c| c.weight * gauss_abs_moment(c.variance, p))
                .sum(),
            Self::Laplace { scale } => scale.powf(p) * gamma(p + 1.0),
            Self::QuarticGibbs(q) => {
                let (_, hi) = q.table.bounds();
                let integral = 2.0 * integrate_half_line(|y| y.powf(p) * q.table.pdf(y), hi, 0.05);
                q.scale.powf(p) * integral
            }
            Self::Grid(g) => g.expectation(|x| x.abs().powf(p)),
        })
    }

    /// `integral k(f(x)) dx` over the configured support, for even analytic densities.
    pub(crate) fn even_expectation_raw(
        &self,
        k: impl Fn(f64) -> f64,
        cfg: &QuadratureConfig,
    ) -> f64 {
        let radius = self.support_radius(cfg);
        let width = 0.25 * self.feature_scale();
        2.0 * integrate_half_line(|x| k(self.pdf(x)), radius, width)
    }
}

impl Law1D for Density1D {
    fn pdf(&self, x: f64) -> f64 {
        match self {
            Self::Gaussian { variance } => gauss_pdf(x, *variance),
            Self::Mixture { components } => components
                .iter()
                .map(|c| c.weight * gauss_pdf(x, c.variance))
                .sum(),
            Self::Laplace { scale } => (-x.abs() / scale).exp() / (2.0 * scale),
            Self::QuarticGibbs(q) => q.table.pdf(x / q.scale) / q.scale,
            Self::Grid(g) => g.pdf(x),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Gaussian { variance } => gauss_cdf(x, *variance),
            Self::Mixture { components } => components
                .iter()
                .map(|c| c.weight * gauss_cdf(x, c.variance))
                .sum::<f64>()
                .min(1.0),
            Self::Laplace { scale } => {
                if x < 0.0 {
                    0.5 * (x / scale).exp()
                } else {
                    1.0 - 0.5 * (-x / scale).exp()
                }
            }
            Self::QuarticGibbs(q) => q.table.cdf(x / q.scale),
            Self::Grid(g) => g.cdf(x),
        }
    }

    fn sf(&self, x: f64) -> f64 {
        match self {
            Self::Grid(g) => g.sf(x),
            Self::QuarticGibbs(q) => q.table.sf(x / q.scale),
            // remaining families are even
            _ => self.cdf(-x),
        }
    }

    fn search_interval(&self) -> (f64, f64) {
        match self {
            Self::Grid(g) => (g.lo(), g.hi()),
            _ => {
                let r = 12.0 * self.tail_scale();
                (-r, r)
            }
        }
    }
}
