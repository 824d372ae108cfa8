//! Both sides of the entropy-power stability inequalities on concrete
//! densities.

use serde::Serialize;

use crate::density::{certify_bakry_emery, gaussian_smooth, Density1D};
use crate::entropy::{epi_deficit, shannon_epi_report};
use crate::error::{domain, EpiError, Result};
use crate::quadrature::{gauss_hermite, QuadratureConfig};
use crate::transport::{brenier_map_1d, delta_inf, gaussian_fit, w1_1d, w2_1d, GrowthConstant};

/// Margins above `-MARGIN_TOL` count as holding.
pub const MARGIN_TOL: f64 = 1e-5;

/// Gauss-Hermite order of the transport-map expectation.
pub const HERMITE_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InequalityId {
    Thm1,
    Cor2,
    Cor3,
    Cor4,
    Thm5,
    Prop8,
    Rioul,
    Twosided,
}

impl InequalityId {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Thm1 => "thm1",
            Self::Cor2 => "cor2",
            Self::Cor3 => "cor3",
            Self::Cor4 => "cor4",
            Self::Thm5 => "thm5",
            Self::Prop8 => "prop8",
            Self::Rioul => "rioul",
            Self::Twosided => "twosided",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct BoundParams {
    pub t: Option<f64>,
    pub eta: Option<f64>,
    pub eta_nu: Option<f64>,
    pub n: Option<u32>,
    pub c: Option<f64>,
}

/// One inequality instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub id: InequalityId,
    pub params: BoundParams,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
    pub empirical_constant: Option<f64>,
    pub degenerate: bool,
}

impl BoundReport {
    pub fn new(id: InequalityId, params: BoundParams, lhs: f64, rhs: f64) -> Self {
        let margin = lhs - rhs;
        Self {
            id,
            params,
            lhs,
            rhs,
            margin,
            holds: margin >= -MARGIN_TOL,
            empirical_constant: None,
            degenerate: false,
        }
    }

    /// Report for inequalities whose constant is unknown: the verdict is
    /// whether the measured constant is strictly positive.
    fn empirical(id: InequalityId, params: BoundParams, lhs: f64, constant: Option<f64>) -> Self {
        let mut r = Self::new(id, params, lhs, 0.0);
        r.empirical_constant = constant;
        match constant {
            Some(c) => r.holds = c > 0.0,
            None => r.degenerate = true,
        }
        r
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t < 1.0) {
        return Err(domain(format!("t = {t} outside (0, 1)")));
    }
    Ok(())
}

/// Slopes of the map from the standard Gaussian onto `d` at the rule nodes.
/// Nodes whose weight underflows are dropped.
fn slopes_at_nodes(d: &Density1D, nodes: &[f64], weights: &[f64]) -> Result<Vec<Option<f64>>> {
    let map = brenier_map_1d(Density1D::standard_gaussian(), d.clone());
    nodes
        .iter()
        .zip(weights)
        .map(|(&x, &w)| match map.derivative(x) {
            Ok(s) if s > 0.0 => Ok(Some(s)),
            Ok(_) => Err(EpiError::SingularMap { x }),
            Err(EpiError::Domain(_)) if w < 1e-200 => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// `E[log(t T1'(X) + (1-t) T2'(Y)) - t log T1'(X) - (1-t) log T2'(Y)]` for
/// independent standard Gaussians, with `T1`, `T2` the monotone maps
/// from the standard Gaussian onto `d1`, `d2`.
pub fn rioul_lower_bound(
    d1: &Density1D,
    d2: &Density1D,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    rioul_lower_bound_with_order(d1, d2, t, HERMITE_ORDER, cfg)
}

pub fn rioul_lower_bound_with_order(
    d1: &Density1D,
    d2: &Density1D,
    t: f64,
    order: usize,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_t(t)?;
    cfg.validate()?;
    let rule = gauss_hermite(order);
    let a = slopes_at_nodes(d1, &rule.nodes, &rule.weights)?;
    let b = if d1 == d2 {
        a.clone()
    } else {
        slopes_at_nodes(d2, &rule.nodes, &rule.weights)?
    };
    let mut acc = 0.0;
    for (wa, sa) in rule.weights.iter().zip(&a) {
        let Some(sa) = sa else { continue };
        let la = sa.ln();
        for (wb, sb) in rule.weights.iter().zip(&b) {
            let Some(sb) = sb else { continue };
            let gap = (t * sa + (1.0 - t) * sb).ln() - t * la - (1.0 - t) * sb.ln();
            acc += wa * wb * gap;
        }
    }
    Ok(acc)
}

pub fn rioul_check(
    d1: &Density1D,
    d2: &Density1D,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    let lhs = epi_deficit(d1, d2, t, cfg)?.deficit;
    let rhs = rioul_lower_bound(d1, d2, t, cfg)?;
    Ok(BoundReport::new(
        InequalityId::Rioul,
        BoundParams {
            t: Some(t),
            ..Default::default()
        },
        lhs,
        rhs,
    ))
}

/// Deficit against `eta t(1-t)/2` times the three-term Gaussian infimum.
/// Reported as `thm1` for `eta = 1` and `cor2` otherwise.
pub fn thm1_check(
    d1: &Density1D,
    d2: &Density1D,
    t: f64,
    eta: f64,
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    check_t(t)?;
    certify_bakry_emery(d1, eta, cfg)?;
    certify_bakry_emery(d2, eta, cfg)?;
    let lhs = epi_deficit(d1, d2, t, cfg)?.deficit;
    let delta = delta_inf(d1, d2, cfg)?.value;
    let rhs = eta * t * (1.0 - t) / 2.0 * delta;
    let id = if eta == 1.0 {
        InequalityId::Thm1
    } else {
        InequalityId::Cor2
    };
    Ok(BoundReport::new(
        id,
        BoundParams {
            t: Some(t),
            eta: Some(eta),
            ..Default::default()
        },
        lhs,
        rhs,
    ))
}

/// Deficit against `eta t(1-t)/8 (dW2(mu) + dW2(nu) + W2^2(mu, nu))`.
pub fn cor3_check(
    d1: &Density1D,
    d2: &Density1D,
    t: f64,
    eta: f64,
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    check_t(t)?;
    certify_bakry_emery(d1, eta, cfg)?;
    certify_bakry_emery(d2, eta, cfg)?;
    let lhs = epi_deficit(d1, d2, t, cfg)?.deficit;
    let spread =
        gaussian_fit(d1, cfg)?.dw2_sq + gaussian_fit(d2, cfg)?.dw2_sq + w2_1d(d1, d2, cfg)?;
    let rhs = eta * t * (1.0 - t) / 8.0 * spread;
    Ok(BoundReport::new(
        InequalityId::Cor3,
        BoundParams {
            t: Some(t),
            eta: Some(eta),
            ..Default::default()
        },
        lhs,
        rhs,
    ))
}

/// Shannon form with the log-concavity factor.
pub fn cor4_check(
    d1: &Density1D,
    d2: &Density1D,
    eta_mu: f64,
    eta_nu: f64,
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    certify_bakry_emery(d1, eta_mu, cfg)?;
    certify_bakry_emery(d2, eta_nu, cfg)?;
    let r = shannon_epi_report(d1, d2, eta_mu, eta_nu, cfg)?;
    let params = BoundParams {
        t: Some(r.theta),
        eta: Some(eta_mu),
        eta_nu: Some(eta_nu),
        n: Some(1),
        c: None,
    };
    Ok(BoundReport::new(
        InequalityId::Cor4,
        params,
        r.n_conv,
        (r.n_mu + r.n_nu) * r.delta_epi_factor,
    ))
}

/// Measured constant `deficit(mu, gamma) / (t(1-t) min(W1^2, 1))` for a
/// log-concave `mu` against the standard Gaussian.
pub fn thm5_ratio(d: &Density1D, t: f64, cfg: &QuadratureConfig) -> Result<BoundReport> {
    check_t(t)?;
    certify_bakry_emery(d, 0.0, cfg)?;
    let gamma = Density1D::standard_gaussian();
    let deficit = epi_deficit(d, &gamma, t, cfg)?.deficit;
    let w1 = w1_1d(d, &gamma, cfg)?;
    let params = BoundParams {
        t: Some(t),
        n: Some(1),
        ..Default::default()
    };
    let constant = (w1 > 1e-9).then(|| deficit / (t * (1.0 - t) * (w1 * w1).min(1.0)));
    Ok(BoundReport::empirical(
        InequalityId::Thm5,
        params,
        deficit,
        constant,
    ))
}

/// `sup_x T'(x) / sqrt(1 + x^2)` for the map from the standard Gaussian
/// onto `d`, over the central `1 - 2e-12` quantile window.
pub fn gaussian_growth_constant(d: &Density1D, cfg: &QuadratureConfig) -> Result<GrowthConstant> {
    let map = brenier_map_1d(Density1D::standard_gaussian(), d.clone())
        .with_tolerance(cfg.cdf_bisection_tol);
    let (lo, hi) = map.window(1e-12)?;
    let g = map.growth_constant(lo, hi, 4001)?;
    if !g.interior {
        return Err(EpiError::Hypothesis(format!(
            "map slope grows faster than linearly (sup at the window edge x = {})",
            g.argmax
        )));
    }
    Ok(g)
}

/// Deficit against `t(1-t)/(8 c^2 n) W2^2(mu, gamma)` with the measured
/// growth constant `c`.
pub fn prop8_check(d: &Density1D, t: f64, cfg: &QuadratureConfig) -> Result<BoundReport> {
    check_t(t)?;
    let gamma = Density1D::standard_gaussian();
    let c = gaussian_growth_constant(d, cfg)?.value.max(1.0 + 1e-9);
    let lhs = epi_deficit(d, &gamma, t, cfg)?.deficit;
    let rhs = t * (1.0 - t) / (8.0 * c * c) * w2_1d(d, &gamma, cfg)?;
    let params = BoundParams {
        t: Some(t),
        n: Some(1),
        c: Some(c),
        ..Default::default()
    };
    Ok(BoundReport::new(InequalityId::Prop8, params, lhs, rhs))
}

/// Measured constant `deficit c^2 n^2 / (t(1-t) Delta)` with `c` the larger
/// growth constant of the two maps from the standard Gaussian.
pub fn twosided_growth_check(
    d1: &Density1D,
    d2: &Density1D,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    check_t(t)?;
    let c = gaussian_growth_constant(d1, cfg)?
        .value
        .max(gaussian_growth_constant(d2, cfg)?.value);
    let deficit = epi_deficit(d1, d2, t, cfg)?.deficit;
    let delta = delta_inf(d1, d2, cfg)?.value;
    let params = BoundParams {
        t: Some(t),
        n: Some(1),
        c: Some(c),
        ..Default::default()
    };
    let constant = (delta > 1e-12).then(|| deficit * c * c / (t * (1.0 - t) * delta));
    Ok(BoundReport::empirical(
        InequalityId::Twosided,
        params,
        deficit,
        constant,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothingRow {
    pub s: f64,
    pub delta: f64,
    pub deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothingReport {
    pub t: f64,
    pub delta: f64,
    pub deficit: f64,
    pub rows: Vec<SmoothingRow>,
    /// `|Delta_s - Delta|` shrinks along the list, up to `MARGIN_TOL`.
    pub delta_converges: bool,
    pub deficit_converges: bool,
}

/// Three-term infimum and deficit of Gaussian-smoothed pairs along a
/// decreasing list of smoothing variances.
pub fn smoothing_continuity_check(
    d1: &Density1D,
    d2: &Density1D,
    s_list: &[f64],
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<SmoothingReport> {
    check_t(t)?;
    if s_list.iter().any(|s| !(*s > 0.0)) || s_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(domain(
            "smoothing variances must be positive and decreasing",
        ));
    }
    let delta = delta_inf(d1, d2, cfg)?.value;
    let deficit = epi_deficit(d1, d2, t, cfg)?.deficit;
    let rows = s_list
        .iter()
        .map(|&s| {
            let a = gaussian_smooth(d1, s, cfg)?;
            let b = gaussian_smooth(d2, s, cfg)?;
            Ok(SmoothingRow {
                s,
                delta: delta_inf(&a, &b, cfg)?.value,
                deficit: epi_deficit(&a, &b, t, cfg)?.deficit,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let shrinking = |gap: &dyn Fn(&SmoothingRow) -> f64| {
        rows.windows(2)
            .all(|w| gap(&w[1]) <= gap(&w[0]) + MARGIN_TOL)
    };
    let delta_converges = shrinking(&|r| (r.delta - delta).abs());
    let deficit_converges = shrinking(&|r| (r.deficit - deficit).abs());
    Ok(SmoothingReport {
        t,
        delta,
        deficit,
        rows,
        delta_converges,
        deficit_converges,
    })
}

/// Moment lower bound `W2^2(mu, N(0, s)) >= s + 1 - 2 m_{3/2}(mu)^{2/3} m_3(N(0, s))^{1/3}`
/// for a unit-variance `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderBound {
    /// Minimum of the bound over `s`, a lower bound on `inf_s W2^2(mu, N(0, s))`.
    pub value: f64,
    pub s_star: f64,
    /// The bound at the minimizer of the Gaussian limit.
    pub at_limit_s: f64,
}

/// `E|Z|^3` for a standard Gaussian.
fn gaussian_third_moment() -> f64 {
    2.0 * (2.0 / std::f64::consts::PI).sqrt()
}

fn holder_curve(m32: f64, s: f64) -> f64 {
    s + 1.0 - 2.0 * m32.powf(2.0 / 3.0) * s.sqrt() * gaussian_third_moment().cbrt()
}

pub fn holder_bound(d: &Density1D) -> Result<HolderBound> {
    let m32 = d.absolute_moment(1.5)?;
    let k = m32.powf(2.0 / 3.0) * gaussian_third_moment().cbrt();
    let s_star = k * k;
    Ok(HolderBound {
        value: 1.0 - s_star,
        s_star,
        at_limit_s: holder_curve(m32, holder_limit_s()),
    })
}

/// Minimizing `s` of the bound for the Gaussian limit `N(0, 1/2)`.
pub fn holder_limit_s() -> f64 {
    2.0 / std::f64::consts::PI * libm::tgamma(1.25).powf(4.0 / 3.0)
}

/// `1 - (2/pi) Gamma(5/4)^{4/3}`.
pub fn holder_limit_value() -> f64 {
    1.0 - holder_limit_s()
}
