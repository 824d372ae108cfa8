//! Differential entropy, entropy power and the deficit of the entropy
//! power inequality.

use std::f64::consts::{E, PI};

use serde::Serialize;

use crate::density::{scaled_sum, Density1D};
use crate::error::{domain, Result};
use crate::quadrature::QuadratureConfig;
use crate::transport::gaussian_fit;

/// Density values below this are treated as zero inside `f log f`.
const LOG_FLOOR: f64 = 1e-300;

fn neg_f_log_f(f: f64) -> f64 {
    if f < LOG_FLOOR {
        0.0
    } else {
        -f * f.ln()
    }
}

/// `-integral f log f`, in nats.
pub fn differential_entropy(d: &Density1D, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    let h = match d {
        Density1D::Grid(g) => {
            if !(g.mass() - 1.0).abs().lt(&1e-6) {
                return Err(domain("grid density is not normalized"));
            }
            let n = g.len();
            let mut acc = 0.0;
            for (k, &v) in g.values().iter().enumerate() {
                let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                acc += w * neg_f_log_f(v);
            }
            acc * g.spacing()
        }
        _ => d.even_expectation_raw(neg_f_log_f, cfg),
    };
    if !h.is_finite() {
        return Err(domain("entropy integral diverged"));
    }
    Ok(h)
}

/// `exp(2h/n) / (2 pi e)`.
pub fn entropy_power(h: f64, n: u32) -> f64 {
    (2.0 * h / n as f64).exp() / (2.0 * PI * E)
}

/// Density of `sqrt(t) X + sqrt(1-t) Y`.
pub fn scaled_sum_density(
    d1: &Density1D,
    d2: &Density1D,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Density1D> {
    check_t(t)?;
    scaled_sum(d1, t.sqrt(), d2, (1.0 - t).sqrt(), cfg)
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t < 1.0) {
        return Err(domain(format!("t = {t} outside (0, 1)")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeficitReport {
    pub t: f64,
    pub h_mu: f64,
    pub h_nu: f64,
    pub h_sum: f64,
    pub deficit: f64,
    pub grid_points: usize,
    pub support_lo: f64,
    pub support_hi: f64,
}

/// `h(sqrt(t) X + sqrt(1-t) Y) - t h(X) - (1-t) h(Y)`.
pub fn epi_deficit(
    d1: &Density1D,
    d2: &Density1D,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<DeficitReport> {
    let sum = scaled_sum_density(d1, d2, t, cfg)?;
    let h_mu = differential_entropy(d1, cfg)?;
    let h_nu = if d1 == d2 {
        h_mu
    } else {
        differential_entropy(d2, cfg)?
    };
    deficit_from_parts(&sum, h_mu, h_nu, t, cfg)
}

pub(crate) fn deficit_from_parts(
    sum: &Density1D,
    h_mu: f64,
    h_nu: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<DeficitReport> {
    let h_sum = differential_entropy(sum, cfg)?;
    let grid = sum.as_grid().expect("scaled sums are gridded");
    Ok(DeficitReport {
        t,
        h_mu,
        h_nu,
        h_sum,
        deficit: h_sum - t * h_mu - (1.0 - t) * h_nu,
        grid_points: grid.len(),
        support_lo: grid.lo(),
        support_hi: grid.hi(),
    })
}

/// Shannon form `N(mu * nu) >= (N(mu) + N(nu)) Delta` with the
/// log-concavity correction factor `Delta >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShannonReport {
    #[serde(rename = "N_mu")]
    pub n_mu: f64,
    #[serde(rename = "N_nu")]
    pub n_nu: f64,
    #[serde(rename = "N_conv")]
    pub n_conv: f64,
    pub theta: f64,
    pub delta_epi_factor: f64,
    pub eta_mu: f64,
    pub eta_nu: f64,
    #[serde(rename = "dW2_mu")]
    pub dw2_mu: f64,
    #[serde(rename = "dW2_nu")]
    pub dw2_nu: f64,
    #[serde(rename = "dF2")]
    pub df2: f64,
}

pub fn shannon_epi_report(
    d1: &Density1D,
    d2: &Density1D,
    eta_mu: f64,
    eta_nu: f64,
    cfg: &QuadratureConfig,
) -> Result<ShannonReport> {
    if !(eta_mu > 0.0 && eta_nu > 0.0) {
        return Err(domain("log-concavity parameters must be positive"));
    }
    let n_mu = entropy_power(differential_entropy(d1, cfg)?, 1);
    let n_nu = entropy_power(differential_entropy(d2, cfg)?, 1);
    let conv = scaled_sum(d1, 1.0, d2, 1.0, cfg)?;
    let n_conv = entropy_power(differential_entropy(&conv, cfg)?, 1);
    let theta = n_mu / (n_mu + n_nu);
    let dw2_mu = gaussian_fit(d1, cfg)?.dw2_sq;
    let dw2_nu = gaussian_fit(d2, cfg)?.dw2_sq;
    // all one-dimensional covariances are proportional
    let df2 = 0.0;
    let rate = (theta * eta_mu).min((1.0 - theta) * eta_nu) / 4.0;
    let delta_epi_factor = (rate * ((1.0 - theta) * dw2_mu + theta * dw2_nu + df2)).exp();
    Ok(ShannonReport {
        n_mu,
        n_nu,
        n_conv,
        theta,
        delta_epi_factor,
        eta_mu,
        eta_nu,
        dw2_mu,
        dw2_nu,
        df2,
    })
}
