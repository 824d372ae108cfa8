use serde::Serialize;

use epi_lab::transport::{brenier_map_1d, w1_1d, w2_1d, GrowthConstant};
use epi_lab::{Density1D, QuadratureConfig};

use crate::error::Result;

pub const MAP_POINTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportSummary {
    pub src: String,
    pub dst: String,
    pub w2_sq: f64,
    pub w1: f64,
    pub slope_at_origin: f64,
    /// Largest slope over source quantiles at levels `(k + 1/2)/1000`.
    pub sup_slope: f64,
    /// `sup T'(x) / sqrt(1 + x^2)` over the central `1 - 2e-12` quantile window.
    pub growth: GrowthConstant,
}

pub struct TransportRun {
    pub summary: TransportSummary,
    /// `x,T,dT` rows at the same quantile points.
    pub map_csv: String,
}

pub fn run_transport(
    src_name: &str,
    src: &Density1D,
    dst_name: &str,
    dst: &Density1D,
    cfg: &QuadratureConfig,
) -> Result<TransportRun> {
    let map = brenier_map_1d(src.clone(), dst.clone()).with_tolerance(cfg.cdf_bisection_tol);
    let xs = map.quantile_points(MAP_POINTS)?;
    let (lo, hi) = map.window(1e-12)?;
    let summary = TransportSummary {
        src: src_name.to_string(),
        dst: dst_name.to_string(),
        w2_sq: w2_1d(src, dst, cfg)?,
        w1: w1_1d(src, dst, cfg)?,
        slope_at_origin: map.derivative(0.0)?,
        sup_slope: map.sup_derivative(&xs)?,
        growth: map.growth_constant(lo, hi, 4001)?,
    };
    Ok(TransportRun {
        summary,
        map_csv: map.to_csv(&xs)?,
    })
}
