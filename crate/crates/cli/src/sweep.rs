//! The mixture sweep: deficit, curvature-region mass and distance to the
//! Gaussians side by side as the mixture weight shrinks.

use rayon::prelude::*;
use serde::Serialize;

use epi_lab::bounds::{holder_bound, holder_limit_s, holder_limit_value};
use epi_lab::density::curvature_region_mass;
use epi_lab::entropy::epi_deficit;
use epi_lab::transport::gaussian_fit;
use epi_lab::{Density1D, QuadratureConfig};

use crate::error::{CliError, Result};
use crate::pool::worker_pool;

pub const DEFAULT_EPS: [f64; 5] = [0.1, 0.03, 0.01, 0.003, 0.001];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub deficit: f64,
    pub omega_mass: f64,
    pub dw2_sq: f64,
    pub holder_bound: f64,
    pub holder_at_limit_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMeta {
    pub t: f64,
    pub grid: usize,
    /// The sweep draws no random numbers.
    pub seed: Option<u64>,
    pub holder_limit: f64,
    pub holder_limit_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub meta: SweepMeta,
    pub rows: Vec<SweepRow>,
}

fn sweep_row(eps: f64, t: f64, cfg: &QuadratureConfig) -> Result<SweepRow> {
    let d = Density1D::mixture_counterexample(eps)?;
    let holder = holder_bound(&d)?;
    Ok(SweepRow {
        eps,
        deficit: epi_deficit(&d, &d, t, cfg)?.deficit,
        omega_mass: curvature_region_mass(&d, 1.0, cfg)?,
        dw2_sq: gaussian_fit(&d, cfg)?.dw2_sq,
        holder_bound: holder.value,
        holder_at_limit_s: holder.at_limit_s,
    })
}

pub fn run_counterexample(eps_list: &[f64], t: f64, cfg: &QuadratureConfig) -> Result<SweepResult> {
    cfg.validate()?;
    if !(t > 0.0 && t < 1.0) {
        return Err(CliError::Argument(format!("t = {t} outside (0, 1)")));
    }
    if let Some(e) = eps_list.iter().find(|e| !(**e > 0.0 && **e <= 0.5)) {
        return Err(CliError::Argument(format!("eps = {e} outside (0, 1/2]")));
    }
    let mut eps: Vec<f64> = eps_list.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    eps.dedup();
    let rows = worker_pool()?.install(|| {
        eps.par_iter()
            .map(|&e| sweep_row(e, t, cfg))
            .collect::<Result<Vec<_>>>()
    })?;
    if let Some(r) = rows.iter().find(|r| {
        ![
            r.deficit,
            r.omega_mass,
            r.dw2_sq,
            r.holder_bound,
            r.holder_at_limit_s,
        ]
        .iter()
        .all(|v| v.is_finite())
    }) {
        return Err(CliError::Argument(format!(
            "non-finite sweep value at eps = {}",
            r.eps
        )));
    }
    let meta = SweepMeta {
        t,
        grid: cfg.grid_points,
        seed: None,
        holder_limit: holder_limit_value(),
        holder_limit_s: holder_limit_s(),
    };
    Ok(SweepResult { meta, rows })
}

impl SweepResult {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        Ok(
            String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
                .expect("csv output is utf-8"),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_weight_row_is_gaussian() {
        let cfg = QuadratureConfig::default().with_grid_points(1 << 14);
        let r = run_counterexample(&[0.5], 0.5, &cfg).unwrap();
        let row = r.rows[0];
        assert!(row.deficit.abs() < 1e-6);
        assert!(row.dw2_sq.abs() < 1e-6);
        assert!((row.omega_mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rows_descend_in_eps() {
        let cfg = QuadratureConfig::default().with_grid_points(1 << 14);
        let r = run_counterexample(&[0.2, 0.4, 0.3], 0.5, &cfg).unwrap();
        let eps: Vec<f64> = r.rows.iter().map(|r| r.eps).collect();
        assert_eq!(eps, vec![0.4, 0.3, 0.2]);
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("eps,deficit,omega_mass,dw2_sq,holder_bound,holder_at_limit_s\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn bad_inputs() {
        let cfg = QuadratureConfig::default();
        assert!(run_counterexample(&[0.6], 0.5, &cfg).is_err());
        assert!(run_counterexample(&[0.1], 1.0, &cfg).is_err());
    }
}
