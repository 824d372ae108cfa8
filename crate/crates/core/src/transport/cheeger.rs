use crate::density::{Density1D, Law1D};
use crate::error::{EpiError, Result};
use crate::quadrature::{golden_section_minimize, QuadratureConfig};

const SCAN_POINTS: usize = 20_001;
const TAIL_LEVEL: f64 = 1e-10;

/// Isoperimetric constant of a median-zero density on the line,
/// `inf_x f(x) / min(F(x), 1 - F(x))`.
pub fn cheeger_constant(d: &Density1D, cfg: &QuadratureConfig) -> Result<f64> {
    let lo = d.quantile_tol(TAIL_LEVEL, cfg.cdf_bisection_tol)?;
    let hi = d.quantile_upper_tol(TAIL_LEVEL, cfg.cdf_bisection_tol)?;
    let ratio = |x: f64| {
        let m = d.cdf(x).min(d.sf(x));
        d.pdf(x) / m
    };
    let xs: Vec<f64> = (0..SCAN_POINTS)
        .map(|k| lo + (hi - lo) * k as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let mut best = (0, f64::INFINITY);
    for (k, &x) in xs.iter().enumerate() {
        let r = ratio(x);
        if !(r > 0.0) {
            return Err(EpiError::Degenerate(format!("density vanishes at x = {x}")));
        }
        if r < best.1 {
            best = (k, r);
        }
    }
    let (k, r) = best;
    if k == 0 || k == SCAN_POINTS - 1 {
        let inner = if k == 0 {
            ratio(xs[1])
        } else {
            ratio(xs[k - 1])
        };
        if r < inner * (1.0 - 1e-9) {
            return Err(EpiError::Degenerate(
                "isoperimetric ratio keeps decreasing into the tails".into(),
            ));
        }
        return Ok(r);
    }
    let (_, refined) = golden_section_minimize(ratio, xs[k - 1], xs[k + 1], 1e-12);
    Ok(refined.min(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_values() {
        let cfg = QuadratureConfig::default();
        let lap = cheeger_constant(&Density1D::laplace(1.0).unwrap(), &cfg).unwrap();
        assert!((lap - 1.0).abs() < 1e-12);
        let g = cheeger_constant(&Density1D::standard_gaussian(), &cfg).unwrap();
        assert!((g - 0.797_884_560_802_865_4).abs() < 1e-10);
        let cases = [
            (
                Density1D::mixture_counterexample(0.1).unwrap(),
                0.806_960_547_210_664_8,
            ),
            (
                Density1D::mixture_counterexample(0.3).unwrap(),
                0.846_260_437_688_971_7,
            ),
            (Density1D::quartic(0.1).unwrap(), 0.930_359_810_335_199_3),
        ];
        for (d, want) in cases {
            let got = cheeger_constant(&d, &cfg).unwrap();
            assert!((got - want).abs() < 1e-8, "{d:?}: {got}");
        }
    }

    #[test]
    fn vanishing_density_is_degenerate() {
        let grid = crate::density::GridDensity::new(-1.25, 0.5, vec![0.0, 1.0, 0.0, 0.0, 1.0, 0.0])
            .unwrap();
        let err =
            cheeger_constant(&Density1D::grid(grid), &QuadratureConfig::default()).unwrap_err();
        assert!(matches!(err, EpiError::Degenerate(_)));
    }
}
