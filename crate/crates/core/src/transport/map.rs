use std::fmt::Write as _;

use serde::Serialize;

use crate::density::Law1D;
use crate::error::{domain, EpiError, Result};
use crate::quadrature::golden_section_minimize;

/// Monotone rearrangement `T = q_dst o F_src` between two laws on the line.
#[derive(Debug, Clone)]
pub struct TransportMap1D<S, D> {
    source: S,
    target: D,
    tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapSample {
    pub x: f64,
    pub value: f64,
    pub derivative: f64,
}

/// Supremum of `T'(x) / sqrt(1 + x^2)` over a grid, refined locally.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthConstant {
    pub value: f64,
    pub argmax: f64,
    /// False when the supremum sits on the edge of the search window.
    pub interior: bool,
}

pub fn brenier_map_1d<S: Law1D, D: Law1D>(source: S, target: D) -> TransportMap1D<S, D> {
    TransportMap1D {
        source,
        target,
        tol: crate::density::DEFAULT_BISECTION_TOL,
    }
}

impl<S: Law1D, D: Law1D> TransportMap1D<S, D> {
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn source(&self) -> &S {
        &self.source
    }

    pub fn target(&self) -> &D {
        &self.target
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(domain(format!("map evaluated at non-finite x = {x}")));
        }
        let u = self.source.cdf(x);
        if u <= 0.5 {
            if u <= 0.0 {
                return Err(domain(format!("source cdf underflows at x = {x}")));
            }
            self.target.quantile_tol(u, self.tol)
        } else {
            let v = self.source.sf(x);
            if v <= 0.0 {
                return Err(domain(format!("source tail underflows at x = {x}")));
            }
            self.target.quantile_upper_tol(v, self.tol)
        }
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        let y = self.evaluate(x)?;
        let fy = self.target.pdf(y);
        if fy <= 0.0 {
            return Err(EpiError::SingularMap { x });
        }
        Ok(self.source.pdf(x) / fy)
    }

    pub fn sample(&self, x: f64) -> Result<MapSample> {
        let value = self.evaluate(x)?;
        let fy = self.target.pdf(value);
        if fy <= 0.0 {
            return Err(EpiError::SingularMap { x });
        }
        Ok(MapSample {
            x,
            value,
            derivative: self.source.pdf(x) / fy,
        })
    }

    /// Source quantiles at levels `(k + 1/2)/n`.
    pub fn quantile_points(&self, n: usize) -> Result<Vec<f64>> {
        (0..n)
            .map(|k| {
                let u = (k as f64 + 0.5) / n as f64;
                if u <= 0.5 {
                    self.source.quantile_tol(u, self.tol)
                } else {
                    self.source.quantile_upper_tol(1.0 - u, self.tol)
                }
            })
            .collect()
    }

    /// Central quantile window of the source: `[q(level), q_upper(level)]`.
    pub fn window(&self, level: f64) -> Result<(f64, f64)> {
        Ok((
            self.source.quantile_tol(level, self.tol)?,
            self.source.quantile_upper_tol(level, self.tol)?,
        ))
    }

    pub fn sup_derivative(&self, xs: &[f64]) -> Result<f64> {
        xs.iter()
            .try_fold(0.0f64, |m, &x| Ok(m.max(self.derivative(x)?)))
    }

    pub fn growth_constant(&self, lo: f64, hi: f64, points: usize) -> Result<GrowthConstant> {
        let ratio = |x: f64| -> Result<f64> { Ok(self.derivative(x)? / (1.0 + x * x).sqrt()) };
        let xs: Vec<f64> = (0..points)
            .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
            .collect();
        let vals = xs.iter().map(|&x| ratio(x)).collect::<Result<Vec<_>>>()?;
        let (k, _) =
            vals.iter().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |b, (i, &v)| if v > b.1 { (i, v) } else { b },
            );
        let interior = k > 0 && k + 1 < points;
        let (argmax, value) = if interior {
            let (x, neg) = golden_section_minimize(
                |x| ratio(x).map(|v| -v).unwrap_or(f64::INFINITY),
                xs[k - 1],
                xs[k + 1],
                1e-10,
            );
            (x, (-neg).max(vals[k]))
        } else {
            (xs[k], vals[k])
        };
        Ok(GrowthConstant {
            value,
            argmax,
            interior,
        })
    }

    /// `x,T,dT` rows for plotting.
    pub fn to_csv(&self, xs: &[f64]) -> Result<String> {
        let mut out = String::from("x,T,dT\n");
        for &x in xs {
            let s = self.sample(x)?;
            let _ = writeln!(out, "{},{},{}", s.x, s.value, s.derivative);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Density1D;

    #[test]
    fn identity_and_scaling_maps() {
        let id = brenier_map_1d(
            Density1D::standard_gaussian(),
            Density1D::standard_gaussian(),
        );
        let scale = brenier_map_1d(
            Density1D::standard_gaussian(),
            Density1D::gaussian(4.0).unwrap(),
        );
        for x in [-5.0, -1.0, 0.0, 0.3, 4.5] {
            assert!((id.evaluate(x).unwrap() - x).abs() < 1e-10);
            assert!((id.derivative(x).unwrap() - 1.0).abs() < 1e-9);
            assert!((scale.evaluate(x).unwrap() - 2.0 * x).abs() < 1e-10);
            assert!((scale.derivative(x).unwrap() - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn gaussian_to_laplace_slope_at_origin() {
        let m = brenier_map_1d(
            Density1D::standard_gaussian(),
            Density1D::laplace(1.0).unwrap(),
        );
        assert!((m.derivative(0.0).unwrap() - 0.797_884_560_802_865_4).abs() < 1e-10);
        // direct formula phi(x) / (1 - Phi(x)) on the right half-line
        for x in [0.5, 2.0, 6.0] {
            let g = Density1D::standard_gaussian();
            let want = g.pdf(x) / g.sf(x);
            assert!((m.derivative(x).unwrap() - want).abs() < 1e-8 * want);
        }
        let gc = m.growth_constant(0.0, 8.0, 4001).unwrap();
        assert!(gc.interior);
        assert!((gc.value - 1.080_434_778_529_592_2).abs() < 1e-9);
        assert!((gc.argmax - 1.161_527_830_102_576).abs() < 1e-4);
    }

    struct Holey;

    impl Law1D for Holey {
        fn pdf(&self, x: f64) -> f64 {
            if x.abs() < 0.1 {
                0.0
            } else {
                0.5 * (-x.abs()).exp()
            }
        }
        fn cdf(&self, x: f64) -> f64 {
            Density1D::Laplace { scale: 1.0 }.cdf(x)
        }
        fn search_interval(&self) -> (f64, f64) {
            (-40.0, 40.0)
        }
    }

    #[test]
    fn singular_target_is_reported() {
        let m = brenier_map_1d(Density1D::standard_gaussian(), Holey);
        assert!(matches!(
            m.derivative(0.0),
            Err(EpiError::SingularMap { .. })
        ));
        assert!(m.derivative(1.0).is_ok());
    }

    #[test]
    fn csv_export() {
        let m = brenier_map_1d(
            Density1D::standard_gaussian(),
            Density1D::gaussian(4.0).unwrap(),
        );
        let csv = m.to_csv(&[0.0, 1.0]).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,T,dT"));
        assert!(lines.next().unwrap().starts_with("0,"));
    }
}
