use std::fmt;
use std::sync::Arc;

use crate::density::{CumulativeTable, Law1D, Profile};
use crate::error::{domain, Result};
use crate::quadrature::QuadratureConfig;

use super::map::{brenier_map_1d, GrowthConstant, TransportMap1D};

/// A law on `(0, inf)` given by an unnormalized radial profile.
#[derive(Clone)]
pub struct RadialLaw {
    table: Arc<CumulativeTable>,
}

impl fmt::Debug for RadialLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialLaw")
            .field("table", &self.table)
            .finish()
    }
}

impl RadialLaw {
    /// Normalizes `profile` numerically. The profile must be nonnegative
    /// and integrable on `(0, inf)`.
    pub fn from_profile(profile: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let mut peak = 0.0f64;
        let mut r = 1e-3;
        let mut r_max = None;
        while r < 1e6 {
            let v = profile(r);
            if !(v.is_finite() && v >= 0.0) {
                return Err(domain(format!("radial profile is invalid at r = {r}")));
            }
            let mass = v * r;
            peak = peak.max(mass);
            if peak > 0.0 && mass < 1e-40 * peak {
                r_max = Some(r);
                break;
            }
            r *= 1.02;
        }
        let r_max = r_max.ok_or_else(|| domain("radial profile is not normalizable"))?;
        let profile: Profile = Arc::new(profile);
        let table = CumulativeTable::build(profile, 0.0, r_max, 8192)?;
        Ok(Self {
            table: Arc::new(table),
        })
    }

    /// Radial part of `N(0, variance I_n)`: density proportional to
    /// `r^(n-1) exp(-r^2 / (2 variance))`.
    pub fn gaussian(n: u32, variance: f64) -> Result<Self> {
        if n < 1 || !(variance > 0.0) {
            return Err(domain("radial Gaussian needs n >= 1 and positive variance"));
        }
        let k = (n - 1) as f64;
        Self::from_profile(move |r: f64| {
            if r <= 0.0 {
                return if n == 1 { 1.0 } else { 0.0 };
            }
            (k * r.ln() - 0.5 * r * r / variance).exp()
        })
    }
}

impl Law1D for RadialLaw {
    fn pdf(&self, x: f64) -> f64 {
        self.table.pdf(x)
    }
    fn cdf(&self, x: f64) -> f64 {
        self.table.cdf(x)
    }
    fn sf(&self, x: f64) -> f64 {
        self.table.sf(x)
    }
    fn search_interval(&self) -> (f64, f64) {
        self.table.bounds()
    }
}

#[derive(Debug, Clone)]
pub struct RadialMap {
    pub map: TransportMap1D<RadialLaw, RadialLaw>,
    pub growth: GrowthConstant,
}

/// Profile map from the radial law of the standard Gaussian in dimension
/// `n` onto `target`, with `sup_r T'(r) / sqrt(1 + r^2)`.
pub fn radial_profile_map(n: u32, target: RadialLaw, cfg: &QuadratureConfig) -> Result<RadialMap> {
    if n < 2 {
        return Err(domain("radial maps need n >= 2"));
    }
    let map =
        brenier_map_1d(RadialLaw::gaussian(n, 1.0)?, target).with_tolerance(cfg.cdf_bisection_tol);
    let (lo, hi) = map.window(1e-12)?;
    let growth = map.growth_constant(lo, hi, 4001)?;
    Ok(RadialMap { map, growth })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_profile() {
        let cfg = QuadratureConfig::default();
        let m = radial_profile_map(3, RadialLaw::gaussian(3, 1.0).unwrap(), &cfg).unwrap();
        assert!(m.growth.value <= 1.0 + 1e-9);
        for r in [0.2, 1.0, 3.0] {
            assert!((m.map.evaluate(r).unwrap() - r).abs() < 1e-9);
        }
    }

    #[test]
    fn scaling_profile() {
        let cfg = QuadratureConfig::default();
        let m = radial_profile_map(2, RadialLaw::gaussian(2, 4.0).unwrap(), &cfg).unwrap();
        assert!((m.growth.value - 2.0).abs() < 1e-6);
        for r in [0.05, 1.0, 4.0] {
            assert!((m.map.evaluate(r).unwrap() - 2.0 * r).abs() < 1e-9);
            assert!((m.map.derivative(r).unwrap() - 2.0).abs() < 1e-7);
        }
    }

    #[test]
    fn exponential_profile_has_finite_growth() {
        let cfg = QuadratureConfig::default();
        let target = RadialLaw::from_profile(|r: f64| r * r * (-r).exp()).unwrap();
        let m = radial_profile_map(3, target, &cfg).unwrap();
        assert!(m.growth.value.is_finite() && m.growth.value > 0.0);
        assert!(m.growth.interior);
    }

    #[test]
    fn rejects_heavy_profile() {
        assert!(RadialLaw::from_profile(|r: f64| 1.0 / (1.0 + r)).is_err());
        assert!(RadialLaw::from_profile(|_| f64::NAN).is_err());
    }
}
