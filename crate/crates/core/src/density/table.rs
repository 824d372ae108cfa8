use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::quadrature::gl_panel;

pub(crate) type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Cumulative integrals of an unnormalized density on a uniform cell grid.
/// Partial cells are integrated with the panel rule, so the cdf is accurate
/// deep into both tails.
#[derive(Clone)]
pub(crate) struct CumulativeTable {
    profile: Profile,
    lo: f64,
    hi: f64,
    h: f64,
    left: Vec<f64>,
    right: Vec<f64>,
    norm: f64,
}

impl fmt::Debug for CumulativeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CumulativeTable")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("cells", &(self.left.len() - 1))
            .field("norm", &self.norm)
            .finish()
    }
}

impl CumulativeTable {
    pub(crate) fn build(profile: Profile, lo: f64, hi: f64, cells: usize) -> Result<Self> {
        let h = (hi - lo) / cells as f64;
        let masses: Vec<f64> = (0..cells)
            .map(|k| gl_panel(&*profile, lo + k as f64 * h, lo + (k + 1) as f64 * h))
            .collect();
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(domain("profile is negative or not finite"));
        }
        let norm: f64 = masses.iter().sum();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(domain("profile is not normalizable"));
        }
        let mut left = Vec::with_capacity(cells + 1);
        let mut acc = 0.0;
        left.push(0.0);
        for m in &masses {
            acc += m;
            left.push(acc / norm);
        }
        let mut right = vec![0.0; cells + 1];
        let mut acc = 0.0;
        for k in (0..cells).rev() {
            acc += masses[k];
            right[k] = acc / norm;
        }
        Ok(Self {
            profile,
            lo,
            hi,
            h,
            left,
            right,
            norm,
        })
    }

    pub(crate) fn norm(&self) -> f64 {
        self.norm
    }

    pub(crate) fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub(crate) fn pdf(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            return 0.0;
        }
        (self.profile)(x) / self.norm
    }

    fn cell(&self, x: f64) -> usize {
        (((x - self.lo) / self.h).floor() as usize).min(self.left.len() - 2)
    }

    pub(crate) fn cdf(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return 1.0;
        }
        let k = self.cell(x);
        let xk = self.lo + k as f64 * self.h;
        (self.left[k] + gl_panel(&*self.profile, xk, x) / self.norm).min(1.0)
    }

    pub(crate) fn sf(&self, x: f64) -> f64 {
        if x >= self.hi {
            return 0.0;
        }
        if x <= self.lo {
            return 1.0;
        }
        let k = self.cell(x);
        let xk1 = self.lo + (k + 1) as f64 * self.h;
        (self.right[k + 1] + gl_panel(&*self.profile, x, xk1) / self.norm).min(1.0)
    }

    /// Integral of `g(x) * pdf(x)` over the table support.
    pub(crate) fn expectation(&self, g: impl Fn(f64) -> f64) -> f64 {
        let cells = self.left.len() - 1;
        let f = |x: f64| g(x) * (self.profile)(x);
        (0..cells)
            .map(|k| {
                gl_panel(
                    &f,
                    self.lo + k as f64 * self.h,
                    self.lo + (k + 1) as f64 * self.h,
                )
            })
            .sum::<f64>()
            / self.norm
    }
}
