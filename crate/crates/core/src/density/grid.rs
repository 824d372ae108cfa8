use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{domain, EpiError, Result};

/// A density tabulated on a uniform grid, linearly interpolated between
/// nodes and zero outside `[lo, hi]`. Values are normalized so that the
/// trapezoid mass is exactly one.
#[derive(Debug, Clone)]
pub struct GridDensity {
    lo: f64,
    spacing: f64,
    values: Arc<[f64]>,
    // trapezoid mass to the left / right of each node
    left: Arc<[f64]>,
    right: Arc<[f64]>,
}

impl PartialEq for GridDensity {
    fn eq(&self, other: &Self) -> bool {
        self.lo == other.lo && self.spacing == other.spacing && self.values == other.values
    }
}

impl GridDensity {
    /// Builds a grid density from raw samples. Negative samples are clipped
    /// to zero and the result is renormalized.
    pub fn new(lo: f64, spacing: f64, mut values: Vec<f64>) -> Result<Self> {
        if !lo.is_finite() || !(spacing.is_finite() && spacing > 0.0) {
            return Err(domain("grid needs a finite origin and positive spacing"));
        }
        if values.len() < 2 {
            return Err(domain("grid needs at least two nodes"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("grid values must be finite"));
        }
        for v in values.iter_mut() {
            *v = v.max(0.0);
        }
        let mass = trapezoid(&values, spacing);
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(domain("grid density is not normalizable"));
        }
        for v in values.iter_mut() {
            *v /= mass;
        }
        let n = values.len();
        let mut left = vec![0.0; n];
        for k in 1..n {
            left[k] = left[k - 1] + 0.5 * spacing * (values[k - 1] + values[k]);
        }
        let mut right = vec![0.0; n];
        for k in (0..n - 1).rev() {
            right[k] = right[k + 1] + 0.5 * spacing * (values[k] + values[k + 1]);
        }
        Ok(Self {
            lo,
            spacing,
            values: values.into(),
            left: left.into(),
            right: right.into(),
        })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.lo + (self.values.len() - 1) as f64 * self.spacing
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node(&self, k: usize) -> f64 {
        self.lo + k as f64 * self.spacing
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let s = (x - self.lo) / self.spacing;
        let k = (s.floor().max(0.0) as usize).min(self.values.len() - 2);
        (k, x - self.node(k))
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !(x >= self.lo && x <= self.hi()) {
            return 0.0;
        }
        let (k, d) = self.locate(x);
        let slope = (self.values[k + 1] - self.values[k]) / self.spacing;
        (self.values[k] + slope * d).max(0.0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi() {
            return 1.0;
        }
        let (k, d) = self.locate(x);
        (self.left[k] + 0.5 * d * (self.values[k] + self.pdf(x))).min(1.0)
    }

    pub fn sf(&self, x: f64) -> f64 {
        if x >= self.hi() {
            return 0.0;
        }
        if x <= self.lo {
            return 1.0;
        }
        let (k, d) = self.locate(x);
        let rest = self.spacing - d;
        (self.right[k + 1] + 0.5 * rest * (self.pdf(x) + self.values[k + 1])).min(1.0)
    }

    /// Trapezoid sum of `g(x_k) * pdf(x_k)`.
    pub fn expectation(&self, g: impl Fn(f64) -> f64) -> f64 {
        let n = self.values.len();
        let mut acc = 0.0;
        for (k, v) in self.values.iter().enumerate() {
            let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            if *v > 0.0 {
                acc += w * v * g(self.node(k));
            }
        }
        acc * self.spacing
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|x| x)
    }

    pub fn mass(&self) -> f64 {
        trapezoid(&self.values, self.spacing)
    }

    pub fn rescaled(&self, c: f64) -> Result<Self> {
        let values = self.values.iter().map(|v| v / c).collect();
        Self::new(self.lo * c, self.spacing * c, values)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = format!(
            "# epi-lab grid v1, lo={}, hi={}, n={}\n",
            self.lo,
            self.hi(),
            self.values.len()
        );
        for (k, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{}", self.node(k), v);
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_csv_string())
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let parse_err = |pos: usize, msg: &str| EpiError::Parse {
            pos,
            msg: msg.to_string(),
        };
        let header_end = text.find('\n').unwrap_or(text.len());
        let header = text[..header_end].trim_end_matches('\r');
        let body = header
            .strip_prefix("# epi-lab grid v1,")
            .ok_or_else(|| parse_err(0, "missing `# epi-lab grid v1` header"))?;
        let mut lo = None;
        let mut hi = None;
        let mut n = None;
        for field in body.split(',') {
            let (key, value) = field
                .trim()
                .split_once('=')
                .ok_or_else(|| parse_err(0, "malformed header field"))?;
            let bad = |_| parse_err(0, "malformed header value");
            match key {
                "lo" => lo = Some(value.parse::<f64>().map_err(bad)?),
                "hi" => hi = Some(value.parse::<f64>().map_err(bad)?),
                "n" => {
                    n = Some(
                        value
                            .parse::<usize>()
                            .map_err(|_| parse_err(0, "malformed n"))?,
                    )
                }
                _ => return Err(parse_err(0, "unknown header field")),
            }
        }
        let (lo, hi, n) = match (lo, hi, n) {
            (Some(lo), Some(hi), Some(n)) if n >= 2 && hi > lo => (lo, hi, n),
            _ => return Err(parse_err(0, "header needs lo < hi and n >= 2")),
        };
        let spacing = (hi - lo) / (n - 1) as f64;
        let mut values = Vec::with_capacity(n);
        let mut offset = (header_end + 1).min(text.len());
        for line in text[offset..].split_inclusive('\n') {
            let row = line.trim();
            if !row.is_empty() && !row.starts_with('#') {
                let (x, v) = row
                    .split_once(',')
                    .ok_or_else(|| parse_err(offset, "expected `x,pdf`"))?;
                let x: f64 = x.trim().parse().map_err(|_| parse_err(offset, "bad x"))?;
                let v: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(offset, "bad pdf value"))?;
                let expected = lo + values.len() as f64 * spacing;
                if (x - expected).abs() > 1e-9 * spacing.max(expected.abs()) {
                    return Err(parse_err(offset, "grid is not uniform"));
                }
                values.push(v);
            }
            offset += line.len();
        }
        if values.len() != n {
            return Err(parse_err(offset, "row count does not match header"));
        }
        Self::new(lo, spacing, values)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| domain(format!("cannot read {}: {e}", path.as_ref().display())))?;
        Self::from_csv_str(&text)
    }
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    let inner: f64 = values.iter().sum();
    h * (inner - 0.5 * (values[0] + values[n - 1]))
}
