//! Small symmetric matrices, a cyclic Jacobi eigensolver and the
//! strong-convexity estimate for the log-determinant.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, EpiError, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const MAX_DIM: usize = 16;

/// Dense symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SymMatrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(domain(format!(
                "expected {} entries for dimension {n}",
                n * n
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(domain("matrix entries must be finite"));
        }
        let scale = entries.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            for j in 0..i {
                if (entries[i * n + j] - entries[j * n + i]).abs() > SYMMETRY_TOL * scale {
                    return Err(domain(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        let mut m = Self { n, entries };
        m.symmetrize();
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(domain("matrix rows must all have length n"));
        }
        Self::new(n, rows.concat())
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut entries = vec![0.0; n * n];
        for (i, v) in values.iter().enumerate() {
            entries[i * n + i] = *v;
        }
        Self { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in 0..i {
                let v = 0.5 * (self.entries[i * n + j] + self.entries[j * n + i]);
                self.entries[i * n + j] = v;
                self.entries[j * n + i] = v;
            }
        }
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(domain(format!(
                "dimension mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    /// `t self + (1 - t) other`.
    pub fn interpolate(&self, other: &Self, t: f64) -> Result<Self> {
        self.check_same_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| t * a + (1.0 - t) * b)
            .collect();
        Ok(Self { n: self.n, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { n: self.n, entries })
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum()
    }

    /// `tr(self * other)`.
    pub fn trace_product(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Plain matrix product, row-major; not symmetric in general.
    pub fn matmul(&self, other: &Self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    out[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// `self * middle * self`, symmetrized.
    pub fn sandwich(&self, middle: &Self) -> Self {
        let left = Self {
            n: self.n,
            entries: self.matmul(middle),
        };
        let mut out = Self {
            n: self.n,
            entries: left.matmul(self),
        };
        out.symmetrize();
        out
    }

    /// Applies `f` to the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let s = spectral_decompose(self)?;
        Ok(s.reconstruct(f))
    }

    pub fn lambda_max(&self) -> Result<f64> {
        Ok(*spectral_decompose(self)?
            .eigenvalues
            .last()
            .expect("nonempty"))
    }

    pub fn lambda_min(&self) -> Result<f64> {
        Ok(spectral_decompose(self)?.eigenvalues[0])
    }

    /// Principal square root of a positive semidefinite matrix.
    pub fn sqrt_psd(&self) -> Result<Self> {
        let s = spectral_decompose(self)?;
        let floor = -PSD_TOL * s.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if s.eigenvalues[0] < floor {
            return Err(EpiError::NotPsd {
                eigenvalue: s.eigenvalues[0],
            });
        }
        Ok(s.reconstruct(|l| l.max(0.0).sqrt()))
    }

    pub fn log_det(&self) -> Result<f64> {
        let s = spectral_decompose(self)?;
        if s.eigenvalues[0] <= 0.0 {
            return Err(domain(format!(
                "log det needs a positive definite matrix, smallest eigenvalue {:e}",
                s.eigenvalues[0]
            )));
        }
        Ok(s.eigenvalues.iter().map(|l| l.ln()).sum())
    }
}

/// Eigenvalues in ascending order and matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectral {
    pub eigenvalues: Vec<f64>,
    /// Column `k` (row-major storage) is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: Vec<f64>,
    n: usize,
}

impl Spectral {
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.eigenvectors[i * self.n + k])
            .collect()
    }

    /// `V diag(f(lambda)) V^T`.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.n;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|l| f(*l)).collect();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = (0..n)
                    .map(|k| self.eigenvectors[i * n + k] * fl[k] * self.eigenvectors[j * n + k])
                    .sum();
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        SymMatrix { n, entries }
    }
}

/// Cyclic Jacobi eigendecomposition.
pub fn spectral_decompose(m: &SymMatrix) -> Result<Spectral> {
    let n = m.n;
    if n > MAX_DIM {
        return Err(EpiError::Unsupported(format!(
            "dimension {n} exceeds {MAX_DIM}"
        )));
    }
    let mut a = m.entries.clone();
    let mut v = SymMatrix::identity(n).entries;
    let norm = m.frobenius_sq().sqrt();
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    for _sweep in 0..100 {
        if off(&a) <= 1e-15 * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[k * n + k]).collect();
    let mut eigenvectors = vec![0.0; n * n];
    for (col, &k) in order.iter().enumerate() {
        // sign convention: largest component positive
        let mut pivot = 0;
        for i in 0..n {
            if v[i * n + k].abs() > v[pivot * n + k].abs() + 1e-14 {
                pivot = i;
            }
        }
        let sign = if v[pivot * n + k] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            eigenvectors[i * n + col] = sign * v[i * n + k];
        }
    }
    Ok(Spectral {
        eigenvalues,
        eigenvectors,
        n,
    })
}

fn require_pd(m: &SymMatrix, name: &str) -> Result<f64> {
    let lmin = m.lambda_min()?;
    if lmin <= 0.0 {
        return Err(domain(format!(
            "{name} is not positive definite (lambda_min = {lmin:e})"
        )));
    }
    m.lambda_max()
}

/// `1 / max(lambda_max(A), lambda_max(B))^2`.
pub fn strong_convexity_modulus(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    a.check_same_dim(b)?;
    let la = require_pd(a, "A")?;
    let lb = require_pd(b, "B")?;
    Ok(1.0 / la.max(lb).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaGapReport {
    pub t: f64,
    pub lhs: f64,
    pub base: f64,
    pub remainder: f64,
    pub margin: f64,
}

/// Compares `log det(tA + (1-t)B)` with the interpolated log-determinants
/// plus the quadratic remainder.
pub fn logdet_strong_convexity_check(
    a: &SymMatrix,
    b: &SymMatrix,
    t: f64,
) -> Result<LemmaGapReport> {
    if !(0.0..=1.0).contains(&t) {
        return Err(domain(format!("t = {t} outside [0, 1]")));
    }
    let m = strong_convexity_modulus(a, b)?;
    let lhs = a.interpolate(b, t)?.log_det()?;
    let base = t * a.log_det()? + (1.0 - t) * b.log_det()?;
    let remainder = 0.5 * t * (1.0 - t) * m * a.sub(b)?.frobenius_sq();
    Ok(LemmaGapReport {
        t,
        lhs,
        base,
        remainder,
        margin: lhs - base - remainder,
    })
}

/// `G^T G + 10^-3 I` with standard normal `G`.
pub fn random_pd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SymMatrix {
    let g: Vec<f64> = (0..n * n).map(|_| rng.sample(StandardNormal)).collect();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s: f64 = (0..n).map(|k| g[k * n + i] * g[k * n + j]).sum();
            if i == j {
                s += 1e-3;
            }
            entries[i * n + j] = s;
        }
    }
    let mut m = SymMatrix { n, entries };
    m.symmetrize();
    m
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzConfig {
    pub trials: u64,
    pub dims: RangeInclusive<usize>,
    pub seed: u64,
    /// Use `B = A` in every trial.
    pub equal_pairs: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzCase {
    pub trial: u64,
    pub dim: usize,
    pub t: f64,
    pub margin: f64,
    /// Row-major entries of `A`.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaFuzzSummary {
    pub trials: u64,
    pub seed: u64,
    pub dim_min: usize,
    pub dim_max: usize,
    pub min_margin: f64,
    pub argmin: FuzzCase,
    /// Smallest slack of the two-point strong-convexity bound for `-log det`.
    pub min_strong_convexity_slack: f64,
    /// Largest `|(M^{1/2})^2 - M|_F` over generated matrices.
    pub max_sqrt_residual: f64,
}

/// One fuzz trial; randomness comes from a ChaCha stream indexed by the
/// trial number, so trials are independent of evaluation order.
pub fn fuzz_trial(cfg: &FuzzConfig, trial: u64) -> Result<(FuzzCase, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial);
    let dim = rng.random_range(cfg.dims.clone());
    let a = random_pd(&mut rng, dim);
    let b = if cfg.equal_pairs {
        a.clone()
    } else {
        random_pd(&mut rng, dim)
    };
    let t: f64 = rng.random();
    let report = logdet_strong_convexity_check(&a, &b, t)?;
    let m = strong_convexity_modulus(&a, &b)?;
    let f = |x: &SymMatrix| -> Result<f64> { Ok(-x.log_det()?) };
    let slack = t * f(&a)? + (1.0 - t) * f(&b)?
        - f(&a.interpolate(&b, t)?)?
        - 0.5 * t * (1.0 - t) * m * a.sub(&b)?.frobenius_sq();
    let mut residual = 0.0f64;
    for x in [&a, &b] {
        let r = x.sqrt_psd()?;
        let sq = SymMatrix {
            n: dim,
            entries: r.matmul(&r),
        };
        residual = residual.max(sq.sub(x)?.frobenius_sq().sqrt());
    }
    let case = FuzzCase {
        trial,
        dim,
        t,
        margin: report.margin,
        a: a.entries,
        b: b.entries,
    };
    Ok((case, slack, residual))
}

/// Folds trial results into a summary. The argmin is the lowest margin,
/// ties broken by trial number.
pub fn summarize_fuzz(
    cfg: &FuzzConfig,
    results: Vec<(FuzzCase, f64, f64)>,
) -> Result<LemmaFuzzSummary> {
    let mut results = results;
    results.sort_by_key(|r| r.0.trial);
    let min_slack = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let max_residual = results.iter().map(|r| r.2).fold(0.0, f64::max);
    let argmin = results
        .into_iter()
        .map(|r| r.0)
        .reduce(|best, c| if c.margin < best.margin { c } else { best })
        .ok_or_else(|| domain("fuzz campaign needs at least one trial"))?;
    Ok(LemmaFuzzSummary {
        trials: cfg.trials,
        seed: cfg.seed,
        dim_min: *cfg.dims.start(),
        dim_max: *cfg.dims.end(),
        min_margin: argmin.margin,
        argmin,
        min_strong_convexity_slack: min_slack,
        max_sqrt_residual: max_residual,
    })
}

fn validate_fuzz(cfg: &FuzzConfig) -> Result<()> {
    if cfg.trials == 0 {
        return Err(domain("trials must be at least 1"));
    }
    if cfg.dims.is_empty() || *cfg.dims.start() == 0 || *cfg.dims.end() > MAX_DIM {
        return Err(domain(format!("dimension range must lie in 1..={MAX_DIM}")));
    }
    Ok(())
}

/// Sequential fuzz campaign.
pub fn run_lemma_fuzz(cfg: &FuzzConfig) -> Result<LemmaFuzzSummary> {
    validate_fuzz(cfg)?;
    let results = (0..cfg.trials)
        .map(|k| fuzz_trial(cfg, k))
        .collect::<Result<Vec<_>>>()?;
    summarize_fuzz(cfg, results)
}

/// Validation shared with parallel drivers.
pub fn check_fuzz_config(cfg: &FuzzConfig) -> Result<()> {
    validate_fuzz(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(m: &SymMatrix) -> f64 {
        let s = spectral_decompose(m).unwrap();
        let n = m.dim();
        let mv = m.matmul(&SymMatrix {
            n,
            entries: s.eigenvectors.clone(),
        });
        let mut r = 0.0;
        for i in 0..n {
            for k in 0..n {
                let d = mv[i * n + k] - s.eigenvectors[i * n + k] * s.eigenvalues[k];
                r += d * d;
            }
        }
        r.sqrt()
    }

    #[test]
    fn identity_and_diagonal_spectra() {
        let s = spectral_decompose(&SymMatrix::identity(3)).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0, 1.0]);
        let s = spectral_decompose(&SymMatrix::diag(&[4.0, 1.0])).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 4.0]);
        assert_eq!(s.eigenvector(0), vec![0.0, 1.0]);
        assert_eq!(s.eigenvector(1), vec![1.0, 0.0]);
    }

    #[test]
    fn random_wishart_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 5, 8, 16] {
            let m = random_pd(&mut rng, n);
            assert!(residual(&m) <= 1e-10 * m.frobenius_sq().sqrt(), "n={n}");
            let back = spectral_decompose(&m).unwrap().reconstruct(|l| l);
            assert!(back.sub(&m).unwrap().frobenius_sq().sqrt() <= 1e-10 * m.frobenius_sq().sqrt());
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        assert!(SymMatrix::new(2, vec![1.0, 2.0, 2.1, 1.0]).is_err());
        assert!(SymMatrix::new(2, vec![1.0, 2.0, 2.0]).is_err());
    }

    #[test]
    fn sqrt_and_log_det() {
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let r = m.sqrt_psd().unwrap();
        let sq = SymMatrix {
            n: 2,
            entries: r.matmul(&r),
        };
        assert!(sq.sub(&m).unwrap().frobenius_sq().sqrt() < 1e-14);
        assert!((m.log_det().unwrap() - 3f64.ln()).abs() < 1e-14);
        let bad = SymMatrix::diag(&[1.0, -1e-3]);
        assert!(matches!(bad.sqrt_psd(), Err(EpiError::NotPsd { .. })));
        assert!(bad.log_det().is_err());
    }

    #[test]
    fn modulus_values() {
        let i = SymMatrix::identity(2);
        assert_eq!(strong_convexity_modulus(&i, &i).unwrap(), 1.0);
        let b = SymMatrix::diag(&[4.0, 4.0]);
        assert_eq!(strong_convexity_modulus(&i, &b).unwrap(), 1.0 / 16.0);
        assert!(strong_convexity_modulus(&i, &SymMatrix::diag(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn modulus_bounds_segment_curvature() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_pd(&mut rng, 4);
        let b = random_pd(&mut rng, 4);
        let m = strong_convexity_modulus(&a, &b).unwrap();
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let l = a.interpolate(&b, t).unwrap().lambda_max().unwrap();
            assert!(m <= 1.0 / (l * l) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn lemma_gap_scalar_case() {
        let a = SymMatrix::identity(2);
        let b = SymMatrix::diag(&[4.0, 4.0]);
        let r = logdet_strong_convexity_check(&a, &b, 0.5).unwrap();
        assert!((r.lhs - 2.0 * 2.5f64.ln()).abs() < 1e-14);
        assert!((r.base - 4f64.ln()).abs() < 1e-14);
        assert!((r.remainder - 0.140_625).abs() < 1e-15);
        assert!(r.margin > 0.0);
    }

    #[test]
    fn lemma_gap_vanishes_for_equal_matrices_and_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_pd(&mut rng, 5);
        let b = random_pd(&mut rng, 5);
        for t in [0.0, 0.3, 1.0] {
            assert!(
                logdet_strong_convexity_check(&a, &a, t)
                    .unwrap()
                    .margin
                    .abs()
                    < 1e-12
            );
        }
        for t in [0.0, 1.0] {
            assert!(
                logdet_strong_convexity_check(&a, &b, t)
                    .unwrap()
                    .margin
                    .abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn fuzz_is_deterministic_and_nonnegative() {
        let cfg = FuzzConfig {
            trials: 200,
            dims: 2..=8,
            seed: 42,
            equal_pairs: false,
        };
        let s1 = run_lemma_fuzz(&cfg).unwrap();
        let s2 = run_lemma_fuzz(&cfg).unwrap();
        assert_eq!(s1, s2);
        assert!(s1.min_margin >= -1e-10);
        assert!(s1.min_strong_convexity_slack >= -1e-10);
        assert!(s1.max_sqrt_residual <= 1e-10 * 1e3);
        let eq = FuzzConfig {
            trials: 1,
            equal_pairs: true,
            ..cfg
        };
        assert!(run_lemma_fuzz(&eq).unwrap().min_margin.abs() < 1e-12);
    }
}
