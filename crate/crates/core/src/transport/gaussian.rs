use serde::Serialize;

use crate::error::{domain, Result};
use crate::psd_lemma::SymMatrix;
use crate::quadrature::golden_section_minimize;

/// Squared `W2` between centered Gaussians with the given covariances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianW2 {
    /// `tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2)`.
    pub bures: f64,
    /// `|S1^1/2 - S2^1/2|_F^2`, an upper bound that is exact for commuting pairs.
    pub frobenius: f64,
    pub commuting: bool,
    /// True when the two values differ beyond round-off.
    pub forms_differ: bool,
}

pub fn w2_gaussian_nd(s1: &SymMatrix, s2: &SymMatrix) -> Result<GaussianW2> {
    if s1.dim() != s2.dim() {
        return Err(domain("covariance dimensions differ"));
    }
    let r1 = s1.sqrt_psd()?;
    let r2 = s2.sqrt_psd()?;
    let cross = r1.sandwich(s2).sqrt_psd()?;
    let bures = (s1.trace() + s2.trace() - 2.0 * cross.trace()).max(0.0);
    let frobenius = r1.sub(&r2)?.frobenius_sq();
    let p = s1.matmul(s2);
    let q = s2.matmul(s1);
    let comm: f64 = p
        .iter()
        .zip(&q)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let scale = (s1.frobenius_sq() * s2.frobenius_sq())
        .sqrt()
        .max(f64::MIN_POSITIVE);
    let commuting = comm <= 1e-12 * scale;
    let forms_differ = (frobenius - bures).abs() > 1e-10 * (1.0 + frobenius);
    Ok(GaussianW2 {
        bures,
        frobenius,
        commuting,
        forms_differ,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProportionalityGap {
    pub theta_star: f64,
    pub value: f64,
}

/// `inf_theta |sqrt(theta) A - sqrt(1 - theta) B|_F^2` with `A`, `B` the
/// covariance square roots; zero exactly for proportional covariances.
pub fn d_f2(s_mu: &SymMatrix, s_nu: &SymMatrix) -> Result<ProportionalityGap> {
    if s_mu.dim() != s_nu.dim() {
        return Err(domain("covariance dimensions differ"));
    }
    let a = s_mu.sqrt_psd()?;
    let b = s_nu.sqrt_psd()?;
    let na = a.frobenius_sq();
    let nb = b.frobenius_sq();
    if na == 0.0 && nb == 0.0 {
        return Err(domain("both covariances vanish"));
    }
    let tab = a.trace_product(&b);
    let g = |th: f64| th * na + (1.0 - th) * nb - 2.0 * (th * (1.0 - th)).max(0.0).sqrt() * tab;
    let (theta_star, value) = golden_section_minimize(g, 0.0, 1.0, 1e-12);
    Ok(ProportionalityGap {
        theta_star,
        value: value.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_and_commuting_pairs() {
        let s = SymMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let r = w2_gaussian_nd(&s, &s).unwrap();
        assert!(r.bures < 1e-12 && r.frobenius < 1e-24);
        let r =
            w2_gaussian_nd(&SymMatrix::diag(&[1.0, 4.0]), &SymMatrix::diag(&[4.0, 1.0])).unwrap();
        assert!((r.bures - 2.0).abs() < 1e-12);
        assert!((r.frobenius - 2.0).abs() < 1e-12);
        assert!(r.commuting && !r.forms_differ);
    }

    #[test]
    fn non_commuting_pair_is_flagged() {
        let s1 = SymMatrix::from_rows(&[vec![2.0, 0.9], vec![0.9, 1.0]]).unwrap();
        let s2 = SymMatrix::diag(&[0.5, 3.0]);
        let r = w2_gaussian_nd(&s1, &s2).unwrap();
        assert!(!r.commuting);
        assert!(r.forms_differ);
        assert!(r.bures < r.frobenius);
        assert!(w2_gaussian_nd(&s1, &SymMatrix::diag(&[1.0, -1.0])).is_err());
    }

    #[test]
    fn proportionality_gap() {
        let r = d_f2(&SymMatrix::identity(2), &SymMatrix::diag(&[4.0, 4.0])).unwrap();
        assert!(r.value < 1e-20);
        let r = d_f2(&SymMatrix::diag(&[3.0]), &SymMatrix::diag(&[0.2])).unwrap();
        assert!(r.value < 1e-20);
        let r = d_f2(&SymMatrix::identity(2), &SymMatrix::diag(&[1.0, 4.0])).unwrap();
        // dense theta grid
        let g = |th: f64| 2.0 * th + 5.0 * (1.0 - th) - 6.0 * (th * (1.0 - th)).sqrt();
        let best = (1..1_000_000)
            .map(|k| g(k as f64 * 1e-6))
            .fold(f64::INFINITY, f64::min);
        assert!((r.value - best).abs() < 1e-9);
        assert!((r.value - 0.145_898).abs() < 1e-5);
        assert!((r.theta_star - 0.723_6).abs() < 1e-4);
    }
}
