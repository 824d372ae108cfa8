use std::ops::RangeInclusive;

use rayon::prelude::*;

use epi_lab::psd_lemma::{
    check_fuzz_config, fuzz_trial, summarize_fuzz, FuzzConfig, LemmaFuzzSummary,
};

use crate::error::{CliError, Result};
use crate::pool::worker_pool;

/// Parses `a..b` (inclusive) or a single dimension.
pub fn parse_dims(s: &str) -> Result<RangeInclusive<usize>> {
    let bad = || CliError::Argument(format!("dimension range must look like 2..8, got {s:?}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

/// Parallel campaign; trials draw from independent streams so the summary
/// does not depend on the worker count.
pub fn run_lemma_fuzz(cfg: &FuzzConfig) -> Result<LemmaFuzzSummary> {
    check_fuzz_config(cfg)?;
    let results = worker_pool()?.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|k| fuzz_trial(cfg, k))
            .collect::<epi_lab::Result<Vec<_>>>()
    })?;
    Ok(summarize_fuzz(cfg, results)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims() {
        assert_eq!(parse_dims("2..8").unwrap(), 2..=8);
        assert_eq!(parse_dims("2..=8").unwrap(), 2..=8);
        assert_eq!(parse_dims("3").unwrap(), 3..=3);
        assert!(parse_dims("8..2").is_err());
        assert!(parse_dims("a..b").is_err());
    }

    #[test]
    fn matches_the_sequential_campaign() {
        let cfg = FuzzConfig {
            trials: 200,
            dims: 2..=8,
            seed: 9,
            equal_pairs: false,
        };
        assert_eq!(
            run_lemma_fuzz(&cfg).unwrap(),
            epi_lab::psd_lemma::run_lemma_fuzz(&cfg).unwrap()
        );
    }

    #[test]
    fn forced_equal_pair() {
        let cfg = FuzzConfig {
            trials: 1,
            dims: 2..=8,
            seed: 1,
            equal_pairs: true,
        };
        assert!(run_lemma_fuzz(&cfg).unwrap().min_margin.abs() <= 1e-12);
    }
}
