//! Bound suites: every applicable inequality over a list of density pairs
//! and mixing parameters.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use epi_lab::bounds::{
    cor3_check, cor4_check, prop8_check, rioul_check, thm1_check, thm5_ratio, twosided_growth_check,
};
use epi_lab::density::log_concavity_modulus;
use epi_lab::{BoundReport, Density1D, EpiError, QuadratureConfig};

use crate::error::{CliError, Result};
use crate::pool::worker_pool;
use crate::spec::DensitySpec;

pub const DEFAULT_T: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteCheck {
    Rioul,
    /// Also covers the rescaled form for curvature other than one.
    Thm1,
    Cor3,
    Cor4,
    Thm5,
    Prop8,
    Twosided,
}

impl SuiteCheck {
    pub const ALL: [SuiteCheck; 7] = [
        Self::Rioul,
        Self::Thm1,
        Self::Cor3,
        Self::Cor4,
        Self::Thm5,
        Self::Prop8,
        Self::Twosided,
    ];

    fn name(self) -> &'static str {
        match self {
            Self::Rioul => "rioul",
            Self::Thm1 => "thm1",
            Self::Cor3 => "cor3",
            Self::Cor4 => "cor4",
            Self::Thm5 => "thm5",
            Self::Prop8 => "prop8",
            Self::Twosided => "twosided",
        }
    }

    fn per_density(self) -> bool {
        matches!(self, Self::Thm5 | Self::Prop8)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Suite {
    pub pairs: Vec<(DensitySpec, DensitySpec)>,
    pub checks: Vec<SuiteCheck>,
}

/// On-disk suite: `{"pairs": [["gaussian:var=1", "quartic:a=0.1"], ...], "checks": ["thm1", ...]}`.
/// `checks` is optional and defaults to all of them.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    pairs: Vec<(String, String)>,
    #[serde(default)]
    checks: Option<Vec<SuiteCheck>>,
}

fn all_pairs(specs: &[DensitySpec]) -> Vec<(DensitySpec, DensitySpec)> {
    let mut out = Vec::new();
    for (i, a) in specs.iter().enumerate() {
        for b in &specs[i..] {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

impl Suite {
    /// Unordered pairs, diagonal included, of two Gaussians and two quartic
    /// perturbations around the standard Gaussian.
    pub fn default_suite() -> Self {
        let specs = [
            DensitySpec::Gaussian { var: 0.5 },
            DensitySpec::Gaussian { var: 1.0 },
            DensitySpec::Gaussian { var: 2.0 },
            DensitySpec::Quartic {
                a: 0.05,
                scale: None,
            },
            DensitySpec::Quartic {
                a: 0.2,
                scale: None,
            },
        ];
        Self {
            pairs: all_pairs(&specs),
            checks: SuiteCheck::ALL.to_vec(),
        }
    }

    pub fn gaussian_suite() -> Self {
        let specs: Vec<DensitySpec> = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&var| DensitySpec::Gaussian { var })
            .collect();
        Self {
            pairs: all_pairs(&specs),
            checks: SuiteCheck::ALL.to_vec(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SuiteFile = serde_json::from_str(text)?;
        let pairs = file
            .pairs
            .iter()
            .map(|(a, b)| Ok((a.parse()?, b.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            pairs,
            checks: file.checks.unwrap_or_else(|| SuiteCheck::ALL.to_vec()),
        })
    }

    /// A built-in suite name (`default`, `gaussian`) or a path to a suite file.
    pub fn load(name: &str) -> Result<Self> {
        match name {
            "default" => Ok(Self::default_suite()),
            "gaussian" => Ok(Self::gaussian_suite()),
            path if Path::new(path).is_file() => Self::from_json(&std::fs::read_to_string(path)?),
            other => Err(CliError::Argument(format!(
                "unknown suite {other:?} (not a built-in name or a file)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteEntry {
    pub mu: String,
    pub nu: Option<String>,
    #[serde(flatten)]
    pub report: BoundReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisFailure {
    pub mu: String,
    pub nu: Option<String>,
    pub check: &'static str,
    pub t: Option<f64>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub entries: Vec<SuiteEntry>,
    pub failures: Vec<HypothesisFailure>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    id: &'static str,
    mu: &'a str,
    nu: Option<&'a str>,
    t: Option<f64>,
    eta: Option<f64>,
    eta_nu: Option<f64>,
    n: Option<u32>,
    c: Option<f64>,
    lhs: f64,
    rhs: f64,
    margin: f64,
    holds: bool,
    empirical_constant: Option<f64>,
    degenerate: bool,
}

impl SuiteReport {
    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.report.holds)
    }

    pub fn violations(&self) -> impl Iterator<Item = &SuiteEntry> {
        self.entries.iter().filter(|e| !e.report.holds)
    }

    /// JSON array of the reports.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.entries)? + "\n")
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(true)
            .from_writer(Vec::new());
        if self.entries.is_empty() {
            w.write_record([
                "id",
                "mu",
                "nu",
                "t",
                "eta",
                "eta_nu",
                "n",
                "c",
                "lhs",
                "rhs",
                "margin",
                "holds",
                "empirical_constant",
                "degenerate",
            ])?;
        }
        for e in &self.entries {
            let r = &e.report;
            w.serialize(CsvRow {
                id: r.id.as_str(),
                mu: &e.mu,
                nu: e.nu.as_deref(),
                t: r.params.t,
                eta: r.params.eta,
                eta_nu: r.params.eta_nu,
                n: r.params.n,
                c: r.params.c,
                lhs: r.lhs,
                rhs: r.rhs,
                margin: r.margin,
                holds: r.holds,
                empirical_constant: r.empirical_constant,
                degenerate: r.degenerate,
            })?;
        }
        Ok(
            String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
                .expect("csv output is utf-8"),
        )
    }
}

/// Curvature modulus rounded down to six significant digits, so that a
/// grid minimum a hair above a round value certifies the round value.
fn certified_eta(d: &Density1D, cfg: &QuadratureConfig) -> std::result::Result<f64, EpiError> {
    let m = log_concavity_modulus(d, cfg)?;
    if !(m > 0.0 && m.is_finite()) {
        return Ok(m);
    }
    let p = 10f64.powi(5 - m.log10().floor() as i32);
    Ok((m * p).floor() / p)
}

enum Task {
    Pair {
        pair: usize,
        t: Option<f64>,
        check: SuiteCheck,
    },
    Single {
        density: usize,
        t: f64,
        check: SuiteCheck,
    },
}

type TaskOutcome = std::result::Result<BoundReport, String>;

pub fn run_bound_suite(
    suite: &Suite,
    t_list: &[f64],
    cfg: &QuadratureConfig,
) -> Result<SuiteReport> {
    cfg.validate()?;
    if let Some(t) = t_list.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        return Err(CliError::Argument(format!("t = {t} outside (0, 1)")));
    }
    // distinct specs in order of first appearance
    let mut specs: Vec<DensitySpec> = Vec::new();
    let mut pair_index = Vec::with_capacity(suite.pairs.len());
    for (a, b) in &suite.pairs {
        let mut idx = |s: &DensitySpec| match specs.iter().position(|x| x == s) {
            Some(k) => k,
            None => {
                specs.push(s.clone());
                specs.len() - 1
            }
        };
        pair_index.push((idx(a), idx(b)));
    }
    let densities = specs
        .iter()
        .map(DensitySpec::to_density)
        .collect::<Result<Vec<_>>>()?;
    let pool = worker_pool()?;
    let etas: Vec<std::result::Result<f64, EpiError>> = pool.install(|| {
        densities
            .par_iter()
            .map(|d| certified_eta(d, cfg))
            .collect()
    });

    let mut tasks = Vec::new();
    for pair in 0..suite.pairs.len() {
        for &check in suite.checks.iter().filter(|c| !c.per_density()) {
            if check == SuiteCheck::Cor4 {
                tasks.push(Task::Pair {
                    pair,
                    t: None,
                    check,
                });
            } else {
                tasks.extend(t_list.iter().map(|&t| Task::Pair {
                    pair,
                    t: Some(t),
                    check,
                }));
            }
        }
    }
    for density in 0..specs.len() {
        for &check in suite.checks.iter().filter(|c| c.per_density()) {
            tasks.extend(t_list.iter().map(|&t| Task::Single { density, t, check }));
        }
    }

    let eta_of = |k: usize| -> std::result::Result<f64, String> {
        match &etas[k] {
            Ok(m) if *m > 0.0 => Ok(*m),
            Ok(m) => Err(format!(
                "{} is not uniformly log-concave (curvature modulus {m:.6e})",
                specs[k]
            )),
            Err(e) => Err(e.to_string()),
        }
    };
    let run = |task: &Task| -> TaskOutcome {
        match *task {
            Task::Pair { pair, t, check } => {
                let (i, j) = pair_index[pair];
                let (a, b) = (&densities[i], &densities[j]);
                let t0 = t.unwrap_or(0.5);
                let out = match check {
                    SuiteCheck::Rioul => rioul_check(a, b, t0, cfg),
                    SuiteCheck::Twosided => twosided_growth_check(a, b, t0, cfg),
                    SuiteCheck::Thm1 | SuiteCheck::Cor3 => {
                        let eta = eta_of(i)?.min(eta_of(j)?);
                        if check == SuiteCheck::Thm1 {
                            thm1_check(a, b, t0, eta, cfg)
                        } else {
                            cor3_check(a, b, t0, eta, cfg)
                        }
                    }
                    SuiteCheck::Cor4 => cor4_check(a, b, eta_of(i)?, eta_of(j)?, cfg),
                    SuiteCheck::Thm5 | SuiteCheck::Prop8 => unreachable!("per-density check"),
                };
                out.map_err(|e| e.to_string())
            }
            Task::Single { density, t, check } => {
                let d = &densities[density];
                match check {
                    SuiteCheck::Thm5 => thm5_ratio(d, t, cfg),
                    _ => prop8_check(d, t, cfg),
                }
                .map_err(|e| e.to_string())
            }
        }
    };
    let outcomes: Vec<TaskOutcome> = pool.install(|| tasks.par_iter().map(run).collect());

    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for (task, outcome) in tasks.iter().zip(outcomes) {
        let (mu, nu, t, check) = match *task {
            Task::Pair { pair, t, check } => {
                let (a, b) = &suite.pairs[pair];
                (a.to_string(), Some(b.to_string()), t, check)
            }
            Task::Single { density, t, check } => {
                (specs[density].to_string(), None, Some(t), check)
            }
        };
        match outcome {
            Ok(report) => entries.push(SuiteEntry { mu, nu, report }),
            Err(error) => failures.push(HypothesisFailure {
                mu,
                nu,
                check: check.name(),
                t,
                error,
            }),
        }
    }
    Ok(SuiteReport { entries, failures })
}
