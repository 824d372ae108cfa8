use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use epi_lab::entropy::epi_deficit;
use epi_lab::psd_lemma::FuzzConfig;
use epi_lab::QuadratureConfig;
use epi_lab_cli::suite::DEFAULT_T;
use epi_lab_cli::sweep::DEFAULT_EPS;
use epi_lab_cli::{
    parse_dims, run_bound_suite, run_counterexample, run_lemma_fuzz, run_transport, DensitySpec,
    Suite,
};

#[derive(Parser)]
#[command(
    name = "epi-lab",
    version,
    about = "Numerical experiments on the entropy power inequality deficit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the two-scale Gaussian mixture towards its singular limit.
    Counterexample {
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_EPS.to_vec())]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        /// Grid points of the convolution grid (power of two).
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Check every applicable inequality over a suite of density pairs.
    Bounds {
        /// `default`, `gaussian`, or a JSON suite file.
        #[arg(long, default_value = "default")]
        suite: String,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_T.to_vec())]
        t: Vec<f64>,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Deficit of a single pair.
    Deficit {
        #[arg(long)]
        mu: DensitySpec,
        #[arg(long)]
        nu: DensitySpec,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Random positive-definite pairs against the log-det strong convexity bound.
    LemmaFuzz {
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value = "2..8")]
        dims: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Use B = A in every trial.
        #[arg(long)]
        equal_pairs: bool,
    },
    /// Monotone transport map between two laws.
    Transport {
        #[arg(long)]
        src: DensitySpec,
        #[arg(long)]
        dst: DensitySpec,
        #[arg(long)]
        dump_map: Option<PathBuf>,
    },
}

fn config(grid: Option<usize>) -> anyhow::Result<QuadratureConfig> {
    let cfg = match grid {
        Some(n) => QuadratureConfig::default().with_grid_points(n),
        None => QuadratureConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn emit(text: &str, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Counterexample {
            eps,
            t,
            grid,
            out,
            format,
        } => {
            let cfg = config(grid)?;
            let start = Instant::now();
            let result = run_counterexample(&eps, t, &cfg)?;
            eprintln!(
                "counterexample: {} rows in {:.2} s",
                result.rows.len(),
                start.elapsed().as_secs_f64()
            );
            let text = match format {
                Format::Csv => result.to_csv()?,
                Format::Json => result.to_json()?,
            };
            emit(&text, out.as_ref())?;
        }
        Command::Bounds {
            suite,
            t,
            json: _,
            csv,
            grid,
        } => {
            let cfg = config(grid)?;
            let suite = Suite::load(&suite)?;
            let report = run_bound_suite(&suite, &t, &cfg)?;
            for f in &report.failures {
                eprintln!(
                    "hypothesis failure: {} mu={} nu={} t={}: {}",
                    f.check,
                    f.mu,
                    f.nu.as_deref().unwrap_or("-"),
                    f.t.map_or("-".to_string(), |t| t.to_string()),
                    f.error
                );
            }
            emit(
                &if csv {
                    report.to_csv()?
                } else {
                    report.to_json()?
                },
                None,
            )?;
            let mut violated = false;
            for e in report.violations() {
                violated = true;
                let t = e.report.params.t.unwrap_or(0.5);
                eprintln!(
                    "violated: {} mu={} nu={} t={t} margin={:e}; reproduce with: epi-lab deficit --mu {} --nu {} --t {t}",
                    e.report.id.as_str(),
                    e.mu,
                    e.nu.as_deref().unwrap_or("gaussian:var=1"),
                    e.report.margin,
                    e.mu,
                    e.nu.as_deref().unwrap_or("gaussian:var=1"),
                );
            }
            if violated {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Deficit { mu, nu, t, grid } => {
            let cfg = config(grid)?;
            let report = epi_deficit(&mu.to_density()?, &nu.to_density()?, t, &cfg)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::LemmaFuzz {
            trials,
            dims,
            seed,
            equal_pairs,
        } => {
            let cfg = FuzzConfig {
                trials,
                dims: parse_dims(&dims)?,
                seed,
                equal_pairs,
            };
            let start = Instant::now();
            let summary = run_lemma_fuzz(&cfg)?;
            eprintln!(
                "lemma-fuzz: {trials} trials in {:.2} s",
                start.elapsed().as_secs_f64()
            );
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Transport { src, dst, dump_map } => {
            let cfg = QuadratureConfig::default();
            let run = run_transport(
                &src.to_string(),
                &src.to_density()?,
                &dst.to_string(),
                &dst.to_density()?,
                &cfg,
            )?;
            if let Some(path) = &dump_map {
                if path.as_os_str().is_empty() {
                    bail!("empty --dump-map path");
                }
                emit(&run.map_csv, Some(path))?;
            }
            println!("{}", serde_json::to_string_pretty(&run.summary)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
