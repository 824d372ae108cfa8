//! Batch drivers behind the `epi-lab` binary: density specs, the mixture
//! sweep, bound suites, the matrix-lemma fuzz campaign and transport maps.

pub mod error;
pub mod fuzz;
pub mod pool;
pub mod spec;
pub mod suite;
pub mod sweep;
pub mod transport;

pub use error::{CliError, Result};
pub use fuzz::{parse_dims, run_lemma_fuzz};
pub use spec::{parse_density_spec, DensitySpec};
pub use suite::{run_bound_suite, Suite, SuiteCheck, SuiteEntry, SuiteReport};
pub use sweep::{run_counterexample, SweepResult, SweepRow};
pub use transport::{run_transport, TransportSummary};
