//! Numerical laboratory for the entropy power inequality and its stability
//! bounds on one-dimensional and Gaussian measures.
//!
//! ```
//! use epi_lab::{entropy::epi_deficit, Density1D, QuadratureConfig};
//!
//! let cfg = QuadratureConfig::default().with_grid_points(1 << 14);
//! let a = Density1D::gaussian(1.0)?;
//! let b = Density1D::gaussian(4.0)?;
//! let report = epi_deficit(&a, &b, 0.5, &cfg)?;
//! assert!((report.deficit - (0.5 * 2.5f64.ln() - 0.25 * 4f64.ln())).abs() < 1e-8);
//! # Ok::<(), epi_lab::EpiError>(())
//! ```

pub mod bounds;
pub mod density;
pub mod entropy;
pub mod error;
pub mod psd_lemma;
pub mod quadrature;
pub mod transport;

pub use bounds::{BoundParams, BoundReport, InequalityId};
pub use density::{Density1D, GridDensity, Law1D, MixtureComponent};
pub use entropy::{DeficitReport, ShannonReport};
pub use error::{EpiError, Result};
pub use psd_lemma::{LemmaGapReport, SymMatrix};
pub use quadrature::QuadratureConfig;
pub use transport::TransportMap1D;
