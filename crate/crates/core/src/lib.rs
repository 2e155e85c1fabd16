//! Ground states of nonlinear wave-type equations `P(−Δ)u + ∂_tt u = q f(u)`
//! on `T^N × S¹` and `S^N × S¹`, computed by saddle-point reduction on a
//! truncated spectral basis, together with diagnostics for the compactness
//! and control conditions behind their existence.

// `!(x > 0.0)` rejects NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod config;
pub mod control;
pub mod embedding;
pub mod error;
pub mod field;
pub mod functional;
pub mod grid;
pub mod run;
pub mod saddle;

pub use catalog::{Domain, Operator, Rational, SpectralCatalog, SpectralClass};
pub use config::{validate_config, RunConfig, Task};
pub use error::{Error, Result};
pub use field::SpectralField;
pub use functional::{EnergyContext, Nonlinearity, PowerTerm};
pub use grid::{ProductGrid, WeightField};
pub use saddle::{ground_state, inner_maximize, SaddleProblem, SolverConfig};
