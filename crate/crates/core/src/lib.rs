//! Optimal tax implementation thresholds for a Cramér-Lundberg surplus with
//! exponential claims, under loss-carry-forward taxation.
//!
//! Two control problems are covered: a terminal value `S` paid at ruin
//! ([`tax_terminal`]) and capital injections at unit cost `varphi` that keep
//! the surplus nonnegative ([`tax_injection`]). Both reduce to a root of a
//! one-dimensional function built from the scale functions in [`scale`].

pub mod cli;
pub mod config;
pub mod error;
pub mod model;
pub mod numerics;
pub mod scale;
pub mod simulate;
pub mod sweep;
pub mod tables;
pub mod tax_injection;
pub mod tax_terminal;
pub mod validate;

pub use config::{Mode, Param, Problem, RunConfig};
pub use error::{Error, Result};
pub use model::{LevyModel, SpectralRoots};
pub use numerics::{QuadSpec, RootReport};
pub use scale::ScaleSet;
pub use simulate::{simulate_injection, simulate_terminal, SimConfig, SimResult};
pub use tax_injection::InjectionProblem;
pub use tax_terminal::{OptimumReport, TerminalProblem};
