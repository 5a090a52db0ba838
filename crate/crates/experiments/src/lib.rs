//! Experiment harness for the `edgeflip` simulator: TOML configs, parallel
//! sweeps over `r`, exponent fits, theory comparisons and CSV/JSON output.

pub mod cli;
pub mod config;
pub mod error;
pub mod oracle;
pub mod output;
pub mod report;
pub mod stats;
pub mod sweep;
pub mod theory;

pub use config::{ExperimentConfig, GraphSpec, QueueConfig, Tolerances};
pub use error::{ExpError, Result};
pub use report::{cause_fractions, compare_theory, TheoryReport};
pub use stats::{fit_exponent, ExponentFit};
pub use sweep::{replication_seed, run_sweep, SweepResult};
