//! Experiment runner for the fixed-rank Nyström pipelines: approximation
//! errors over landmark grids, property verification and timing.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod timing;
pub mod verification;

pub use config::{DataSource, ExperimentConfig, Method, Selection, Synthetic};
pub use error::{BenchError, Result};
pub use experiment::{run_experiment, ExperimentOutput, ExperimentRecord, SummaryRow};
pub use timing::{run_timing, TimingOutput, TimingRow};
pub use verification::{run_verification, Suite, VerificationReport, VerifyConfig};
