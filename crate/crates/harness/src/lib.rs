//! Config-driven experiment runner.
//!
//! A JSON [`spec::ExperimentSpec`] names an experiment kind and its
//! parameters; [`run::run_experiment`] executes it, writes CSV/JSON artifacts
//! atomically and returns a [`record::RunRecord`].

pub mod build;
pub mod dsvf;
pub mod error;
pub mod export;
pub mod io;
pub mod record;
pub mod run;
pub mod spec;

pub use error::HarnessError;
pub use record::{PointRecord, RunRecord};
pub use run::{run_experiment, sweep};
pub use spec::{load_spec, parse_spec, ExperimentSpec};
