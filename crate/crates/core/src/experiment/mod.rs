//! Experiment runner: configuration, dispatch to the solvers, output files.
//!
//! Each run writes its data files and a `<stem>.manifest.json` into the output
//! directory. CSV floats use 17 significant digits, so identical configurations
//! produce byte-identical data files.

pub mod config;
pub mod output;
pub mod run;

pub use config::{
    DesignKind, ExperimentConfig, ExperimentKind, FanKind, OutputFormat, Overrides, RayMetricKind, WarpKind,
    OUT_DIR_ENV,
};
pub use run::{run, validate, Diagnostics, RunManifest, StageRecord, SCHEMA_VERSION, VERSION};
