//! Config-driven experiment runner behind the `specfree` binary.
//!
//! A run resolves its config (every default written out), executes the
//! requested pipelines and leaves plot-ready CSV, `metrics.json`,
//! `timing.json` and `manifest.json` in the output directory. Everything
//! except `timing.json` is byte-identical across reruns of the same manifest.

mod compare;
mod config;
mod experiments;
mod manifest;
mod runner;

pub use compare::{compare, compare_entries, report_markdown, write_compare, CompareReport, REFERENCE_L1_HIO, REFERENCE_L1_VPR};
pub use config::{Experiment, ExperimentConfig, LatticeSpec, Method, RawConfig, StateSpec, StateTerm, HEAD_TO_HEAD_TERMS};
pub use experiments::{hio_trial, vpr_trial, HioMetrics, HioOutcome, HioSetup, PeakSummary, VprMetrics, VprOutcome, VprSetup, TOP_PEAKS};
pub use manifest::{Grid, Manifest, ResultEntry, MANIFEST_FILE, SCHEMA_VERSION};
pub use runner::{output_dir, run, run_config, RunReport, OUTPUT_DIR_ENV};

use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DESK_SCALE: i32 = 3;

/// Process exit status for a failed command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::DeskScaleExceeded { .. } => EXIT_DESK_SCALE,
        Error::Validation { .. }
        | Error::InvalidInput(_)
        | Error::InvalidCostQuery(_)
        | Error::NotEnoughStates { .. }
        | Error::ShapeMismatch(_)
        | Error::DegenerateEmbedding(_)
        | Error::Json(_) => EXIT_VALIDATION,
        _ => EXIT_FAILURE,
    }
}
