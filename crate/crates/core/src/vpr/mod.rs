//! Vectorial phase retrieval with multiple secondary signals.
//!
//! The hidden phases of f1 and the secondary signals f2^(r) are stacked into
//! one vector; a support penalty and the measured interference ratios define
//! a positive semidefinite quadratic form whose smallest eigenvector, scanned
//! over the support parameter s, gives the reconstruction.

mod dataset;
mod eigen;
mod quadratic;
mod reconstruct;
mod sweep;

pub use dataset::{coupled_secondaries, coupling_strength, SecondaryMagnitudes, VprDataset, VprSignals, COUPLING_TOL};
pub use eigen::{smallest_eigpair, smallest_two, EigenResult, NormKind, PhaseAssignment, DEFAULT_GRAM_CAP, DENSE_LIMIT};
pub use quadratic::{assemble_quadratic, interference_ratio, interference_ratio_eps, QuadraticForm, DEFAULT_EPSILON};
pub use reconstruct::{reconstruct, Reconstruction};
pub use sweep::{
    default_scan, select_support, sweep_support, sweep_support_with, Selection, SupportStrategy, SupportSweep, SweepRecord,
};
