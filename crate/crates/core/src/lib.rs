//! Spectral estimation from magnitude-only time series.
//!
//! The crate simulates small Fermi-Hubbard systems exactly, turns their
//! evolution overlaps into finite-shot magnitude data, and recovers the lost
//! phases with two engines: vectorial phase retrieval ([`vpr`]) and a 2D
//! hybrid input-output embedding ([`hio2d`]). [`gatecost`] holds the closed-form
//! circuit cost model and [`cli`] wires everything into reproducible runs.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dsp;
mod error;
pub mod gatecost;
pub mod hio2d;
pub mod linalg;
pub mod shotnoise;
pub mod simcore;
pub mod vpr;

pub use error::{Error, Result};

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;
