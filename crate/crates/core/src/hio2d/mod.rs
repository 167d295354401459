//! 2D embedding phase retrieval with Fienup's hybrid input-output iteration.

mod anchors;
mod hio;

pub use anchors::classical_anchor_phases;
pub use hio::{
    extract_1d, extract_1d_from_spectrum, hio_run, hio_run_from, init_spectrum, sample_magnitudes, sampled_entries, HioConfig,
    HioState, InitStrategy, MagnitudeGrid,
};
