//! Fourier conventions, windows, spectrum metrics and trivial-ambiguity handling.

mod align;
mod fourier;
pub mod io;
mod metrics;
mod peaks;
mod spectrum;
mod window;

pub use align::{align_ambiguities, align_ambiguities_2d, aligned_l1_error, AmbiguityTransform};
pub use fourier::{dft1, dft2, dft2_array, dft_vec, idft1, idft2, idft2_array, idft_vec, Fft2};
pub use metrics::{l1_magnitude_error, spectrum_l1_error};
pub use peaks::{peak_locations, peak_locations_mag, significant_peaks, unmatched_peaks, PeakPick};
pub use spectrum::{Spectrum1D, Spectrum2D, SpectrumData};
pub use window::WindowKind;
