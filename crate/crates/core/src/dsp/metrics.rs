use super::spectrum::SpectrumData;
use crate::{Error, Result, C64};

/// Mean absolute difference of magnitudes.
pub fn l1_magnitude_error(a: &[C64], b: &[C64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!("spectra of length {} and {}", a.len(), b.len())));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = a.iter().zip(b).map(|(x, y)| (x.norm() - y.norm()).abs()).sum();
    Ok(total / a.len() as f64)
}

/// (1/N) sum_k | |a[k]| - |b[k]| |, normalized by NM for 2D grids.
pub fn spectrum_l1_error<S: SpectrumData>(a: &S, b: &S) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::ShapeMismatch(format!("grids {:?} and {:?}", a.grid(), b.grid())));
    }
    l1_magnitude_error(&a.bins(), &b.bins())
}
