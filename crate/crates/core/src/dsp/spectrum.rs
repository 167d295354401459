use std::f64::consts::PI;

use ndarray::Array2;

use crate::C64;

/// F[k] with the bin map omega_k = 2 pi k / T.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    pub values: Vec<C64>,
    pub period: f64,
}

impl Spectrum1D {
    pub fn new(values: Vec<C64>, period: f64) -> Self {
        Self { values, period }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn omega(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.period
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }
}

/// F[k, m] with omega_k = 2 pi k / T and eta_m = 2 pi m / T'.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    pub values: Array2<C64>,
    pub period_t: f64,
    pub period_z: f64,
}

impl Spectrum2D {
    pub fn shape(&self) -> (usize, usize) {
        self.values.dim()
    }

    pub fn omega(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.period_t
    }

    pub fn eta(&self, m: usize) -> f64 {
        2.0 * PI * m as f64 / self.period_z
    }

    pub fn real_part(&self) -> Array2<f64> {
        self.values.mapv(|z| z.re)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, z| a.max(z.im.abs()))
    }

    pub fn min_real(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |a, z| a.min(z.re))
    }
}

/// Anything with complex bins laid out on an (n, m) grid; 1D spectra use m = 1.
pub trait SpectrumData {
    fn grid(&self) -> (usize, usize);
    fn bins(&self) -> Vec<C64>;
}

impl SpectrumData for Spectrum1D {
    fn grid(&self) -> (usize, usize) {
        (self.values.len(), 1)
    }

    fn bins(&self) -> Vec<C64> {
        self.values.clone()
    }
}

impl SpectrumData for Spectrum2D {
    fn grid(&self) -> (usize, usize) {
        self.values.dim()
    }

    fn bins(&self) -> Vec<C64> {
        self.values.iter().copied().collect()
    }
}
