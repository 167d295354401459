use std::sync::Arc;

use ndarray::Array2;
use rustfft::{Fft, FftPlanner};

use super::spectrum::{Spectrum1D, Spectrum2D};
use crate::simcore::{Signal2D, TimeSeries1D};
use crate::C64;

/// Unnormalized forward DFT, F[k] = sum_j f[j] e^{-2 pi i k j / N}.
pub fn dft_vec(f: &[C64]) -> Vec<C64> {
    let mut buf = f.to_vec();
    if !buf.is_empty() {
        FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    }
    buf
}

/// Inverse DFT with the 1/N factor.
pub fn idft_vec(f: &[C64]) -> Vec<C64> {
    let mut buf = f.to_vec();
    if !buf.is_empty() {
        FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
        let s = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|z| *z *= s);
    }
    buf
}

pub fn dft1(f: &TimeSeries1D) -> Spectrum1D {
    Spectrum1D::new(dft_vec(&f.values), f.period())
}

pub fn idft1(spec: &Spectrum1D) -> TimeSeries1D {
    let n = spec.len().max(1);
    TimeSeries1D { values: idft_vec(&spec.values), dt: spec.period / n as f64, label: String::new() }
}

/// Reusable row-then-column 2D transform for one grid size.
pub struct Fft2 {
    n: usize,
    m: usize,
    rows_fwd: Arc<dyn Fft<f64>>,
    rows_inv: Arc<dyn Fft<f64>>,
    cols_fwd: Arc<dyn Fft<f64>>,
    cols_inv: Arc<dyn Fft<f64>>,
    scratch: Vec<C64>,
    transposed: Vec<C64>,
}

impl Fft2 {
    pub fn new(n: usize, m: usize) -> Self {
        let mut planner = FftPlanner::new();
        let rows_fwd = planner.plan_fft_forward(m);
        let rows_inv = planner.plan_fft_inverse(m);
        let cols_fwd = planner.plan_fft_forward(n);
        let cols_inv = planner.plan_fft_inverse(n);
        let scratch_len = [&rows_fwd, &rows_inv, &cols_fwd, &cols_inv]
            .iter()
            .map(|p| p.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        Self {
            n,
            m,
            rows_fwd,
            rows_inv,
            cols_fwd,
            cols_inv,
            scratch: vec![C64::new(0.0, 0.0); scratch_len],
            transposed: vec![C64::new(0.0, 0.0); n * m],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    fn run(&mut self, data: &mut Array2<C64>, inverse: bool) {
        assert_eq!(data.dim(), (self.n, self.m), "grid does not match plan");
        let (n, m) = (self.n, self.m);
        let (rows, cols) = if inverse { (&self.rows_inv, &self.cols_inv) } else { (&self.rows_fwd, &self.cols_fwd) };
        let flat = data.as_slice_mut().expect("standard layout");
        rows.process_with_scratch(flat, &mut self.scratch);
        for j in 0..n {
            for l in 0..m {
                self.transposed[l * n + j] = flat[j * m + l];
            }
        }
        cols.process_with_scratch(&mut self.transposed, &mut self.scratch);
        let s = if inverse { 1.0 / (n * m) as f64 } else { 1.0 };
        for j in 0..n {
            for l in 0..m {
                flat[j * m + l] = self.transposed[l * n + j] * s;
            }
        }
    }

    pub fn forward(&mut self, data: &mut Array2<C64>) {
        self.run(data, false);
    }

    /// Includes the 1/(NM) factor.
    pub fn inverse(&mut self, data: &mut Array2<C64>) {
        self.run(data, true);
    }
}

fn standard(values: &Array2<C64>) -> Array2<C64> {
    if values.is_standard_layout() {
        values.clone()
    } else {
        values.as_standard_layout().into_owned()
    }
}

pub fn dft2_array(values: &Array2<C64>) -> Array2<C64> {
    let (n, m) = values.dim();
    let mut out = standard(values);
    Fft2::new(n, m).forward(&mut out);
    out
}

pub fn idft2_array(values: &Array2<C64>) -> Array2<C64> {
    let (n, m) = values.dim();
    let mut out = standard(values);
    Fft2::new(n, m).inverse(&mut out);
    out
}

pub fn dft2(f: &Signal2D) -> Spectrum2D {
    let (n, m) = f.values.dim();
    Spectrum2D { values: dft2_array(&f.values), period_t: n as f64 * f.dt, period_z: m as f64 * f.dz }
}

pub fn idft2(spec: &Spectrum2D) -> Signal2D {
    let (n, m) = spec.values.dim();
    Signal2D {
        values: idft2_array(&spec.values),
        dt: spec.period_t / n.max(1) as f64,
        dz: spec.period_z / m.max(1) as f64,
        windowed: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_and_tone() {
        let ones = vec![C64::new(1.0, 0.0); 8];
        let f = dft_vec(&ones);
        assert!((f[0] - C64::new(8.0, 0.0)).norm() < 1e-12);
        assert!(f[1..].iter().all(|z| z.norm() < 1e-12));

        let n = 16;
        let tone: Vec<C64> = (0..n).map(|j| C64::from_polar(1.0, 2.0 * PI * 3.0 * j as f64 / n as f64)).collect();
        let f = dft_vec(&tone);
        for (k, z) in f.iter().enumerate() {
            let want = if k == 3 { n as f64 } else { 0.0 };
            assert!((z - C64::new(want, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn delta_2d_is_flat() {
        let mut d = Array2::zeros((5, 7));
        d[(0, 0)] = C64::new(1.0, 0.0);
        let f = dft2_array(&d);
        assert!(f.iter().all(|z| (z - C64::new(1.0, 0.0)).norm() < 1e-14));
    }

    #[test]
    fn fft2_matches_naive() {
        let (n, m) = (5, 3);
        let f = Array2::from_shape_fn((n, m), |(j, l)| C64::new((j * 3 + l) as f64, (j as f64 - l as f64) * 0.5));
        let fast = dft2_array(&f);
        for k in 0..n {
            for q in 0..m {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..n {
                    for l in 0..m {
                        let ang = -2.0 * PI * ((k * j) as f64 / n as f64 + (q * l) as f64 / m as f64);
                        acc += f[(j, l)] * C64::from_polar(1.0, ang);
                    }
                }
                assert!((acc - fast[(k, q)]).norm() < 1e-10);
            }
        }
    }
}
