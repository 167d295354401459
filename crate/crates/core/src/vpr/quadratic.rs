use std::f64::consts::PI;

use crate::dsp::dft_vec;
use crate::linalg::CMat;
use crate::{Error, Result, C64};

use super::dataset::VprDataset;

/// Interference rows with 2|f1||f2| below this are dropped.
pub const DEFAULT_EPSILON: f64 = 1e-12;

/// Unknowns whose magnitude is below this fraction of the largest magnitude,
/// and that no kept interference row touches, get a unit pin row.
pub const PIN_THRESHOLD: f64 = 1e-6;

/// Measurement-derived G_r[j] for secondary block `r` (0-based), equal to
/// u1[j] * conj(u2[j]) for the unit phases of f1 and f2 on noiseless data.
/// `None` when the denominator 2|f1||f2| is below `epsilon`.
pub fn interference_ratio_eps(ds: &VprDataset, r: usize, j: usize, epsilon: f64) -> Option<C64> {
    let a1 = ds.abs_f1[j];
    let s = &ds.secondary[r];
    let a2 = s.abs_f2[j];
    let denom = 2.0 * a1 * a2;
    if !(denom > epsilon) {
        return None;
    }
    let base = a1 * a1 + a2 * a2;
    let num = C64::new(s.abs_f3[j].powi(2) - base, s.abs_f4[j].powi(2) - base);
    Some(num / denom)
}

pub fn interference_ratio(ds: &VprDataset, r: usize, j: usize) -> Option<C64> {
    interference_ratio_eps(ds, r, j, DEFAULT_EPSILON)
}

/// The linear map A_s whose squared norm is the relaxed VPR cost.
///
/// Unknowns are ordered as (R+1) blocks of N. Support rows, one per (block,
/// k >= s), are sqrt(weight) |f_r[j]| e^{-2 pi i j k / N}; interference rows,
/// one per (r, j) that is not dropped, are e_j - (G/|G|) e_{rN+j}. Hence
/// |A_s y|^2 = weight * Q_support(y) + Q_interference(y).
///
/// An unknown with (near) zero magnitude and no interference row would be
/// entirely free and add a spurious null vector; each such unknown gets a
/// trailing row e_i, which pins it to zero without touching x = |f| y.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    n: usize,
    s: usize,
    weight: f64,
    mags: Vec<Vec<f64>>,
    ratios: Vec<Vec<Option<C64>>>,
    dropped: usize,
    pinned: Vec<usize>,
}

impl QuadraticForm {
    pub fn assemble(ds: &VprDataset, s: usize, weight: f64) -> Result<Self> {
        Self::assemble_eps(ds, s, weight, DEFAULT_EPSILON)
    }

    pub fn assemble_eps(ds: &VprDataset, s: usize, weight: f64, epsilon: f64) -> Result<Self> {
        ds.validate()?;
        let n = ds.n();
        if s > n {
            return Err(Error::invalid(format!("support parameter s={s} exceeds N={n}")));
        }
        if !(weight >= 0.0) {
            return Err(Error::invalid(format!("weight must be nonnegative, got {weight}")));
        }
        let mags = (0..=ds.r_count()).map(|r| ds.block(r).to_vec()).collect();
        let mut dropped = 0;
        let ratios = (0..ds.r_count())
            .map(|r| {
                (0..n)
                    .map(|j| {
                        let g = interference_ratio_eps(ds, r, j, epsilon).filter(|g| g.norm() > 0.0);
                        if g.is_none() {
                            dropped += 1;
                        }
                        g.map(|g| g / g.norm())
                    })
                    .collect()
            })
            .collect();
        let mags: Vec<Vec<f64>> = mags;
        let ratios: Vec<Vec<Option<C64>>> = ratios;
        let top = mags.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
        let mut pinned = Vec::new();
        for (r, mag) in mags.iter().enumerate() {
            for (j, &m) in mag.iter().enumerate() {
                let touched = if r == 0 { ratios.iter().any(|row| row[j].is_some()) } else { ratios[r - 1][j].is_some() };
                if !touched && m <= PIN_THRESHOLD * top {
                    pinned.push(r * n + j);
                }
            }
        }
        Ok(Self { n, s, weight, mags, ratios, dropped, pinned })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn r_count(&self) -> usize {
        self.ratios.len()
    }

    pub fn dropped_rows(&self) -> usize {
        self.dropped
    }

    /// Unknowns held at zero by a pin row.
    pub fn pinned(&self) -> &[usize] {
        &self.pinned
    }

    pub fn cols(&self) -> usize {
        (self.r_count() + 1) * self.n
    }

    pub fn support_rows(&self) -> usize {
        (self.r_count() + 1) * (self.n - self.s)
    }

    pub fn rows(&self) -> usize {
        self.support_rows() + self.r_count() * self.n - self.dropped + self.pinned.len()
    }

    /// A_s y. Support rows first (block-major, k ascending), then the kept
    /// interference rows (r-major, j ascending), then pin rows.
    pub fn apply(&self, y: &[C64]) -> Result<Vec<C64>> {
        if y.len() != self.cols() {
            return Err(Error::ShapeMismatch(format!("vector of length {} for {} unknowns", y.len(), self.cols())));
        }
        let n = self.n;
        let sw = self.weight.sqrt();
        let mut out = Vec::with_capacity(self.rows());
        for (r, mag) in self.mags.iter().enumerate() {
            let block: Vec<C64> = (0..n).map(|j| y[r * n + j] * mag[j]).collect();
            let spec = dft_vec(&block);
            out.extend(spec[self.s..].iter().map(|z| z * sw));
        }
        for (r, row) in self.ratios.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                if let Some(g) = g {
                    out.push(y[j] - g * y[(r + 1) * n + j]);
                }
            }
        }
        out.extend(self.pinned.iter().map(|&i| y[i]));
        Ok(out)
    }

    /// |A_s y|^2.
    pub fn cost(&self, y: &[C64]) -> Result<f64> {
        Ok(self.apply(y)?.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Explicit matrix, for small problems and tests.
    pub fn to_dense(&self) -> CMat {
        let (n, s) = (self.n, self.s);
        let sw = self.weight.sqrt();
        let mut a = CMat::zeros(self.rows(), self.cols());
        let mut row = 0;
        for (r, mag) in self.mags.iter().enumerate() {
            for k in s..n {
                for j in 0..n {
                    let ang = -2.0 * PI * ((j * k) % n) as f64 / n as f64;
                    a[(row, r * n + j)] = C64::from_polar(sw * mag[j], ang);
                }
                row += 1;
            }
        }
        for (r, ratios) in self.ratios.iter().enumerate() {
            for (j, g) in ratios.iter().enumerate() {
                if let Some(g) = g {
                    a[(row, j)] = C64::new(1.0, 0.0);
                    a[(row, (r + 1) * n + j)] = -g;
                    row += 1;
                }
            }
        }
        for &i in &self.pinned {
            a[(row, i)] = C64::new(1.0, 0.0);
            row += 1;
        }
        a
    }

    /// A_s^dagger A_s in closed form.
    pub fn gram(&self) -> CMat {
        let (n, s) = (self.n, self.s);
        // kernel[d] = sum_{k=s}^{N-1} e^{2 pi i k d / N}
        let kernel: Vec<C64> = (0..n)
            .map(|d| {
                if d == 0 {
                    C64::new((n - s) as f64, 0.0)
                } else {
                    // -(sum over the excluded bins 0..s), since the full sum vanishes
                    -(0..s).map(|k| C64::from_polar(1.0, 2.0 * PI * ((k * d) % n) as f64 / n as f64)).sum::<C64>()
                }
            })
            .collect();
        let dim = self.cols();
        let mut g = CMat::zeros(dim, dim);
        for (r, mag) in self.mags.iter().enumerate() {
            let off = r * n;
            for jp in 0..n {
                for j in 0..n {
                    g[(off + j, off + jp)] = kernel[(j + n - jp) % n] * (self.weight * mag[j] * mag[jp]);
                }
            }
        }
        for (r, ratios) in self.ratios.iter().enumerate() {
            let off = (r + 1) * n;
            for (j, gr) in ratios.iter().enumerate() {
                if let Some(gr) = gr {
                    g[(j, j)] += C64::new(1.0, 0.0);
                    g[(off + j, off + j)] += C64::new(gr.norm_sqr(), 0.0);
                    g[(j, off + j)] -= gr;
                    g[(off + j, j)] -= gr.conj();
                }
            }
        }
        for &i in &self.pinned {
            g[(i, i)] += C64::new(1.0, 0.0);
        }
        g
    }
}

/// Free-function form of [`QuadraticForm::assemble`].
pub fn assemble_quadratic(ds: &VprDataset, s: usize, weight: f64) -> Result<QuadraticForm> {
    QuadraticForm::assemble(ds, s, weight)
}
