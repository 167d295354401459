use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dsp::{Fft2, Spectrum1D, Spectrum2D, WindowKind};
use crate::shotnoise::{SampleKey, ShotConfig};
use crate::simcore::Signal2D;
use crate::{Error, Result, C64};

/// Starting guess F^1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    /// |dft2(|f| e^{i theta})| with seeded uniform random theta.
    #[default]
    RandomPhase,
    /// Constant sum|f| / (NM)^(1/2) everywhere.
    FlatPositive,
    /// |dft2(|f|)|.
    MagnitudeDft,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HioConfig {
    pub beta: f64,
    pub iterations: usize,
    /// Number of independent runs (each with its own F^1).
    pub restarts: usize,
    pub seed: u64,
    pub anchor_row0: bool,
    pub init: InitStrategy,
}

impl Default for HioConfig {
    fn default() -> Self {
        Self { beta: 0.9, iterations: 5000, restarts: 1, seed: 0, anchor_row0: true, init: InitStrategy::RandomPhase }
    }
}

impl HioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::validation("beta", format!("must lie in [0, 1], got {}", self.beta)));
        }
        if self.iterations == 0 {
            return Err(Error::validation("iterations", "must be positive"));
        }
        if self.restarts == 0 {
            return Err(Error::validation("restarts", "must be at least 1"));
        }
        Ok(())
    }
}

/// Measured |f[j, l]| on a centered, modulo-stored grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeGrid {
    pub values: Array2<f64>,
    pub dt: f64,
    pub dz: f64,
}

impl MagnitudeGrid {
    pub fn from_signal(s: &Signal2D) -> Self {
        Self { values: s.magnitudes(), dt: s.dt, dz: s.dz }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.dim()
    }
}

/// Samples each non-redundant (j, l) of the raw (unwindowed) signal with the
/// binomial model, then applies the window. Entries (j, l) and (-j, -l) share
/// one draw, so (NM + 1) / 2 entries are measured.
pub fn sample_magnitudes(raw: &Signal2D, window: WindowKind, cfg: &ShotConfig) -> Result<MagnitudeGrid> {
    let (n, m) = raw.shape();
    let (pt, pz) = (n as f64 * raw.dt, m as f64 * raw.dz);
    let centered = |i: usize, len: usize| -> i64 {
        let i = i as i64;
        if i > (len as i64 - 1) / 2 {
            i - len as i64
        } else {
            i
        }
    };
    let mut values = Array2::zeros((n, m));
    for j in 0..n {
        for l in 0..m {
            let (jc, lc) = (centered(j, n), centered(l, m));
            let (jm, lm) = ((n - j) % n, (m - l) % m);
            // canonical representative of the conjugate pair
            let canon = if (jc, lc) >= (-jc, -lc) { (j, l) } else { (jm, lm) };
            let key = SampleKey::new(0x2d, (canon.0 * m + canon.1) as u64);
            let mag = cfg.noisy_magnitude(raw.values[(j, l)], 1.0, key)?;
            let w = window.eval(jc as f64 * raw.dt, pt) * window.eval(lc as f64 * raw.dz, pz);
            values[(j, l)] = mag * w;
        }
    }
    Ok(MagnitudeGrid { values, dt: raw.dt, dz: raw.dz })
}

/// Distinct (j, l) entries that must be measured for an N x M grid.
pub fn sampled_entries(n: usize, m: usize) -> usize {
    (n * m).div_ceil(2)
}

#[derive(Debug, Clone)]
pub struct HioState {
    /// Working spectrum F^i after the last update of the last run.
    pub f_current: Array2<f64>,
    /// Residual of F^i for every iteration of every run, in order.
    pub residual_history: Vec<f64>,
    pub best_residual: f64,
    /// 1-based iteration within its run.
    pub best_iteration: usize,
    pub best_run: usize,
}

fn run_seed(seed: u64, run: usize) -> u64 {
    seed ^ (run as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// F^1 for run index `run`.
pub fn init_spectrum(abs_f: &MagnitudeGrid, cfg: &HioConfig, run: usize) -> Array2<f64> {
    let (n, m) = abs_f.shape();
    match cfg.init {
        InitStrategy::FlatPositive => {
            let total: f64 = abs_f.values.sum();
            Array2::from_elem((n, m), total / ((n * m) as f64).sqrt())
        }
        InitStrategy::MagnitudeDft => {
            let mut buf = abs_f.values.mapv(|v| C64::new(v, 0.0));
            Fft2::new(n, m).forward(&mut buf);
            buf.mapv(|z| z.norm())
        }
        InitStrategy::RandomPhase => {
            let mut rng = ChaCha8Rng::seed_from_u64(run_seed(cfg.seed, run));
            let mut buf = abs_f.values.mapv(|v| C64::from_polar(v, rng.random::<f64>() * std::f64::consts::TAU));
            Fft2::new(n, m).forward(&mut buf);
            buf.mapv(|z| z.norm())
        }
    }
}

struct Workspace {
    fft: Fft2,
    buf: Array2<C64>,
    target_norm: f64,
}

/// One pass of steps 1-2: returns the residual of `f` and leaves the
/// magnitude-projected object f~ in `ws.buf`.
fn project(ws: &mut Workspace, f: &Array2<f64>, abs_f: &Array2<f64>, anchors: Option<&[C64]>) -> f64 {
    ws.buf.zip_mut_with(f, |b, &v| *b = C64::new(v, 0.0));
    ws.fft.inverse(&mut ws.buf);
    let mut mismatch = 0.0;
    ws.buf.zip_mut_with(abs_f, |z, &a| {
        let mag = z.norm();
        mismatch += (mag - a) * (mag - a);
        *z = if mag > 0.0 { *z * (a / mag) } else { C64::new(a, 0.0) };
    });
    if let Some(anchors) = anchors {
        let m = abs_f.ncols();
        for l in 0..m {
            ws.buf[(0, l)] = anchors[l] * abs_f[(0, l)];
        }
    }
    mismatch.sqrt() / ws.target_norm
}

/// Runs the HIO iteration from a given F^1; returns the best F^i, its
/// residual and iteration, and appends every residual to `history`.
fn single_run(
    ws: &mut Workspace,
    abs_f: &Array2<f64>,
    cfg: &HioConfig,
    anchors: Option<&[C64]>,
    mut f: Array2<f64>,
    history: &mut Vec<f64>,
) -> (Array2<f64>, f64, usize, Array2<f64>) {
    let mut best = (f.clone(), f64::INFINITY, 0usize);
    for it in 1..=cfg.iterations {
        let residual = project(ws, &f, abs_f, anchors);
        history.push(residual);
        if residual < best.1 {
            best = (f.clone(), residual, it);
        }
        ws.fft.forward(&mut ws.buf);
        let beta = cfg.beta;
        f.zip_mut_with(&ws.buf, |fk, z| {
            let t = z.re;
            *fk = if t <= 0.0 { *fk - beta * t } else { t };
        });
    }
    (best.0, best.1, best.2, f)
}

fn check_inputs(abs_f: &MagnitudeGrid, anchors: Option<&[C64]>) -> Result<()> {
    let (n, m) = abs_f.shape();
    if n % 2 == 0 || m % 2 == 0 {
        return Err(Error::invalid(format!("grid must have odd sides, got {n}x{m}")));
    }
    if let Some(a) = anchors {
        if a.len() != m {
            return Err(Error::ShapeMismatch(format!("{} anchors for M = {m}", a.len())));
        }
    }
    if abs_f.values.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::invalid("magnitudes must be nonnegative"));
    }
    Ok(())
}

fn wrap_spectrum(abs_f: &MagnitudeGrid, f: Array2<f64>) -> Spectrum2D {
    let (n, m) = abs_f.shape();
    Spectrum2D { values: f.mapv(|v| C64::new(v, 0.0)), period_t: n as f64 * abs_f.dt, period_z: m as f64 * abs_f.dz }
}

/// Hybrid input-output with realness and positivity in the Fourier domain,
/// measured magnitudes (and optional row-0 anchors) in the object domain.
/// Returns the lowest-residual iterate over all runs.
pub fn hio_run(abs_f: &MagnitudeGrid, cfg: &HioConfig, anchors: Option<&[C64]>) -> Result<(Spectrum2D, HioState)> {
    cfg.validate()?;
    let starts = (0..cfg.restarts).map(|r| init_spectrum(abs_f, cfg, r)).collect();
    hio_run_from(abs_f, cfg, anchors, starts)
}

/// As [`hio_run`] with explicit starting spectra, one per run.
pub fn hio_run_from(
    abs_f: &MagnitudeGrid,
    cfg: &HioConfig,
    anchors: Option<&[C64]>,
    starts: Vec<Array2<f64>>,
) -> Result<(Spectrum2D, HioState)> {
    cfg.validate()?;
    check_inputs(abs_f, anchors)?;
    let (n, m) = abs_f.shape();
    if starts.is_empty() || starts.iter().any(|s| s.dim() != (n, m)) {
        return Err(Error::ShapeMismatch("starting spectra must match the magnitude grid".into()));
    }
    let anchors = if cfg.anchor_row0 { anchors } else { None };
    let target_norm = abs_f.values.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let mut ws = Workspace { fft: Fft2::new(n, m), buf: Array2::zeros((n, m)), target_norm };
    let mut history = Vec::with_capacity(cfg.iterations * starts.len());
    let mut best: Option<(Array2<f64>, f64, usize, usize)> = None;
    let mut last = Array2::zeros((n, m));
    for (run, start) in starts.into_iter().enumerate() {
        let (f_best, r, it, f_last) = single_run(&mut ws, &abs_f.values, cfg, anchors, start, &mut history);
        if best.as_ref().is_none_or(|b| r < b.1) {
            best = Some((f_best, r, it, run));
        }
        last = f_last;
    }
    let (f_best, best_residual, best_iteration, best_run) = best.expect("at least one run");
    let state = HioState { f_current: last, residual_history: history, best_residual, best_iteration, best_run };
    Ok((wrap_spectrum(abs_f, f_best), state))
}

/// DFT of the z = 0 column of f_rec.
pub fn extract_1d(f_rec: &Signal2D) -> Spectrum1D {
    let (n, _) = f_rec.shape();
    let col: Vec<C64> = (0..n).map(|j| f_rec.values[(j, 0)]).collect();
    Spectrum1D::new(crate::dsp::dft_vec(&col), n as f64 * f_rec.dt)
}

/// [`extract_1d`] applied to idft2(F_rec).
pub fn extract_1d_from_spectrum(spec: &Spectrum2D) -> Spectrum1D {
    extract_1d(&crate::dsp::idft2(spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{dft2, dft_vec};
    use crate::simcore::{build_fermi_hubbard, build_number_operator, normalize_to_band, signal_2d, FermiHubbardParams, Lattice, QuantumState};

    fn small_problem() -> (Signal2D, Vec<C64>) {
        let l = Lattice::new(1, 2, true).unwrap();
        let h = build_fermi_hubbard(&l, &FermiHubbardParams::default()).unwrap();
        let (h, _) = normalize_to_band(&h, 0.0, std::f64::consts::PI).unwrap();
        let hd = build_number_operator(&l).unwrap();
        let psi = QuantumState::uniform(4);
        let s = signal_2d(&h, &hd, &psi, 0.9, 15, 15, WindowKind::Triangular).unwrap();
        let anchors = (0..15).map(|l| s.values[(0, l)] / s.values[(0, l)].norm()).collect();
        (s, anchors)
    }

    #[test]
    fn true_spectrum_is_a_fixed_point() {
        let (s, anchors) = small_problem();
        let truth = dft2(&s).real_part();
        let cfg = HioConfig { iterations: 3, ..Default::default() };
        let (_, st) = hio_run_from(&MagnitudeGrid::from_signal(&s), &cfg, Some(&anchors), vec![truth]).unwrap();
        assert!(st.residual_history.iter().all(|&r| r < 1e-12), "{:?}", st.residual_history);
    }

    #[test]
    fn beta_zero_and_history_length() {
        let (s, anchors) = small_problem();
        let cfg = HioConfig { beta: 0.0, iterations: 20, restarts: 3, ..Default::default() };
        let (_, st) = hio_run(&MagnitudeGrid::from_signal(&s), &cfg, Some(&anchors)).unwrap();
        assert_eq!(st.residual_history.len(), 60);
        assert!(st.residual_history.iter().all(|r| r.is_finite()));
        let min = st.residual_history.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(st.best_residual, min);
    }

    #[test]
    fn init_is_seeded_and_nonnegative() {
        let (s, _) = small_problem();
        let g = MagnitudeGrid::from_signal(&s);
        let cfg = HioConfig::default();
        let a = init_spectrum(&g, &cfg, 0);
        assert_eq!(a, init_spectrum(&g, &cfg, 0));
        assert_ne!(a, init_spectrum(&g, &cfg, 1));
        assert!(a.iter().all(|&v| v >= 0.0));
        for init in [InitStrategy::FlatPositive, InitStrategy::MagnitudeDft] {
            let b = init_spectrum(&g, &HioConfig { init, ..cfg }, 0);
            assert!(b.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn separable_extraction() {
        let n = 9;
        let a: Vec<C64> = (0..n).map(|j| C64::new(j as f64 * 0.3, 1.0 - j as f64 * 0.1)).collect();
        let b: Vec<C64> = (0..5).map(|l| if l == 0 { C64::new(1.0, 0.0) } else { C64::new(0.2, l as f64) }).collect();
        let f = Signal2D { values: Array2::from_shape_fn((n, 5), |(j, l)| a[j] * b[l]), dt: 1.0, dz: 1.0, windowed: false };
        let e = extract_1d(&f);
        for (x, y) in e.values.iter().zip(dft_vec(&a)) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn noisy_magnitudes_share_conjugate_draws() {
        let (s, _) = small_problem();
        let l = Lattice::new(1, 2, true).unwrap();
        let h = build_fermi_hubbard(&l, &FermiHubbardParams::default()).unwrap();
        let (h, _) = normalize_to_band(&h, 0.0, std::f64::consts::PI).unwrap();
        let hd = build_number_operator(&l).unwrap();
        let raw = signal_2d(&h, &hd, &QuantumState::uniform(4), 0.9, 15, 15, WindowKind::Rectangular).unwrap();
        let g = sample_magnitudes(&raw, WindowKind::Triangular, &ShotConfig::new(1000, 1).unwrap()).unwrap();
        for ((j, l), v) in g.values.indexed_iter() {
            assert_eq!(*v, g.values[((15 - j) % 15, (15 - l) % 15)]);
        }
        assert_eq!(g.values[(0, 0)], 1.0);
        let ideal = s.magnitudes();
        let worst = g.values.iter().zip(ideal.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst > 0.0 && worst < 0.2);
        assert_eq!(sampled_entries(15, 15), 113);
    }
}
