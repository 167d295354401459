//! The two retrieval pipelines as the runner drives them: simulate, sample,
//! retrieve, align and score.

use serde::Serialize;

use super::config::ExperimentConfig;
use crate::dsp::{aligned_l1_error, dft1, dft_vec, peak_locations_mag, significant_peaks, unmatched_peaks, AmbiguityTransform, Spectrum1D, Spectrum2D};
use crate::hio2d::{classical_anchor_phases, extract_1d_from_spectrum, hio_run, sample_magnitudes, sampled_entries, HioState, MagnitudeGrid};
use crate::shotnoise::ShotConfig;
use crate::simcore::{
    build_fermi_hubbard, build_number_operator, normalize_to_band, signal_2d_with_dz, windowed_series, BandMap, Hamiltonian, QuantumState,
};
use crate::vpr::{coupled_secondaries, reconstruct, select_support, sweep_support_with, SupportStrategy, SupportSweep, VprSignals};
use crate::dsp::WindowKind;
use crate::{Error, Result};

pub const TOP_PEAKS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakSummary {
    /// Local maxima above the relative height, tallest first.
    pub ideal: Vec<usize>,
    pub retrieved: Vec<usize>,
    /// Ideal peaks with no retrieved peak within tolerance.
    pub unmatched: Vec<usize>,
    pub top_ideal: Vec<usize>,
    pub top_retrieved: Vec<usize>,
    pub top_unmatched: Vec<usize>,
}

impl PeakSummary {
    pub fn new(ideal: &[f64], retrieved: &[f64], cfg: &ExperimentConfig) -> Result<Self> {
        let n = ideal.len();
        let sig = |m: &[f64]| significant_peaks(m, cfg.peak_rel_height, cfg.peak_min_separation);
        let top = |m: &[f64]| peak_locations_mag(m, TOP_PEAKS, cfg.peak_min_separation).map(|p| p.bins);
        let (ideal_p, retrieved_p) = (sig(ideal), sig(retrieved));
        let (top_ideal, top_retrieved) = (top(ideal)?, top(retrieved)?);
        // top-k of the retrieval are matched against all of its local maxima
        // above threshold, so near-equal peaks may swap ranks
        let top_unmatched = unmatched_peaks(&top_ideal, &top_retrieved, cfg.peak_tolerance, n);
        Ok(Self {
            unmatched: unmatched_peaks(&ideal_p, &retrieved_p, cfg.peak_tolerance, n),
            ideal: ideal_p,
            retrieved: retrieved_p,
            top_ideal,
            top_retrieved,
            top_unmatched,
        })
    }
}

/// Everything shared by the VPR trials of one config.
pub struct VprSetup {
    pub h: Hamiltonian,
    pub phi: QuantumState,
    /// Signals for the largest R; trials take a prefix.
    pub signals: VprSignals,
    pub truncation_start: Option<usize>,
    pub ideal: Spectrum1D,
}

impl VprSetup {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let lattice = cfg.lattice.build()?;
        let h = build_fermi_hubbard(&lattice, &cfg.params)?;
        let phi = cfg.phi.build(lattice.modes(), "phi")?;
        let target = cfg.phi.target_bits("phi")?;
        let r_max = cfg.r_values.iter().copied().max().unwrap_or(1);
        let bits = coupled_secondaries(&h, &phi, &target, r_max, cfg.flips_per_state, cfg.state_seed)?;
        let secondaries: Vec<QuantumState> = bits.iter().map(QuantumState::basis).collect();
        let dt = cfg.dt.ok_or_else(|| Error::validation("dt", "required"))?;
        let mut signals = VprSignals::simulate(&h, &phi, &secondaries, dt, cfg.n)?;
        let mut truncation_start = None;
        if let Some(sigma) = cfg.sigma {
            let (cut, k0) = signals.truncate_support(sigma)?;
            signals = cut;
            truncation_start = Some(k0);
        }
        let ideal = Spectrum1D::new(dft_vec(&signals.f1), cfg.n as f64 * dt);
        Ok(Self { h, phi, signals, truncation_start, ideal })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VprMetrics {
    pub l1_error: f64,
    pub l1_error_rounded: f64,
    pub zero_phases: usize,
    pub s_star: usize,
    pub strategy: SupportStrategy,
    /// The selection rule found no distinguished drop.
    pub flagged: bool,
    pub lambda_min: f64,
    pub lambda_second: f64,
    pub lambda_ratio: f64,
    pub drop_ratio_at_s_star: Option<f64>,
    /// Largest drop in the scanned range, whatever the strategy.
    pub max_drop_s: usize,
    pub max_drop_ratio: Option<f64>,
    pub dropped_rows: usize,
    pub truncation_start: Option<usize>,
    pub alignment: AmbiguityTransform,
    pub alignment_rounded: AmbiguityTransform,
    pub peaks: PeakSummary,
    pub peaks_rounded: PeakSummary,
}

pub struct VprOutcome {
    pub r_count: usize,
    pub seed: Option<u64>,
    pub sweep: SupportSweep,
    pub retrieved: Spectrum1D,
    pub retrieved_rounded: Spectrum1D,
    pub n_s: Option<u64>,
    pub metrics: VprMetrics,
}

/// One VPR retrieval with the first `r` secondaries and noise seed `seed`
/// (ignored when the config is noiseless).
pub fn vpr_trial(cfg: &ExperimentConfig, setup: &VprSetup, r: usize, seed: Option<u64>) -> Result<VprOutcome> {
    let signals = setup.signals.take(r);
    let (ds, n_s) = match (cfg.shots, seed) {
        (Some(shots), Some(seed)) => {
            let ds = signals.noisy_dataset(&ShotConfig::new(shots, seed)?)?;
            let n_s = (ds.sample_points() as u64).checked_mul(shots);
            (ds, n_s)
        }
        _ => (signals.ideal_dataset(), None),
    };
    let [lo, hi] = cfg.s_range;
    let sweep = sweep_support_with(&ds, lo..=hi, cfg.weight, cfg.strategy)?;
    let score = |round: bool| -> Result<(f64, AmbiguityTransform, Spectrum1D, usize)> {
        let rec = reconstruct(&ds, &sweep.y_at_s_star, round)?;
        let (err, t, aligned) = aligned_l1_error(&dft1(&rec.series), &setup.ideal)?;
        Ok((err, t, aligned, rec.zero_phases))
    };
    let (l1_error, alignment, retrieved, _) = score(false)?;
    let (l1_error_rounded, alignment_rounded, retrieved_rounded, zero_phases) = score(true)?;
    let ideal_mags = setup.ideal.magnitudes();
    let max_drop = select_support(&sweep.records, SupportStrategy::MaxDropRatio)?;
    let (lambda_min, lambda_second) = sweep.lambda_at_s_star;
    let metrics = VprMetrics {
        l1_error,
        l1_error_rounded,
        zero_phases,
        s_star: sweep.s_star(),
        strategy: sweep.strategy,
        flagged: sweep.selection.flagged,
        lambda_min,
        lambda_second,
        lambda_ratio: lambda_min / lambda_second,
        drop_ratio_at_s_star: sweep.drop_ratio(sweep.s_star()),
        max_drop_s: max_drop.s_star,
        max_drop_ratio: if max_drop.flagged { None } else { sweep.drop_ratio(max_drop.s_star) },
        dropped_rows: sweep.dropped_rows,
        truncation_start: setup.truncation_start,
        alignment,
        alignment_rounded,
        peaks: PeakSummary::new(&ideal_mags, &retrieved.magnitudes(), cfg)?,
        peaks_rounded: PeakSummary::new(&ideal_mags, &retrieved_rounded.magnitudes(), cfg)?,
    };
    Ok(VprOutcome { r_count: r, seed, sweep, retrieved, retrieved_rounded, n_s, metrics })
}

/// Everything shared by the HIO trials of one config.
pub struct HioSetup {
    pub h: Hamiltonian,
    pub band: Option<BandMap>,
    pub hd: Hamiltonian,
    pub psi: QuantumState,
    pub dz: f64,
    /// Windowed 2D signal without noise.
    pub ideal_grid: MagnitudeGrid,
    /// Unwindowed signal, kept for sampling.
    pub raw: Option<crate::simcore::Signal2D>,
    pub anchors: Option<Vec<crate::C64>>,
    pub ideal: Spectrum1D,
}

impl HioSetup {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let lattice = cfg.lattice.build()?;
        let h = build_fermi_hubbard(&lattice, &cfg.params)?;
        let (h, band) = match cfg.normalize_band {
            Some([lo, hi]) => {
                let (h, map) = normalize_to_band(&h, lo, hi)?;
                (h, Some(map))
            }
            None => (h, None),
        };
        let hd = build_number_operator(&lattice)?;
        let psi = cfg.psi.build(lattice.modes(), "psi")?;
        let dt = cfg.dt.ok_or_else(|| Error::validation("dt", "required"))?;
        let dz = cfg.dz.unwrap_or(cfg.n as f64 * dt / cfg.m as f64);
        let windowed = signal_2d_with_dz(&h, &hd, &psi, dt, dz, cfg.n, cfg.m, cfg.window)?;
        let raw = match cfg.hio_shots {
            Some(_) => Some(signal_2d_with_dz(&h, &hd, &psi, dt, dz, cfg.n, cfg.m, WindowKind::Rectangular)?),
            None => None,
        };
        let anchors = if cfg.anchor_row0 { Some(classical_anchor_phases(&hd, &psi, dz, cfg.m)?) } else { None };
        let ideal = dft1(&windowed_series(&h, &psi, dt, cfg.n, cfg.window)?);
        Ok(Self { h, band, hd, psi, dz, ideal_grid: MagnitudeGrid::from_signal(&windowed), raw, anchors, ideal })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HioMetrics {
    pub l1_error: f64,
    pub best_residual: f64,
    pub best_iteration: usize,
    pub best_run: usize,
    pub final_residual: f64,
    /// Mean of |retrieved| - |ideal| over all bins.
    pub mean_offset: f64,
    pub hio_shots: Option<u64>,
    pub band: Option<BandMap>,
    pub alignment: AmbiguityTransform,
    pub peaks: PeakSummary,
}

pub struct HioOutcome {
    pub seed: Option<u64>,
    pub spectrum_2d: Spectrum2D,
    pub state: HioState,
    pub retrieved: Spectrum1D,
    pub n_s: Option<u64>,
    pub metrics: HioMetrics,
}

pub fn hio_trial(cfg: &ExperimentConfig, setup: &HioSetup, seed: Option<u64>) -> Result<HioOutcome> {
    let (grid, n_s) = match (cfg.hio_shots, &setup.raw, seed) {
        (Some(shots), Some(raw), Some(seed)) => {
            let grid = sample_magnitudes(raw, cfg.window, &ShotConfig::new(shots, seed)?)?;
            (grid, (sampled_entries(cfg.n, cfg.m) as u64).checked_mul(shots))
        }
        _ => (setup.ideal_grid.clone(), None),
    };
    let (spectrum_2d, state) = hio_run(&grid, &cfg.hio_config(), setup.anchors.as_deref())?;
    let rec = extract_1d_from_spectrum(&spectrum_2d);
    let (l1_error, alignment, retrieved) = aligned_l1_error(&rec, &setup.ideal)?;
    let ideal_mags = setup.ideal.magnitudes();
    let rec_mags = retrieved.magnitudes();
    let mean_offset = rec_mags.iter().zip(&ideal_mags).map(|(a, b)| a - b).sum::<f64>() / ideal_mags.len() as f64;
    let metrics = HioMetrics {
        l1_error,
        best_residual: state.best_residual,
        best_iteration: state.best_iteration,
        best_run: state.best_run,
        final_residual: state.residual_history.last().copied().unwrap_or(f64::NAN),
        mean_offset,
        hio_shots: cfg.hio_shots,
        band: setup.band,
        alignment,
        peaks: PeakSummary::new(&ideal_mags, &rec_mags, cfg)?,
    };
    Ok(HioOutcome { seed, spectrum_2d, state, retrieved, n_s, metrics })
}
