use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::dataset::VprDataset;
use super::eigen::{smallest_eigpair, smallest_two, PhaseAssignment};
use super::quadratic::QuadraticForm;
use crate::dsp::io::fmt_float;
use crate::{Error, Result};

const LAMBDA_FLOOR: f64 = 1e-300;

/// Rule for picking s* from a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
#[derive(Default)]
pub enum SupportStrategy {
    /// The s with the largest lambda_min(s-1) / lambda_min(s).
    #[default]
    MaxDropRatio,
    /// The first s whose drop ratio exceeds `ratio`.
    FirstDecayOnset { ratio: f64 },
    Manual { s: usize },
}


#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub s: usize,
    pub lambda_min: f64,
    pub lambda_second: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub s_star: usize,
    /// No distinguished drop: s_star fell back to the first scanned index.
    pub flagged: bool,
}

#[derive(Debug, Clone)]
pub struct SupportSweep {
    pub records: Vec<SweepRecord>,
    pub selection: Selection,
    pub strategy: SupportStrategy,
    pub weight: f64,
    pub y_at_s_star: PhaseAssignment,
    pub lambda_at_s_star: (f64, f64),
    pub dropped_rows: usize,
}

impl SupportSweep {
    pub fn s_star(&self) -> usize {
        self.selection.s_star
    }

    pub fn record(&self, s: usize) -> Option<&SweepRecord> {
        self.records.iter().find(|r| r.s == s)
    }

    /// lambda_min(s-1) / lambda_min(s), when both are in the sweep.
    pub fn drop_ratio(&self, s: usize) -> Option<f64> {
        let prev = self.record(s.checked_sub(1)?)?;
        let here = self.record(s)?;
        Some(prev.lambda_min.max(LAMBDA_FLOOR) / here.lambda_min.max(LAMBDA_FLOOR))
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["s", "lambda_min", "lambda_second"])?;
        for r in &self.records {
            w.write_record([r.s.to_string(), fmt_float(r.lambda_min), fmt_float(r.lambda_second)])?;
        }
        w.flush().map_err(|e| Error::Io { path: path.into(), source: e })
    }
}

/// Default scan 1..=floor(N/2).
pub fn default_scan(n: usize) -> RangeInclusive<usize> {
    1..=(n / 2).max(1)
}

/// Applies `strategy` to consecutive records (sorted by s).
pub fn select_support(records: &[SweepRecord], strategy: SupportStrategy) -> Result<Selection> {
    let first = records.first().ok_or_else(|| Error::invalid("empty sweep"))?.s;
    if let SupportStrategy::Manual { s } = strategy {
        return Ok(Selection { s_star: s, flagged: false });
    }
    let ratios: Vec<(usize, f64)> = records
        .windows(2)
        .filter(|w| w[1].s == w[0].s + 1)
        .map(|w| (w[1].s, w[0].lambda_min.max(LAMBDA_FLOOR) / w[1].lambda_min.max(LAMBDA_FLOOR)))
        .collect();
    let flat = Selection { s_star: first, flagged: true };
    match strategy {
        SupportStrategy::MaxDropRatio => {
            let Some(&(best_s, best)) = ratios.iter().max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0))) else {
                return Ok(flat);
            };
            let tol = 1e-9 * best.abs();
            let distinguished = best > 1.0 && ratios.iter().all(|&(s, r)| s == best_s || r < best - tol);
            Ok(if distinguished { Selection { s_star: best_s, flagged: false } } else { flat })
        }
        SupportStrategy::FirstDecayOnset { ratio } => Ok(ratios
            .iter()
            .find(|&&(_, r)| r > ratio)
            .map(|&(s, _)| Selection { s_star: s, flagged: false })
            .unwrap_or(flat)),
        SupportStrategy::Manual { .. } => unreachable!(),
    }
}

pub fn sweep_support(ds: &VprDataset, s_range: RangeInclusive<usize>, weight: f64) -> Result<SupportSweep> {
    sweep_support_with(ds, s_range, weight, SupportStrategy::MaxDropRatio)
}

/// Two smallest eigenvalues for every s in range, then the minimizer at the
/// selected s*.
pub fn sweep_support_with(
    ds: &VprDataset,
    s_range: RangeInclusive<usize>,
    weight: f64,
    strategy: SupportStrategy,
) -> Result<SupportSweep> {
    if s_range.is_empty() {
        return Err(Error::invalid("empty support scan range"));
    }
    let mut records = Vec::new();
    let mut dropped_rows = 0;
    for s in s_range {
        let q = QuadraticForm::assemble(ds, s, weight)?;
        dropped_rows = q.dropped_rows();
        let (lambda_min, lambda_second) = smallest_two(&q.gram())?;
        records.push(SweepRecord { s, lambda_min, lambda_second });
    }
    let selection = select_support(&records, strategy)?;
    let q = QuadraticForm::assemble(ds, selection.s_star, weight)?;
    let eig = smallest_eigpair(&q.gram())?;
    Ok(SupportSweep {
        records,
        selection,
        strategy,
        weight,
        y_at_s_star: eig.y_min,
        lambda_at_s_star: (eig.lambda_min, eig.lambda_second),
        dropped_rows,
    })
}
