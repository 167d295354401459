//! Side-by-side scoring of two results that share a time grid.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::manifest::{write_json, Manifest, ResultEntry};
use crate::dsp::io::{fmt_float, read_spectrum_csv};
use crate::dsp::{significant_peaks, spectrum_l1_error, unmatched_peaks, Spectrum1D};
use crate::{Error, Result};

/// Published 3x3 head-to-head numbers, reported next to ours and never asserted.
pub const REFERENCE_L1_VPR: f64 = 0.0018;
pub const REFERENCE_L1_HIO: f64 = 0.0028;
pub const REFERENCE_BUDGET: f64 = 5e9;

#[derive(Debug, Clone, Serialize)]
pub struct PeakTable {
    pub ideal: Vec<usize>,
    pub retrieved: Vec<usize>,
    pub unmatched: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Side {
    pub experiment: String,
    pub name: String,
    pub method: String,
    pub n_s: Option<u64>,
    pub n_s_rule: Option<String>,
    pub l1_error: f64,
    pub peaks: PeakTable,
    #[serde(skip)]
    pub ideal: Spectrum1D,
    #[serde(skip)]
    pub retrieved: Spectrum1D,
}

#[derive(Debug, Clone, Serialize)]
pub struct Reference {
    pub lattice: &'static str,
    pub budget: f64,
    pub l1_vpr: f64,
    pub l1_hio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub n: usize,
    pub dt: f64,
    pub a: Side,
    pub b: Side,
    /// (1/N) sum | |a_k| - |b_k| | between the two retrieved spectra.
    pub difference_l1: f64,
    pub max_abs_difference: f64,
    pub reference: Reference,
    pub notes: Vec<String>,
}

fn peak_settings(m: &Manifest) -> (f64, usize, usize) {
    let get = |k: &str| m.config.get(k);
    (
        get("peak_rel_height").and_then(|v| v.as_f64()).unwrap_or(0.1),
        get("peak_min_separation").and_then(|v| v.as_u64()).unwrap_or(3) as usize,
        get("peak_tolerance").and_then(|v| v.as_u64()).unwrap_or(1) as usize,
    )
}

fn side(m: &Manifest, dir: &Path, entry: &ResultEntry) -> Result<Side> {
    let load = |role: &str| -> Result<Spectrum1D> {
        let rel = entry
            .artifacts
            .get(role)
            .ok_or_else(|| Error::invalid(format!("result {} has no {role} artifact", entry.name)))?;
        read_spectrum_csv(&dir.join(rel))
    };
    let ideal = load("ideal_spectrum")?;
    let retrieved = load("retrieved_spectrum")?;
    let (rel, sep, tol) = peak_settings(m);
    let ip = significant_peaks(&ideal.magnitudes(), rel, sep);
    let rp = significant_peaks(&retrieved.magnitudes(), rel, sep);
    Ok(Side {
        experiment: m.experiment.clone(),
        name: entry.name.clone(),
        method: entry.method.clone(),
        n_s: entry.n_s,
        n_s_rule: entry.n_s_rule.clone(),
        l1_error: spectrum_l1_error(&retrieved, &ideal)?,
        peaks: PeakTable { unmatched: unmatched_peaks(&ip, &rp, tol, ideal.len()), ideal: ip, retrieved: rp },
        ideal,
        retrieved,
    })
}

/// Compares two result entries; each comes with its manifest and the
/// directory its artifacts live in.
pub fn compare_entries(a: (&Manifest, &Path, &ResultEntry), b: (&Manifest, &Path, &ResultEntry)) -> Result<CompareReport> {
    let (ga, gb) = match (a.2.grid, b.2.grid) {
        (Some(ga), Some(gb)) => (ga, gb),
        _ => return Err(Error::invalid("both results need a time grid")),
    };
    if ga.n != gb.n || ga.dt != gb.dt {
        return Err(Error::ShapeMismatch(format!("grid mismatch: N={} dt={} versus N={} dt={}", ga.n, ga.dt, gb.n, gb.dt)));
    }
    let sa = side(a.0, a.1, a.2)?;
    let sb = side(b.0, b.1, b.2)?;
    if sa.retrieved.len() != sb.retrieved.len() {
        return Err(Error::ShapeMismatch("spectra have different lengths".into()));
    }
    let difference_l1 = spectrum_l1_error(&sa.retrieved, &sb.retrieved)?;
    let max_abs_difference =
        sa.retrieved.magnitudes().iter().zip(sb.retrieved.magnitudes()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let mut notes = vec![
        "each side is scored against its own ideal spectrum (HIO targets the windowed series)".to_string(),
        "HIO budgets count only the non-redundant half of the (j, l) grid; the published budget may not".to_string(),
    ];
    if sa.n_s.is_some() && sa.n_s != sb.n_s {
        notes.push(format!("budgets differ: {:?} versus {:?} (integer shot counts round down)", sa.n_s, sb.n_s));
    }
    Ok(CompareReport {
        n: ga.n,
        dt: ga.dt,
        a: sa,
        b: sb,
        difference_l1,
        max_abs_difference,
        reference: Reference { lattice: "3x3 spinful", budget: REFERENCE_BUDGET, l1_vpr: REFERENCE_L1_VPR, l1_hio: REFERENCE_L1_HIO },
        notes,
    })
}

/// Picks `name`, or the first result carrying spectra.
fn pick<'m>(m: &'m Manifest, name: Option<&str>) -> Result<&'m ResultEntry> {
    match name {
        Some(n) => m.result(n).ok_or_else(|| Error::validation("result", format!("no result named {n}"))),
        None => m
            .results
            .iter()
            .find(|r| r.artifacts.contains_key("retrieved_spectrum"))
            .ok_or_else(|| Error::invalid("manifest has no retrieved spectrum")),
    }
}

pub fn compare(a: &Path, b: &Path, name_a: Option<&str>, name_b: Option<&str>) -> Result<CompareReport> {
    let (ma, da) = Manifest::load(a)?;
    let (mb, db) = Manifest::load(b)?;
    compare_entries((&ma, &da, pick(&ma, name_a)?), (&mb, &db, pick(&mb, name_b)?))
}

fn opt(v: Option<u64>) -> String {
    v.map_or("noiseless".into(), |x| x.to_string())
}

pub fn report_markdown(r: &CompareReport) -> String {
    let mut s = format!("# Comparison (N = {}, dt = {})\n\n", r.n, r.dt);
    s.push_str("| | A | B |\n|---|---|---|\n");
    let _ = writeln!(s, "| result | {} ({}) | {} ({}) |", r.a.name, r.a.method, r.b.name, r.b.method);
    let _ = writeln!(s, "| N_S | {} | {} |", opt(r.a.n_s), opt(r.b.n_s));
    let _ = writeln!(s, "| l1 error | {} | {} |", fmt_float(r.a.l1_error), fmt_float(r.b.l1_error));
    let _ = writeln!(s, "| ideal peaks | {:?} | {:?} |", r.a.peaks.ideal, r.b.peaks.ideal);
    let _ = writeln!(s, "| retrieved peaks | {:?} | {:?} |", r.a.peaks.retrieved, r.b.peaks.retrieved);
    let _ = writeln!(s, "| unmatched | {:?} | {:?} |", r.a.peaks.unmatched, r.b.peaks.unmatched);
    let _ = writeln!(s, "\nDifference between retrieved spectra: l1 {}, max {}.\n", fmt_float(r.difference_l1), fmt_float(r.max_abs_difference));
    let _ = writeln!(
        s,
        "Reference ({}, N_S = {:e}): VPR {}, HIO {}. Not comparable in scale; listed for context.\n",
        r.reference.lattice, r.reference.budget, r.reference.l1_vpr, r.reference.l1_hio
    );
    for n in &r.notes {
        let _ = writeln!(s, "- {n}");
    }
    s
}

/// compare_report.json, compare_report.md and compare_overlay.csv.
pub fn write_compare(dir: &Path, r: &CompareReport) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_json(&dir.join("compare_report.json"), r)?;
    let md = dir.join("compare_report.md");
    std::fs::write(&md, report_markdown(r)).map_err(|e| Error::io(&md, e))?;
    let path = dir.join("compare_overlay.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["k", "omega_k", "ideal_a", "retrieved_a", "ideal_b", "retrieved_b", "difference"])?;
    let (ia, ra, ib, rb) = (r.a.ideal.magnitudes(), r.a.retrieved.magnitudes(), r.b.ideal.magnitudes(), r.b.retrieved.magnitudes());
    for k in 0..ra.len() {
        w.write_record([
            k.to_string(),
            fmt_float(r.a.retrieved.omega(k)),
            fmt_float(ia[k]),
            fmt_float(ra[k]),
            fmt_float(ib[k]),
            fmt_float(rb[k]),
            fmt_float(ra[k] - rb[k]),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))
}
