use serde::Serialize;

use super::spectrum::Spectrum1D;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeakPick {
    /// Selected bins, tallest first.
    pub bins: Vec<usize>,
    /// Fewer than the requested number of maxima were available.
    pub incomplete: bool,
    /// At least one selected bin ties with a neighbour, so its position is arbitrary.
    pub plateau: bool,
}

fn cyclic_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b) % n;
    d.min(n - d)
}

/// Greedy pick of cyclic local maxima (>= both neighbours) in descending
/// height, skipping bins closer than `min_separation` to an earlier pick.
pub fn peak_locations_mag(mags: &[f64], count: usize, min_separation: usize) -> Result<PeakPick> {
    if count == 0 {
        return Err(Error::invalid("peak count must be at least 1"));
    }
    let n = mags.len();
    if n == 0 {
        return Ok(PeakPick { bins: vec![], incomplete: true, plateau: false });
    }
    let left = |k: usize| mags[(k + n - 1) % n];
    let right = |k: usize| mags[(k + 1) % n];
    let mut candidates: Vec<usize> = (0..n).filter(|&k| n == 1 || (mags[k] >= left(k) && mags[k] >= right(k))).collect();
    candidates.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]).then(a.cmp(&b)));
    let mut bins: Vec<usize> = Vec::with_capacity(count);
    for k in candidates {
        if bins.len() == count {
            break;
        }
        if bins.iter().all(|&p| cyclic_distance(p, k, n) >= min_separation.max(1)) {
            bins.push(k);
        }
    }
    let plateau = n > 1 && bins.iter().any(|&k| mags[k] == left(k) || mags[k] == right(k));
    Ok(PeakPick { incomplete: bins.len() < count, plateau, bins })
}

pub fn peak_locations(spectrum: &Spectrum1D, count: usize, min_separation: usize) -> Result<PeakPick> {
    peak_locations_mag(&spectrum.magnitudes(), count, min_separation)
}

/// Strict local maxima at least `rel_height` times the global maximum,
/// thinned greedily by `min_separation`. This is the "visually distinct
/// peaks" rule used by the experiment scoring.
pub fn significant_peaks(mags: &[f64], rel_height: f64, min_separation: usize) -> Vec<usize> {
    let n = mags.len();
    if n < 3 {
        return Vec::new();
    }
    let top = mags.iter().copied().fold(0.0f64, f64::max);
    let mut candidates: Vec<usize> = (0..n)
        .filter(|&k| {
            let (l, r) = (mags[(k + n - 1) % n], mags[(k + 1) % n]);
            mags[k] > l && mags[k] > r && mags[k] >= rel_height * top
        })
        .collect();
    candidates.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]).then(a.cmp(&b)));
    let mut out: Vec<usize> = Vec::new();
    for k in candidates {
        if out.iter().all(|&p| cyclic_distance(p, k, n) >= min_separation.max(1)) {
            out.push(k);
        }
    }
    out
}

/// Bins of `wanted` that have no entry of `found` within `tolerance` (cyclic).
pub fn unmatched_peaks(wanted: &[usize], found: &[usize], tolerance: usize, n: usize) -> Vec<usize> {
    wanted
        .iter()
        .copied()
        .filter(|&w| !found.iter().any(|&f| cyclic_distance(w, f, n) <= tolerance))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_tone() {
        let mut m = vec![0.1; 32];
        m[9] = 5.0;
        let p = peak_locations_mag(&m, 1, 3).unwrap();
        assert_eq!(p.bins, vec![9]);
        assert!(!p.incomplete);
    }

    #[test]
    fn two_tones_apart() {
        let mut m = vec![0.0; 40];
        m[5] = 3.0;
        m[15] = 2.0;
        m[4] = 1.0;
        let p = peak_locations_mag(&m, 2, 3).unwrap();
        assert_eq!(p.bins, vec![5, 15]);
    }

    #[test]
    fn flat_is_flagged() {
        let m = vec![1.0; 10];
        let p = peak_locations_mag(&m, 3, 1).unwrap();
        assert_eq!(p.bins, vec![0, 1, 2]);
        assert!(p.plateau);
        assert!(!p.incomplete);
    }

    #[test]
    fn too_few_maxima() {
        let mut m = vec![0.0; 20];
        m[3] = 1.0;
        m[2] = 0.5;
        m[4] = 0.5;
        let p = peak_locations_mag(&m, 4, 25).unwrap();
        assert_eq!(p.bins, vec![3]);
        assert!(p.incomplete);
        assert!(peak_locations_mag(&m, 0, 1).is_err());
    }

    #[test]
    fn significance_and_matching() {
        let mut m = vec![0.0; 30];
        m[3] = 1.0;
        m[10] = 0.5;
        m[20] = 0.05;
        assert_eq!(significant_peaks(&m, 0.1, 3), vec![3, 10]);
        assert_eq!(unmatched_peaks(&[3, 10], &[29, 11], 1, 30), vec![3]);
        assert!(unmatched_peaks(&[0], &[29], 1, 30).is_empty());
    }
}
