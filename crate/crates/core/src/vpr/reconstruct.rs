use super::dataset::VprDataset;
use super::eigen::PhaseAssignment;
use crate::simcore::TimeSeries1D;
use crate::{Error, Result, C64};

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub series: TimeSeries1D,
    /// Entries of y that were zero when rounding (set to phase 1).
    pub zero_phases: usize,
}

/// |f1[j]| y_j for the first block of y, optionally after y -> y/|y|.
pub fn reconstruct(ds: &VprDataset, y: &PhaseAssignment, round_phases: bool) -> Result<Reconstruction> {
    let n = ds.n();
    if y.y.len() != ds.unknowns() {
        return Err(Error::ShapeMismatch(format!("phase vector of length {} for {} unknowns", y.y.len(), ds.unknowns())));
    }
    let (ys, zero_phases) = if round_phases {
        let (r, z) = y.rounded();
        (r.y, z)
    } else {
        (y.y.clone(), 0)
    };
    let values: Vec<C64> = (0..n).map(|j| ys[j] * ds.abs_f1[j]).collect();
    let label = if round_phases { "vpr-rounded" } else { "vpr" };
    Ok(Reconstruction { series: TimeSeries1D { values, dt: ds.dt, label: label.into() }, zero_phases })
}
