//! Oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use specfree::gatecost::{Hardware, Model};
use specfree::vpr::VprDataset;
use specfree::C64;

/// A run small enough for every test: VPR and HIO on a two-site lattice.
pub const TINY: &str = r#"{
    "experiment": "custom",
    "methods": ["vpr", "hio"],
    "lattice": {"rows": 1, "cols": 2},
    "dt": 0.3,
    "n": 9,
    "m": 3,
    "phi": "1001",
    "psi": "uniform",
    "r_count": 2,
    "flips_per_state": 1,
    "shots": 10,
    "hio_shots": 7,
    "seeds": [4],
    "s_range": [1, 4],
    "iterations": 50
}"#;

/// Table formulas evaluated independently of the library:
/// ((PR cnots, PR depth), (controlled cnots, controlled depth)).
pub fn table_oracle(model: Model, hw: Hardware, n: u64, k: u64) -> ((u64, u64), (u64, u64)) {
    let nf = n as f64;
    let pr = match model {
        Model::Tfim1d => ((2 * n - 2) * k, 4 * k),
        Model::Fh2dSpinless => (32 * k * n * (n - 1) / 2, 32 * k),
    };
    let ctl = match (model, hw) {
        (Model::Tfim1d, Hardware::AllToAll) => ((6 * n - 4) * k, 2 * nf.log2().ceil() as u64 + 10 * k),
        (Model::Tfim1d, _) => (6 * (n - 1) + (6 * n - 4) * k, 6 * (nf / 2.0).ceil() as u64 + 10 * k),
        (Model::Fh2dSpinless, _) => {
            let pairs = (((n - 1) * (n - 1)) as f64 / 2.0).ceil() as u64;
            (48 * k * n * (n - 1) / 2 + 6 * pairs, 48 * k + 3 * (n - 2))
        }
    };
    (pr, ctl)
}

/// The relaxed VPR cost written out term by term: support leakage,
/// interference mismatch and pin rows.
pub fn quadratic_oracle(ds: &VprDataset, s: usize, weight: f64, y: &[C64], pinned: &[usize]) -> f64 {
    let n = ds.n();
    let mut cost = 0.0;
    for r in 0..=ds.r_count() {
        let mag = ds.block(r);
        for k in s..n {
            let z: C64 = (0..n).map(|j| mag[j] * y[r * n + j] * C64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / n as f64)).sum();
            cost += weight * z.norm_sqr();
        }
    }
    for (r, sm) in ds.secondary.iter().enumerate() {
        for j in 0..n {
            let (a1, a2) = (ds.abs_f1[j], sm.abs_f2[j]);
            if 2.0 * a1 * a2 <= 1e-12 {
                continue;
            }
            let g = C64::new(sm.abs_f3[j].powi(2) - a1 * a1 - a2 * a2, sm.abs_f4[j].powi(2) - a1 * a1 - a2 * a2) / (2.0 * a1 * a2);
            if g.norm() > 0.0 {
                cost += (y[j] - g / g.norm() * y[(r + 1) * n + j]).norm_sqr();
            }
        }
    }
    cost + pinned.iter().map(|&i| y[i].norm_sqr()).sum::<f64>()
}

/// Every file under `dir` except the wall-clock timings.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().unwrap() != "timing.json" {
                out.insert(p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}
