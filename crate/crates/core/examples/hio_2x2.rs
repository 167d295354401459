//! 2D embedding with the number operator on a 2x2 Fermi-Hubbard lattice,
//! recovered with hybrid input-output and read back as a 1D spectrum.
//!
//!     cargo run --release --example hio_2x2 -- [shots per entry] [iterations]

use specfree::cli::{hio_trial, ExperimentConfig, HioSetup};

fn main() -> specfree::Result<()> {
    let mut args = std::env::args().skip(1);
    let shots = args.next().and_then(|s| s.parse::<u64>().ok()).filter(|&s| s > 0);
    let iterations: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(5000);
    let cfg = ExperimentConfig::from_json(&format!(
        r#"{{"experiment": "hio_2x2", "dt": {}, "hio_shots": {}, "iterations": {iterations}}}"#,
        112.0 / 225.0,
        shots.map_or("null".to_string(), |s| s.to_string()),
    ))?;
    let setup = HioSetup::new(&cfg)?;
    let o = hio_trial(&cfg, &setup, Some(1))?;
    let m = &o.metrics;
    println!("best residual {:.3e} at iteration {}", m.best_residual, m.best_iteration);
    println!("l1 error {:.4}, mean offset {:.4}", m.l1_error, m.mean_offset);
    println!("ideal peaks     {:?}", m.peaks.ideal);
    println!("retrieved peaks {:?}", m.peaks.retrieved);
    println!("unmatched       {:?}", m.peaks.unmatched);
    Ok(())
}
