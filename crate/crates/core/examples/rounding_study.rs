//! Relaxed eigenvector versus unit-modulus rounding on noisy R = 10 data.
//!
//!     cargo run --release --example rounding_study -- [seed]

use specfree::cli::{vpr_trial, ExperimentConfig, VprSetup};

fn main() -> specfree::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let cfg = ExperimentConfig::from_json(&format!(r#"{{"experiment": "vpr_r_resilience", "dt": 0.133, "r_count": 10, "seeds": [{seed}]}}"#))?;
    let o = vpr_trial(&cfg, &VprSetup::new(&cfg)?, 10, Some(seed))?;
    let m = &o.metrics;
    println!("s = {}: unrounded l1 {:.5}, rounded l1 {:.5} ({} zero entries)", m.s_star, m.l1_error, m.l1_error_rounded, m.zero_phases);
    println!("peaks unrounded {:?}\npeaks rounded   {:?}", m.peaks.retrieved, m.peaks_rounded.retrieved);
    Ok(())
}
