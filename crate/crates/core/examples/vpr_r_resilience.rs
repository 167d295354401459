//! One secondary signal versus ten under 10^6 shots: only R = 10 shows a
//! sharp lambda_min drop, and its spectrum error is lower.
//!
//!     cargo run --release --example vpr_r_resilience -- [seed]

use specfree::cli::{vpr_trial, ExperimentConfig, VprSetup};

fn main() -> specfree::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let cfg = ExperimentConfig::from_json(&format!(
        r#"{{"experiment": "vpr_r_resilience", "dt": 0.133, "seeds": [{seed}], "s_range": [80, 110]}}"#
    ))?;
    let setup = VprSetup::new(&cfg)?;
    for r in [1, 10] {
        let o = vpr_trial(&cfg, &setup, r, Some(seed))?;
        let m = &o.metrics;
        println!("R = {r:>2}: l1 = {:.4}, largest drop x{:.1} at s = {}", m.l1_error, m.max_drop_ratio.unwrap_or(1.0), m.max_drop_s);
        println!("        drop at 105: x{:.2}, top peaks {:?} (ideal {:?})", o.sweep.drop_ratio(105).unwrap_or(f64::NAN), m.peaks.top_retrieved, m.peaks.top_ideal);
    }
    Ok(())
}
