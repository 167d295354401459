//! VPR (R = 10) against HIO (M = 25) on a 2x2 lattice with the same number
//! of circuit runs, through the experiment runner.
//!
//!     cargo run --release --example head_to_head -- [output dir]

use std::path::PathBuf;

use specfree::cli::{report_markdown, run_config, ExperimentConfig, Manifest};

fn main() -> specfree::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/head_to_head".into()));
    let cfg = ExperimentConfig::from_json(r#"{"experiment": "head_to_head", "dt": 0.12}"#)?;
    println!("VPR shots per signal per point {:?}, HIO shots per entry {:?}", cfg.shots, cfg.hio_shots);
    let report = run_config(&cfg, &dir)?;
    let (manifest, base) = Manifest::load(&report.dir)?;
    let [a, b] = [&manifest.results[0], &manifest.results[1]];
    let cmp = specfree::cli::compare_entries((&manifest, &base, a), (&manifest, &base, b))?;
    print!("{}", report_markdown(&cmp));
    Ok(())
}
