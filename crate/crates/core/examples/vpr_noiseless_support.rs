//! Noiseless support sweep on a 1x5 Fermi-Hubbard chain with the spectrum
//! truncated to `sigma` bins: lambda_min collapses exactly at s = sigma.
//!
//!     cargo run --release --example vpr_noiseless_support -- [sigma]

use specfree::simcore::{build_fermi_hubbard, FermiHubbardParams, Lattice, QuantumState};
use specfree::vpr::{coupled_secondaries, sweep_support, VprSignals};

fn main() -> specfree::Result<()> {
    let sigma: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(25);
    let lattice = Lattice::new(1, 5, true)?;
    let h = build_fermi_hubbard(&lattice, &FermiHubbardParams::default())?;
    let target = "1010101010".parse()?;
    let phi = QuantumState::basis(&target);
    let secondaries: Vec<_> = coupled_secondaries(&h, &phi, &target, 1, 2, 0)?.iter().map(QuantumState::basis).collect();
    let signals = VprSignals::simulate(&h, &phi, &secondaries, 0.133, 300)?;
    let (signals, start) = signals.truncate_support(sigma)?;
    println!("kept bins {start}..{} of the spectrum", start + sigma - 1);

    let sweep = sweep_support(&signals.ideal_dataset(), 1..=2 * sigma, 1.0)?;
    println!("{:>4} {:>12} {:>12} {:>12}", "s", "lambda_min", "lambda_2", "ratio");
    for r in &sweep.records {
        println!("{:>4} {:>12.3e} {:>12.3e} {:>12.3e}", r.s, r.lambda_min, r.lambda_second, r.lambda_min / r.lambda_second);
    }
    println!("selected s* = {} (flagged: {})", sweep.s_star(), sweep.selection.flagged);
    Ok(())
}
