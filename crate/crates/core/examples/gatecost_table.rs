//! CNOT counts and depths with and without phase retrieval, plus the depth
//! budget arithmetic for a 100-qubit Ising chain.
//!
//!     cargo run --example gatecost_table -- [n] [k]

use specfree::gatecost::{cost_table, table_markdown, trotter_cost, CostQuery, GhzDepth, Hardware, Model};

fn main() -> specfree::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u64>().ok());
    let n = args.next().flatten().unwrap_or(100);
    let k = args.next().flatten().unwrap_or(25);
    print!("{}", table_markdown(&cost_table(n, k, GhzDepth::Table)?));

    let budget = 100;
    let q = CostQuery::new(Model::Tfim1d, Hardware::Line1d, 100, 1, true);
    let pr = trotter_cost(&q)?.depth;
    let ctl_one = trotter_cost(&q.with_pr(false))?.depth;
    println!("\ndepth budget {budget}: {} control-free layers; one controlled layer already needs depth {ctl_one}", budget / pr);
    Ok(())
}
