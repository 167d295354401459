//! Closed-form CNOT counts and depths for k Trotter layers, with and without
//! phase retrieval (control-free circuits versus controlled evolution).

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Transverse-field Ising chain.
    Tfim1d,
    /// Spinless Fermi-Hubbard on an n x n grid, compact encoding.
    Fh2dSpinless,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hardware {
    AllToAll,
    Line1d,
    Grid2d,
}

/// Which GHZ-distribution depth to charge the controlled FH2D circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GhzDepth {
    /// 3(n - 2), the tabulated value.
    #[default]
    Table,
    /// ceil(3(n - 2) / 2), the value quoted in the appendix prose.
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostQuery {
    pub model: Model,
    pub hardware: Hardware,
    pub n: u64,
    pub k: u64,
    pub use_pr: bool,
    #[serde(default)]
    pub ghz_depth: GhzDepth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostResult {
    pub cnots: u64,
    pub depth: u64,
}

impl CostQuery {
    pub fn new(model: Model, hardware: Hardware, n: u64, k: u64, use_pr: bool) -> Self {
        Self { model, hardware, n, k, use_pr, ghz_depth: GhzDepth::Table }
    }

    pub fn with_pr(self, use_pr: bool) -> Self {
        Self { use_pr, ..self }
    }
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

fn ceil_log2(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros() as u64
    }
}

pub fn trotter_cost(q: &CostQuery) -> Result<CostResult> {
    let (n, k) = (q.n, q.k);
    if n == 0 || k == 0 {
        return Err(Error::InvalidCostQuery(format!("n and k must be positive (n={n}, k={k})")));
    }
    let r = match (q.model, q.hardware, q.use_pr) {
        (Model::Tfim1d, Hardware::AllToAll | Hardware::Line1d, true) => CostResult { cnots: (2 * n - 2) * k, depth: 4 * k },
        (Model::Tfim1d, Hardware::AllToAll, false) => {
            CostResult { cnots: (6 * n - 4) * k, depth: 2 * ceil_log2(n) + 10 * k }
        }
        (Model::Tfim1d, Hardware::Line1d, false) => {
            CostResult { cnots: 6 * (n - 1) + (6 * n - 4) * k, depth: 6 * ceil_div(n, 2) + 10 * k }
        }
        (Model::Fh2dSpinless, Hardware::Grid2d, use_pr) => {
            if n < 2 {
                return Err(Error::InvalidCostQuery(format!("FH2D needs lattice side n >= 2, got {n}")));
            }
            let pairs = n * (n - 1) / 2;
            if use_pr {
                CostResult { cnots: 32 * k * pairs, depth: 32 * k }
            } else {
                let ghz = match q.ghz_depth {
                    GhzDepth::Table => 3 * (n - 2),
                    GhzDepth::Text => ceil_div(3 * (n - 2), 2),
                };
                CostResult { cnots: 48 * k * pairs + 6 * ceil_div((n - 1) * (n - 1), 2), depth: 48 * k + ghz }
            }
        }
        (m, h, _) => {
            return Err(Error::InvalidCostQuery(format!("no cost model for {m:?} on {h:?} hardware")));
        }
    };
    Ok(r)
}

/// cnots(controlled) / cnots(phase retrieval).
pub fn cnot_ratio(q_pr: &CostQuery, q_ctl: &CostQuery) -> Result<f64> {
    let same = q_pr.model == q_ctl.model && q_pr.hardware == q_ctl.hardware && q_pr.n == q_ctl.n && q_pr.k == q_ctl.k;
    if !same || !q_pr.use_pr || q_ctl.use_pr {
        return Err(Error::InvalidCostQuery("ratio needs one PR and one controlled query on the same instance".into()));
    }
    let pr = trotter_cost(q_pr)?;
    let ctl = trotter_cost(q_ctl)?;
    if pr.cnots == 0 {
        return Err(Error::ZeroCnots);
    }
    Ok(ctl.cnots as f64 / pr.cnots as f64)
}

/// The three (model, hardware) rows of the comparison table.
pub const TABLE_ROWS: [(Model, Hardware, &str); 3] = [
    (Model::Tfim1d, Hardware::AllToAll, "TFIM, all-to-all"),
    (Model::Tfim1d, Hardware::Line1d, "TFIM, 1D"),
    (Model::Fh2dSpinless, Hardware::Grid2d, "FH spinless, 2D"),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub label: String,
    pub model: Model,
    pub hardware: Hardware,
    pub n: u64,
    pub k: u64,
    pub pr: CostResult,
    pub controlled: CostResult,
    pub cnot_ratio: f64,
}

pub fn cost_table(n: u64, k: u64, ghz_depth: GhzDepth) -> Result<Vec<TableRow>> {
    TABLE_ROWS
        .iter()
        .map(|&(model, hardware, label)| {
            let base = CostQuery { model, hardware, n, k, use_pr: true, ghz_depth };
            let pr = trotter_cost(&base)?;
            let controlled = trotter_cost(&base.with_pr(false))?;
            let cnot_ratio = if pr.cnots == 0 { f64::NAN } else { controlled.cnots as f64 / pr.cnots as f64 };
            Ok(TableRow { label: label.to_string(), model, hardware, n, k, pr, controlled, cnot_ratio })
        })
        .collect()
}

pub fn table_markdown(rows: &[TableRow]) -> String {
    let mut s = String::from("| model | n | k | PR CNOTs | PR depth | no-PR CNOTs | no-PR depth | CNOT ratio |\n");
    s.push_str("|---|---|---|---|---|---|---|---|\n");
    for r in rows {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} | {:.3} |",
            r.label, r.n, r.k, r.pr.cnots, r.pr.depth, r.controlled.cnots, r.controlled.depth, r.cnot_ratio
        );
    }
    s
}

pub fn table_csv(rows: &[TableRow]) -> String {
    let mut s = String::from("model,hardware,n,k,pr_cnots,pr_depth,ctl_cnots,ctl_depth,cnot_ratio\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{:?}",
            enum_name(&r.model),
            enum_name(&r.hardware),
            r.n,
            r.k,
            r.pr.cnots,
            r.pr.depth,
            r.controlled.cnots,
            r.controlled.depth,
            r.cnot_ratio
        );
    }
    s
}

fn enum_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|j| j.as_str().map(str::to_owned)).unwrap_or_default()
}

fn parse_enum<T: for<'de> Deserialize<'de>>(s: &str, what: &str) -> Result<T> {
    let norm = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
    serde_json::from_value(serde_json::Value::String(norm)).map_err(|_| Error::InvalidCostQuery(format!("unknown {what} '{s}'")))
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tfim" | "tfim1d" | "tfim_1d" => Ok(Model::Tfim1d),
            "fh2d" | "fh" | "fh2d_spinless" => Ok(Model::Fh2dSpinless),
            other => parse_enum(other, "model"),
        }
    }
}

impl FromStr for Hardware {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all" | "all_to_all" | "all-to-all" | "alltoall" => Ok(Hardware::AllToAll),
            "1d" | "line" | "line1d" | "line_1d" => Ok(Hardware::Line1d),
            "2d" | "grid" | "grid2d" | "grid_2d" => Ok(Hardware::Grid2d),
            other => parse_enum(other, "hardware"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(model: Model, hw: Hardware, n: u64, k: u64, pr: bool) -> CostQuery {
        CostQuery::new(model, hw, n, k, pr)
    }

    #[test]
    fn depth_budget_claims() {
        let pr = trotter_cost(&q(Model::Tfim1d, Hardware::Line1d, 100, 25, true)).unwrap();
        assert_eq!(pr.depth, 100);
        let ctl = trotter_cost(&q(Model::Tfim1d, Hardware::Line1d, 100, 1, false)).unwrap();
        assert_eq!(ctl.depth, 310);
    }

    #[test]
    fn small_all_to_all() {
        assert_eq!(trotter_cost(&q(Model::Tfim1d, Hardware::AllToAll, 2, 1, true)).unwrap().cnots, 2);
        assert_eq!(trotter_cost(&q(Model::Tfim1d, Hardware::AllToAll, 2, 1, false)).unwrap().cnots, 8);
    }

    #[test]
    fn ratios() {
        let base = q(Model::Tfim1d, Hardware::AllToAll, 1, 5, true);
        assert!(matches!(cnot_ratio(&base, &base.with_pr(false)), Err(Error::ZeroCnots)));
        let big = q(Model::Tfim1d, Hardware::Line1d, 1_000_000, 100_000, true);
        assert!((cnot_ratio(&big, &big.with_pr(false)).unwrap() - 3.0).abs() < 1e-3);
        let fh = q(Model::Fh2dSpinless, Hardware::Grid2d, 10_000, 10_000, true);
        assert!((cnot_ratio(&fh, &fh.with_pr(false)).unwrap() - 1.5).abs() < 1e-4);
    }

    #[test]
    fn invalid_combinations() {
        assert!(trotter_cost(&q(Model::Tfim1d, Hardware::Grid2d, 4, 1, true)).is_err());
        assert!(trotter_cost(&q(Model::Fh2dSpinless, Hardware::Line1d, 4, 1, true)).is_err());
        assert!(trotter_cost(&q(Model::Tfim1d, Hardware::Line1d, 4, 0, true)).is_err());
    }

    #[test]
    fn ghz_variant() {
        let mut c = q(Model::Fh2dSpinless, Hardware::Grid2d, 7, 1, false);
        assert_eq!(trotter_cost(&c).unwrap().depth, 48 + 15);
        c.ghz_depth = GhzDepth::Text;
        assert_eq!(trotter_cost(&c).unwrap().depth, 48 + 8);
    }

    #[test]
    fn parsing() {
        assert_eq!("tfim".parse::<Model>().unwrap(), Model::Tfim1d);
        assert_eq!("all-to-all".parse::<Hardware>().unwrap(), Hardware::AllToAll);
        assert_eq!("2d".parse::<Hardware>().unwrap(), Hardware::Grid2d);
        assert!("ring".parse::<Hardware>().is_err());
    }
}
