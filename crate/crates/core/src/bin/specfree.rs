use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use specfree::cli::{self, exit_code};
use specfree::gatecost::{table_csv, table_markdown, trotter_cost, CostQuery, GhzDepth, Hardware, Model, TableRow, TABLE_ROWS};

#[derive(Parser)]
#[command(name = "specfree", version, about = "Spectral estimation from magnitude-only time series")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Markdown,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config or manifest file.
    Run { config: PathBuf },
    /// Compare the spectra of two runs.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        result_a: Option<String>,
        #[arg(long)]
        result_b: Option<String>,
        /// Report directory; SPECFREE_OUTPUT_DIR overrides the default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CNOT count and depth with and without phase retrieval.
    Gatecost {
        #[arg(long)]
        model: Model,
        #[arg(long)]
        hardware: Hardware,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        /// Use the appendix-prose GHZ depth for the controlled FH circuit.
        #[arg(long)]
        text_ghz_depth: bool,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

fn execute(cmd: Command) -> specfree::Result<()> {
    match cmd {
        Command::Run { config } => {
            let report = cli::run(&config)?;
            for w in &report.manifest.warnings {
                eprintln!("warning: {w}");
            }
            println!("{} result(s) written to {}", report.manifest.results.len(), report.dir.display());
        }
        Command::Compare { a, b, result_a, result_b, out } => {
            let report = cli::compare(&a, &b, result_a.as_deref(), result_b.as_deref())?;
            let dir = out
                .or_else(|| std::env::var_os(cli::OUTPUT_DIR_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("out/compare"));
            cli::write_compare(&dir, &report)?;
            print!("{}", cli::report_markdown(&report));
        }
        Command::Gatecost { model, hardware, n, k, text_ghz_depth, format } => {
            let ghz_depth = if text_ghz_depth { GhzDepth::Text } else { GhzDepth::Table };
            let base = CostQuery { model, hardware, n, k, use_pr: true, ghz_depth };
            let pr = trotter_cost(&base)?;
            let controlled = trotter_cost(&base.with_pr(false))?;
            let label = TABLE_ROWS
                .iter()
                .find(|r| r.0 == model && r.1 == hardware)
                .map_or_else(|| format!("{model:?}, {hardware:?}"), |r| r.2.to_string());
            let row = TableRow { label, model, hardware, n, k, pr, controlled, cnot_ratio: controlled.cnots as f64 / pr.cnots as f64 };
            match format {
                Format::Markdown => print!("{}", table_markdown(&[row])),
                Format::Csv => print!("{}", table_csv(&[row])),
                Format::Json => println!("{}", serde_json::to_string_pretty(&row)?),
            }
        }
    }
    Ok(())
}
