use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

use super::compare::{compare_entries, write_compare};
use super::config::{Experiment, ExperimentConfig, Method};
use super::experiments::{hio_trial, vpr_trial, HioSetup, VprSetup};
use super::manifest::{write_json, Grid, Manifest, ResultEntry, MANIFEST_FILE, SCHEMA_VERSION};
use crate::dsp::io::{write_grid_binary, write_residual_csv, write_spectrum_csv};
use crate::gatecost::{cost_table, table_csv, table_markdown};
use crate::{Error, Result};

/// The only environment setting: replaces the config's `output_dir`.
pub const OUTPUT_DIR_ENV: &str = "SPECFREE_OUTPUT_DIR";

pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(&cfg.output_dir))
}

pub struct RunReport {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub seconds: BTreeMap<String, f64>,
}

/// Loads a config (or a manifest) from `path` and runs it.
pub fn run(path: &Path) -> Result<RunReport> {
    let cfg = ExperimentConfig::load(path)?;
    let dir = output_dir(&cfg);
    run_config(&cfg, &dir)
}

struct Collector<'a> {
    dir: &'a Path,
    results: Vec<ResultEntry>,
    seconds: BTreeMap<String, f64>,
}

impl Collector<'_> {
    fn result_dir(&self, name: &str) -> Result<(PathBuf, String)> {
        let rel = format!("results/{name}");
        let path = self.dir.join(&rel);
        std::fs::create_dir_all(&path).map_err(|e| Error::io(&path, e))?;
        Ok((path, rel))
    }
}

fn seeds_for(noisy: bool, seeds: &[u64]) -> Vec<Option<u64>> {
    if noisy {
        seeds.iter().copied().map(Some).collect()
    } else {
        vec![None]
    }
}

fn seed_tag(seed: Option<u64>) -> String {
    seed.map_or("noiseless".to_string(), |s| format!("seed{s}"))
}

fn run_vpr(cfg: &ExperimentConfig, out: &mut Collector) -> Result<()> {
    let t0 = Instant::now();
    let setup = VprSetup::new(cfg)?;
    out.seconds.insert("vpr_setup".into(), t0.elapsed().as_secs_f64());
    let dt = cfg.dt.expect("validated");
    for &r in &cfg.r_values {
        for seed in seeds_for(cfg.shots.is_some(), &cfg.seeds) {
            let name = format!("vpr_r{r}_{}", seed_tag(seed));
            let t = Instant::now();
            let o = vpr_trial(cfg, &setup, r, seed)?;
            let (path, rel) = out.result_dir(&name)?;
            let mut artifacts = BTreeMap::new();
            let mut save = |role: &str, file: &str| artifacts.insert(role.to_string(), format!("{rel}/{file}"));
            write_spectrum_csv(&path.join("ideal_spectrum.csv"), &setup.ideal)?;
            save("ideal_spectrum", "ideal_spectrum.csv");
            write_spectrum_csv(&path.join("retrieved_spectrum.csv"), &o.retrieved)?;
            save("retrieved_spectrum", "retrieved_spectrum.csv");
            write_spectrum_csv(&path.join("retrieved_rounded_spectrum.csv"), &o.retrieved_rounded)?;
            save("retrieved_rounded_spectrum", "retrieved_rounded_spectrum.csv");
            o.sweep.write_csv(&path.join("sweep.csv"))?;
            save("sweep", "sweep.csv");
            out.results.push(ResultEntry {
                name: name.clone(),
                method: "vpr".into(),
                seed,
                r_count: Some(r),
                grid: Some(Grid { n: cfg.n, dt, m: None, dz: None }),
                n_s: o.n_s,
                n_s_rule: Some(format!("(3R + 1) signals x N time points x shots = {} x {} x shots", 3 * r + 1, cfg.n)),
                artifacts,
                metrics: serde_json::to_value(&o.metrics)?,
            });
            out.seconds.insert(name, t.elapsed().as_secs_f64());
        }
    }
    Ok(())
}

fn run_hio(cfg: &ExperimentConfig, out: &mut Collector) -> Result<()> {
    let t0 = Instant::now();
    let setup = HioSetup::new(cfg)?;
    out.seconds.insert("hio_setup".into(), t0.elapsed().as_secs_f64());
    let dt = cfg.dt.expect("validated");
    for seed in seeds_for(cfg.hio_shots.is_some(), &cfg.seeds) {
        let name = format!("hio_m{}_{}", cfg.m, seed_tag(seed));
        let t = Instant::now();
        let o = hio_trial(cfg, &setup, seed)?;
        let (path, rel) = out.result_dir(&name)?;
        let mut artifacts = BTreeMap::new();
        let mut save = |role: &str, file: &str| artifacts.insert(role.to_string(), format!("{rel}/{file}"));
        write_spectrum_csv(&path.join("ideal_spectrum.csv"), &setup.ideal)?;
        save("ideal_spectrum", "ideal_spectrum.csv");
        write_spectrum_csv(&path.join("retrieved_spectrum.csv"), &o.retrieved)?;
        save("retrieved_spectrum", "retrieved_spectrum.csv");
        write_residual_csv(&path.join("residuals.csv"), &o.state.residual_history)?;
        save("residuals", "residuals.csv");
        write_grid_binary(&path.join("spectrum_2d.bin"), &o.spectrum_2d.real_part())?;
        save("spectrum_2d", "spectrum_2d.bin");
        out.results.push(ResultEntry {
            name: name.clone(),
            method: "hio".into(),
            seed,
            r_count: None,
            grid: Some(Grid { n: cfg.n, dt, m: Some(cfg.m), dz: Some(setup.dz) }),
            n_s: o.n_s,
            n_s_rule: Some(format!(
                "ceil(N M / 2) = {} non-redundant (j, l) entries x shots; f(-t,-z) = conj f(t,z) covers the other half",
                crate::hio2d::sampled_entries(cfg.n, cfg.m)
            )),
            artifacts,
            metrics: serde_json::to_value(&o.metrics)?,
        });
        out.seconds.insert(name, t.elapsed().as_secs_f64());
    }
    Ok(())
}

fn run_gatecost(cfg: &ExperimentConfig, out: &mut Collector) -> Result<()> {
    let rows = cost_table(cfg.n as u64, cfg.k, cfg.ghz_depth)?;
    let name = "gatecost_table";
    let (path, rel) = out.result_dir(name)?;
    let csv_path = path.join("gatecost_table.csv");
    std::fs::write(&csv_path, table_csv(&rows)).map_err(|e| Error::io(&csv_path, e))?;
    let md_path = path.join("gatecost_table.md");
    std::fs::write(&md_path, table_markdown(&rows)).map_err(|e| Error::io(&md_path, e))?;
    let artifacts = BTreeMap::from([
        ("table_csv".to_string(), format!("{rel}/gatecost_table.csv")),
        ("table_markdown".to_string(), format!("{rel}/gatecost_table.md")),
    ]);
    out.results.push(ResultEntry {
        name: name.into(),
        method: "gatecost".into(),
        seed: None,
        r_count: None,
        grid: None,
        n_s: None,
        n_s_rule: None,
        artifacts,
        metrics: json!({ "rows": rows }),
    });
    Ok(())
}

fn warnings(cfg: &ExperimentConfig) -> Vec<String> {
    let mut w = Vec::new();
    if let (Some(res), Some(dt)) = (cfg.resolution, cfg.dt) {
        let bound = 4.0 * std::f64::consts::PI / (cfg.n as f64 * dt);
        if res < bound {
            w.push(format!("requested resolution {res} is finer than the main-lobe width 4 pi / T = {bound}"));
        }
    }
    w
}

/// Runs a resolved config, writing all artifacts under `dir`.
pub fn run_config(cfg: &ExperimentConfig, dir: &Path) -> Result<RunReport> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let start = Instant::now();
    let mut out = Collector { dir, results: Vec::new(), seconds: BTreeMap::new() };
    if cfg.experiment == Experiment::GatecostTable {
        run_gatecost(cfg, &mut out)?;
    }
    if cfg.has(Method::Vpr) {
        run_vpr(cfg, &mut out)?;
    }
    if cfg.has(Method::Hio) {
        run_hio(cfg, &mut out)?;
    }
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        experiment: cfg.experiment.name().to_string(),
        config: serde_json::to_value(cfg)?,
        warnings: warnings(cfg),
        results: out.results,
    };
    let metrics: BTreeMap<&str, &serde_json::Value> = manifest.results.iter().map(|r| (r.name.as_str(), &r.metrics)).collect();
    write_json(&dir.join("metrics.json"), &json!({ "experiment": manifest.experiment, "results": metrics }))?;
    if cfg.experiment == Experiment::HeadToHead {
        let vpr = manifest.results.iter().find(|r| r.method == "vpr");
        let hio = manifest.results.iter().find(|r| r.method == "hio");
        if let (Some(a), Some(b)) = (vpr, hio) {
            let report = compare_entries((&manifest, dir, a), (&manifest, dir, b))?;
            write_compare(dir, &report)?;
        }
    }
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    let mut seconds = out.seconds;
    seconds.insert("total".into(), start.elapsed().as_secs_f64());
    write_json(&dir.join("timing.json"), &seconds)?;
    Ok(RunReport { dir: dir.to_path_buf(), manifest, seconds })
}
