//! Experiment configuration: a permissive input form with defaults left out,
//! and the fully resolved form recorded in every manifest.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize};

use crate::dsp::WindowKind;
use crate::hio2d::{HioConfig, InitStrategy};
use crate::gatecost::GhzDepth;
use crate::simcore::{BitString, FermiHubbardParams, Lattice, QuantumState};
use crate::vpr::SupportStrategy;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    VprNoiselessSupport,
    VprRResilience,
    #[serde(rename = "hio_2x2")]
    Hio2x2,
    HeadToHead,
    GatecostTable,
    Custom,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::VprNoiselessSupport => "vpr_noiseless_support",
            Experiment::VprRResilience => "vpr_r_resilience",
            Experiment::Hio2x2 => "hio_2x2",
            Experiment::HeadToHead => "head_to_head",
            Experiment::GatecostTable => "gatecost_table",
            Experiment::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Vpr,
    Hio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub rows: usize,
    pub cols: usize,
    #[serde(default = "yes")]
    pub spinful: bool,
    #[serde(default)]
    pub periodic: bool,
}

fn yes() -> bool {
    true
}

impl LatticeSpec {
    pub fn build(&self) -> Result<Lattice> {
        Lattice::new(self.rows, self.cols, self.spinful)
            .map(|l| l.with_periodic(self.periodic))
            .map_err(|e| Error::validation("lattice", e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateTerm {
    pub bits: String,
    /// [re, im]; normalization happens after summing.
    #[serde(default = "unit_coeff")]
    pub coeff: [f64; 2],
}

fn unit_coeff() -> [f64; 2] {
    [1.0, 0.0]
}

/// `"uniform"`, a bitstring such as `"1010101010"`, or a list of terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named(String),
    Terms(Vec<StateTerm>),
}

impl StateSpec {
    pub fn build(&self, modes: usize, field: &str) -> Result<QuantumState> {
        let bad = |reason: String| Error::validation(field, reason);
        let basis = |bits: &str| -> Result<QuantumState> {
            let b: BitString = bits.parse().map_err(|e: Error| bad(e.to_string()))?;
            if b.len() != modes {
                return Err(bad(format!("bitstring \"{bits}\" has {} bits, lattice has {modes} modes", b.len())));
            }
            Ok(QuantumState::basis(&b))
        };
        match self {
            StateSpec::Named(s) if s == "uniform" => Ok(QuantumState::uniform(modes)),
            StateSpec::Named(s) => basis(s),
            StateSpec::Terms(terms) if terms.is_empty() => Err(bad("needs at least one term".into())),
            StateSpec::Terms(terms) => {
                let parts = terms
                    .iter()
                    .map(|t| Ok((C64::new(t.coeff[0], t.coeff[1]), basis(&t.bits)?)))
                    .collect::<Result<Vec<_>>>()?;
                QuantumState::superposition(&parts).map_err(|e| bad(e.to_string()))
            }
        }
    }

    /// The bitstring that secondary states are derived from.
    pub fn target_bits(&self, field: &str) -> Result<BitString> {
        let s = match self {
            StateSpec::Named(s) if s == "uniform" => {
                return Err(Error::validation(field, "secondary states need a bitstring target, not \"uniform\""))
            }
            StateSpec::Named(s) => s,
            StateSpec::Terms(t) => &t.first().ok_or_else(|| Error::validation(field, "needs at least one term"))?.bits,
        };
        s.parse().map_err(|e: Error| Error::validation(field, e.to_string()))
    }
}

/// Distinguishes an explicit `null` (Some(None)) from an absent key (None).
fn nullable<'de, D, T>(d: D) -> std::result::Result<Option<Option<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    Option::<T>::deserialize(d).map(Some)
}

/// Config as written by a user. Absent keys take per-experiment defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub experiment: Option<Experiment>,
    pub output_dir: Option<String>,
    pub methods: Option<Vec<Method>>,
    pub lattice: Option<LatticeSpec>,
    pub params: Option<FermiHubbardParams>,
    #[serde(default, deserialize_with = "nullable")]
    pub dt: Option<Option<f64>>,
    pub n: Option<usize>,
    #[serde(default, deserialize_with = "nullable")]
    pub resolution: Option<Option<f64>>,
    pub seeds: Option<Vec<u64>>,

    pub phi: Option<StateSpec>,
    pub r_values: Option<Vec<usize>>,
    pub r_count: Option<usize>,
    pub flips_per_state: Option<usize>,
    pub state_seed: Option<u64>,
    #[serde(default, deserialize_with = "nullable")]
    pub sigma: Option<Option<usize>>,
    #[serde(default, deserialize_with = "nullable")]
    pub shots: Option<Option<u64>>,
    pub weight: Option<f64>,
    pub s_range: Option<[usize; 2]>,
    pub strategy: Option<SupportStrategy>,

    pub psi: Option<StateSpec>,
    pub m: Option<usize>,
    #[serde(default, deserialize_with = "nullable")]
    pub dz: Option<Option<f64>>,
    #[serde(default, deserialize_with = "nullable")]
    pub normalize_band: Option<Option<[f64; 2]>>,
    pub window: Option<WindowKind>,
    #[serde(default, deserialize_with = "nullable")]
    pub hio_shots: Option<Option<u64>>,
    pub beta: Option<f64>,
    pub iterations: Option<usize>,
    pub restarts: Option<usize>,
    pub hio_seed: Option<u64>,
    pub anchor_row0: Option<bool>,
    pub init: Option<InitStrategy>,

    pub peak_rel_height: Option<f64>,
    pub peak_min_separation: Option<usize>,
    pub peak_tolerance: Option<usize>,

    pub k: Option<u64>,
    pub ghz_depth: Option<GhzDepth>,
}

/// Every parameter of a run, defaults materialized. Serializes with the
/// same keys [`RawConfig`] reads, so a manifest's config re-runs as is.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub output_dir: String,
    pub methods: Vec<Method>,
    pub lattice: LatticeSpec,
    pub params: FermiHubbardParams,
    pub dt: Option<f64>,
    pub n: usize,
    /// Energy resolution the user wants; a warning is issued below 4 pi / T.
    pub resolution: Option<f64>,
    /// Shot-noise seeds; every seed gives one result per method and R.
    pub seeds: Vec<u64>,

    pub phi: StateSpec,
    pub r_values: Vec<usize>,
    pub flips_per_state: usize,
    pub state_seed: u64,
    /// Artificial support truncation of the VPR signals.
    pub sigma: Option<usize>,
    /// VPR shots per signal per time point; null is noiseless.
    pub shots: Option<u64>,
    pub weight: f64,
    pub s_range: [usize; 2],
    pub strategy: SupportStrategy,

    pub psi: StateSpec,
    pub m: usize,
    /// Virtual-time step; null means N dt / M.
    pub dz: Option<f64>,
    pub normalize_band: Option<[f64; 2]>,
    pub window: WindowKind,
    /// HIO shots per sampled (j, l) entry; null is noiseless.
    pub hio_shots: Option<u64>,
    pub beta: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub hio_seed: u64,
    pub anchor_row0: bool,
    pub init: InitStrategy,

    pub peak_rel_height: f64,
    pub peak_min_separation: usize,
    pub peak_tolerance: usize,

    pub k: u64,
    pub ghz_depth: GhzDepth,
}

pub const HEAD_TO_HEAD_TERMS: [&str; 3] = ["01010101", "11010110", "01110111"];

fn alternating(modes: usize) -> String {
    (0..modes).map(|i| if i % 2 == 0 { '1' } else { '0' }).collect()
}

fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        // serde names the offending key in backticks for unknown/missing fields
        let field = msg.split('`').nth(1).filter(|_| msg.contains("field")).unwrap_or("config").to_string();
        Error::validation(field, msg)
    })
}

impl RawConfig {
    /// Accepts either a config or a manifest (whose `config` is used).
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = parse_json(text)?;
        let inner = match value.get("schema_version") {
            Some(_) => value.get("config").cloned().ok_or_else(|| Error::validation("config", "manifest has no config"))?,
            None => value,
        };
        parse_json(&inner.to_string())
    }

    pub fn resolve(self) -> Result<ExperimentConfig> {
        let experiment = self.experiment.ok_or_else(|| Error::validation("experiment", "required"))?;
        use Experiment::*;
        let methods = match experiment {
            VprNoiselessSupport | VprRResilience => vec![Method::Vpr],
            Hio2x2 => vec![Method::Hio],
            HeadToHead => vec![Method::Vpr, Method::Hio],
            GatecostTable => vec![],
            Custom => self.methods.clone().ok_or_else(|| Error::validation("methods", "required for custom experiments"))?,
        };
        if experiment != Custom && self.methods.as_ref().is_some_and(|m| *m != methods) {
            return Err(Error::validation("methods", format!("fixed for {}", experiment.name())));
        }
        let lattice = self.lattice.unwrap_or(match experiment {
            Hio2x2 | HeadToHead => LatticeSpec { rows: 2, cols: 2, spinful: true, periodic: false },
            _ => LatticeSpec { rows: 1, cols: 5, spinful: true, periodic: false },
        });
        let modes = lattice.rows * lattice.cols * if lattice.spinful { 2 } else { 1 };
        let dt = match self.dt {
            Some(v) => v,
            None if experiment == GatecostTable => None,
            None => return Err(Error::validation("dt", format!("required for {}", experiment.name()))),
        };
        let head_phi = || StateSpec::Terms(HEAD_TO_HEAD_TERMS.iter().map(|b| StateTerm { bits: b.to_string(), coeff: unit_coeff() }).collect());
        let phi = self.phi.unwrap_or_else(|| if experiment == HeadToHead { head_phi() } else { StateSpec::Named(alternating(modes)) });
        let psi = self.psi.unwrap_or_else(|| if experiment == HeadToHead { phi.clone() } else { StateSpec::Named("uniform".into()) });
        let n = self.n.unwrap_or(match experiment {
            Hio2x2 => 225,
            HeadToHead => 125,
            GatecostTable => 100,
            _ => 300,
        });
        let r_values = match (self.r_values, self.r_count) {
            (Some(_), Some(_)) => return Err(Error::validation("r_count", "give either r_count or r_values")),
            (Some(v), None) => v,
            (None, Some(r)) => vec![r],
            (None, None) => match experiment {
                VprRResilience => vec![1, 10],
                HeadToHead => vec![10],
                _ => vec![1],
            },
        };
        let shots = self.shots.unwrap_or(match experiment {
            VprRResilience => Some(1_000_000),
            HeadToHead => Some(100_000),
            _ => None,
        });
        let m = self.m.unwrap_or(if experiment == Hio2x2 { 225 } else { 25 });
        let hio_shots = match self.hio_shots {
            Some(v) => v,
            // matched budget: the HIO side gets what VPR's largest R spends
            None if experiment == HeadToHead => match shots {
                Some(s) => {
                    let r = r_values.iter().copied().max().unwrap_or(1) as u128;
                    let budget = (3 * r + 1) * n as u128 * s as u128;
                    let per = budget / crate::hio2d::sampled_entries(n, m).max(1) as u128;
                    Some(u64::try_from(per).map_err(|_| Error::validation("hio_shots", "matched budget overflows"))?)
                }
                None => None,
            },
            None => None,
        };
        let hio = HioConfig::default();
        let cfg = ExperimentConfig {
            experiment,
            output_dir: self.output_dir.unwrap_or_else(|| format!("out/{}", experiment.name())),
            methods,
            lattice,
            params: self.params.unwrap_or_default(),
            dt,
            n,
            resolution: self.resolution.flatten(),
            seeds: self.seeds.unwrap_or(match experiment {
                VprRResilience => vec![1, 2, 3, 4, 5],
                HeadToHead => vec![1],
                _ => vec![0],
            }),
            phi,
            r_values,
            flips_per_state: self.flips_per_state.unwrap_or(2),
            state_seed: self.state_seed.unwrap_or(0),
            sigma: self.sigma.unwrap_or(if experiment == VprNoiselessSupport { Some(25) } else { None }),
            shots,
            weight: self.weight.unwrap_or(1.0),
            s_range: self.s_range.unwrap_or(match experiment {
                VprNoiselessSupport => [1, 50],
                VprRResilience => [95, 110],
                _ => [1, (n / 2).max(1)],
            }),
            strategy: self.strategy.unwrap_or(match experiment {
                VprRResilience => SupportStrategy::Manual { s: 105 },
                _ => SupportStrategy::MaxDropRatio,
            }),
            psi,
            m,
            dz: self.dz.flatten(),
            normalize_band: self.normalize_band.unwrap_or(if experiment == Hio2x2 { Some([0.0, std::f64::consts::PI]) } else { None }),
            window: self.window.unwrap_or(WindowKind::Triangular),
            hio_shots,
            beta: self.beta.unwrap_or(hio.beta),
            iterations: self.iterations.unwrap_or(hio.iterations),
            restarts: self.restarts.unwrap_or(hio.restarts),
            hio_seed: self.hio_seed.unwrap_or(hio.seed),
            anchor_row0: self.anchor_row0.unwrap_or(hio.anchor_row0),
            init: self.init.unwrap_or(hio.init),
            peak_rel_height: self.peak_rel_height.unwrap_or(0.1),
            peak_min_separation: self.peak_min_separation.unwrap_or(3),
            peak_tolerance: self.peak_tolerance.unwrap_or(1),
            k: self.k.unwrap_or(25),
            ghz_depth: self.ghz_depth.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        RawConfig::from_json(text)?.resolve()
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn has(&self, method: Method) -> bool {
        self.methods.contains(&method)
    }

    pub fn hio_config(&self) -> HioConfig {
        HioConfig {
            beta: self.beta,
            iterations: self.iterations,
            restarts: self.restarts,
            seed: self.hio_seed,
            anchor_row0: self.anchor_row0,
            init: self.init,
        }
    }

    fn validate(&self) -> Result<()> {
        fn v(field: &str, reason: impl Into<String>) -> Error {
            Error::validation(field, reason)
        }
        if self.experiment == Experiment::GatecostTable {
            if self.n == 0 || self.k == 0 {
                return Err(v(if self.n == 0 { "n" } else { "k" }, "must be positive"));
            }
            return Ok(());
        }
        let lattice = self.lattice.build()?;
        // checked before any state vector is allocated
        let cap = crate::simcore::DEFAULT_DIM_CAP;
        match lattice.hilbert_dim() {
            Some(d) if d <= cap as u128 => {}
            d => return Err(Error::DeskScaleExceeded { required: d.unwrap_or(u128::MAX), cap }),
        }
        let modes = lattice.modes();
        if self.methods.is_empty() {
            return Err(v("methods", "at least one method is needed"));
        }
        match self.dt {
            Some(dt) if dt.is_finite() && dt > 0.0 => {}
            _ => return Err(v("dt", "must be a positive number")),
        }
        if self.n < 2 {
            return Err(v("n", "needs at least 2 time points"));
        }
        if self.seeds.is_empty() {
            return Err(v("seeds", "needs at least one seed"));
        }
        if !(self.params.tau.is_finite() && self.params.u.is_finite()) {
            return Err(v("params", "tau and u must be finite"));
        }
        if self.resolution.is_some_and(|r| !(r > 0.0)) {
            return Err(v("resolution", "must be positive"));
        }
        if !(self.peak_rel_height > 0.0 && self.peak_rel_height <= 1.0) {
            return Err(v("peak_rel_height", "must lie in (0, 1]"));
        }
        if self.has(Method::Vpr) {
            self.phi.build(modes, "phi")?;
            self.phi.target_bits("phi")?;
            if self.r_values.is_empty() || self.r_values.contains(&0) {
                return Err(v("r_values", "every R must be at least 1"));
            }
            if self.flips_per_state == 0 {
                return Err(v("flips_per_state", "must be at least 1"));
            }
            if self.sigma.is_some_and(|s| s == 0 || s > self.n) {
                return Err(v("sigma", format!("must lie in 1..={}", self.n)));
            }
            if self.shots == Some(0) {
                return Err(v("shots", "must be positive (null for noiseless)"));
            }
            if !(self.weight.is_finite() && self.weight > 0.0) {
                return Err(v("weight", "must be positive"));
            }
            let [lo, hi] = self.s_range;
            if lo == 0 || lo > hi || hi >= self.n {
                return Err(v("s_range", format!("need 1 <= lo <= hi < n, got [{lo}, {hi}]")));
            }
            if let SupportStrategy::Manual { s } = self.strategy {
                if s == 0 || s >= self.n {
                    return Err(v("strategy", format!("manual s = {s} outside 1..{}", self.n)));
                }
            }
        }
        if self.has(Method::Hio) {
            self.psi.build(modes, "psi")?;
            if self.n.is_multiple_of(2) {
                return Err(v("n", "HIO needs an odd number of time points"));
            }
            if self.m < 3 || self.m.is_multiple_of(2) {
                return Err(v("m", "must be odd and at least 3"));
            }
            if self.dz.is_some_and(|d| !(d.is_finite() && d > 0.0)) {
                return Err(v("dz", "must be positive"));
            }
            if let Some([lo, hi]) = self.normalize_band {
                if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                    return Err(v("normalize_band", "needs finite lo < hi"));
                }
            }
            if self.hio_shots == Some(0) {
                return Err(v("hio_shots", "must be positive (null for noiseless)"));
            }
            self.hio_config().validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_dt_names_the_field() {
        let err = ExperimentConfig::from_json(r#"{"experiment": "hio_2x2"}"#).unwrap_err();
        assert!(matches!(&err, Error::Validation { field, .. } if field == "dt"), "{err}");
    }

    #[test]
    fn unknown_key_is_rejected_by_name() {
        let err = ExperimentConfig::from_json(r#"{"experiment": "custom", "methods": ["vpr"], "dt": 0.1, "bogus": 1}"#).unwrap_err();
        assert!(matches!(&err, Error::Validation { field, .. } if field == "bogus"), "{err}");
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = ExperimentConfig::from_json(r#"{"experiment": "head_to_head", "dt": 0.12}"#).unwrap();
        // VPR budget 31 * 125 * 1e5 over ceil(125 * 25 / 2) = 1563 entries
        assert_eq!(cfg.hio_shots, Some(387_500_000 / 1563));
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn explicit_null_differs_from_absent() {
        let noisy = ExperimentConfig::from_json(r#"{"experiment": "vpr_r_resilience", "dt": 0.133}"#).unwrap();
        assert_eq!(noisy.shots, Some(1_000_000));
        let clean = ExperimentConfig::from_json(r#"{"experiment": "vpr_r_resilience", "dt": 0.133, "shots": null}"#).unwrap();
        assert_eq!(clean.shots, None);
    }

    #[test]
    fn oversized_lattice_hits_the_cap() {
        let err = ExperimentConfig::from_json(r#"{"experiment": "custom", "methods": ["vpr"], "dt": 0.1, "lattice": {"rows": 4, "cols": 4}}"#)
            .unwrap_err();
        assert!(matches!(err, Error::DeskScaleExceeded { required, .. } if required == 1 << 32));
    }

    #[test]
    fn gatecost_needs_no_dt() {
        let cfg = ExperimentConfig::from_json(r#"{"experiment": "gatecost_table", "n": 100, "k": 25}"#).unwrap();
        assert_eq!((cfg.n, cfg.k, cfg.dt), (100, 25, None));
    }

    #[test]
    fn bad_values_name_their_field() {
        for (json, field) in [
            (r#"{"experiment": "hio_2x2", "dt": 0.5, "m": 24}"#, "m"),
            (r#"{"experiment": "hio_2x2", "dt": 0.5, "beta": 2.0}"#, "beta"),
            (r#"{"experiment": "vpr_noiseless_support", "dt": 0.1, "phi": "101"}"#, "phi"),
            (r#"{"experiment": "vpr_noiseless_support", "dt": -1.0}"#, "dt"),
            (r#"{"experiment": "vpr_noiseless_support", "dt": 0.1, "s_range": [5, 400]}"#, "s_range"),
        ] {
            let err = ExperimentConfig::from_json(json).unwrap_err();
            assert!(matches!(&err, Error::Validation { field: f, .. } if f == field), "{json}: {err}");
        }
    }
}
