//! Experiment configuration, read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use swapcomb_core::rng::RNG_NAME;

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    SwapCombcp,
    SwapComband,
    CombexpReplica,
    ExpWeightsBaseline,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::SwapCombcp => "swap_combcp",
            Algorithm::SwapComband => "swap_comband",
            Algorithm::CombexpReplica => "combexp_replica",
            Algorithm::ExpWeightsBaseline => "exp_weights_baseline",
        }
    }

    pub fn is_master(self) -> bool {
        matches!(self, Algorithm::SwapCombcp | Algorithm::SwapComband)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    MSets { d: usize, m: usize },
    ShortcutDag {
        n: usize,
        #[serde(default = "yes")]
        leveled: bool,
    },
    DagFile {
        path: PathBuf,
        #[serde(default = "yes")]
        leveled: bool,
    },
    SpanningTrees { vertices: usize, edges: Vec<(usize, usize)> },
    KForests { vertices: usize, edges: Vec<(usize, usize)>, k: usize },
    Permutations { n: usize },
    TruncatedPermutations { k: usize, n: usize },
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AdversarySpec {
    /// Independent Bernoulli rewards per reward coordinate.
    Iid { means: Vec<f64> },
    /// Constant reward vectors on equal-length blocks of the horizon.
    Switching { blocks: Vec<Vec<f64>> },
    /// Reward 1 on the shortcut edge of the shortcut DAG.
    Shortcut,
    /// One CSV row per day.
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    Theory,
    #[default]
    Practical,
}

/// `H`: a fixed value or `"auto"` for `⌈√T⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HSpec {
    Fixed(u64),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoTag {
    Auto,
}

impl Default for HSpec {
    fn default() -> Self {
        HSpec::Auto(AutoTag::Auto)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default)]
    pub mode: ModeSpec,
    #[serde(default)]
    pub h: HSpec,
    pub k: Option<u32>,
    pub gamma: Option<f64>,
    /// Multiplier `c` in the practical learning rate.
    #[serde(default = "one")]
    pub eta_scale: f64,
    /// A learning rate used at every scale, replacing the formula.
    pub eta: Option<f64>,
    #[serde(default = "two")]
    pub spanner_c: f64,
    /// Restart on epochs of length 1, 2, 4, … instead of tuning for `T`.
    #[serde(default)]
    pub doubling: bool,
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

impl Default for Params {
    fn default() -> Self {
        Params {
            mode: ModeSpec::Practical,
            h: HSpec::default(),
            k: None,
            gamma: None,
            eta_scale: 1.0,
            eta: None,
            spanner_c: 2.0,
            doubling: false,
        }
    }
}

/// Seeds as an explicit list or a count starting at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    List(Vec<u64>),
    Count(u64),
}

impl SeedSpec {
    pub fn seeds(&self) -> Vec<u64> {
        match self {
            SeedSpec::List(v) => v.clone(),
            SeedSpec::Count(n) => (0..*n).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub algorithm: Algorithm,
    /// One run per horizon and seed.
    pub horizons: Vec<u64>,
    pub seeds: SeedSpec,
    #[serde(default = "default_rng")]
    pub rng: String,
    /// Days between prefix-regret rows; defaults to `max(1, T/500)`.
    pub stride: Option<u64>,
    /// Record per-scale instrumentation and check the decomposition bound.
    #[serde(default)]
    pub audit: bool,
    pub domain: DomainSpec,
    pub adversary: AdversarySpec,
    #[serde(default)]
    pub params: Params,
}

fn default_rng() -> String {
    RNG_NAME.to_string()
}

fn field(path: &str, msg: impl Into<String>) -> BenchError {
    BenchError::Config(format!("{path}: {}", msg.into()))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config; relative file paths inside it resolve against the
    /// config's directory.
    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::Io(path.to_path_buf(), e))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| match e {
            BenchError::Config(m) => BenchError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let DomainSpec::DagFile { path, .. } = &mut cfg.domain {
            fix(path);
        }
        if let AdversarySpec::File { path } = &mut cfg.adversary {
            fix(path);
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.rng != RNG_NAME {
            return Err(field("rng", format!("unsupported generator {:?}; this build provides {RNG_NAME:?}", self.rng)));
        }
        if self.seeds.seeds().is_empty() {
            return Err(field("seeds", "at least one seed is required"));
        }
        if self.horizons.is_empty() || self.horizons.contains(&0) {
            return Err(field("horizons", "need at least one positive horizon"));
        }
        if self.stride == Some(0) {
            return Err(field("stride", "must be positive"));
        }
        let p = &self.params;
        if p.mode == ModeSpec::Theory {
            let overridden = [
                ("params.h", p.h != HSpec::default()),
                ("params.k", p.k.is_some()),
                ("params.gamma", p.gamma.is_some()),
                ("params.eta", p.eta.is_some()),
                ("params.eta_scale", p.eta_scale != 1.0),
            ];
            if let Some((name, _)) = overridden.iter().find(|(_, o)| *o) {
                return Err(field(name, "theory mode fixes this parameter; switch to practical mode to set it"));
            }
        }
        if let Some(g) = p.gamma {
            if !(g > 0.0 && g <= 1.0) {
                return Err(field("params.gamma", format!("must lie in (0, 1], got {g}")));
            }
        }
        if let Some(e) = p.eta {
            if !(e > 0.0 && e.is_finite()) {
                return Err(field("params.eta", format!("must be positive, got {e}")));
            }
        }
        if !(p.eta_scale > 0.0 && p.eta_scale.is_finite()) {
            return Err(field("params.eta_scale", "must be positive"));
        }
        if p.k == Some(0) {
            return Err(field("params.k", "need at least one scale"));
        }
        if let HSpec::Fixed(h) = p.h {
            if h < 2 {
                return Err(field("params.h", format!("must be at least 2, got {h}")));
            }
        }
        if p.spanner_c < 1.0 {
            return Err(field("params.spanner_c", "must be at least 1"));
        }
        if self.audit && !self.algorithm.is_master() {
            return Err(field("audit", "the decomposition audit needs a multi-scale algorithm"));
        }
        if self.audit && p.doubling {
            return Err(field("audit", "the decomposition audit needs a single epoch"));
        }
        if matches!(self.adversary, AdversarySpec::Shortcut) && !matches!(self.domain, DomainSpec::ShortcutDag { .. }) {
            return Err(field("adversary", "the shortcut adversary needs the shortcut_dag domain"));
        }
        Ok(())
    }

    /// Prefix-regret stride for horizon `t`.
    pub fn stride_for(&self, t: u64) -> u64 {
        self.stride.unwrap_or((t / 500).max(1))
    }
}
