use std::path::{Path, PathBuf};

use clap::ValueEnum;
use phibp::hier::HierModel;
use phibp::laws::MarginalSide;
use phibp::oracle::McReference;
use phibp::quadrature::QuadConfig;
use phibp::sampler::SummaryCaps;
use phibp::stable::StableDualityParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    VerifyDuality,
    Normalize,
    Sample,
    McCompare,
    StableMaster,
    RecoverPitman,
    Marginalize,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::VerifyDuality => "verify-duality",
            Task::Normalize => "normalize",
            Task::Sample => "sample",
            Task::McCompare => "mc-compare",
            Task::StableMaster => "stable-master",
            Task::RecoverPitman => "recover-pitman",
            Task::Marginalize => "marginalize",
        }
    }
}

/// Every n⃗ with J groups, nⱼ ≥ 1 and Σ nⱼ ≤ max_total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountSweep {
    pub groups: usize,
    pub max_total: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub duality: f64,
    pub normalization: f64,
    pub reduction: f64,
    pub gibbs: f64,
    pub frag: f64,
    pub mixing: f64,
    pub recovery: f64,
    pub path_agreement: f64,
    pub p_value: f64,
    pub tv: f64,
    pub marginal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            duality: 1e-10,
            normalization: 1e-9,
            reduction: 1e-12,
            gibbs: 1e-12,
            frag: 1e-12,
            mixing: 1e-10,
            recovery: 1e-8,
            path_agreement: 1e-9,
            p_value: 1e-3,
            tv: 5e-3,
            marginal: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: usize,
    pub max_intervals: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        let q = QuadConfig::default();
        QuadSettings { abs_tol: q.abs_tol, rel_tol: q.rel_tol, max_depth: q.max_depth, max_intervals: q.max_intervals }
    }
}

impl From<QuadSettings> for QuadConfig {
    fn from(q: QuadSettings) -> Self {
        QuadConfig { abs_tol: q.abs_tol, rel_tol: q.rel_tol, max_depth: q.max_depth, max_intervals: q.max_intervals }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub dir: Option<PathBuf>,
    /// Prepended to every output file name.
    pub prefix: String,
}

/// One experiment, read from a single JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub sweep_id: Option<String>,
    #[serde(default)]
    pub task: Option<Task>,
    #[serde(default)]
    pub model: Option<HierModel>,
    #[serde(default)]
    pub stable: Option<StableDualityParams>,
    #[serde(default)]
    pub counts: Option<Vec<usize>>,
    #[serde(default)]
    pub count_sweep: Option<CountSweep>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub draws: Option<u64>,
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default)]
    pub thetas: Option<Vec<f64>>,
    #[serde(default)]
    pub max_n: Option<usize>,
    #[serde(default)]
    pub max_mixing_n: Option<usize>,
    #[serde(default)]
    pub side: Option<MarginalSide>,
    #[serde(default)]
    pub caps: Option<SummaryCaps>,
    #[serde(default)]
    pub reference: Option<McReference>,
    /// Statistics that enter the Monte Carlo criteria; all when absent.
    #[serde(default)]
    pub criteria_statistics: Option<Vec<String>>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub quadrature: QuadSettings,
    #[serde(default)]
    pub output: OutputPaths,
}

/// A configuration problem, reported with exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn missing(task: Task, field: &str) -> ConfigError {
    ConfigError(format!("field `{field}`: required by task {}", task.name()))
}

pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
}

pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        let path = e.path().to_string();
        let text = inner.to_string();
        let msg = text.rsplit_once(" at line ").map_or(text.as_str(), |(m, _)| m);
        ConfigError(format!("line {} column {}, field `{path}`: {msg}", inner.line(), inner.column()))
    })
}

impl ExperimentConfig {
    /// Checks the task-specific fields and parameter domains.
    pub fn validate(&self, task: Task) -> Result<(), ConfigError> {
        if let Some(t) = self.task {
            if t != task {
                return Err(ConfigError(format!("field `task`: config is for {}, command is {}", t.name(), task.name())));
            }
        }
        if let Some(m) = &self.model {
            m.validate().map_err(|e| ConfigError(format!("field `model`: {e}")))?;
        }
        if let Some(s) = &self.stable {
            s.validate().map_err(|e| ConfigError(format!("field `stable`: {e}")))?;
        }
        if let Some(c) = &self.caps {
            if c.phi_bins == 0 || c.x_bins < 2 || c.c_bins < 2 || c.total_bins == 0 {
                return Err(ConfigError("field `caps`: histogram sizes must be positive".into()));
            }
        }
        let needs_counts = matches!(task, Task::VerifyDuality | Task::Normalize | Task::Marginalize);
        if needs_counts && self.counts.is_none() && self.count_sweep.is_none() {
            return Err(missing(task, "counts"));
        }
        match task {
            Task::VerifyDuality | Task::Normalize | Task::Marginalize => {
                if self.model.is_none() {
                    return Err(missing(task, "model"));
                }
            }
            Task::Sample | Task::McCompare => {
                if self.model.is_none() && self.stable.is_none() {
                    return Err(missing(task, "model"));
                }
                let draws = self.draws.ok_or_else(|| missing(task, "draws"))?;
                if task == Task::McCompare && draws < 10_000 {
                    return Err(ConfigError(format!("field `draws`: mc-compare needs at least 10000 draws, got {draws}")));
                }
            }
            Task::StableMaster | Task::RecoverPitman => {
                if self.stable.is_none() {
                    return Err(missing(task, "stable"));
                }
            }
        }
        if self.jobs == Some(0) {
            return Err(ConfigError("field `jobs`: must be at least 1".into()));
        }
        Ok(())
    }

    /// The hierarchy: `model`, or stable-in-stable at γ = ζ^{1/β} from `stable`.
    pub fn hierarchy(&self) -> Result<HierModel, ConfigError> {
        if let Some(m) = &self.model {
            return Ok(m.clone());
        }
        let s = self.stable.ok_or_else(|| ConfigError("field `model`: no model given".into()))?;
        HierModel::stable_in_stable(s.alpha, s.beta, s.zeta.powf(1.0 / s.beta)).map_err(|e| ConfigError(format!("field `stable`: {e}")))
    }

    /// Count vectors: `counts`, then every vector of `count_sweep`.
    pub fn count_list(&self) -> Result<Vec<Vec<usize>>, ConfigError> {
        let mut out = Vec::new();
        if let Some(c) = &self.counts {
            out.push(c.clone());
        }
        if let Some(s) = self.count_sweep {
            if s.groups == 0 {
                return Err(ConfigError("field `count_sweep.groups`: must be at least 1".into()));
            }
            let mut cur = vec![1usize; s.groups];
            loop {
                if cur.iter().sum::<usize>() <= s.max_total {
                    out.push(cur.clone());
                }
                // odometer over 1..=max_total in every coordinate
                let mut j = 0;
                loop {
                    if j == s.groups {
                        return Ok(out);
                    }
                    if cur[j] < s.max_total {
                        cur[j] += 1;
                        break;
                    }
                    cur[j] = 1;
                    j += 1;
                }
            }
        }
        Ok(out)
    }

    pub fn seed_list(&self) -> Vec<u64> {
        if self.seeds.is_empty() {
            vec![0]
        } else {
            self.seeds.clone()
        }
    }
}
