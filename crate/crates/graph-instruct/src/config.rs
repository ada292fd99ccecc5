//! Pipeline configuration, read from one TOML file.
//!
//! Relative paths are resolved against the directory holding the config
//! file. Defaults are filled in at parse time so the config hash sees the
//! effective values.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use graph_instruct_core::allocate::{CombineRule, PairKey};
use graph_instruct_core::instruct::{PackageRatio, TaskContext, TaskKind};
use graph_instruct_core::{
    DescriptionTemplate, LogBase, SelectionConfig, TokenizerConfig, Traversal,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Root seed; every random stream is derived from it.
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub tokenizer: TokenizerConfig,
    /// Base of the degree logarithm; natural log when absent.
    #[serde(default)]
    pub log_base: Option<f64>,
    pub selection: SelectionSettings,
    pub datasets: Vec<DatasetConfig>,
    pub tasks: Vec<TaskConfig>,
    #[serde(default)]
    pub packages: PackageRatio,
    pub allocation: AllocationSettings,
    #[serde(default)]
    pub llm: LlmConfig,
    /// Extra description templates by name, next to the built-in
    /// `title-abstract` and `title-only`.
    #[serde(default)]
    pub templates: BTreeMap<String, DescriptionTemplate>,
    /// Hash of the config as written, taken before path resolution.
    #[serde(skip)]
    pub source_hash: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionSettings {
    /// Token budget L of one description.
    pub budget: usize,
    #[serde(default = "defaults::rho")]
    pub neighbor_budget_fraction: f64,
    #[serde(default = "defaults::walk_length")]
    pub max_walk_length: usize,
    #[serde(default = "defaults::walks")]
    pub max_walks: usize,
    #[serde(default = "defaults::one")]
    pub softmax_temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub name: String,
    pub nodes: PathBuf,
    pub edges: PathBuf,
    #[serde(default)]
    pub schema: SchemaConfig,
    /// train : validation : test
    pub split: [u32; 3],
    #[serde(default)]
    pub traversal: Traversal,
    #[serde(default = "defaults::template")]
    pub template: String,
    #[serde(default = "defaults::entity")]
    pub entity: String,
    #[serde(default = "defaults::label_domain")]
    pub label_domain: String,
}

/// Record fields of the nodes and edges files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemaConfig {
    pub id: String,
    /// Field holding the node type; nodes without it get `default_type`.
    pub node_type: Option<String>,
    pub default_type: String,
    /// Attribute fields in rendering order.
    pub attributes: Vec<String>,
    pub label: Option<String>,
    pub src: String,
    pub dst: String,
    pub relation: String,
    /// Relation used when an edge record has none; edges without one are
    /// rejected when this is unset.
    pub default_relation: Option<String>,
    pub directed: Option<String>,
    /// Directed flag for edges that do not carry one.
    pub directed_default: bool,
}

impl Default for SchemaConfig {
    fn default() -> Self {
        SchemaConfig {
            id: "id".into(),
            node_type: Some("type".into()),
            default_type: "NODE".into(),
            attributes: vec!["title".into(), "abstract".into()],
            label: Some("label".into()),
            src: "src".into(),
            dst: "dst".into(),
            relation: "relation".into(),
            default_relation: None,
            directed: Some("directed".into()),
            directed_default: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    pub task: TaskKind,
    pub dataset: String,
    /// Node classification: allowed labels, in prompt order. Defaults to
    /// the sorted distinct labels of the graph.
    #[serde(default)]
    pub label_space: Option<Vec<String>>,
    /// Overrides the dataset template. Graph-to-text defaults to
    /// `title-only` so the gold text is not part of the input.
    #[serde(default)]
    pub template: Option<String>,
    /// Graph-to-text: attribute holding the gold text.
    #[serde(default = "defaults::gold_attribute")]
    pub gold_attribute: String,
    /// Link prediction: negatives sampled per positive pair.
    #[serde(default = "defaults::one")]
    pub negative_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationSettings {
    pub total_packages: u64,
    #[serde(default = "defaults::min_packages")]
    pub min_packages: u64,
    #[serde(default)]
    pub rule: CombineRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LlmMode {
    #[default]
    OfflineStub,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmConfig {
    pub mode: LlmMode,
    /// Chat-completions style URL.
    pub endpoint: Option<String>,
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    /// Environment variable holding the bearer token, if any.
    pub api_key_env: String,
    pub max_retries: u32,
    pub initial_backoff_ms: u64,
    pub max_backoff_ms: u64,
    pub timeout_secs: u64,
    /// Requests in flight at once.
    pub concurrency: usize,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            mode: LlmMode::OfflineStub,
            endpoint: None,
            model: "gpt-4".into(),
            temperature: 0.0,
            max_tokens: 512,
            api_key_env: "GRAPH_INSTRUCT_API_KEY".into(),
            max_retries: 3,
            initial_backoff_ms: 500,
            max_backoff_ms: 8000,
            timeout_secs: 60,
            concurrency: 4,
        }
    }
}

mod defaults {
    pub fn rho() -> f64 {
        0.5
    }
    pub fn walk_length() -> usize {
        4
    }
    pub fn walks() -> usize {
        8
    }
    pub fn one() -> f64 {
        1.0
    }
    pub fn min_packages() -> u64 {
        1
    }
    pub fn template() -> String {
        "title-abstract".into()
    }
    pub fn entity() -> String {
        "PAPER".into()
    }
    pub fn label_domain() -> String {
        "computer science".into()
    }
    pub fn gold_attribute() -> String {
        "abstract".into()
    }
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads, resolves relative paths against the file's directory and
    /// validates.
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::parse(&text)?;
        cfg.source_hash = Some(cfg.hash());
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.output_dir);
        for d in &mut self.datasets {
            fix(&mut d.nodes);
            fix(&mut d.edges);
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.log_base()?;
        self.selection_config()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.selection.budget == 0 {
            return bad("selection.budget must be positive".into());
        }
        if self.packages.standard == 0 {
            return bad("packages.standard must be positive".into());
        }
        let mut names = BTreeSet::new();
        for d in &self.datasets {
            if d.name.is_empty() || !names.insert(d.name.as_str()) {
                return bad(format!("dataset name `{}` is empty or repeated", d.name));
            }
            for p in [&d.nodes, &d.edges] {
                if !p.is_file() {
                    return bad(format!(
                        "dataset `{}`: file {} does not exist",
                        d.name,
                        p.display()
                    ));
                }
            }
            if d.split.iter().all(|&r| r == 0) {
                return bad(format!("dataset `{}`: split ratios are all zero", d.name));
            }
            self.template(&d.template)?;
        }
        let mut pairs = BTreeSet::new();
        for t in &self.tasks {
            if !names.contains(t.dataset.as_str()) {
                return bad(format!(
                    "task {} names unknown dataset `{}`",
                    t.task, t.dataset
                ));
            }
            if !pairs.insert((t.task, t.dataset.as_str())) {
                return bad(format!(
                    "task {} on `{}` is listed twice",
                    t.task, t.dataset
                ));
            }
            if let Some(name) = &t.template {
                self.template(name)?;
            }
            if let Some(space) = &t.label_space {
                if space.is_empty() {
                    return bad(format!(
                        "task {} on `{}` has an empty label space",
                        t.task, t.dataset
                    ));
                }
            }
            if !(t.negative_ratio.is_finite() && t.negative_ratio >= 0.0) {
                return bad(format!(
                    "task {} on `{}`: negative_ratio must be >= 0",
                    t.task, t.dataset
                ));
            }
        }
        let needed = self
            .allocation
            .min_packages
            .saturating_mul(self.tasks.len() as u64);
        if !self.tasks.is_empty() && self.allocation.total_packages < needed {
            return bad(format!(
                "allocation.total_packages {} is below {} pairs x min_packages {}",
                self.allocation.total_packages,
                self.tasks.len(),
                self.allocation.min_packages
            ));
        }
        if self.llm.mode == LlmMode::Remote && self.llm.endpoint.as_deref().unwrap_or("").is_empty()
        {
            return bad("llm.endpoint is required in remote mode".into());
        }
        if self.llm.concurrency == 0 {
            return bad("llm.concurrency must be positive".into());
        }
        Ok(())
    }

    pub fn log_base(&self) -> Result<LogBase, Error> {
        match self.log_base {
            None => Ok(LogBase::E),
            Some(b) => LogBase::new(b).map_err(|e| Error::Config(e.to_string())),
        }
    }

    pub fn selection_config(&self) -> SelectionConfig {
        let s = &self.selection;
        SelectionConfig {
            neighbor_budget_fraction: s.neighbor_budget_fraction,
            max_walk_length: s.max_walk_length,
            max_walks: s.max_walks,
            softmax_temperature: s.softmax_temperature,
            rng_seed: self.seed,
        }
    }

    pub fn template(&self, name: &str) -> Result<DescriptionTemplate, Error> {
        if let Some(t) = self.templates.get(name) {
            return Ok(t.clone());
        }
        DescriptionTemplate::builtin(name)
            .ok_or_else(|| Error::Config(format!("unknown template `{name}`")))
    }

    pub fn dataset(&self, name: &str) -> Result<&DatasetConfig, Error> {
        self.datasets
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::Validation(format!("unknown dataset `{name}`")))
    }

    pub fn task(&self, task: TaskKind, dataset: &str) -> Result<&TaskConfig, Error> {
        self.tasks
            .iter()
            .find(|t| t.task == task && t.dataset == dataset)
            .ok_or_else(|| {
                Error::Validation(format!(
                    "task {task} is not configured for dataset `{dataset}`"
                ))
            })
    }

    /// Template used for a task's inputs.
    pub fn task_template(&self, t: &TaskConfig) -> Result<DescriptionTemplate, Error> {
        match (&t.template, t.task) {
            (Some(name), _) => self.template(name),
            (None, TaskKind::GraphToText) => self.template("title-only"),
            (None, _) => self.template(&self.dataset(&t.dataset)?.template),
        }
    }

    pub fn active_pairs(&self) -> Vec<PairKey> {
        let mut v: Vec<PairKey> = self
            .tasks
            .iter()
            .map(|t| PairKey::new(t.task, t.dataset.clone()))
            .collect();
        v.sort();
        v
    }

    /// Hash recorded at load time, or of the current values.
    pub fn config_hash(&self) -> String {
        self.source_hash.clone().unwrap_or_else(|| self.hash())
    }

    /// SHA-256 over the canonical JSON form of the config, leaving out the
    /// output directory and LLM concurrency, which do not change results.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("output_dir");
            if let Some(llm) = obj.get_mut("llm").and_then(|l| l.as_object_mut()) {
                llm.remove("concurrency");
            }
        }
        let bytes = serde_json::to_vec(&v).expect("value serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

impl DatasetConfig {
    pub fn context(&self) -> TaskContext {
        TaskContext {
            dataset: self.name.clone(),
            entity: self.entity.clone(),
            label_domain: self.label_domain.clone(),
        }
    }
}
