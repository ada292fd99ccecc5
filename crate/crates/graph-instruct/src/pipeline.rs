//! The pipeline commands: ingest, describe, generate, split and eval.
//!
//! Every command reads the config, writes below `output_dir` and returns a
//! report. Outputs carry no timestamps or absolute paths, so a rerun with the
//! same config and inputs rewrites identical bytes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use graph_instruct_core::allocate::{self, AllocationPlan, ComplexityProfile, PairKey};
use graph_instruct_core::description::{
    CompactDescription, DescriptionRenderer, DescriptionSections,
};
use graph_instruct_core::energy::{compute_energies, Energies, NodeEnergy};
use graph_instruct_core::instruct::{
    self, assemble_packages, positive_pairs, render_cot_prompt, render_standard,
    sample_negative_pairs, CotPrompt, DescribedTarget, Gold, InstructionRecord, TaskKind,
};
use graph_instruct_core::metrics::{self, BleuConfig, ClassificationEval, TextEval};
use graph_instruct_core::selection::{self, SelectionError};
use graph_instruct_core::split::{self, SplitSpec, SplitUnit};
use graph_instruct_core::{seed, AttributedGraph, DescriptionTemplate, NodeIx};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{DatasetConfig, PipelineConfig, TaskConfig};
use crate::error::Error;
use crate::jsonl::{emit_jsonl, read_jsonl, write_json, write_jsonl};
use crate::llm;
use crate::load::load_dataset;

/// A loaded graph with its energies.
pub struct Prepared {
    pub graph: AttributedGraph,
    pub energies: Energies,
}

pub fn prepare(cfg: &PipelineConfig, d: &DatasetConfig) -> Result<Prepared, Error> {
    let graph = load_dataset(d)?;
    let energies = compute_energies(&graph, &cfg.tokenizer, cfg.log_base()?);
    Ok(Prepared { graph, energies })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub dataset: String,
    pub nodes: usize,
    pub edges: usize,
    pub relations: Vec<String>,
    pub skipped_self_loops: usize,
    pub labeled_nodes: usize,
    pub isolated_nodes: usize,
    pub max_degree: usize,
    pub total_energy: u128,
}

/// Loads every dataset and writes its summary and per-node energies.
pub fn ingest(cfg: &PipelineConfig) -> Result<Vec<IngestReport>, Error> {
    let mut reports = Vec::new();
    for d in &cfg.datasets {
        let p = prepare(cfg, d)?;
        let g = &p.graph;
        let degrees: Vec<usize> = g.node_ids().map(|ix| g.degree_of(ix)).collect();
        let report = IngestReport {
            dataset: d.name.clone(),
            nodes: g.node_count(),
            edges: g.edge_count(),
            relations: g.relations().to_vec(),
            skipped_self_loops: g.skipped_self_loops(),
            labeled_nodes: g.nodes().iter().filter(|n| n.label.is_some()).count(),
            isolated_nodes: degrees.iter().filter(|&&k| k == 0).count(),
            max_degree: degrees.iter().copied().max().unwrap_or(0),
            total_energy: allocate::dataset_complexity(&p.energies),
        };
        let dir = cfg.output_dir.join("ingest");
        write_json(&report, &dir.join(format!("{}.json", d.name)))?;
        let energies: Vec<&NodeEnergy> = p.energies.iter().collect();
        write_jsonl(&energies, &dir.join(format!("{}.energies.jsonl", d.name)))?;
        reports.push(report);
    }
    Ok(reports)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Neighbor {
    pub id: String,
    pub relation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkStep {
    pub relation: String,
    pub node: String,
}

/// One line of a descriptions file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptionRecord {
    pub node: String,
    pub budget: usize,
    pub boilerplate: usize,
    pub token_count: usize,
    pub energy: u64,
    pub neighbors: Vec<Neighbor>,
    pub walks: Vec<Vec<WalkStep>>,
    pub sections: DescriptionSections,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Targets {
    All,
    Ids(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeFailure {
    pub node: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescribeReport {
    pub path: PathBuf,
    pub written: usize,
    pub failures: Vec<NodeFailure>,
}

pub fn describe_node(
    renderer: &DescriptionRenderer<'_>,
    energies: &Energies,
    target: NodeIx,
    budget: usize,
    cfg: &selection::SelectionConfig,
) -> Result<DescriptionRecord, SelectionError> {
    let g = renderer.graph;
    let (sel, desc): (_, CompactDescription) =
        selection::describe_target(renderer, energies, target, budget, cfg)?;
    Ok(DescriptionRecord {
        node: desc.target,
        budget,
        boilerplate: sel.boilerplate,
        token_count: desc.token_count,
        energy: energies.energy(target),
        neighbors: sel
            .neighbors
            .members
            .iter()
            .map(|&(n, r)| Neighbor {
                id: g.node(n).id.clone(),
                relation: g.relation_name(r).to_string(),
            })
            .collect(),
        walks: sel
            .walks
            .iter()
            .map(|w| {
                w.steps
                    .iter()
                    .map(|&(r, n)| WalkStep {
                        relation: g.relation_name(r).to_string(),
                        node: g.node(n).id.clone(),
                    })
                    .collect()
            })
            .collect(),
        sections: desc.sections,
        text: desc.text,
    })
}

/// Renders descriptions for the requested nodes of one dataset into
/// `descriptions/<dataset>.jsonl`. Unknown ids abort before anything is
/// written; per-node failures are collected and the remaining nodes are
/// still written.
pub fn describe(
    cfg: &PipelineConfig,
    dataset: &str,
    targets: &Targets,
) -> Result<DescribeReport, Error> {
    let d = cfg.dataset(dataset)?;
    let p = prepare(cfg, d)?;
    let ids: Vec<NodeIx> = match targets {
        Targets::All => p.graph.node_ids().collect(),
        Targets::Ids(ids) => ids
            .iter()
            .map(|id| {
                p.graph.lookup(id).ok_or_else(|| {
                    Error::Validation(format!("unknown node id `{id}` in dataset `{dataset}`"))
                })
            })
            .collect::<Result<_, _>>()?,
    };
    let template = cfg.template(&d.template)?;
    let renderer = DescriptionRenderer::new(&p.graph, &template, &cfg.tokenizer);
    let scfg = cfg.selection_config();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for ix in ids {
        match describe_node(&renderer, &p.energies, ix, cfg.selection.budget, &scfg) {
            Ok(r) => records.push(r),
            Err(e) => failures.push(NodeFailure {
                node: p.graph.node(ix).id.clone(),
                error: e.to_string(),
            }),
        }
    }
    let path = cfg
        .output_dir
        .join("descriptions")
        .join(format!("{dataset}.jsonl"));
    let written = write_jsonl(&records, &path)?;
    Ok(DescribeReport {
        path,
        written,
        failures,
    })
}

/// One task instance: a target node or a candidate link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Node(NodeIx),
    Pair(NodeIx, NodeIx, bool),
}

pub fn split_unit(task: TaskKind) -> SplitUnit {
    match task {
        TaskKind::NodeClassification => SplitUnit::Node,
        TaskKind::GraphToText => SplitUnit::Graph,
        TaskKind::LinkPrediction => SplitUnit::Record,
    }
}

/// Labels allowed for node classification: configured, or the sorted
/// distinct labels present in the graph.
pub fn label_space(t: &TaskConfig, g: &AttributedGraph) -> Vec<String> {
    match &t.label_space {
        Some(s) => s.clone(),
        None => g
            .nodes()
            .iter()
            .filter_map(|n| n.label.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    }
}

/// Instances a task can be built from, before splitting. Classification
/// uses labeled nodes whose label is in the label space, graph-to-text the
/// nodes carrying the gold attribute, link prediction every linked pair
/// plus sampled unlinked pairs.
pub fn task_units(cfg: &PipelineConfig, t: &TaskConfig, g: &AttributedGraph) -> Vec<Unit> {
    match t.task {
        TaskKind::NodeClassification => {
            let space = label_space(t, g);
            g.node_ids()
                .filter(|&ix| g.node(ix).label.as_ref().is_some_and(|l| space.contains(l)))
                .map(Unit::Node)
                .collect()
        }
        TaskKind::GraphToText => g
            .node_ids()
            .filter(|&ix| {
                g.node(ix)
                    .attribute(&t.gold_attribute)
                    .is_some_and(|v| !v.trim().is_empty())
            })
            .map(Unit::Node)
            .collect(),
        TaskKind::LinkPrediction => {
            let pos = positive_pairs(g);
            let want = (pos.len() as f64 * t.negative_ratio).round() as usize;
            let neg = sample_negative_pairs(g, want, cfg.seed);
            pos.into_iter()
                .map(|(a, b)| Unit::Pair(a, b, true))
                .chain(neg.into_iter().map(|(a, b)| Unit::Pair(a, b, false)))
                .collect()
        }
    }
}

pub fn unit_id(g: &AttributedGraph, u: Unit) -> String {
    match u {
        Unit::Node(ix) => g.node(ix).id.clone(),
        Unit::Pair(a, b, _) => format!("{}|{}", g.node(a).id, g.node(b).id),
    }
}

pub fn split_spec(cfg: &PipelineConfig, t: &TaskConfig, d: &DatasetConfig) -> SplitSpec {
    SplitSpec {
        ratios: d.split,
        seed: seed::derive(cfg.seed, "split", &format!("{}/{}", t.task, t.dataset)),
        unit: split_unit(t.task),
    }
}

/// Everything needed to render records for one (task, dataset) pair.
pub struct TaskInputs<'a> {
    pub cfg: &'a PipelineConfig,
    pub task: &'a TaskConfig,
    pub dataset: &'a DatasetConfig,
    pub prepared: &'a Prepared,
    pub template: DescriptionTemplate,
    pub labels: Vec<String>,
}

impl<'a> TaskInputs<'a> {
    pub fn new(
        cfg: &'a PipelineConfig,
        task: &'a TaskConfig,
        dataset: &'a DatasetConfig,
        prepared: &'a Prepared,
    ) -> Result<Self, Error> {
        Ok(TaskInputs {
            cfg,
            task,
            dataset,
            prepared,
            template: cfg.task_template(task)?,
            labels: label_space(task, &prepared.graph),
        })
    }

    fn describe(&self, u: Unit) -> Result<Vec<DescribedTarget>, Error> {
        let g = &self.prepared.graph;
        let e = &self.prepared.energies;
        let budget = self.cfg.selection.budget;
        let scfg = self.cfg.selection_config();
        Ok(match u {
            Unit::Node(ix) => {
                let r = DescriptionRenderer::new(g, &self.template, &self.cfg.tokenizer);
                vec![instruct::describe(&r, e, ix, budget, &scfg)?]
            }
            // two descriptions share one input, so the pair gets twice L
            Unit::Pair(a, b, _) => instruct::describe_pair(
                g,
                &self.template,
                &self.cfg.tokenizer,
                e,
                (a, b),
                2 * budget,
                &scfg,
            )?
            .to_vec(),
        })
    }

    fn gold(&self, u: Unit) -> Gold<'_> {
        let g = &self.prepared.graph;
        match (self.task.task, u) {
            (TaskKind::NodeClassification, Unit::Node(ix)) => Gold::Label {
                label: g.node(ix).label.as_deref().unwrap_or(""),
                label_space: &self.labels,
            },
            (TaskKind::GraphToText, Unit::Node(ix)) => Gold::Text(
                g.node(ix)
                    .attribute(&self.task.gold_attribute)
                    .unwrap_or(""),
            ),
            (_, Unit::Pair(_, _, linked)) => Gold::Link(linked),
            (task, Unit::Node(_)) => unreachable!("{task} instances are pairs"),
        }
    }

    pub fn standard(&self, u: Unit) -> Result<InstructionRecord, Error> {
        let descs = self.describe(u)?;
        let refs: Vec<&DescribedTarget> = descs.iter().collect();
        Ok(render_standard(
            &self.dataset.context(),
            self.task.task,
            &refs,
            &self.gold(u),
        )?)
    }

    pub fn cot_prompt(&self, u: Unit) -> Result<CotPrompt, Error> {
        let descs = self.describe(u)?;
        let refs: Vec<&DescribedTarget> = descs.iter().collect();
        Ok(render_cot_prompt(
            &self.dataset.context(),
            self.task.task,
            &refs,
            &self.gold(u),
        )?)
    }

    /// CoT explains a known relation, so unlinked pairs are skipped.
    pub fn cot_eligible(&self, u: Unit) -> bool {
        !matches!(u, Unit::Pair(_, _, false))
    }
}

/// A split file line: an instruction record tagged with its instance id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub id: String,
    #[serde(flatten)]
    pub record: InstructionRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub task: TaskKind,
    pub dataset: String,
    pub unit: SplitUnit,
    pub ratios: [u32; 3],
    pub seed: u64,
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

fn pair_dir(cfg: &PipelineConfig, root: &str, task: TaskKind, dataset: &str) -> PathBuf {
    cfg.output_dir.join(root).join(task.as_str()).join(dataset)
}

fn load_all(cfg: &PipelineConfig) -> Result<BTreeMap<String, Prepared>, Error> {
    let mut out = BTreeMap::new();
    for t in &cfg.tasks {
        if !out.contains_key(&t.dataset) {
            let d = cfg.dataset(&t.dataset)?;
            out.insert(t.dataset.clone(), prepare(cfg, d)?);
        }
    }
    Ok(out)
}

/// Splits each task's instances and writes `train`, `val` and `test`
/// files of standard records tagged with instance ids.
pub fn split(cfg: &PipelineConfig) -> Result<Vec<SplitSummary>, Error> {
    let prepared = load_all(cfg)?;
    let mut summaries = Vec::new();
    for t in sorted_tasks(cfg) {
        let d = cfg.dataset(&t.dataset)?;
        let p = &prepared[&t.dataset];
        let inputs = TaskInputs::new(cfg, t, d, p)?;
        let units = task_units(cfg, t, &p.graph);
        if units.is_empty() {
            return Err(Error::Insufficient {
                task: t.task.to_string(),
                dataset: t.dataset.clone(),
                what: "instances",
                needed: 1,
                available: 0,
            });
        }
        let spec = split_spec(cfg, t, d);
        let parts = split::split(&units, &spec)?;
        let dir = pair_dir(cfg, "splits", t.task, &t.dataset);
        for (name, part) in [
            ("train", &parts.train),
            ("val", &parts.val),
            ("test", &parts.test),
        ] {
            let records = part
                .iter()
                .map(|&u| {
                    Ok(SplitRecord {
                        id: unit_id(&p.graph, u),
                        record: inputs.standard(u)?,
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            write_jsonl(&records, &dir.join(format!("{name}.jsonl")))?;
        }
        let summary = SplitSummary {
            task: t.task,
            dataset: t.dataset.clone(),
            unit: spec.unit,
            ratios: spec.ratios,
            seed: spec.seed,
            train: parts.train.len(),
            val: parts.val.len(),
            test: parts.test.len(),
        };
        write_json(&summary, &dir.join("summary.json"))?;
        summaries.push(summary);
    }
    Ok(summaries)
}

fn sorted_tasks(cfg: &PipelineConfig) -> Vec<&TaskConfig> {
    let mut v: Vec<&TaskConfig> = cfg.tasks.iter().collect();
    v.sort_by(|a, b| (a.task, &a.dataset).cmp(&(b.task, &b.dataset)));
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub dataset: String,
    pub nodes_file: String,
    pub nodes_sha256: String,
    pub edges_file: String,
    pub edges_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairManifest {
    pub task: TaskKind,
    pub dataset: String,
    pub weight: f64,
    pub task_complexity: f64,
    pub dataset_complexity: u128,
    pub planned_packages: u64,
    pub emitted_packages: usize,
    pub full_packages: usize,
    pub standard_records: usize,
    pub cot_records: usize,
    pub train_instances: usize,
    pub split_seed: u64,
    pub corpus_file: String,
    pub package_files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub seed: u64,
    pub package_ratio: instruct::PackageRatio,
    pub total_packages: u64,
    pub min_packages: u64,
    pub rule: allocate::CombineRule,
    pub uniform_fallback: bool,
    pub llm_mode: crate::config::LlmMode,
    pub llm_model: String,
    pub inputs: Vec<InputDigest>,
    pub pairs: Vec<PairManifest>,
}

fn file_digest(path: &Path) -> Result<String, Error> {
    let bytes = fs::read(path).map_err(Error::io(path))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn relative(cfg: &PipelineConfig, path: &Path) -> String {
    path.strip_prefix(&cfg.output_dir)
        .unwrap_or(path)
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateReport {
    pub plan: AllocationPlan,
    pub manifest: Manifest,
}

struct PairWork<'a> {
    inputs: TaskInputs<'a>,
    train: Vec<Unit>,
    standard: Vec<InstructionRecord>,
    split_seed: u64,
}

/// Builds the allocation plan from the train partitions and emits the
/// planned number of full packages per (task, dataset) pair, plus the
/// plan and a manifest.
pub fn generate(cfg: &PipelineConfig) -> Result<GenerateReport, Error> {
    let prepared = load_all(cfg)?;
    let mut work = Vec::new();
    let mut profile = ComplexityProfile::default();
    for t in sorted_tasks(cfg) {
        let d = cfg.dataset(&t.dataset)?;
        let p = &prepared[&t.dataset];
        let inputs = TaskInputs::new(cfg, t, d, p)?;
        let units = task_units(cfg, t, &p.graph);
        let spec = split_spec(cfg, t, d);
        let train = if units.is_empty() {
            Vec::new()
        } else {
            split::split(&units, &spec)?.train
        };
        if train.is_empty() {
            return Err(Error::Insufficient {
                task: t.task.to_string(),
                dataset: t.dataset.clone(),
                what: "training instances",
                needed: 1,
                available: 0,
            });
        }
        let standard = train
            .iter()
            .map(|&u| inputs.standard(u))
            .collect::<Result<Vec<_>, _>>()?;
        let key = PairKey::new(t.task, t.dataset.clone());
        profile
            .task_complexity
            .insert(key, allocate::task_complexity(&standard, &cfg.tokenizer)?);
        profile
            .dataset_complexity
            .insert(t.dataset.clone(), allocate::dataset_complexity(&p.energies));
        work.push(PairWork {
            inputs,
            train,
            standard,
            split_seed: spec.seed,
        });
    }

    let plan = allocate::allocation_plan(
        &profile,
        &cfg.active_pairs(),
        cfg.allocation.total_packages,
        cfg.allocation.min_packages,
        cfg.allocation.rule,
    )?;
    let generator = llm::generator(&cfg.llm)?;
    let ratio = cfg.packages;
    let mut pairs = Vec::new();
    for w in work {
        let t = w.inputs.task;
        let key = PairKey::new(t.task, t.dataset.clone());
        let k = plan.count(&key).expect("every active pair is planned") as usize;
        let need_std = k * ratio.standard as usize;
        let need_cot = k * ratio.cot as usize;
        let insufficient = |what, needed, available| Error::Insufficient {
            task: t.task.to_string(),
            dataset: t.dataset.clone(),
            what,
            needed,
            available,
        };
        if w.standard.len() < need_std {
            return Err(insufficient("standard records", need_std, w.standard.len()));
        }
        let label = format!("{}/{}", t.task, t.dataset);
        let mut order: Vec<usize> = (0..w.train.len()).collect();
        seed::shuffle(
            &mut order,
            &mut seed::rng(cfg.seed, "generate-standard", &label),
        );
        let chosen: Vec<usize> = order[..need_std].to_vec();
        // CoT explains chosen instances first, then other training instances
        let cot_units: Vec<Unit> = chosen
            .iter()
            .chain(order[need_std..].iter())
            .map(|&i| w.train[i])
            .filter(|&u| w.inputs.cot_eligible(u))
            .take(need_cot)
            .collect();
        if cot_units.len() < need_cot {
            return Err(insufficient("CoT instances", need_cot, cot_units.len()));
        }
        let standard: Vec<InstructionRecord> =
            chosen.iter().map(|&i| w.standard[i].clone()).collect();
        let prompts = cot_units
            .iter()
            .map(|&u| w.inputs.cot_prompt(u))
            .collect::<Result<Vec<_>, _>>()?;
        let bodies = llm::generate_all(generator.as_ref(), &prompts, cfg.llm.concurrency)?;
        let ctx = w.inputs.dataset.context();
        let cot: Vec<InstructionRecord> = prompts
            .into_iter()
            .zip(bodies.iter())
            .map(|(p, b)| p.into_record(&ctx, b))
            .collect();
        let packages = if k == 0 {
            Vec::new()
        } else {
            assemble_packages(standard, cot, ratio, cfg.seed)?
        };

        let dir = pair_dir(cfg, "packages", t.task, &t.dataset);
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(Error::io(&dir))?;
        }
        let mut package_files = Vec::new();
        let mut corpus = Vec::new();
        for (i, p) in packages.iter().enumerate() {
            let path = dir.join(format!("package-{i:04}.jsonl"));
            emit_jsonl(&p.records, &path)?;
            package_files.push(relative(cfg, &path));
            corpus.extend(p.records.iter().cloned());
        }
        let corpus_path = cfg
            .output_dir
            .join("corpus")
            .join(t.task.as_str())
            .join(format!("{}.jsonl", t.dataset));
        emit_jsonl(&corpus, &corpus_path)?;
        let entry = plan
            .entries
            .iter()
            .find(|e| e.task == t.task && e.dataset == t.dataset)
            .expect("planned pair");
        pairs.push(PairManifest {
            task: t.task,
            dataset: t.dataset.clone(),
            weight: entry.weight,
            task_complexity: profile.task_complexity[&key],
            dataset_complexity: profile.dataset_complexity[&t.dataset],
            planned_packages: entry.packages,
            emitted_packages: packages.len(),
            full_packages: packages.iter().filter(|p| p.is_full()).count(),
            standard_records: packages.iter().map(|p| p.standard_count).sum(),
            cot_records: packages.iter().map(|p| p.cot_count).sum(),
            train_instances: w.train.len(),
            split_seed: w.split_seed,
            corpus_file: relative(cfg, &corpus_path),
            package_files,
        });
    }

    let mut inputs = Vec::new();
    let used: BTreeSet<&str> = cfg.tasks.iter().map(|t| t.dataset.as_str()).collect();
    for d in cfg
        .datasets
        .iter()
        .filter(|d| used.contains(d.name.as_str()))
    {
        inputs.push(InputDigest {
            dataset: d.name.clone(),
            nodes_file: file_name(&d.nodes),
            nodes_sha256: file_digest(&d.nodes)?,
            edges_file: file_name(&d.edges),
            edges_sha256: file_digest(&d.edges)?,
        });
    }
    let manifest = Manifest {
        config_hash: cfg.config_hash(),
        seed: cfg.seed,
        package_ratio: ratio,
        total_packages: cfg.allocation.total_packages,
        min_packages: cfg.allocation.min_packages,
        rule: cfg.allocation.rule,
        uniform_fallback: plan.uniform_fallback,
        llm_mode: cfg.llm.mode,
        llm_model: cfg.llm.model.clone(),
        inputs,
        pairs,
    };
    write_json(&plan, &cfg.output_dir.join("allocation.json"))?;
    write_json(&manifest, &cfg.output_dir.join("manifest.json"))?;
    Ok(GenerateReport { plan, manifest })
}

/// One line of a predictions file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub prediction: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: TaskKind,
    pub dataset: String,
    pub matched: usize,
    /// Prediction ids with no gold record, plus repeated ids.
    pub unmatched_predictions: Vec<String>,
    /// Gold ids with no prediction.
    pub missing_predictions: Vec<String>,
    pub metrics: BTreeMap<String, f64>,
}

/// Scores predictions against gold records joined by id. Gold defaults to
/// the test split written by [`split`].
pub fn eval(
    cfg: &PipelineConfig,
    task: TaskKind,
    dataset: &str,
    predictions_path: &Path,
    gold_path: Option<&Path>,
) -> Result<EvalReport, Error> {
    let t = cfg.task(task, dataset)?;
    let default_gold = pair_dir(cfg, "splits", task, dataset).join("test.jsonl");
    let gold_path = gold_path.unwrap_or(&default_gold);
    let gold: Vec<SplitRecord> = read_jsonl(gold_path)?;
    let predictions: Vec<Prediction> = read_jsonl(predictions_path)?;

    let mut by_id: HashMap<&str, &str> = HashMap::new();
    let mut unmatched = Vec::new();
    let gold_ids: BTreeSet<&str> = gold.iter().map(|g| g.id.as_str()).collect();
    for p in &predictions {
        if !gold_ids.contains(p.id.as_str()) || by_id.insert(&p.id, &p.prediction).is_some() {
            unmatched.push(p.id.clone());
        }
    }
    let mut pairs = Vec::new();
    let mut missing = Vec::new();
    for g in &gold {
        match by_id.get(g.id.as_str()) {
            Some(p) => pairs.push((g.record.output.clone(), p.trim().to_string())),
            None => missing.push(g.id.clone()),
        }
    }
    if pairs.is_empty() {
        return Err(Error::Validation(format!(
            "no prediction in {} matches a gold id in {}",
            predictions_path.display(),
            gold_path.display()
        )));
    }

    let mut m = BTreeMap::new();
    match task {
        TaskKind::NodeClassification | TaskKind::LinkPrediction => {
            let label_set = match task {
                TaskKind::LinkPrediction => vec!["no".to_string(), "yes".to_string()],
                _ => match &t.label_space {
                    Some(s) => s.clone(),
                    None => pairs
                        .iter()
                        .map(|p| p.0.clone())
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .collect(),
                },
            };
            let f = metrics::f1_suite(&ClassificationEval { pairs, label_set })?;
            m.insert("macro_f1".into(), f.macro_f1);
            m.insert("micro_f1".into(), f.micro_f1);
            m.insert("weighted_f1".into(), f.weighted_f1);
        }
        TaskKind::GraphToText => {
            let te = TextEval {
                pairs: pairs
                    .into_iter()
                    .map(|(gold, pred)| (pred, vec![gold]))
                    .collect(),
            };
            m.insert("bleu4".into(), metrics::bleu4(&te, BleuConfig::default())?);
            m.insert("rouge_l".into(), metrics::rouge_l(&te)?);
            m.insert("chrf_pp".into(), metrics::chrf_pp(&te)?);
            m.insert("meteor_lite".into(), metrics::meteor_lite(&te)?);
        }
    }
    let report = EvalReport {
        task,
        dataset: dataset.to_string(),
        matched: gold.len() - missing.len(),
        unmatched_predictions: unmatched,
        missing_predictions: missing,
        metrics: m,
    };
    write_json(
        &report,
        &pair_dir(cfg, "eval", task, dataset).join("report.json"),
    )?;
    Ok(report)
}

/// Ingest, describe every node of every dataset, generate and split.
pub fn run_all(cfg: &PipelineConfig) -> Result<(), Error> {
    ingest(cfg)?;
    for d in &cfg.datasets {
        let r = describe(cfg, &d.name, &Targets::All)?;
        if !r.failures.is_empty() {
            return Err(Error::PartialFailure {
                failed: r.failures.len(),
                total: r.failures.len() + r.written,
            });
        }
    }
    generate(cfg)?;
    split(cfg)?;
    Ok(())
}
