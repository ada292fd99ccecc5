//! Instruction records: standard and Chain-of-Thought templates per task,
//! the deterministic offline CoT generator, link-prediction pair sampling and
//! package assembly.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::description::{CompactDescription, DescriptionRenderer, DescriptionTemplate};
use crate::energy::Energies;
use crate::graph::{AttributedGraph, NodeIx};
use crate::seed;
use crate::selection::{self, SelectionConfig, SelectionError, TargetSelection};

/// Graph tasks. Variant order is the lexicographic order of the names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TaskKind {
    GraphToText,
    LinkPrediction,
    NodeClassification,
}

impl TaskKind {
    pub const ALL: [TaskKind; 3] = [
        TaskKind::GraphToText,
        TaskKind::LinkPrediction,
        TaskKind::NodeClassification,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::GraphToText => "graph_to_text",
            TaskKind::LinkPrediction => "link_prediction",
            TaskKind::NodeClassification => "node_classification",
        }
    }

    pub fn parse(s: &str) -> Option<TaskKind> {
        TaskKind::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RecordKind {
    Standard,
    Cot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct InstructionRecord {
    pub task: TaskKind,
    pub dataset: String,
    pub kind: RecordKind,
    pub instruction: String,
    pub input: String,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstructError {
    #[error("{task} expects {expected} description(s), got {got}")]
    DescriptionCount {
        task: TaskKind,
        expected: usize,
        got: usize,
    },
    #[error("missing gold answer for {0}")]
    MissingGold(TaskKind),
    #[error("empty label space")]
    EmptyLabelSpace,
    #[error("label `{0}` is not in the label space")]
    LabelNotInSpace(String),
    #[error("gold answer does not match task {0}")]
    GoldMismatch(TaskKind),
    #[error("package ratio needs a positive standard count")]
    ZeroStandardRatio,
    #[error("ratio asks for {cot} CoT records per package but none are available")]
    InsufficientCot { cot: u32 },
    #[error("records of one package must share task and dataset")]
    MixedPackage,
}

/// Gold answer of one task instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gold<'a> {
    Label {
        label: &'a str,
        label_space: &'a [String],
    },
    Link(bool),
    Text(&'a str),
}

impl Gold<'_> {
    fn task(&self) -> TaskKind {
        match self {
            Gold::Label { .. } => TaskKind::NodeClassification,
            Gold::Link(_) => TaskKind::LinkPrediction,
            Gold::Text(_) => TaskKind::GraphToText,
        }
    }

    /// The literal standard output.
    pub fn answer(&self) -> &str {
        match self {
            Gold::Label { label, .. } => label,
            Gold::Link(true) => "yes",
            Gold::Link(false) => "no",
            Gold::Text(t) => t,
        }
    }
}

/// Words substituted into the instruction templates.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct TaskContext {
    pub dataset: String,
    /// What a target node is called, e.g. `PAPER`.
    pub entity: String,
    /// Domain the label space subdivides, e.g. `computer science`.
    pub label_domain: String,
}

impl Default for TaskContext {
    fn default() -> Self {
        TaskContext {
            dataset: String::new(),
            entity: "PAPER".into(),
            label_domain: "computer science".into(),
        }
    }
}

impl TaskContext {
    pub fn new(dataset: impl Into<String>) -> Self {
        TaskContext {
            dataset: dataset.into(),
            ..Default::default()
        }
    }

    pub fn standard_instruction(&self, task: TaskKind, label_space: &[String]) -> String {
        let TaskContext {
            dataset,
            entity,
            label_domain,
        } = self;
        match task {
            TaskKind::NodeClassification => format!(
                "Given the target {entity} with the compact graph description in the {dataset} dataset, \
                 which of the following subcategories of {label_domain} does this {entity} belong to \
                 [{}]. Directly give the most likely category of this {entity}.",
                label_space.join(", ")
            ),
            TaskKind::LinkPrediction => format!(
                "Given the compact graph descriptions of {entity} 1 and {entity} 2 in the {dataset} dataset. \
                 If the connection between the {entity}s represents the relationship between them, are they \
                 connected? Give me a direct answer of \"yes\" or \"no\"."
            ),
            TaskKind::GraphToText => format!(
                "Given the target {entity} in the {dataset} dataset with the compact graph description. \
                 Please generate the target {entity} abstract from the compact graph description."
            ),
        }
    }

    pub fn cot_instruction(&self, task: TaskKind, title: &str, answer: &str) -> String {
        let TaskContext {
            dataset, entity, ..
        } = self;
        match task {
            TaskKind::NodeClassification => format!(
                "Given the classification of target {entity} {title} with {answer} in the {dataset} dataset, \
                 give your explanation based on the provided compact graph description. Focus your analysis \
                 on elucidating the reasons behind this classification in a clear Chain of Thought. Keep the \
                 analysis brief and to the point."
            ),
            TaskKind::LinkPrediction => format!(
                "Given the established link between {entity} 1 and {entity} 2 in the {dataset} dataset, give \
                 your explanation based on the provided compact graph description. Focus your analysis on \
                 elucidating the reasons behind this link in a clear Chain of Thought. Keep the analysis brief \
                 and to the point."
            ),
            TaskKind::GraphToText => format!(
                "Given the generated abstract of the target {entity} in the {dataset} dataset. Please use the \
                 provided compact graph description, to examine how these elements influenced the generation \
                 of the abstract with a clear Chain of Thought (CoT). Keep the CoT brief and to the point."
            ),
        }
    }

    /// Wraps a generated explanation into the task's CoT output form.
    pub fn cot_output(&self, task: TaskKind, answer: &str, body: &str) -> String {
        let entity = &self.entity;
        match task {
            TaskKind::NodeClassification => format!(
                "Considering the {entity}'s compact graph description, its classification is valid under \
                 {answer}, because {body}"
            ),
            TaskKind::LinkPrediction => {
                format!("The connection between {entity} 1 and {entity} 2 seems to be grounded on {body}")
            }
            TaskKind::GraphToText => format!("The CoT for this generation is as follows: {body}"),
        }
    }
}

/// A rendered description together with the fields the offline CoT
/// generator reads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescribedTarget {
    pub description: CompactDescription,
    pub title: String,
    /// Display names of the selected nodes, neighbors first.
    pub key_nodes: Vec<String>,
    /// The first walk as rendered text, without its number.
    pub first_walk: Option<String>,
}

impl DescribedTarget {
    pub fn from_selection(
        renderer: &DescriptionRenderer<'_>,
        target: NodeIx,
        sel: &TargetSelection,
    ) -> Result<Self, SelectionError> {
        let description = renderer.render(target, &sel.neighbors, &sel.walks)?;
        let title = renderer.display_name(target)?.to_string();
        let mut seen: Vec<NodeIx> = Vec::new();
        let members = sel
            .neighbors
            .members
            .iter()
            .map(|m| m.0)
            .chain(sel.walks.iter().flat_map(|w| w.steps.iter().map(|s| s.1)));
        for n in members {
            if n != target && !seen.contains(&n) {
                seen.push(n);
            }
        }
        let key_nodes = seen
            .iter()
            .map(|&n| renderer.display_name(n).map(|s| s.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        let first_walk = match sel.walks.first() {
            Some(w) => {
                let mut s = title.clone();
                for &(rel, n) in &w.steps {
                    s.push(' ');
                    s.push_str(renderer.graph.relation_name(rel));
                    s.push(' ');
                    s.push_str(renderer.display_name(n)?);
                }
                Some(s)
            }
            None => None,
        };
        Ok(DescribedTarget {
            description,
            title,
            key_nodes,
            first_walk,
        })
    }
}

/// Select and render one target under `budget` tokens.
pub fn describe(
    renderer: &DescriptionRenderer<'_>,
    energies: &Energies,
    target: NodeIx,
    budget: usize,
    cfg: &SelectionConfig,
) -> Result<DescribedTarget, SelectionError> {
    let sel = selection::select_for_target(renderer, energies, target, budget, cfg)?;
    DescribedTarget::from_selection(renderer, target, &sel)
}

/// Describe both endpoints of a candidate link inside one shared budget.
///
/// Each description is first granted its own boilerplate; the remaining
/// tokens are split by softmax over the two energies.
pub fn describe_pair(
    graph: &AttributedGraph,
    template: &DescriptionTemplate,
    tokenizer: &crate::tokenize::TokenizerConfig,
    energies: &Energies,
    pair: (NodeIx, NodeIx),
    budget: usize,
    cfg: &SelectionConfig,
) -> Result<[DescribedTarget; 2], SelectionError> {
    let t1 = template.numbered(1);
    let t2 = template.numbered(2);
    let r1 = DescriptionRenderer::new(graph, &t1, tokenizer);
    let r2 = DescriptionRenderer::new(graph, &t2, tokenizer);
    let b1 = r1.boilerplate_cost(pair.0)?;
    let b2 = r2.boilerplate_cost(pair.1)?;
    if budget < b1 + b2 {
        return Err(SelectionError::BudgetTooSmall {
            node: format!("{}+{}", graph.node(pair.0).id, graph.node(pair.1).id),
            budget,
            boilerplate: b1 + b2,
        });
    }
    let surplus = (budget - b1 - b2) as u64;
    let shares = selection::allocate_multi_node_budget(
        &[energies.get(pair.0).clone(), energies.get(pair.1).clone()],
        surplus,
        cfg.softmax_temperature,
    );
    let first = describe(&r1, energies, pair.0, b1 + shares[0] as usize, cfg)?;
    let second = describe(&r2, energies, pair.1, b2 + shares[1] as usize, cfg)?;
    Ok([first, second])
}

fn check_inputs(
    task: TaskKind,
    descriptions: &[&DescribedTarget],
    gold: &Gold<'_>,
) -> Result<(), InstructError> {
    let expected = if task == TaskKind::LinkPrediction {
        2
    } else {
        1
    };
    if descriptions.len() != expected {
        return Err(InstructError::DescriptionCount {
            task,
            expected,
            got: descriptions.len(),
        });
    }
    if gold.task() != task {
        return Err(InstructError::GoldMismatch(task));
    }
    match gold {
        Gold::Label { label, label_space } => {
            if label_space.is_empty() {
                return Err(InstructError::EmptyLabelSpace);
            }
            if label.is_empty() {
                return Err(InstructError::MissingGold(task));
            }
            if !label_space.iter().any(|l| l == label) {
                return Err(InstructError::LabelNotInSpace(label.to_string()));
            }
        }
        Gold::Text(t) if t.trim().is_empty() => return Err(InstructError::MissingGold(task)),
        _ => {}
    }
    Ok(())
}

fn joined_input(descriptions: &[&DescribedTarget]) -> String {
    let mut input = String::new();
    for (i, d) in descriptions.iter().enumerate() {
        if i > 0 {
            input.push(' ');
        }
        input.push_str(&d.description.text);
    }
    input
}

pub fn render_standard(
    ctx: &TaskContext,
    task: TaskKind,
    descriptions: &[&DescribedTarget],
    gold: &Gold<'_>,
) -> Result<InstructionRecord, InstructError> {
    check_inputs(task, descriptions, gold)?;
    let label_space: &[String] = match gold {
        Gold::Label { label_space, .. } => label_space,
        _ => &[],
    };
    Ok(InstructionRecord {
        task,
        dataset: ctx.dataset.clone(),
        kind: RecordKind::Standard,
        instruction: ctx.standard_instruction(task, label_space),
        input: joined_input(descriptions),
        output: gold.answer().to_string(),
    })
}

/// Fields the offline generator fills its explanation from.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CotFields {
    pub task: TaskKind,
    pub entity: String,
    pub title: String,
    pub key_nodes: Vec<String>,
    pub first_walk: Option<String>,
    pub answer: String,
}

/// A CoT request: the prompt sent to a generator plus the record it will
/// complete.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CotPrompt {
    pub task: TaskKind,
    pub dataset: String,
    pub instruction: String,
    pub input: String,
    pub answer: String,
    pub text: String,
    pub fields: CotFields,
}

impl CotPrompt {
    /// Builds the CoT record around a generated explanation.
    pub fn into_record(self, ctx: &TaskContext, body: &str) -> InstructionRecord {
        InstructionRecord {
            task: self.task,
            dataset: self.dataset,
            kind: RecordKind::Cot,
            instruction: self.instruction,
            output: ctx.cot_output(self.task, &self.answer, body.trim()),
            input: self.input,
        }
    }
}

pub fn render_cot_prompt(
    ctx: &TaskContext,
    task: TaskKind,
    descriptions: &[&DescribedTarget],
    gold: &Gold<'_>,
) -> Result<CotPrompt, InstructError> {
    check_inputs(task, descriptions, gold)?;
    let answer = gold.answer().to_string();
    let title = &descriptions[0].title;
    let instruction = ctx.cot_instruction(task, title, &answer);
    let input = joined_input(descriptions);
    let text = match task {
        TaskKind::NodeClassification => format!("{instruction}\n\n{input}\n\nCategory: {answer}"),
        TaskKind::LinkPrediction => format!("{instruction}\n\n{input}\n\nLinked: {answer}"),
        TaskKind::GraphToText => format!("{instruction}\n\n{input}\n\nAbstract: {answer}"),
    };
    let fields = CotFields {
        task,
        entity: ctx.entity.clone(),
        title: title.clone(),
        key_nodes: descriptions
            .iter()
            .flat_map(|d| d.key_nodes.iter().cloned())
            .collect(),
        first_walk: descriptions.iter().find_map(|d| d.first_walk.clone()),
        answer,
    };
    Ok(CotPrompt {
        task,
        dataset: ctx.dataset.clone(),
        instruction,
        input,
        answer: fields.answer.clone(),
        text,
        fields,
    })
}

fn sentence_case(s: &str) -> String {
    let lower = s.to_lowercase();
    let mut chars = lower.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Deterministic stand-in for a remote generator; reads only `fields`.
pub fn offline_cot(fields: &CotFields) -> String {
    let main = fields.key_nodes.first().unwrap_or(&fields.title);
    let concept = sentence_case(main);
    let details: Vec<String> = fields
        .key_nodes
        .iter()
        .skip(1)
        .take(3)
        .map(|k| k.to_lowercase())
        .collect();
    let details = if details.is_empty() {
        String::from("no further key nodes were selected")
    } else {
        details.join(", ")
    };
    let relevance = match fields.task {
        TaskKind::NodeClassification => format!(
            "the graph context of {} points to {}",
            fields.title, fields.answer
        ),
        TaskKind::LinkPrediction => format!("both {}s share related graph context", fields.entity),
        TaskKind::GraphToText => {
            format!("the graph elements frame the abstract of {}", fields.title)
        }
    };
    let structure = fields
        .first_walk
        .clone()
        .unwrap_or_else(|| String::from("no informative walks were selected"));
    let conclusion = match fields.task {
        TaskKind::NodeClassification => {
            format!("the evidence is consistent with {}", fields.answer)
        }
        TaskKind::LinkPrediction => format!(
            "the answer {} follows from the shared context",
            fields.answer
        ),
        TaskKind::GraphToText => format!("the abstract builds on {}", concept.to_lowercase()),
    };
    format!(
        "1. Identify main concept: {concept}. 2. Clarify task relevance: {relevance}. \
         3. Detail key attributes: {details}. 4. Trace structure: {structure}. 5. Conclude: {conclusion}."
    )
}

/// Edges as canonical (smaller, larger) index pairs, parallel edges merged.
pub fn positive_pairs(graph: &AttributedGraph) -> Vec<(NodeIx, NodeIx)> {
    let set: BTreeSet<(NodeIx, NodeIx)> = graph
        .edges()
        .iter()
        .map(|e| {
            if e.src < e.dst {
                (e.src, e.dst)
            } else {
                (e.dst, e.src)
            }
        })
        .collect();
    set.into_iter().collect()
}

/// Up to `count` distinct unconnected pairs, uniformly sampled.
pub fn sample_negative_pairs(
    graph: &AttributedGraph,
    count: usize,
    root_seed: u64,
) -> Vec<(NodeIx, NodeIx)> {
    use rand::Rng;
    let n = graph.node_count() as u32;
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut rng = seed::rng(root_seed, "negatives", graph.dataset_name());
    let mut seen = BTreeSet::new();
    let mut attempts = 0usize;
    let max_attempts = count.saturating_mul(64).max(1024);
    while out.len() < count && attempts < max_attempts {
        attempts += 1;
        let a = NodeIx(rng.random_range(0..n));
        let b = NodeIx(rng.random_range(0..n));
        if a == b {
            continue;
        }
        let p = if a < b { (a, b) } else { (b, a) };
        if graph.connected(p.0, p.1) || !seen.insert(p) {
            continue;
        }
        out.push(p);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PackageRatio {
    pub standard: u32,
    pub cot: u32,
}

impl Default for PackageRatio {
    fn default() -> Self {
        PackageRatio {
            standard: 1000,
            cot: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct InstructionPackage {
    pub task: TaskKind,
    pub dataset: String,
    pub records: Vec<InstructionRecord>,
    pub standard_count: usize,
    pub cot_count: usize,
    pub ratio: PackageRatio,
}

impl InstructionPackage {
    pub fn is_full(&self) -> bool {
        self.standard_count == self.ratio.standard as usize
            && self.cot_count == self.ratio.cot as usize
    }
}

/// Shuffle both lists and pack them: full packages hold exactly
/// `ratio.standard` + `ratio.cot` records; standard records left over are
/// chunked into trailing packages carrying `floor(len * cot / standard)`
/// CoT records while any remain. Unused CoT records are dropped.
pub fn assemble_packages(
    mut standard: Vec<InstructionRecord>,
    mut cot: Vec<InstructionRecord>,
    ratio: PackageRatio,
    root_seed: u64,
) -> Result<Vec<InstructionPackage>, InstructError> {
    if ratio.standard == 0 {
        return Err(InstructError::ZeroStandardRatio);
    }
    if standard.is_empty() {
        return Ok(Vec::new());
    }
    if ratio.cot > 0 && cot.is_empty() {
        return Err(InstructError::InsufficientCot { cot: ratio.cot });
    }
    let (task, dataset) = (standard[0].task, standard[0].dataset.clone());
    if standard
        .iter()
        .chain(cot.iter())
        .any(|r| r.task != task || r.dataset != dataset)
    {
        return Err(InstructError::MixedPackage);
    }
    let key = format!("{}/{}", task.as_str(), dataset);
    seed::shuffle(
        &mut standard,
        &mut seed::rng(root_seed, "package-standard", &key),
    );
    seed::shuffle(&mut cot, &mut seed::rng(root_seed, "package-cot", &key));

    let s = ratio.standard as usize;
    let c = ratio.cot as usize;
    let mut packages = Vec::new();
    let mut cot_iter = cot.into_iter();
    let mut std_iter = standard.into_iter().peekable();
    let mut index = 0usize;
    while std_iter.peek().is_some() {
        let chunk: Vec<InstructionRecord> = std_iter.by_ref().take(s).collect();
        let want = chunk.len() * c / s;
        let cot_chunk: Vec<InstructionRecord> = cot_iter.by_ref().take(want).collect();
        let (standard_count, cot_count) = (chunk.len(), cot_chunk.len());
        let mut records = chunk;
        records.extend(cot_chunk);
        seed::shuffle(
            &mut records,
            &mut seed::rng(root_seed, "package-order", &format!("{key}#{index}")),
        );
        packages.push(InstructionPackage {
            task,
            dataset: dataset.clone(),
            records,
            standard_count,
            cot_count,
            ratio,
        });
        index += 1;
    }
    Ok(packages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn rec(kind: RecordKind, i: usize) -> InstructionRecord {
        InstructionRecord {
            task: TaskKind::NodeClassification,
            dataset: "toy".into(),
            kind,
            instruction: "i".into(),
            input: format!("{i}"),
            output: "cs.LG".into(),
        }
    }

    fn recs(kind: RecordKind, n: usize) -> Vec<InstructionRecord> {
        (0..n).map(|i| rec(kind, i)).collect()
    }

    fn target(title: &str) -> DescribedTarget {
        DescribedTarget {
            description: CompactDescription {
                target: "n".into(),
                text: format!("desc of {title}"),
                token_count: 3,
                sections: Default::default(),
            },
            title: title.into(),
            key_nodes: vec![],
            first_walk: None,
        }
    }

    #[test]
    fn package_counts() {
        let r = PackageRatio::default();
        let p = assemble_packages(
            recs(RecordKind::Standard, 2000),
            recs(RecordKind::Cot, 200),
            r,
            1,
        )
        .unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.iter().all(|p| p.is_full() && p.records.len() == 1100));

        let p = assemble_packages(
            recs(RecordKind::Standard, 1500),
            recs(RecordKind::Cot, 150),
            r,
            1,
        )
        .unwrap();
        assert_eq!(p.len(), 2);
        assert!(p[0].is_full());
        assert_eq!((p[1].standard_count, p[1].cot_count), (500, 50));

        assert!(assemble_packages(vec![], vec![], r, 1).unwrap().is_empty());
        assert_eq!(
            assemble_packages(recs(RecordKind::Standard, 5), vec![], r, 1),
            Err(InstructError::InsufficientCot { cot: 100 })
        );
    }

    #[test]
    fn small_ratio_until_exhaustion() {
        let r = PackageRatio {
            standard: 10,
            cot: 1,
        };
        let p = assemble_packages(
            recs(RecordKind::Standard, 30),
            recs(RecordKind::Cot, 5),
            r,
            9,
        )
        .unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.iter().all(|p| p.standard_count == 10 && p.cot_count == 1));
    }

    #[test]
    fn packaging_is_seed_deterministic() {
        let r = PackageRatio {
            standard: 4,
            cot: 1,
        };
        let a = assemble_packages(
            recs(RecordKind::Standard, 9),
            recs(RecordKind::Cot, 3),
            r,
            3,
        )
        .unwrap();
        let b = assemble_packages(
            recs(RecordKind::Standard, 9),
            recs(RecordKind::Cot, 3),
            r,
            3,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn standard_records() {
        let ctx = TaskContext::new("Arxiv");
        let labels: Vec<String> = (0..40)
            .map(|i| format!("cs.C{i}"))
            .chain([String::from("cs.LG")])
            .collect();
        let t = target("Deep Nets");
        let r = render_standard(
            &ctx,
            TaskKind::NodeClassification,
            &[&t],
            &Gold::Label {
                label: "cs.LG",
                label_space: &labels,
            },
        )
        .unwrap();
        assert_eq!(r.output, "cs.LG");
        assert!(r.instruction.contains("subcategories of computer science"));

        let err = render_standard(
            &ctx,
            TaskKind::NodeClassification,
            &[&t],
            &Gold::Label {
                label: "math.CO",
                label_space: &labels,
            },
        );
        assert_eq!(err, Err(InstructError::LabelNotInSpace("math.CO".into())));

        let r = render_standard(
            &ctx,
            TaskKind::LinkPrediction,
            &[&t, &target("B")],
            &Gold::Link(true),
        )
        .unwrap();
        assert_eq!(r.output, "yes");
        assert_eq!(r.input, "desc of Deep Nets desc of B");
        assert!(matches!(
            render_standard(&ctx, TaskKind::LinkPrediction, &[&t], &Gold::Link(true)),
            Err(InstructError::DescriptionCount { .. })
        ));
        assert_eq!(
            render_standard(&ctx, TaskKind::GraphToText, &[&t], &Gold::Text("  ")),
            Err(InstructError::MissingGold(TaskKind::GraphToText))
        );
    }

    #[test]
    fn cot_prompts_carry_answer() {
        let ctx = TaskContext::new("Arxiv");
        let labels = vec![String::from("cs.AI")];
        let t = target("Deep Nets");
        let p = render_cot_prompt(
            &ctx,
            TaskKind::NodeClassification,
            &[&t],
            &Gold::Label {
                label: "cs.AI",
                label_space: &labels,
            },
        )
        .unwrap();
        assert!(p.text.contains("Chain of Thought"));
        assert!(p.text.contains("cs.AI"));
        let p = render_cot_prompt(
            &ctx,
            TaskKind::LinkPrediction,
            &[&t, &target("B")],
            &Gold::Link(true),
        )
        .unwrap();
        assert!(p
            .text
            .contains("established link between PAPER 1 and PAPER 2"));
        let p = render_cot_prompt(
            &ctx,
            TaskKind::GraphToText,
            &[&t],
            &Gold::Text("An abstract."),
        )
        .unwrap();
        assert!(p.text.contains("influenced the generation of the abstract"));
        assert!(p.text.contains("An abstract."));
    }

    #[test]
    fn offline_cot_is_deterministic() {
        let fields = CotFields {
            task: TaskKind::GraphToText,
            entity: "PAPER".into(),
            title: "Incremental Learning in a Fuzzy Intelligent System".into(),
            key_nodes: vec![
                "Incremental fuzzy Learning Algorithm".into(),
                "Fuzzy Rule".into(),
            ],
            first_walk: None,
            answer: "abstract".into(),
        };
        let a = offline_cot(&fields);
        assert_eq!(a, offline_cot(&fields));
        assert!(a.starts_with("1. Identify main concept: Incremental fuzzy learning algorithm."));
    }
}
