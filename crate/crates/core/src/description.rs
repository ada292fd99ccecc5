//! Compact graph description rendering.
//!
//! Layout, sections in template order after the preamble:
//!
//! ```text
//! The compact graph description of this PAPER is listed as follows:
//! Title: <title>. Abstract: <abstract>.
//! Ego graph nodes: {1. METHOD: [A, B]; 2. TASK: [C]}.
//! One-hop neighbors: {A, B}.
//! Random walks: {1. T USED-FOR A USED-FOR C. 2. T USED-FOR B.}.
//! ```
//!
//! (rendered on one line, parts joined by single spaces). The ego section
//! lists every node of the selection, neighbors first and then walk nodes
//! in order of appearance, grouped by node type in type-name order. The
//! one-hop section lists the selected neighbors only.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::graph::{AttributedGraph, NodeIx, RelationId};
use crate::selection::{KeyNeighborSet, Walk};
use crate::tokenize::{count_tokens, TokenizerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Section {
    Attributes,
    EgoNodes,
    OneHop,
    Walks,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct TargetField {
    pub label: String,
    pub attribute: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct DescriptionTemplate {
    pub name: String,
    /// Leading sentence; `{node_type}` is replaced by the target's type.
    pub preamble: String,
    pub target_fields: Vec<TargetField>,
    /// Attribute naming other nodes in the ego, one-hop and walk sections.
    /// `None` uses each node's first attribute.
    pub display_attribute: Option<String>,
    pub sections: Vec<Section>,
    pub ego_header: String,
    pub one_hop_header: String,
    pub walks_header: String,
}

impl Default for DescriptionTemplate {
    fn default() -> Self {
        DescriptionTemplate::title_abstract()
    }
}

impl DescriptionTemplate {
    /// Title and abstract of the target followed by the three structure
    /// sections.
    pub fn title_abstract() -> Self {
        DescriptionTemplate {
            name: "title-abstract".into(),
            preamble: "The compact graph description of this {node_type} is listed as follows:"
                .into(),
            target_fields: alloc::vec![
                TargetField {
                    label: "Title".into(),
                    attribute: "title".into()
                },
                TargetField {
                    label: "Abstract".into(),
                    attribute: "abstract".into()
                },
            ],
            display_attribute: Some("title".into()),
            sections: alloc::vec![
                Section::Attributes,
                Section::EgoNodes,
                Section::OneHop,
                Section::Walks
            ],
            ego_header: "Ego graph nodes".into(),
            one_hop_header: "One-hop neighbors".into(),
            walks_header: "Random walks".into(),
        }
    }

    /// Title only, for tasks whose gold answer is the target's other text.
    pub fn title_only() -> Self {
        DescriptionTemplate {
            name: "title-only".into(),
            target_fields: alloc::vec![TargetField {
                label: "Title".into(),
                attribute: "title".into()
            }],
            ..DescriptionTemplate::title_abstract()
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "title-abstract" => Some(Self::title_abstract()),
            "title-only" => Some(Self::title_only()),
            _ => None,
        }
    }

    /// Copy whose preamble names the target as `<type> <ordinal>`, used when
    /// one input carries several descriptions.
    pub fn numbered(&self, ordinal: usize) -> Self {
        let mut t = self.clone();
        t.preamble = t
            .preamble
            .replace("{node_type}", &format!("{{node_type}} {ordinal}"));
        t
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DescriptionError {
    #[error("node `{node}` has no attribute `{field}`")]
    MissingAttribute { node: String, field: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct DescriptionSections {
    pub attributes: String,
    pub ego_nodes: String,
    pub one_hop: String,
    pub walks: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CompactDescription {
    pub target: String,
    pub text: String,
    pub token_count: usize,
    pub sections: DescriptionSections,
}

/// A template bound to a graph and tokenizer.
#[derive(Debug, Clone, Copy)]
pub struct DescriptionRenderer<'a> {
    pub graph: &'a AttributedGraph,
    pub template: &'a DescriptionTemplate,
    pub tokenizer: &'a TokenizerConfig,
}

impl<'a> DescriptionRenderer<'a> {
    pub fn new(
        graph: &'a AttributedGraph,
        template: &'a DescriptionTemplate,
        tokenizer: &'a TokenizerConfig,
    ) -> Self {
        DescriptionRenderer {
            graph,
            template,
            tokenizer,
        }
    }

    pub fn display_name(&self, ix: NodeIx) -> Result<&'a str, DescriptionError> {
        let node = self.graph.node(ix);
        let found = match &self.template.display_attribute {
            Some(field) => node.attribute(field),
            None => node.attributes.first().map(|(_, v)| v.as_str()),
        };
        found.ok_or_else(|| DescriptionError::MissingAttribute {
            node: node.id.clone(),
            field: self
                .template
                .display_attribute
                .clone()
                .unwrap_or_else(|| "<first attribute>".into()),
        })
    }

    fn sections(
        &self,
        target: NodeIx,
        neighbors: &[(NodeIx, RelationId)],
        walks: &[&[(RelationId, NodeIx)]],
    ) -> Result<DescriptionSections, DescriptionError> {
        let tmpl = self.template;
        let node = self.graph.node(target);
        let mut out = DescriptionSections::default();

        for (i, f) in tmpl.target_fields.iter().enumerate() {
            let value =
                node.attribute(&f.attribute)
                    .ok_or_else(|| DescriptionError::MissingAttribute {
                        node: node.id.clone(),
                        field: f.attribute.clone(),
                    })?;
            if i > 0 {
                out.attributes.push(' ');
            }
            let value = value.trim();
            let stop = if value.ends_with(['.', '!', '?']) {
                ""
            } else {
                "."
            };
            let _ = write!(out.attributes, "{}: {}{}", f.label, value, stop);
        }

        let mut ego: Vec<NodeIx> = Vec::new();
        let members = neighbors
            .iter()
            .map(|&(n, _)| n)
            .chain(walks.iter().flat_map(|w| w.iter().map(|&(_, n)| n)));
        for n in members {
            if n != target && !ego.contains(&n) {
                ego.push(n);
            }
        }
        let mut groups: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for &n in &ego {
            groups
                .entry(self.graph.node(n).node_type.as_str())
                .or_default()
                .push(self.display_name(n)?);
        }
        let _ = write!(out.ego_nodes, "{}: {{", tmpl.ego_header);
        for (k, (ty, names)) in groups.iter().enumerate() {
            if k > 0 {
                out.ego_nodes.push_str("; ");
            }
            let _ = write!(out.ego_nodes, "{}. {}: [{}]", k + 1, ty, names.join(", "));
        }
        out.ego_nodes.push_str("}.");

        let _ = write!(out.one_hop, "{}: {{", tmpl.one_hop_header);
        for (k, &(n, _)) in neighbors.iter().enumerate() {
            if k > 0 {
                out.one_hop.push_str(", ");
            }
            out.one_hop.push_str(self.display_name(n)?);
        }
        out.one_hop.push_str("}.");

        let target_name = if walks.is_empty() {
            ""
        } else {
            self.display_name(target)?
        };
        let _ = write!(out.walks, "{}: {{", tmpl.walks_header);
        for (k, steps) in walks.iter().enumerate() {
            if k > 0 {
                out.walks.push(' ');
            }
            let _ = write!(out.walks, "{}. {}", k + 1, target_name);
            for &(rel, n) in steps.iter() {
                let _ = write!(
                    out.walks,
                    " {} {}",
                    self.graph.relation_name(rel),
                    self.display_name(n)?
                );
            }
            out.walks.push('.');
        }
        out.walks.push_str("}.");
        Ok(out)
    }

    fn assemble(&self, target: NodeIx, s: &DescriptionSections) -> String {
        let tmpl = self.template;
        let mut text = tmpl
            .preamble
            .replace("{node_type}", &self.graph.node(target).node_type);
        for section in &tmpl.sections {
            let part = match section {
                Section::Attributes => &s.attributes,
                Section::EgoNodes => &s.ego_nodes,
                Section::OneHop => &s.one_hop,
                Section::Walks => &s.walks,
            };
            if part.is_empty() {
                continue;
            }
            if !text.is_empty() {
                text.push(' ');
            }
            text.push_str(part);
        }
        text
    }

    pub(crate) fn render_raw(
        &self,
        target: NodeIx,
        neighbors: &[(NodeIx, RelationId)],
        walks: &[&[(RelationId, NodeIx)]],
    ) -> Result<String, DescriptionError> {
        let s = self.sections(target, neighbors, walks)?;
        Ok(self.assemble(target, &s))
    }

    /// Token count of the description holding exactly this selection.
    pub fn measure(
        &self,
        target: NodeIx,
        neighbors: &[(NodeIx, RelationId)],
        walks: &[&[(RelationId, NodeIx)]],
    ) -> Result<usize, DescriptionError> {
        let text = self.render_raw(target, neighbors, walks)?;
        Ok(count_tokens(&text, self.tokenizer))
    }

    /// Tokens of the empty-selection rendering, target attributes included.
    pub fn boilerplate_cost(&self, target: NodeIx) -> Result<usize, DescriptionError> {
        self.measure(target, &[], &[])
    }

    pub fn render(
        &self,
        target: NodeIx,
        neighbors: &KeyNeighborSet,
        walks: &[Walk],
    ) -> Result<CompactDescription, DescriptionError> {
        let steps: Vec<&[(RelationId, NodeIx)]> =
            walks.iter().map(|w| w.steps.as_slice()).collect();
        let sections = self.sections(target, &neighbors.members, &steps)?;
        let text = self.assemble(target, &sections);
        Ok(CompactDescription {
            target: self.graph.node(target).id.to_string(),
            token_count: count_tokens(&text, self.tokenizer),
            text,
            sections,
        })
    }
}

pub fn render_description(
    graph: &AttributedGraph,
    target: NodeIx,
    neighbors: &KeyNeighborSet,
    walks: &[Walk],
    tmpl: &DescriptionTemplate,
    tokenizer: &TokenizerConfig,
) -> Result<CompactDescription, DescriptionError> {
    DescriptionRenderer::new(graph, tmpl, tokenizer).render(target, neighbors, walks)
}

pub fn boilerplate_cost(
    tmpl: &DescriptionTemplate,
    target: NodeIx,
    graph: &AttributedGraph,
    tokenizer: &TokenizerConfig,
) -> Result<usize, DescriptionError> {
    DescriptionRenderer::new(graph, tmpl, tokenizer).boilerplate_cost(target)
}
