//! Immutable attributed multigraph.
//!
//! Nodes are stored sorted by id, so ascending [`NodeIx`] order is ascending
//! id order and adjacency lists sorted by index are sorted by neighbor id.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Dense node index; ordering agrees with node id ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct NodeIx(pub u32);

impl NodeIx {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index into the graph's relation table (sorted by relation name).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RelationId(pub u32);

/// Which edge orientations neighborhood queries expose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Traversal {
    /// Every edge is visible from both endpoints.
    #[default]
    Undirected,
    /// Edges flagged `directed` are only visible from their source.
    Directed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Node {
    pub id: String,
    pub node_type: String,
    /// Attribute values in schema order.
    pub attributes: Vec<(String, String)>,
    pub label: Option<String>,
}

impl Node {
    pub fn new(id: impl Into<String>, node_type: impl Into<String>) -> Self {
        Node {
            id: id.into(),
            node_type: node_type.into(),
            attributes: Vec::new(),
            label: None,
        }
    }

    pub fn with_attribute(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.attributes.push((name.into(), value.into()));
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn attribute(&self, name: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    /// Schema-ordered attribute values joined by single spaces.
    pub fn attribute_text(&self) -> String {
        let mut out = String::new();
        for (i, (_, v)) in self.attributes.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(v);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Edge {
    pub src: NodeIx,
    pub dst: NodeIx,
    pub relation: RelationId,
    pub directed: bool,
}

/// One adjacency entry as seen from the owning node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Adjacent {
    pub node: NodeIx,
    pub relation: RelationId,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("node id must be non-empty")]
    EmptyId,
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("edge endpoint `{0}` is not a known node")]
    DanglingEndpoint(String),
    #[error("unknown node id `{0}`")]
    UnknownNode(String),
    #[error("relation name must be non-empty")]
    EmptyRelation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct AttributedGraph {
    dataset_name: String,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    relations: Vec<String>,
    adjacency: Vec<Vec<Adjacent>>,
    traversal: Traversal,
    skipped_self_loops: usize,
}

impl AttributedGraph {
    pub fn dataset_name(&self) -> &str {
        &self.dataset_name
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn traversal(&self) -> Traversal {
        self.traversal
    }

    /// Self-loop records dropped during construction.
    pub fn skipped_self_loops(&self) -> usize {
        self.skipped_self_loops
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn relations(&self) -> &[String] {
        &self.relations
    }

    pub fn node(&self, ix: NodeIx) -> &Node {
        &self.nodes[ix.index()]
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeIx> + '_ {
        (0..self.nodes.len() as u32).map(NodeIx)
    }

    pub fn relation_name(&self, rel: RelationId) -> &str {
        &self.relations[rel.0 as usize]
    }

    pub fn relation_id(&self, name: &str) -> Option<RelationId> {
        self.relations
            .binary_search_by(|r| r.as_str().cmp(name))
            .ok()
            .map(|i| RelationId(i as u32))
    }

    pub fn lookup(&self, id: &str) -> Option<NodeIx> {
        self.nodes
            .binary_search_by(|n| n.id.as_str().cmp(id))
            .ok()
            .map(|i| NodeIx(i as u32))
    }

    pub fn require(&self, id: &str) -> Result<NodeIx, GraphError> {
        self.lookup(id)
            .ok_or_else(|| GraphError::UnknownNode(id.into()))
    }

    /// Adjacency of `ix`, sorted by (neighbor, relation).
    pub fn neighbors(&self, ix: NodeIx) -> &[Adjacent] {
        &self.adjacency[ix.index()]
    }

    pub fn degree_of(&self, ix: NodeIx) -> usize {
        self.adjacency[ix.index()].len()
    }

    /// One-hop neighbors of the node named `id` as (neighbor-id, relation-name).
    pub fn one_hop_neighbors(&self, id: &str) -> Result<Vec<(&str, &str)>, GraphError> {
        let ix = self.require(id)?;
        Ok(self
            .neighbors(ix)
            .iter()
            .map(|a| {
                (
                    self.node(a.node).id.as_str(),
                    self.relation_name(a.relation),
                )
            })
            .collect())
    }

    pub fn degree(&self, id: &str) -> Result<usize, GraphError> {
        self.require(id).map(|ix| self.degree_of(ix))
    }

    /// Whether any edge joins `a` and `b`, in either orientation.
    pub fn connected(&self, a: NodeIx, b: NodeIx) -> bool {
        let probe = |x: NodeIx, y: NodeIx| {
            let adj = &self.adjacency[x.index()];
            let start = adj.partition_point(|e| e.node < y);
            adj.get(start).is_some_and(|e| e.node == y)
        };
        probe(a, b) || probe(b, a)
    }
}

/// Incremental, validating constructor for [`AttributedGraph`].
///
/// Nodes must be added before the edges that reference them; each call
/// reports its own error so callers can attach source positions.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    dataset_name: String,
    nodes: Vec<Node>,
    index: BTreeMap<String, usize>,
    edges: Vec<(usize, usize, String, bool)>,
    skipped_self_loops: usize,
}

impl GraphBuilder {
    pub fn new(dataset_name: impl Into<String>) -> Self {
        GraphBuilder {
            dataset_name: dataset_name.into(),
            ..Default::default()
        }
    }

    pub fn add_node(&mut self, node: Node) -> Result<(), GraphError> {
        if node.id.is_empty() {
            return Err(GraphError::EmptyId);
        }
        if self.index.contains_key(&node.id) {
            return Err(GraphError::DuplicateNode(node.id));
        }
        self.index.insert(node.id.clone(), self.nodes.len());
        self.nodes.push(node);
        Ok(())
    }

    pub fn add_edge(
        &mut self,
        src: &str,
        dst: &str,
        relation: &str,
        directed: bool,
    ) -> Result<(), GraphError> {
        let s = *self
            .index
            .get(src)
            .ok_or_else(|| GraphError::DanglingEndpoint(src.into()))?;
        let d = *self
            .index
            .get(dst)
            .ok_or_else(|| GraphError::DanglingEndpoint(dst.into()))?;
        if relation.is_empty() {
            return Err(GraphError::EmptyRelation);
        }
        if s == d {
            self.skipped_self_loops += 1;
            return Ok(());
        }
        self.edges.push((s, d, relation.into(), directed));
        Ok(())
    }

    pub fn build(self, traversal: Traversal) -> AttributedGraph {
        let GraphBuilder {
            dataset_name,
            nodes,
            edges,
            skipped_self_loops,
            ..
        } = self;

        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by(|&a, &b| nodes[a].id.cmp(&nodes[b].id));
        let mut remap = alloc::vec![0u32; nodes.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new as u32;
        }
        let mut slots: Vec<Option<Node>> = nodes.into_iter().map(Some).collect();
        let nodes: Vec<Node> = order
            .iter()
            .map(|&old| slots[old].take().expect("each node moved once"))
            .collect();

        let mut relations: Vec<String> = edges.iter().map(|e| e.2.clone()).collect();
        relations.sort();
        relations.dedup();
        let rel_of = |name: &str| {
            RelationId(
                relations
                    .binary_search_by(|r| r.as_str().cmp(name))
                    .unwrap() as u32,
            )
        };

        let edges: Vec<Edge> = edges
            .iter()
            .map(|(s, d, rel, directed)| Edge {
                src: NodeIx(remap[*s]),
                dst: NodeIx(remap[*d]),
                relation: rel_of(rel),
                directed: *directed,
            })
            .collect();

        let mut adjacency: Vec<Vec<Adjacent>> = alloc::vec![Vec::new(); nodes.len()];
        for e in &edges {
            adjacency[e.src.index()].push(Adjacent {
                node: e.dst,
                relation: e.relation,
            });
            if !(e.directed && traversal == Traversal::Directed) {
                adjacency[e.dst.index()].push(Adjacent {
                    node: e.src,
                    relation: e.relation,
                });
            }
        }
        for adj in &mut adjacency {
            adj.sort();
        }

        AttributedGraph {
            dataset_name,
            nodes,
            edges,
            relations,
            adjacency,
            traversal,
            skipped_self_loops,
        }
    }
}
