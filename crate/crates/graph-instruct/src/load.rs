//! Graph ingestion from newline-delimited JSON node and edge files.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use graph_instruct_core::{AttributedGraph, GraphBuilder, GraphError, Node, Traversal};
use serde_json::{Map, Value};

use crate::config::{DatasetConfig, SchemaConfig};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}:{line}: {source}", path.display())]
    Graph {
        path: PathBuf,
        line: usize,
        source: GraphError,
    },
}

/// Scalar field as text. Strings pass through, numbers and booleans are
/// printed, `null` and absent fields are `None`.
fn scalar(obj: &Map<String, Value>, field: &str) -> Result<Option<String>, String> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(Value::Number(n)) => Ok(Some(n.to_string())),
        Some(Value::Bool(b)) => Ok(Some(b.to_string())),
        Some(_) => Err(format!("field `{field}` must be a scalar")),
    }
}

fn for_each_record(
    path: &Path,
    mut f: impl FnMut(usize, &Map<String, Value>) -> Result<(), LoadError>,
) -> Result<(), LoadError> {
    let io = |source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    };
    let reader = BufReader::new(File::open(path).map_err(io)?);
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io)?;
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| LoadError::Malformed {
            path: path.to_path_buf(),
            line: n,
            message,
        };
        let value: Value = serde_json::from_str(&line).map_err(|e| malformed(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| malformed("record is not a JSON object".into()))?;
        f(n, obj)?;
    }
    Ok(())
}

fn node_from(schema: &SchemaConfig, obj: &Map<String, Value>) -> Result<Node, String> {
    let id = scalar(obj, &schema.id)?.ok_or_else(|| format!("missing id field `{}`", schema.id))?;
    let node_type = match &schema.node_type {
        Some(f) => scalar(obj, f)?,
        None => None,
    }
    .unwrap_or_else(|| schema.default_type.clone());
    let mut node = Node::new(id, node_type);
    for field in &schema.attributes {
        if let Some(v) = scalar(obj, field)? {
            node = node.with_attribute(field.clone(), v);
        }
    }
    if let Some(f) = &schema.label {
        if let Some(l) = scalar(obj, f)?.filter(|l| !l.is_empty()) {
            node = node.with_label(l);
        }
    }
    Ok(node)
}

struct EdgeRecord {
    src: String,
    dst: String,
    relation: String,
    directed: bool,
}

fn edge_from(schema: &SchemaConfig, obj: &Map<String, Value>) -> Result<EdgeRecord, String> {
    let src = scalar(obj, &schema.src)?.ok_or_else(|| format!("missing field `{}`", schema.src))?;
    let dst = scalar(obj, &schema.dst)?.ok_or_else(|| format!("missing field `{}`", schema.dst))?;
    let relation = scalar(obj, &schema.relation)?
        .or_else(|| schema.default_relation.clone())
        .ok_or_else(|| format!("missing field `{}`", schema.relation))?;
    let directed = match schema.directed.as_deref().and_then(|f| obj.get(f)) {
        None | Some(Value::Null) => schema.directed_default,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err("`directed` must be a boolean".into()),
    };
    Ok(EdgeRecord {
        src,
        dst,
        relation,
        directed,
    })
}

pub fn load_graph(
    name: &str,
    nodes_path: &Path,
    edges_path: &Path,
    schema: &SchemaConfig,
    traversal: Traversal,
) -> Result<AttributedGraph, LoadError> {
    let mut b = GraphBuilder::new(name);
    for_each_record(nodes_path, |line, obj| {
        let node = node_from(schema, obj).map_err(|message| LoadError::Malformed {
            path: nodes_path.to_path_buf(),
            line,
            message,
        })?;
        b.add_node(node).map_err(|source| LoadError::Graph {
            path: nodes_path.to_path_buf(),
            line,
            source,
        })
    })?;
    for_each_record(edges_path, |line, obj| {
        let e = edge_from(schema, obj).map_err(|message| LoadError::Malformed {
            path: edges_path.to_path_buf(),
            line,
            message,
        })?;
        b.add_edge(&e.src, &e.dst, &e.relation, e.directed)
            .map_err(|source| LoadError::Graph {
                path: edges_path.to_path_buf(),
                line,
                source,
            })
    })?;
    Ok(b.build(traversal))
}

pub fn load_dataset(d: &DatasetConfig) -> Result<AttributedGraph, LoadError> {
    load_graph(&d.name, &d.nodes, &d.edges, &d.schema, d.traversal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        File::create(&p)
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
        p
    }

    #[test]
    fn numbers_become_text_and_missing_type_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let n = write(
            dir.path(),
            "n.jsonl",
            "{\"id\": 1, \"title\": \"x\"}\n\n{\"id\": \"2\", \"type\": \"T\"}\n",
        );
        let e = write(
            dir.path(),
            "e.jsonl",
            "{\"src\": 1, \"dst\": \"2\", \"relation\": \"R\"}\n",
        );
        let g = load_graph("t", &n, &e, &SchemaConfig::default(), Traversal::Undirected).unwrap();
        let a = g.lookup("1").unwrap();
        assert_eq!(g.node(a).node_type, "NODE");
        assert_eq!(g.node(a).attribute("title"), Some("x"));
        assert_eq!(g.degree("2").unwrap(), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let n = write(
            dir.path(),
            "n.jsonl",
            "{\"id\": \"a\"}\n{\"id\": \"b\"}\n{\"id\": \"a\"}\n",
        );
        let e = write(dir.path(), "e.jsonl", "");
        let err =
            load_graph("t", &n, &e, &SchemaConfig::default(), Traversal::Undirected).unwrap_err();
        assert!(
            err.to_string()
                .ends_with("n.jsonl:3: duplicate node id `a`"),
            "{err}"
        );

        let n = write(dir.path(), "n2.jsonl", "{\"id\": \"a\"}\n{oops\n");
        let err =
            load_graph("t", &n, &e, &SchemaConfig::default(), Traversal::Undirected).unwrap_err();
        assert!(matches!(err, LoadError::Malformed { line: 2, .. }), "{err}");

        let n = write(dir.path(), "n3.jsonl", "{\"id\": \"a\"}\n");
        let e = write(
            dir.path(),
            "e3.jsonl",
            "{\"src\": \"a\", \"dst\": \"zz\", \"relation\": \"R\"}\n",
        );
        let err =
            load_graph("t", &n, &e, &SchemaConfig::default(), Traversal::Undirected).unwrap_err();
        assert!(
            err.to_string().contains("e3.jsonl:1: edge endpoint `zz`"),
            "{err}"
        );
    }

    #[test]
    fn missing_relation_uses_default_or_fails() {
        let dir = tempfile::tempdir().unwrap();
        let n = write(dir.path(), "n.jsonl", "{\"id\": \"a\"}\n{\"id\": \"b\"}\n");
        let e = write(dir.path(), "e.jsonl", "{\"src\": \"a\", \"dst\": \"b\"}\n");
        let mut schema = SchemaConfig::default();
        assert!(load_graph("t", &n, &e, &schema, Traversal::Undirected).is_err());
        schema.default_relation = Some("LINK".into());
        let g = load_graph("t", &n, &e, &schema, Traversal::Undirected).unwrap();
        assert_eq!(g.relations(), ["LINK"]);
    }
}
