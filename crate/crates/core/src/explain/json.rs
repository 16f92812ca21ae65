use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{
    ArgumentationGraph, CaseArgument, DecisionMode, Edge, FinalArgument, OptionArgument, Provenance,
    GRAPH_SCHEMA_VERSION,
};

#[derive(Debug, Error)]
pub enum GraphParseError {
    #[error("graph-json error at {path}: {message}")]
    Json { path: String, message: String },
    #[error("unsupported graph schema version {0:?}")]
    Version(String),
    #[error("malformed graph: {0}")]
    Structure(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    schema_version: String,
    provenance: Provenance,
    decision: Decision,
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Decision {
    chosen: String,
    mode: DecisionMode,
}

#[derive(Serialize, Deserialize)]
struct NodeRecord {
    layer: u8,
    #[serde(flatten)]
    node: Node,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Node {
    Case(CaseArgument),
    Option(OptionArgument),
    Final(FinalArgument),
}

#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    layer: EdgeLayer,
    #[serde(flatten)]
    edge: Edge,
}

#[derive(Serialize, Deserialize, PartialEq, Eq, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum EdgeLayer {
    E12,
    E23,
}

/// Canonical graph-JSON: fixed key order, weights as 12-significant-digit
/// decimal strings, trailing newline.
pub fn render_graph_json(graph: &ArgumentationGraph) -> String {
    let nodes = graph
        .v1
        .iter()
        .cloned()
        .map(|c| NodeRecord {
            layer: 1,
            node: Node::Case(c),
        })
        .chain(graph.v2.iter().cloned().map(|o| NodeRecord {
            layer: 2,
            node: Node::Option(o),
        }))
        .chain(std::iter::once(NodeRecord {
            layer: 3,
            node: Node::Final(graph.v3.clone()),
        }))
        .collect();
    let edges = graph
        .e12
        .iter()
        .map(|e| EdgeRecord {
            layer: EdgeLayer::E12,
            edge: e.clone(),
        })
        .chain(graph.e23.iter().map(|e| EdgeRecord {
            layer: EdgeLayer::E23,
            edge: e.clone(),
        }))
        .collect();
    let doc = Document {
        schema_version: GRAPH_SCHEMA_VERSION.to_string(),
        provenance: graph.provenance.clone(),
        decision: Decision {
            chosen: graph.v3.chosen.clone(),
            mode: graph.provenance.mode,
        },
        nodes,
        edges,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("graph serializes");
    s.push('\n');
    s
}

/// Reads graph-JSON back. The result equals the rendered graph with every
/// weight rounded to 12 significant digits.
pub fn parse_graph_json(text: &str) -> Result<ArgumentationGraph, GraphParseError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: Document = serde_path_to_error::deserialize(&mut de).map_err(|e| GraphParseError::Json {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })?;
    if doc.schema_version != GRAPH_SCHEMA_VERSION {
        return Err(GraphParseError::Version(doc.schema_version));
    }
    let structure = |m: String| GraphParseError::Structure(m);
    let mut v1 = Vec::new();
    let mut v2 = Vec::new();
    let mut v3 = None;
    for (i, rec) in doc.nodes.into_iter().enumerate() {
        match (rec.layer, rec.node) {
            (1, Node::Case(c)) => v1.push(c),
            (2, Node::Option(o)) => v2.push(o),
            (3, Node::Final(f)) if v3.is_none() => v3 = Some(f),
            (3, Node::Final(_)) => return Err(structure(format!("nodes[{i}]: second final node"))),
            (layer, _) => {
                return Err(structure(format!(
                    "nodes[{i}]: node kind does not match layer {layer}"
                )))
            }
        }
    }
    let v3 = v3.ok_or_else(|| structure("no final node".into()))?;
    if doc.decision.chosen != v3.chosen || doc.decision.mode != doc.provenance.mode {
        return Err(structure("decision block disagrees with the final node".into()));
    }
    let mut ids = BTreeSet::new();
    let all_ids = v1
        .iter()
        .map(|c| &c.id)
        .chain(v2.iter().map(|o| &o.id))
        .chain(std::iter::once(&v3.id));
    for id in all_ids {
        if !ids.insert(id.clone()) {
            return Err(structure(format!("duplicate node id `{id}`")));
        }
    }
    let mut e12 = Vec::new();
    let mut e23 = Vec::new();
    for (i, rec) in doc.edges.into_iter().enumerate() {
        if !ids.contains(&rec.edge.from) || !ids.contains(&rec.edge.to) {
            return Err(structure(format!("edges[{i}]: endpoint is not a node")));
        }
        match rec.layer {
            EdgeLayer::E12 => e12.push(rec.edge),
            EdgeLayer::E23 => e23.push(rec.edge),
        }
    }
    Ok(ArgumentationGraph {
        provenance: doc.provenance,
        v1,
        v2,
        v3,
        e12,
        e23,
    })
}
