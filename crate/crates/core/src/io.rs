//! Graph file formats: canonical JSON (one graph per file or per line) and
//! DOT export.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{LayerProfile, LayeredGraph, VertexId};

/// On-disk shape of a graph:
/// `{"layers":[1,2,1],"edges":[[[1,0],[0,0]], …]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphRecord {
    pub layers: Vec<usize>,
    pub edges: Vec<[[usize; 2]; 2]>,
}

impl From<&LayeredGraph> for GraphRecord {
    fn from(g: &LayeredGraph) -> Self {
        GraphRecord {
            layers: g.profile().sizes().to_vec(),
            // BTreeSet order is the lexicographic (tail, head) order.
            edges: g.edges().iter().map(|&(t, h)| [t.into(), h.into()]).collect(),
        }
    }
}

impl GraphRecord {
    /// Check the layered-graph invariants, naming the offending element.
    pub fn into_graph(self) -> Result<LayeredGraph> {
        let profile = LayerProfile::new(self.layers.clone()).map_err(|e| Error::input(format!("layers: {e}")))?;
        let n = profile.height();
        let mut seen = std::collections::BTreeSet::new();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (pos, [t, h]) in self.edges.iter().enumerate() {
            let (t, h) = (VertexId::from(*t), VertexId::from(*h));
            for (role, v) in [("tail", t), ("head", h)] {
                if v.level > n {
                    return Err(Error::input(format!("edge {pos}: {role} [{},{}] is above the top level {n}", v.level, v.index)));
                }
                if v.index >= profile.size(v.level) {
                    return Err(Error::input(format!(
                        "edge {pos}: {role} [{},{}] is out of range (level {} has {} vertices)",
                        v.level,
                        v.index,
                        v.level,
                        profile.size(v.level)
                    )));
                }
            }
            if t.level != h.level + 1 {
                return Err(Error::input(format!(
                    "edge {pos}: tail [{},{}] and head [{},{}] are not on adjacent levels",
                    t.level, t.index, h.level, h.index
                )));
            }
            if !seen.insert((t, h)) {
                return Err(Error::input(format!(
                    "edge {pos}: duplicate edge [[{},{}],[{},{}]]",
                    t.level, t.index, h.level, h.index
                )));
            }
            edges.push((t, h));
        }
        LayeredGraph::new(profile, edges)
    }
}

/// Canonical single-line JSON for a graph (edges sorted lexicographically).
pub fn to_json(g: &LayeredGraph) -> String {
    serde_json::to_string(&GraphRecord::from(g)).expect("graph record serializes")
}

pub fn from_json(text: &str) -> Result<LayeredGraph> {
    let record: GraphRecord =
        serde_json::from_str(text).map_err(|e| Error::input(format!("malformed graph JSON: {e}")))?;
    record.into_graph()
}

/// Parse one graph per non-blank line; diagnostics carry the line number.
pub fn from_json_lines(text: &str) -> Result<Vec<LayeredGraph>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| from_json(l).map_err(|e| Error::input(format!("line {}: {}", i + 1, strip_prefix(&e)))))
        .collect()
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Input(m) => m.clone(),
        other => other.to_string(),
    }
}

/// Graphviz rendering: one rank per level, top level drawn first.
pub fn to_dot(g: &LayeredGraph, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", name.replace('"', "'"));
    let _ = writeln!(out, "  rankdir=TB;");
    for level in (0..=g.height()).rev() {
        let names: Vec<String> = (0..g.level_size(level)).map(|i| VertexId::new(level, i).to_string()).collect();
        let _ = writeln!(out, "  {{ rank=same; {}; }}", names.join("; "));
    }
    for (t, h) in g.edges() {
        let _ = writeln!(out, "  {t} -> {h};");
    }
    out.push_str("}\n");
    out
}
