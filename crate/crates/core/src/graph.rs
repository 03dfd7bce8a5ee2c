//! Hypergraph view of compatibility structure.
//!
//! Vertices are basic measurements; hyperedges are contexts. A trivialized
//! theory's graph has no edges of its own, but can be annotated with
//! shared-marginal edges (drawn broken/dashed), and that annotated graph is
//! the line graph of the original theory's graph.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::theory::OperationalTheory;
use crate::trivialize::TrivializationMap;

/// What an edge asserts about its endpoints.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EdgeStyle {
    /// Solid: the endpoints can be measured simultaneously.
    Compatibility,
    /// Broken: the endpoints have operationally equivalent marginalizations.
    SharedMarginal,
}

/// An undirected hypergraph with ordered vertices and a single edge style.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Hypergraph {
    pub vertices: Vec<String>,
    pub hyperedges: Vec<BTreeSet<String>>,
    pub edge_style: EdgeStyle,
}

impl Hypergraph {
    pub fn new(
        vertices: impl IntoIterator<Item = impl Into<String>>,
        hyperedges: impl IntoIterator<Item = BTreeSet<String>>,
        edge_style: EdgeStyle,
    ) -> Self {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut seen: BTreeSet<BTreeSet<String>> = BTreeSet::new();
        let mut edges = Vec::new();
        for e in hyperedges {
            debug_assert!(e.iter().all(|v| vertices.iter().any(|w| w == v)));
            if seen.insert(e.clone()) {
                edges.push(e);
            }
        }
        Hypergraph {
            vertices,
            hyperedges: edges,
            edge_style,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.hyperedges.len()
    }

    /// True when every pair of hyperedges intersects in at most one vertex.
    pub fn is_linear(&self) -> bool {
        for (i, a) in self.hyperedges.iter().enumerate() {
            for b in &self.hyperedges[i + 1..] {
                if a.intersection(b).count() > 1 {
                    return false;
                }
            }
        }
        true
    }

    /// The line graph: one vertex per hyperedge, one edge per pair of
    /// hyperedges sharing at least one vertex. Edges carry the
    /// shared-marginal style, matching their meaning for trivialized theories.
    pub fn line_graph(&self) -> Hypergraph {
        let names: Vec<String> = self.hyperedges.iter().map(edge_name).collect();
        let mut edges = Vec::new();
        for i in 0..self.hyperedges.len() {
            for j in (i + 1)..self.hyperedges.len() {
                if self.hyperedges[i]
                    .intersection(&self.hyperedges[j])
                    .next()
                    .is_some()
                {
                    let mut e = BTreeSet::new();
                    e.insert(names[i].clone());
                    e.insert(names[j].clone());
                    edges.push(e);
                }
            }
        }
        Hypergraph {
            vertices: names,
            hyperedges: edges,
            edge_style: EdgeStyle::SharedMarginal,
        }
    }

    /// Deterministic DOT rendering. Hyperedges of size > 2 are drawn through a
    /// square auxiliary node connected to each member; shared-marginal edges
    /// are dashed. Identical inputs yield identical bytes.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("graph \"{name}\" {{\n"));
        out.push_str("  node [shape=circle];\n");
        for v in &self.vertices {
            out.push_str(&format!("  \"{v}\";\n"));
        }
        let dashed = matches!(self.edge_style, EdgeStyle::SharedMarginal);
        let attr = if dashed { " [style=dashed]" } else { "" };
        for (i, e) in self.hyperedges.iter().enumerate() {
            if e.len() == 2 {
                let mut it = e.iter();
                let (a, b) = (it.next().unwrap(), it.next().unwrap());
                out.push_str(&format!("  \"{a}\" -- \"{b}\"{attr};\n"));
            } else {
                let hub = format!("ctx{i}");
                out.push_str(&format!(
                    "  \"{hub}\" [shape=square, label=\"\", width=0.15];\n"
                ));
                for v in e {
                    out.push_str(&format!("  \"{hub}\" -- \"{v}\"{attr};\n"));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn edge_name(edge: &BTreeSet<String>) -> String {
    let labels: Vec<&str> = edge.iter().map(String::as_str).collect();
    format!("{{{}}}", labels.join(","))
}

/// The compatibility graph of a theory: one vertex per basic measurement (in
/// declaration order), one solid hyperedge per context.
pub fn from_theory(theory: &OperationalTheory) -> Hypergraph {
    Hypergraph::new(
        theory.basics().iter().map(|b| b.label.clone()),
        theory.contexts(),
        EdgeStyle::Compatibility,
    )
}

/// The graph of a trivialized theory annotated with shared-marginal edges:
/// vertices are the new basics (and carried lone basics), and two vertices are
/// joined exactly when their source contexts shared an old basic measurement.
/// The rule is purely combinatorial, so the result equals the line graph of
/// the original theory's graph, extended by the isolated lone-basic vertices.
pub fn annotated_trivial_graph(map: &TrivializationMap) -> Hypergraph {
    let mut vertices: Vec<String> = map.new_basics().map(|(_, l)| l.to_string()).collect();
    vertices.extend(map.carried_basics().map(str::to_string));
    let entries: Vec<(&BTreeSet<String>, &str)> = map.new_basics().collect();
    let mut edges = Vec::new();
    for i in 0..entries.len() {
        for j in (i + 1)..entries.len() {
            if entries[i].0.intersection(entries[j].0).next().is_some() {
                let mut e = BTreeSet::new();
                e.insert(entries[i].1.to_string());
                e.insert(entries[j].1.to_string());
                edges.push(e);
            }
        }
    }
    Hypergraph::new(vertices, edges, EdgeStyle::SharedMarginal)
}

/// The GHZ hypergraph: 10 basic measurements arranged in 5 contexts of 4,
/// every pair of contexts meeting in exactly one vertex. Vertex `G{i}{j}`
/// is the common member of contexts `i` and `j`.
pub fn ghz_graph() -> Hypergraph {
    let mut vertices = Vec::new();
    for i in 1..=5u8 {
        for j in (i + 1)..=5u8 {
            vertices.push(format!("G{i}{j}"));
        }
    }
    let mut edges = Vec::new();
    for i in 1..=5u8 {
        let edge: BTreeSet<String> = (1..=5u8)
            .filter(|&j| j != i)
            .map(|j| {
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                format!("G{a}{b}")
            })
            .collect();
        edges.push(edge);
    }
    Hypergraph::new(vertices, edges, EdgeStyle::Compatibility)
}

/// The Peres–Mermin hypergraph: a 3×3 grid of basic measurements `M{r}{c}`
/// with 6 contexts, one per row and one per column.
pub fn peres_mermin_graph() -> Hypergraph {
    let mut vertices = Vec::new();
    for r in 1..=3u8 {
        for c in 1..=3u8 {
            vertices.push(format!("M{r}{c}"));
        }
    }
    let mut edges = Vec::new();
    for r in 1..=3u8 {
        edges.push((1..=3u8).map(|c| format!("M{r}{c}")).collect());
    }
    for c in 1..=3u8 {
        edges.push((1..=3u8).map(|r| format!("M{r}{c}")).collect());
    }
    Hypergraph::new(vertices, edges, EdgeStyle::Compatibility)
}

/// The Bell-scenario graph: the four-cycle A0–B0–A1–B1.
pub fn bell_graph() -> Hypergraph {
    from_theory(&crate::theory::classical_theory())
}
