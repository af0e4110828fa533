//! JSON and DOT renderings of trees and graphs. Output order is fixed so the
//! same instance always produces the same bytes.

use std::fmt::Write;

use serde::Serialize;

use crate::laakso_graph::LaaksoGraph;
use crate::tree_space::TreeSpace;

#[derive(Serialize)]
struct TreeVertex<'a> {
    elements: &'a [u32],
    level: usize,
}

#[derive(Serialize)]
struct GraphVertex {
    id: String,
    level: u64,
}

#[derive(Serialize)]
struct GraphJson {
    n: u32,
    b: u32,
    vertices: Vec<GraphVertex>,
    edges: Vec<[String; 2]>,
}

/// Nodes in lexicographic order as `{"elements": [...], "level": k}`.
pub fn tree_json(tree: &TreeSpace) -> String {
    let vertices: Vec<TreeVertex> = tree
        .nodes()
        .iter()
        .map(|node| TreeVertex { elements: node.elements(), level: node.level() })
        .collect();
    serde_json::to_string(&vertices).expect("tree vertices serialize")
}

/// Each undirected edge once, as vertex-index pairs `(u, v)` with `u < v`, sorted.
pub fn graph_edges(graph: &LaaksoGraph) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = graph
        .vertices()
        .flat_map(|u| {
            graph
                .neighbors(u)
                .iter()
                .filter(move |v| v.index() > u.index())
                .map(move |v| (u.index(), v.index()))
        })
        .collect();
    edges.sort_unstable();
    edges
}

pub fn laakso_json(graph: &LaaksoGraph) -> String {
    let labels: Vec<String> = graph.vertices().map(|v| graph.label(v)).collect();
    let json = GraphJson {
        n: graph.scale(),
        b: graph.branching(),
        vertices: graph
            .vertices()
            .map(|v| GraphVertex { id: labels[v.index()].clone(), level: graph.level(v) })
            .collect(),
        edges: graph_edges(graph)
            .into_iter()
            .map(|(u, v)| [labels[u].clone(), labels[v].clone()])
            .collect(),
    };
    serde_json::to_string(&json).expect("graphs serialize")
}

pub fn laakso_dot(graph: &LaaksoGraph) -> String {
    let labels: Vec<String> = graph.vertices().map(|v| graph.label(v)).collect();
    let mut out = format!("graph G{}_b{} {{\n", graph.scale(), graph.branching());
    for label in &labels {
        writeln!(out, "  \"{label}\";").unwrap();
    }
    for (u, v) in graph_edges(graph) {
        writeln!(out, "  \"{}\" -- \"{}\";", labels[u], labels[v]).unwrap();
    }
    out.push_str("}\n");
    out
}
