//! Browser bindings: draw `G_n`, colour it by distance from a clicked
//! vertex, and plot the three moduli of `ℓ_p`.

use laakso_lab::export::graph_edges;
use laakso_lab::moduli::{LpModel, ModulusKind};
use laakso_lab::{LaaksoGraph, VertexId};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Graphs larger than this are refused; the page draws every vertex.
pub const MAX_DRAWN_VERTICES: usize = 5_000;

fn js_error(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct GraphView {
    graph: LaaksoGraph,
}

impl GraphView {
    pub fn build(scale: u32, branching: u32) -> laakso_lab::Result<Self> {
        let limits = laakso_lab::BuildLimits::vertex_cap(MAX_DRAWN_VERTICES);
        Ok(GraphView { graph: LaaksoGraph::build_with(scale, branching, &limits)? })
    }

    pub fn layout_json(&self) -> String {
        let g = &self.graph;
        let vertices: Vec<_> = g
            .vertices()
            .map(|v| {
                json!({
                    "label": g.label(v),
                    "level": g.level(v),
                    "x": g.horizontal_position(v),
                    "branching": g.is_branching(v),
                })
            })
            .collect();
        json!({
            "n": g.scale(),
            "b": g.branching(),
            "height": g.diameter(),
            "vertices": vertices,
            "edges": graph_edges(g),
        })
        .to_string()
    }

    pub fn distances(&self, from: u32) -> Option<Vec<u32>> {
        let g = &self.graph;
        let from = VertexId(from);
        g.contains(from)
            .then(|| g.vertices().map(|v| g.distance(from, v) as u32).collect())
    }
}

#[wasm_bindgen]
impl GraphView {
    #[wasm_bindgen(constructor)]
    pub fn new(scale: u32, branching: u32) -> Result<GraphView, JsError> {
        Self::build(scale, branching).map_err(js_error)
    }

    /// `{n, b, height, vertices: [{label, level, x, branching}], edges: [[i, j]]}`
    pub fn layout(&self) -> String {
        self.layout_json()
    }

    #[wasm_bindgen(js_name = distancesFrom)]
    pub fn distances_from(&self, vertex: u32) -> Result<Vec<u32>, JsError> {
        self.distances(vertex)
            .ok_or_else(|| JsError::new(&format!("no vertex with index {vertex}")))
    }
}

/// Samples `t ↦ (δ̄(t), ρ̄(t), β̄(t))` on `points` equally spaced values.
pub fn curves_json(p: f64, points: usize) -> laakso_lab::Result<String> {
    let model = LpModel::new(p)?;
    let mut series = serde_json::Map::new();
    for (name, kind) in [("auc", ModulusKind::Auc), ("aus", ModulusKind::Aus), ("beta", ModulusKind::Beta)] {
        let end = model.domain_end(kind);
        let samples = (1..=points.max(2))
            .map(|i| {
                let t = end * i as f64 / points.max(2) as f64;
                model.modulus(kind, t).map(|v| [t, v])
            })
            .collect::<laakso_lab::Result<Vec<_>>>()?;
        series.insert(name.into(), json!(samples));
    }
    Ok(json!({ "p": p, "curves": series }).to_string())
}

/// JSON `{p, curves: {auc, aus, beta}}`, each a list of `[t, value]`.
#[wasm_bindgen(js_name = moduliCurves)]
pub fn moduli_curves(p: f64, points: usize) -> Result<String, JsError> {
    curves_json(p, points).map_err(js_error)
}
