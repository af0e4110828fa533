//! Laakso-variant graphs `G_n` with finite branching `b`.
//!
//! `G_1` is the ordered graph root → hub → `b` middle vertices → sink, of
//! diameter 3. `G_{n+1}` is `G_1` with every edge replaced by a copy of `G_n`,
//! the parent end of the edge glued to the copy's root and the child end to
//! the copy's sink. Copies are never rescaled, so `G_n` has diameter `3^n`.
//!
//! Vertices carry a canonical [`Address`]: the chain of skeleton edges
//! (coarsest scale first) whose copies contain the vertex in their interior,
//! followed by the skeleton role the vertex plays in the innermost copy.
//! Seam vertices shared by adjacent copies are addressed in the enclosing
//! copy, which makes the identification `G_n ⊆ G_{n+1}` a prefix rewrite.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on the scale accepted by [`LaaksoGraph::build`].
pub const DEFAULT_MAX_SCALE: u32 = 4;
/// Default bound on the branching accepted by [`LaaksoGraph::build`].
pub const DEFAULT_MAX_BRANCHING: u32 = 8;
/// Default bound on the number of vertices of a built graph.
pub const DEFAULT_MAX_VERTICES: usize = 50_000;
/// Environment variable that replaces the scale and branching bounds with a vertex cap.
pub const MAX_VERTICES_ENV: &str = "LAAKSO_LAB_MAX_VERTICES";

/// One of the `2b + 1` skeleton edges of a copy of `G_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeToken {
    /// root → hub
    Top,
    /// hub → k-th middle vertex
    Upper(u32),
    /// k-th middle vertex → sink
    Lower(u32),
}

/// Skeleton role of a vertex inside the innermost copy containing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeToken {
    Root,
    Hub,
    Middle(u32),
    Sink,
}

impl EdgeToken {
    /// Skeleton endpoints (parent, child).
    fn endpoints(self) -> (NodeToken, NodeToken) {
        match self {
            EdgeToken::Top => (NodeToken::Root, NodeToken::Hub),
            EdgeToken::Upper(k) => (NodeToken::Hub, NodeToken::Middle(k)),
            EdgeToken::Lower(k) => (NodeToken::Middle(k), NodeToken::Sink),
        }
    }

    /// Skeleton level of the parent endpoint.
    fn offset(self) -> u64 {
        match self {
            EdgeToken::Top => 0,
            EdgeToken::Upper(_) => 1,
            EdgeToken::Lower(_) => 2,
        }
    }

    fn arm(self) -> Option<u32> {
        match self {
            EdgeToken::Top => None,
            EdgeToken::Upper(k) | EdgeToken::Lower(k) => Some(k),
        }
    }
}

impl NodeToken {
    fn skeleton_level(self) -> u64 {
        match self {
            NodeToken::Root => 0,
            NodeToken::Hub => 1,
            NodeToken::Middle(_) => 2,
            NodeToken::Sink => 3,
        }
    }

    fn arm(self) -> Option<u32> {
        match self {
            NodeToken::Middle(k) => Some(k),
            _ => None,
        }
    }
}

/// Distance in `G_1` between two skeleton vertices.
fn skeleton_distance(x: NodeToken, y: NodeToken) -> u64 {
    match (x, y) {
        (NodeToken::Middle(i), NodeToken::Middle(j)) if i != j => 2,
        _ => x.skeleton_level().abs_diff(y.skeleton_level()),
    }
}

impl fmt::Display for EdgeToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeToken::Top => f.write_str("T"),
            EdgeToken::Upper(k) => write!(f, "U{k}"),
            EdgeToken::Lower(k) => write!(f, "L{k}"),
        }
    }
}

impl fmt::Display for NodeToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeToken::Root => f.write_str("r"),
            NodeToken::Hub => f.write_str("a"),
            NodeToken::Middle(k) => write!(f, "w{k}"),
            NodeToken::Sink => f.write_str("s"),
        }
    }
}

fn parse_index(s: &str, what: &str) -> Result<u32> {
    match s.parse::<u32>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(Error::Parse(format!("bad {what} index {s:?}"))),
    }
}

impl FromStr for EdgeToken {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" => Ok(EdgeToken::Top),
            _ if s.starts_with('U') => Ok(EdgeToken::Upper(parse_index(&s[1..], "edge")?)),
            _ if s.starts_with('L') => Ok(EdgeToken::Lower(parse_index(&s[1..], "edge")?)),
            _ => Err(Error::Parse(format!("bad edge token {s:?}"))),
        }
    }
}

impl FromStr for NodeToken {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r" => Ok(NodeToken::Root),
            "a" => Ok(NodeToken::Hub),
            "s" => Ok(NodeToken::Sink),
            _ if s.starts_with('w') => Ok(NodeToken::Middle(parse_index(&s[1..], "middle")?)),
            _ => Err(Error::Parse(format!("bad node token {s:?}"))),
        }
    }
}

/// Canonical vertex address: edge word plus terminal skeleton role.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Address {
    pub edges: Vec<EdgeToken>,
    pub node: NodeToken,
}

impl Address {
    pub fn root() -> Self {
        Address { edges: Vec::new(), node: NodeToken::Root }
    }

    pub fn sink() -> Self {
        Address { edges: Vec::new(), node: NodeToken::Sink }
    }

    /// The address of the same vertex after identifying `G_n` with the first
    /// `3^n` generations of `G_{n+1}`.
    pub fn embed_into_next(&self) -> Address {
        match (self.edges.is_empty(), self.node) {
            (true, NodeToken::Root) => Address::root(),
            (true, NodeToken::Sink) => Address { edges: Vec::new(), node: NodeToken::Hub },
            _ => {
                let mut edges = Vec::with_capacity(self.edges.len() + 1);
                edges.push(EdgeToken::Top);
                edges.extend_from_slice(&self.edges);
                Address { edges, node: self.node }
            }
        }
    }

    /// Level of the vertex in `G_scale`.
    pub fn level(&self, scale: u32) -> u64 {
        let mut level = 0;
        for (depth, e) in self.edges.iter().enumerate() {
            level += e.offset() * pow3(scale - 1 - depth as u32);
        }
        let m = scale - self.edges.len() as u32;
        level + self.node.skeleton_level() * pow3(m - 1)
    }

    /// The word part of the label, e.g. `U1.T.a`.
    pub fn word(&self) -> String {
        let mut s = String::new();
        for e in &self.edges {
            s.push_str(&e.to_string());
            s.push('.');
        }
        s.push_str(&self.node.to_string());
        s
    }

    fn validate(&self, scale: u32, branching: u32) -> Result<()> {
        let in_range = |k: Option<u32>| k.is_none_or(|k| (1..=branching).contains(&k));
        let ok = self.edges.len() < scale as usize
            && self.edges.iter().all(|e| in_range(e.arm()))
            && in_range(self.node.arm())
            && (self.edges.is_empty()
                || matches!(self.node, NodeToken::Hub | NodeToken::Middle(_)));
        if ok {
            Ok(())
        } else {
            Err(Error::UnknownVertex(format!(
                "{} is not a canonical address of G_{scale} with b = {branching}",
                self.word()
            )))
        }
    }
}

impl FromStr for Address {
    type Err = Error;

    /// Parses either a bare word (`U1.a`) or a full label (`4:U1.a`).
    fn from_str(s: &str) -> Result<Self> {
        let word = s.rsplit(':').next().unwrap_or(s).trim();
        let mut tokens: Vec<&str> = word.split('.').collect();
        let node = tokens
            .pop()
            .filter(|t| !t.is_empty())
            .ok_or_else(|| Error::Parse(format!("empty address {s:?}")))?
            .parse()?;
        let edges = tokens.into_iter().map(str::parse).collect::<Result<Vec<_>>>()?;
        Ok(Address { edges, node })
    }
}

pub(crate) fn pow3(k: u32) -> u64 {
    3u64.pow(k)
}

/// Dense vertex handle into one [`LaaksoGraph`]; ids are assigned in order of
/// (level, address), so the root is always `VertexId(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Capacity bounds applied before a graph is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildLimits {
    pub max_scale: Option<u32>,
    pub max_branching: Option<u32>,
    pub max_vertices: usize,
}

impl Default for BuildLimits {
    fn default() -> Self {
        BuildLimits {
            max_scale: Some(DEFAULT_MAX_SCALE),
            max_branching: Some(DEFAULT_MAX_BRANCHING),
            max_vertices: DEFAULT_MAX_VERTICES,
        }
    }
}

impl BuildLimits {
    /// Only a vertex cap, no bound on scale or branching.
    pub fn vertex_cap(max_vertices: usize) -> Self {
        BuildLimits { max_scale: None, max_branching: None, max_vertices }
    }

    /// Defaults, unless `LAAKSO_LAB_MAX_VERTICES` holds a vertex cap.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_VERTICES_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .map(Self::vertex_cap)
                .map_err(|e| Error::Parse(format!("{MAX_VERTICES_ENV}={v:?}: {e}"))),
            Err(_) => Ok(Self::default()),
        }
    }
}

/// Vertex count from `V_1 = b + 3`, `V_{k+1} = (2b + 1)(V_k − 2) + (b + 3)`.
pub fn vertex_count(scale: u32, branching: u32) -> Option<u128> {
    if scale == 0 {
        return None;
    }
    let b = branching as u128;
    let mut v = b + 3;
    for _ in 1..scale {
        v = (2 * b + 1).checked_mul(v - 2)?.checked_add(b + 3)?;
    }
    Some(v)
}

/// An immutable truncated `G_n`.
#[derive(Debug, Clone)]
pub struct LaaksoGraph {
    scale: u32,
    branching: u32,
    addresses: Vec<Address>,
    levels: Vec<u64>,
    neighbors: Vec<Vec<VertexId>>,
    children: Vec<Vec<VertexId>>,
    index: HashMap<Address, VertexId>,
    edge_count: usize,
}

struct Builder {
    branching: u32,
    addresses: Vec<Address>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn vertex(&mut self, prefix: &[EdgeToken], node: NodeToken) -> usize {
        self.addresses.push(Address { edges: prefix.to_vec(), node });
        self.addresses.len() - 1
    }

    /// Fills a copy of `G_m` between the existing vertices `top` and `bottom`.
    fn copy(&mut self, prefix: &mut Vec<EdgeToken>, m: u32, top: usize, bottom: usize) {
        let hub = self.vertex(prefix, NodeToken::Hub);
        let middles: Vec<usize> = (1..=self.branching)
            .map(|k| self.vertex(prefix, NodeToken::Middle(k)))
            .collect();
        let mut span = |this: &mut Self, edge: EdgeToken, from: usize, to: usize| {
            if m == 1 {
                this.edges.push((from, to));
            } else {
                prefix.push(edge);
                this.copy(prefix, m - 1, from, to);
                prefix.pop();
            }
        };
        span(self, EdgeToken::Top, top, hub);
        for (i, &w) in middles.iter().enumerate() {
            let k = i as u32 + 1;
            span(self, EdgeToken::Upper(k), hub, w);
            span(self, EdgeToken::Lower(k), w, bottom);
        }
    }
}

impl LaaksoGraph {
    /// Builds `G_n` with the default capacity bounds.
    pub fn build(scale: u32, branching: u32) -> Result<Self> {
        Self::build_with(scale, branching, &BuildLimits::default())
    }

    pub fn build_with(scale: u32, branching: u32, limits: &BuildLimits) -> Result<Self> {
        if scale == 0 {
            return Err(Error::Domain("scale must be at least 1".into()));
        }
        if branching < 2 {
            return Err(Error::Domain("branching must be at least 2".into()));
        }
        if let Some(max) = limits.max_scale.filter(|&max| scale > max) {
            return Err(Error::Capacity(format!("scale {scale} exceeds bound {max}")));
        }
        if let Some(max) = limits.max_branching.filter(|&max| branching > max) {
            return Err(Error::Capacity(format!("branching {branching} exceeds bound {max}")));
        }
        match vertex_count(scale, branching) {
            Some(v) if v <= limits.max_vertices as u128 => {}
            _ => {
                return Err(Error::Capacity(format!(
                    "G_{scale} with b = {branching} exceeds {} vertices",
                    limits.max_vertices
                )))
            }
        }

        let mut builder = Builder { branching, addresses: Vec::new(), edges: Vec::new() };
        let root = builder.vertex(&[], NodeToken::Root);
        let sink = builder.vertex(&[], NodeToken::Sink);
        builder.copy(&mut Vec::new(), scale, root, sink);

        let raw_levels: Vec<u64> = builder.addresses.iter().map(|a| a.level(scale)).collect();
        let mut order: Vec<usize> = (0..builder.addresses.len()).collect();
        order.sort_by(|&x, &y| {
            raw_levels[x]
                .cmp(&raw_levels[y])
                .then_with(|| builder.addresses[x].cmp(&builder.addresses[y]))
        });
        let mut new_id = vec![0u32; order.len()];
        for (id, &old) in order.iter().enumerate() {
            new_id[old] = id as u32;
        }

        let addresses: Vec<Address> =
            order.iter().map(|&old| builder.addresses[old].clone()).collect();
        let levels: Vec<u64> = order.iter().map(|&old| raw_levels[old]).collect();
        let mut neighbors = vec![Vec::new(); addresses.len()];
        let mut children = vec![Vec::new(); addresses.len()];
        for &(from, to) in &builder.edges {
            let (p, c) = (new_id[from], new_id[to]);
            debug_assert_eq!(levels[p as usize] + 1, levels[c as usize]);
            neighbors[p as usize].push(VertexId(c));
            neighbors[c as usize].push(VertexId(p));
            children[p as usize].push(VertexId(c));
        }
        for list in neighbors.iter_mut() {
            list.sort();
        }
        // Ids follow address order within a level, so sorting ids sorts
        // children by arm index: this is the fraternal order.
        for list in children.iter_mut() {
            list.sort();
        }
        let index = addresses
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), VertexId(i as u32)))
            .collect();

        Ok(LaaksoGraph {
            scale,
            branching,
            addresses,
            levels,
            neighbors,
            children,
            index,
            edge_count: builder.edges.len(),
        })
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn branching(&self) -> u32 {
        self.branching
    }

    pub fn vertex_count(&self) -> usize {
        self.addresses.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// `3^n`, the level of the sink.
    pub fn diameter(&self) -> u64 {
        pow3(self.scale)
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> {
        (0..self.addresses.len() as u32).map(VertexId)
    }

    pub fn root(&self) -> VertexId {
        VertexId(0)
    }

    pub fn sink(&self) -> VertexId {
        self.index[&Address::sink()]
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.index() < self.addresses.len()
    }

    fn check(&self, v: VertexId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(format!("id {} in G_{}", v.0, self.scale)))
        }
    }

    pub fn address(&self, v: VertexId) -> &Address {
        &self.addresses[v.index()]
    }

    /// Label `ℓ:word` used by the exporters.
    pub fn label(&self, v: VertexId) -> String {
        format!("{}:{}", self.levels[v.index()], self.addresses[v.index()].word())
    }

    /// Looks a vertex up by canonical address.
    pub fn vertex(&self, address: &Address) -> Result<VertexId> {
        address.validate(self.scale, self.branching)?;
        self.index
            .get(address)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(address.word()))
    }

    /// Looks a vertex up by label or word, e.g. `4:U1.a` or `U1.a`.
    pub fn parse_vertex(&self, s: &str) -> Result<VertexId> {
        let v = self.vertex(&s.parse()?)?;
        if let Some((level, _)) = s.split_once(':') {
            if level.trim().parse::<u64>().ok() != Some(self.levels[v.index()]) {
                return Err(Error::UnknownVertex(format!("{s}: level does not match address")));
            }
        }
        Ok(v)
    }

    pub fn level(&self, v: VertexId) -> u64 {
        self.levels[v.index()]
    }

    pub fn try_level(&self, v: VertexId) -> Result<u64> {
        self.check(v)?;
        Ok(self.level(v))
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.neighbors[v.index()]
    }

    /// Immediate descendants in fraternal order (length 0, 1 or `b`).
    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v.index()]
    }

    pub fn is_branching(&self, v: VertexId) -> bool {
        self.children(v).len() > 1
    }

    /// 1-based position of `child` among the immediate descendants of `parent`.
    pub fn fraternal_index(&self, parent: VertexId, child: VertexId) -> Option<u32> {
        self.children(parent)
            .iter()
            .position(|&c| c == child)
            .map(|i| i as u32 + 1)
    }

    /// Exact shortest-path distance by series-parallel decomposition.
    pub fn distance(&self, u: VertexId, v: VertexId) -> u64 {
        let (a, b) = (self.address(u), self.address(v));
        copy_distance(self.scale, &a.edges, a.node, &b.edges, b.node)
    }

    /// Unit-weight BFS distance, the ground truth for [`distance`](Self::distance).
    pub fn distance_oracle(&self, u: VertexId, v: VertexId) -> u64 {
        if u == v {
            return 0;
        }
        let mut dist = vec![u64::MAX; self.vertex_count()];
        let mut queue = VecDeque::from([u]);
        dist[u.index()] = 0;
        while let Some(x) = queue.pop_front() {
            for &y in self.neighbors(x) {
                if dist[y.index()] == u64::MAX {
                    dist[y.index()] = dist[x.index()] + 1;
                    if y == v {
                        return dist[y.index()];
                    }
                    queue.push_back(y);
                }
            }
        }
        unreachable!("G_n is connected")
    }

    /// BFS distances from `u` to every vertex.
    pub fn bfs_distances(&self, u: VertexId) -> Vec<u64> {
        let mut dist = vec![u64::MAX; self.vertex_count()];
        let mut queue = VecDeque::from([u]);
        dist[u.index()] = 0;
        while let Some(x) = queue.pop_front() {
            for &y in self.neighbors(x) {
                if dist[y.index()] == u64::MAX {
                    dist[y.index()] = dist[x.index()] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// `u < v` or `u = v`: some shortest path from the root to `v` passes through `u`.
    pub fn is_ancestor(&self, u: VertexId, v: VertexId) -> bool {
        let (lu, lv) = (self.level(u), self.level(v));
        lu <= lv && self.distance(u, v) == lv - lu
    }

    /// A downward path from `from` to `to`, taking the lowest fraternal index
    /// that still leads to `to` at every branch.
    pub fn downward_path(&self, from: VertexId, to: VertexId) -> Result<Vec<VertexId>> {
        self.check(from)?;
        self.check(to)?;
        if !self.is_ancestor(from, to) {
            return Err(Error::Relation(format!(
                "{} is not an ancestor of {}",
                self.label(from),
                self.label(to)
            )));
        }
        let mut path = vec![from];
        let mut current = from;
        while current != to {
            current = *self
                .children(current)
                .iter()
                .find(|&&c| self.is_ancestor(c, to))
                .expect("an ancestor strictly above `to` has a child on a geodesic to it");
            path.push(current);
        }
        Ok(path)
    }

    /// Horizontal position in `[0, 1]` for drawing: arms of a copy split its
    /// interval evenly, hubs and seams sit in the middle.
    pub fn horizontal_position(&self, v: VertexId) -> f64 {
        let b = self.branching as f64;
        let address = self.address(v);
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let narrow = |lo: f64, hi: f64, k: u32| {
            let w = (hi - lo) / b;
            (lo + w * (k - 1) as f64, lo + w * k as f64)
        };
        for e in &address.edges {
            if let Some(k) = e.arm() {
                (lo, hi) = narrow(lo, hi, k);
            }
        }
        if let Some(k) = address.node.arm() {
            (lo, hi) = narrow(lo, hi, k);
        }
        (lo + hi) / 2.0
    }
}

/// Distance between two vertices of one copy of `G_m`, given their addresses
/// relative to that copy. Copies are isometrically embedded: leaving a copy
/// and re-entering through the other boundary vertex costs at least the
/// copy's own height.
fn copy_distance(
    m: u32,
    u_edges: &[EdgeToken],
    u_node: NodeToken,
    v_edges: &[EdgeToken],
    v_node: NodeToken,
) -> u64 {
    match (u_edges.first(), v_edges.first()) {
        (Some(eu), Some(ev)) if eu == ev => {
            copy_distance(m - 1, &u_edges[1..], u_node, &v_edges[1..], v_node)
        }
        _ => {
            let unit = pow3(m - 1);
            let pu = portals(m, u_edges, u_node);
            let pv = portals(m, v_edges, v_node);
            let mut best = u64::MAX;
            for &(x, dx) in pu.iter().flatten() {
                for &(y, dy) in pv.iter().flatten() {
                    best = best.min(dx + unit * skeleton_distance(x, y) + dy);
                }
            }
            best
        }
    }
}

/// Skeleton vertices through which a vertex leaves its edge copy, with the
/// distance to each.
fn portals(m: u32, edges: &[EdgeToken], node: NodeToken) -> [Option<(NodeToken, u64)>; 2] {
    match edges.split_first() {
        None => [Some((node, 0)), None],
        Some((e, rest)) => {
            let inner = Address { edges: rest.to_vec(), node }.level(m - 1);
            let (top, bottom) = e.endpoints();
            [Some((top, inner)), Some((bottom, pow3(m - 1) - inner))]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: u32, b: u32) -> LaaksoGraph {
        LaaksoGraph::build(n, b).unwrap()
    }

    fn at(graph: &LaaksoGraph, word: &str) -> VertexId {
        graph.parse_vertex(word).unwrap()
    }

    #[test]
    fn g1_shape() {
        let graph = g(1, 3);
        assert_eq!(graph.vertex_count(), 6);
        assert_eq!(graph.edge_count(), 7);
        assert_eq!(graph.distance(graph.root(), graph.sink()), 3);
        let hub = at(&graph, "a");
        assert_eq!(graph.children(graph.root()), &[hub]);
        assert!(graph.is_branching(hub));
        assert!(!graph.is_branching(graph.root()));
        assert_eq!(graph.children(at(&graph, "w2")), &[graph.sink()]);
        assert_eq!(graph.level(at(&graph, "w1")), 2);
    }

    #[test]
    fn g2_counts_follow_recurrence() {
        let graph = g(2, 2);
        assert_eq!(graph.vertex_count(), 20);
        assert_eq!(vertex_count(2, 2), Some(20));
        assert_eq!(vertex_count(2, 3), Some(34));
        assert_eq!(graph.edge_count(), 25);
        assert_eq!(graph.distance(graph.root(), graph.sink()), 9);
    }

    #[test]
    fn distance_examples() {
        let g1 = g(1, 2);
        assert_eq!(g1.distance(at(&g1, "w1"), at(&g1, "w2")), 2);
        let g2 = g(2, 2);
        assert_eq!(g2.distance(at(&g2, "4:U1.a"), at(&g2, "4:U2.a")), 2);
        assert_eq!(g2.distance(at(&g2, "5:U1.w1"), at(&g2, "5:U2.w2")), 4);
        assert_eq!(g2.distance(at(&g2, "5:U1.w1"), at(&g2, "5:U1.w2")), 2);
        assert!(g2.is_branching(at(&g2, "4:U1.a")));
        // the seam between the top copy and the arms
        assert!(g2.is_branching(at(&g2, "3:a")));
    }

    #[test]
    fn ancestor_examples() {
        let g1 = g(1, 2);
        let (w1, w2, hub) = (at(&g1, "w1"), at(&g1, "w2"), at(&g1, "a"));
        assert!(g1.vertices().all(|v| g1.is_ancestor(g1.root(), v)));
        assert!(!g1.is_ancestor(w1, w2));
        assert!(g1.is_ancestor(hub, g1.sink()));
    }

    #[test]
    fn downward_paths() {
        let g1 = g(1, 2);
        let (hub, w1, w2) = (at(&g1, "a"), at(&g1, "w1"), at(&g1, "w2"));
        assert_eq!(g1.downward_path(g1.root(), hub).unwrap(), vec![g1.root(), hub]);
        assert_eq!(
            g1.downward_path(g1.root(), g1.sink()).unwrap(),
            vec![g1.root(), hub, w1, g1.sink()]
        );
        assert_eq!(g1.downward_path(hub, w2).unwrap(), vec![hub, w2]);
        assert!(matches!(g1.downward_path(w1, w2), Err(Error::Relation(_))));
    }

    #[test]
    fn capacity_and_domain_errors() {
        assert!(matches!(LaaksoGraph::build(5, 2), Err(Error::Capacity(_))));
        assert!(matches!(LaaksoGraph::build(1, 9), Err(Error::Capacity(_))));
        assert!(matches!(LaaksoGraph::build(0, 2), Err(Error::Domain(_))));
        assert!(matches!(LaaksoGraph::build(1, 1), Err(Error::Domain(_))));
        assert!(LaaksoGraph::build_with(5, 2, &BuildLimits::vertex_cap(10_000)).is_ok());
        assert!(LaaksoGraph::build_with(2, 2, &BuildLimits::vertex_cap(19)).is_err());
    }

    #[test]
    fn address_round_trip() {
        let graph = g(3, 2);
        for v in graph.vertices() {
            assert_eq!(graph.parse_vertex(&graph.label(v)).unwrap(), v);
        }
        assert!(graph.parse_vertex("7:U1.a").is_err());
        assert!(graph.parse_vertex("U3.a").is_err());
        assert!(graph.parse_vertex("T.T.T.a").is_err());
    }

    #[test]
    fn layout_is_within_unit_interval() {
        let graph = g(2, 3);
        for v in graph.vertices() {
            let x = graph.horizontal_position(v);
            assert!((0.0..=1.0).contains(&x));
        }
        assert_eq!(graph.horizontal_position(graph.root()), 0.5);
    }
}
