//! The level-preserving map `φ: T_{b,3^n} → G_n` and its canonical lift.
//!
//! `φ` walks down from the root of `G_n`: at a branching vertex the next
//! offset of the tree node picks the child with that fraternal index, at a
//! non-branching vertex the only child is taken.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laakso_graph::{LaaksoGraph, VertexId};
use crate::quotient_analysis::{FiniteMetricSpace, ForkWitness, MetricMapTable};
use crate::tree_space::{TreeNode, TreeSpace};

/// Trees up to this size are checked exhaustively by default.
pub const EXHAUSTIVE_LIMIT: usize = 4096;
/// Preimages sampled per target vertex when sampling.
pub const DEFAULT_SAMPLES: usize = 256;
/// Largest source tree that will be enumerated at all.
pub const MAX_TREE_NODES: usize = 1 << 22;
/// Counterexamples kept per check; counting continues past this.
pub const MAX_COUNTEREXAMPLES: usize = 16;

/// How preimages and pairs are chosen for the checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Sampling {
    Exhaustive,
    Sampled { per_target: usize, seed: u64 },
}

impl Sampling {
    /// Exhaustive up to [`EXHAUSTIVE_LIMIT`] tree nodes, sampled beyond.
    pub fn auto(tree_nodes: usize, seed: u64) -> Self {
        if tree_nodes <= EXHAUSTIVE_LIMIT {
            Sampling::Exhaustive
        } else {
            Sampling::Sampled { per_target: DEFAULT_SAMPLES, seed }
        }
    }
}

/// A single failed instance, self-contained enough to be replayed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    MissingPreimage {
        vertex: String,
    },
    LevelMismatch {
        node: TreeNode,
        vertex: String,
    },
    Lipschitz {
        a: TreeNode,
        b: TreeNode,
        tree_distance: u64,
        graph_distance: u64,
    },
    Lift {
        from: TreeNode,
        target: String,
        lifted: TreeNode,
        image: String,
        tree_distance: u64,
        graph_distance: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CheckSummary {
    pub passed: bool,
    pub checked: u64,
    pub failures: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl CheckSummary {
    fn record(&mut self, ok: bool, cx: impl FnOnce() -> Counterexample) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
                self.counterexamples.push(cx());
            }
        }
    }

    fn finish(mut self) -> Self {
        self.passed = self.failures == 0;
        self
    }
}

/// Outcome of the three structural checks on `φ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiReport {
    pub scale: u32,
    pub branching: u32,
    pub tree_nodes: usize,
    pub graph_vertices: usize,
    pub sampling: Sampling,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<TreeNode>,
    pub passed: bool,
    /// Every vertex is hit and levels are preserved.
    pub surjective_levels: CheckSummary,
    /// `d_G(φσ, φσ') ≤ d_T(σ, σ')`.
    pub lipschitz: CheckSummary,
    pub comparable_pairs: u64,
    pub incomparable_pairs: u64,
    /// `φ(lift(σ, ν)) = ν` and `d_T(σ, lift) = d_G(φσ, ν)`.
    pub lift: CheckSummary,
}

/// `φ: T_{b,3^n} → G_n`, optionally with a deliberately swapped branch.
#[derive(Debug, Clone)]
pub struct PhiMap {
    graph: LaaksoGraph,
    depth: usize,
    fault: Option<TreeNode>,
}

impl PhiMap {
    pub fn new(graph: LaaksoGraph) -> Self {
        let depth = 3usize.pow(graph.scale());
        PhiMap { graph, depth, fault: None }
    }

    /// Swaps the first two branches below the image of `at`.
    pub fn with_fault(mut self, at: TreeNode) -> Self {
        self.fault = Some(at);
        self
    }

    pub fn graph(&self) -> &LaaksoGraph {
        &self.graph
    }

    pub fn branching(&self) -> u32 {
        self.graph.branching()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn fault(&self) -> Option<&TreeNode> {
        self.fault.as_ref()
    }

    pub fn source_space(&self, max_nodes: usize) -> Result<TreeSpace> {
        TreeSpace::new(self.branching(), self.depth, max_nodes)
    }

    pub fn phi(&self, node: &TreeNode) -> Result<VertexId> {
        if !TreeSpace::in_truncation(self.branching(), self.depth, node) {
            return Err(Error::Domain(format!(
                "{node} is not a node of T_{{{},{}}}",
                self.branching(),
                self.depth
            )));
        }
        let mut v = self.graph.root();
        let mut prefix = TreeNode::root();
        for offset in node.offsets() {
            let kids = self.graph.children(v);
            let mut pick = if kids.len() > 1 { offset as usize } else { 1 };
            if kids.len() > 1 && self.fault.as_ref() == Some(&prefix) {
                pick = match pick {
                    1 => 2,
                    2 => 1,
                    k => k,
                };
            }
            v = kids[pick - 1];
            prefix = prefix.child(offset);
        }
        Ok(v)
    }

    /// Extends `from` along the lowest-index downward path from `φ(from)` to `to`.
    pub fn lift(&self, from: &TreeNode, to: VertexId) -> Result<TreeNode> {
        let start = self.phi(from)?;
        let path = self.graph.downward_path(start, to)?;
        let mut node = from.clone();
        for step in path.windows(2) {
            let offset = if self.graph.is_branching(step[0]) {
                self.graph
                    .fraternal_index(step[0], step[1])
                    .expect("downward paths follow child edges")
            } else {
                1
            };
            node = node.child(offset);
        }
        Ok(node)
    }

    fn tree_distance(a: &TreeNode, b: &TreeNode) -> u64 {
        a.distance(b) as u64
    }

    /// Runs the surjectivity, Lipschitz and lift checks.
    pub fn verify(&self, sampling: Sampling) -> Result<PhiReport> {
        let tree = self.source_space(MAX_TREE_NODES)?;
        let g = &self.graph;
        let images: Vec<VertexId> =
            tree.nodes().iter().map(|t| self.phi(t)).collect::<Result<_>>()?;
        let mut preimages: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
        for (i, v) in images.iter().enumerate() {
            preimages[v.index()].push(i);
        }

        let mut surj = CheckSummary::default();
        for (node, &v) in tree.nodes().iter().zip(&images) {
            surj.record(g.level(v) == node.level() as u64, || Counterexample::LevelMismatch {
                node: node.clone(),
                vertex: g.label(v),
            });
        }
        for v in g.vertices() {
            surj.record(!preimages[v.index()].is_empty(), || Counterexample::MissingPreimage {
                vertex: g.label(v),
            });
        }

        let mut rng = match sampling {
            Sampling::Sampled { seed, .. } => Some(ChaCha8Rng::seed_from_u64(seed)),
            Sampling::Exhaustive => None,
        };

        let mut lip = CheckSummary::default();
        let (mut comparable, mut incomparable) = (0u64, 0u64);
        let mut check_pair = |i: usize, j: usize, lip: &mut CheckSummary| {
            let (a, b) = (&tree.nodes()[i], &tree.nodes()[j]);
            if a.is_prefix_of(b) || b.is_prefix_of(a) {
                comparable += 1;
            } else {
                incomparable += 1;
            }
            let dt = Self::tree_distance(a, b);
            let dg = g.distance(images[i], images[j]);
            lip.record(dg <= dt, || Counterexample::Lipschitz {
                a: a.clone(),
                b: b.clone(),
                tree_distance: dt,
                graph_distance: dg,
            });
        };
        match (&mut rng, sampling) {
            (Some(rng), Sampling::Sampled { per_target, .. }) => {
                // every tree edge, plus uniformly random pairs
                for (j, node) in tree.nodes().iter().enumerate().skip(1) {
                    let parent = node.parent().expect("non-root nodes have parents");
                    let i = tree.index_of(&parent).expect("truncations are prefix-closed");
                    check_pair(i, j, &mut lip);
                }
                let draws = per_target * g.vertex_count();
                for _ in 0..draws {
                    let i = rand::Rng::gen_range(rng, 0..tree.len());
                    let j = rand::Rng::gen_range(rng, 0..tree.len());
                    check_pair(i, j, &mut lip);
                }
            }
            _ => {
                for i in 0..tree.len() {
                    for j in i + 1..tree.len() {
                        check_pair(i, j, &mut lip);
                    }
                }
            }
        }

        let mut lift = CheckSummary::default();
        for mu in g.vertices() {
            let pre = &preimages[mu.index()];
            let chosen: Vec<usize> = match (&mut rng, sampling) {
                (Some(rng), Sampling::Sampled { per_target, .. }) if pre.len() > per_target => {
                    index::sample(rng, pre.len(), per_target)
                        .into_iter()
                        .map(|k| pre[k])
                        .collect()
                }
                _ => pre.clone(),
            };
            for nu in g.vertices().filter(|&nu| nu != mu && g.is_ancestor(mu, nu)) {
                for &i in &chosen {
                    let from = &tree.nodes()[i];
                    let lifted = self.lift(from, nu)?;
                    let image = self.phi(&lifted)?;
                    let dt = Self::tree_distance(from, &lifted);
                    let dg = g.distance(mu, nu);
                    let ok = image == nu && from.is_prefix_of(&lifted) && dt == dg;
                    lift.record(ok, || Counterexample::Lift {
                        from: from.clone(),
                        target: g.label(nu),
                        lifted: lifted.clone(),
                        image: g.label(image),
                        tree_distance: dt,
                        graph_distance: dg,
                    });
                }
            }
        }

        let (surj, lip, lift) = (surj.finish(), lip.finish(), lift.finish());
        Ok(PhiReport {
            scale: g.scale(),
            branching: g.branching(),
            tree_nodes: tree.len(),
            graph_vertices: g.vertex_count(),
            sampling,
            fault: self.fault.clone(),
            passed: surj.passed && lip.passed && lift.passed,
            surjective_levels: surj,
            lipschitz: lip,
            comparable_pairs: comparable,
            incomparable_pairs: incomparable,
            lift,
        })
    }

    /// Re-evaluates a counterexample; `true` means it still fails.
    pub fn replay(&self, cx: &Counterexample) -> Result<bool> {
        let g = &self.graph;
        Ok(match cx {
            Counterexample::MissingPreimage { vertex } => {
                let v = g.parse_vertex(vertex)?;
                let tree = self.source_space(MAX_TREE_NODES)?;
                let mut hit = false;
                for t in tree.nodes() {
                    hit |= self.phi(t)? == v;
                }
                !hit
            }
            Counterexample::LevelMismatch { node, .. } => {
                g.level(self.phi(node)?) != node.level() as u64
            }
            Counterexample::Lipschitz { a, b, .. } => {
                g.distance(self.phi(a)?, self.phi(b)?) > Self::tree_distance(a, b)
            }
            Counterexample::Lift { from, target, .. } => {
                let nu = g.parse_vertex(target)?;
                let lifted = self.lift(from, nu)?;
                let dg = g.distance(self.phi(from)?, nu);
                self.phi(&lifted)? != nu
                    || !from.is_prefix_of(&lifted)
                    || Self::tree_distance(from, &lifted) != dg
            }
        })
    }

    /// The explicit table of `φ` on `tree` (which must be its whole domain),
    /// with both ancestor relations attached.
    pub fn to_map_table(&self, tree: &TreeSpace) -> Result<MetricMapTable> {
        if tree.branching() != self.branching() || tree.depth() != self.depth {
            return Err(Error::Domain("tree is not the domain of this map".into()));
        }
        let g = &self.graph;
        let nodes = tree.nodes();
        let source = FiniteMetricSpace::from_fn(nodes.len(), |i, j| {
            Self::tree_distance(&nodes[i], &nodes[j]) as f64
        })
        .with_order_fn(|i, j| nodes[i].is_prefix_of(&nodes[j]));
        let rows: Vec<Vec<u64>> = g.vertices().map(|v| g.bfs_distances(v)).collect();
        let target = FiniteMetricSpace::from_fn(g.vertex_count(), |i, j| rows[i][j] as f64)
            .with_order_fn(|i, j| g.is_ancestor(VertexId(i as u32), VertexId(j as u32)));
        let assign = nodes
            .iter()
            .map(|t| self.phi(t).map(VertexId::index))
            .collect::<Result<_>>()?;
        MetricMapTable::new(source, target, assign)
    }

    /// The fork at scale `3^scale_exp` in segment `segment`: `μ0` sits at
    /// level `segment·3^N + 3^(N−1)` on the leftmost geodesic, `μ1` one arm
    /// length `r = 3^(N−2)` below it, and the arms leave `μ1` through the
    /// given fraternal indices. Source points are canonical lifts.
    pub fn fork(
        &self,
        scale_exp: u32,
        segment: u64,
        arms: &[u32],
    ) -> Result<ForkWitness<TreeNode, VertexId>> {
        let g = &self.graph;
        if scale_exp < 2 {
            return Err(Error::Domain("fork scale exponent must be at least 2".into()));
        }
        let span = 3u64.pow(scale_exp);
        if (segment + 1) * span > g.diameter() {
            return Err(Error::Domain(format!(
                "segment {segment} at scale 3^{scale_exp} leaves G_{}",
                g.scale()
            )));
        }
        if arms.len() < 2 {
            return Err(Error::Domain("a fork needs at least two arms".into()));
        }
        let mut distinct: BTreeMap<u32, ()> = BTreeMap::new();
        for &k in arms {
            if k == 0 || k > g.branching() || distinct.insert(k, ()).is_some() {
                return Err(Error::Domain(format!("invalid or repeated arm index {k}")));
            }
        }
        let r = span / 9;
        let descend = |mut v: VertexId, steps: u64| {
            for _ in 0..steps {
                v = g.children(v)[0];
            }
            v
        };
        let mu0 = descend(g.root(), segment * span + span / 3);
        let mu1 = descend(mu0, r);
        if !g.is_branching(mu1) {
            return Err(Error::Relation(format!("{} does not branch", g.label(mu1))));
        }
        let mu2: Vec<VertexId> = arms
            .iter()
            .map(|&k| descend(g.children(mu1)[k as usize - 1], r - 1))
            .collect();
        let sigma0 = self.lift(&TreeNode::root(), mu0)?;
        let sigma1 = self.lift(&sigma0, mu1)?;
        let sigma2 = mu2
            .iter()
            .map(|&m| self.lift(&sigma1, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(ForkWitness {
            r: r as f64,
            mu0,
            mu1,
            mu2,
            sigma0,
            sigma1,
            sigma2,
            eps: 0.0,
        })
    }
}
