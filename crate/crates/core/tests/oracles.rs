//! Independent reimplementations checked against the library.

use std::collections::VecDeque;

use laakso_lab::james_model::sibling_separation_bound;
use laakso_lab::quotient_analysis::{FiniteMetricSpace, MetricMapTable};
use laakso_lab::verify::sample_maps;
use laakso_lab::{LaaksoGraph, PhiMap, TreeNode, VertexId};

/// `G_n` by repeated edge substitution: every edge of the current graph
/// is replaced by a fresh copy of `G_1`. Returns levels and an edge list.
fn substituted(n: u32, b: u32) -> (Vec<u64>, Vec<(usize, usize)>) {
    let mut levels = vec![0, 1];
    let mut edges = vec![(0, 1)];
    for _ in 0..n {
        let mut next_levels: Vec<u64> = levels.iter().map(|l| 3 * l).collect();
        let mut next_edges = Vec::new();
        for &(u, v) in &edges {
            let base = 3 * levels[u];
            let hub = next_levels.len();
            next_levels.push(base + 1);
            next_edges.push((u, hub));
            for _ in 0..b {
                let w = next_levels.len();
                next_levels.push(base + 2);
                next_edges.push((hub, w));
                next_edges.push((w, v));
            }
        }
        levels = next_levels;
        edges = next_edges;
    }
    (levels, edges)
}

fn bfs(adj: &[Vec<usize>], start: usize) -> Vec<u64> {
    let mut dist = vec![u64::MAX; adj.len()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == u64::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v
}

#[test]
fn builder_matches_edge_substitution() {
    for n in 1..=3 {
        for b in 2..=4 {
            let g = LaaksoGraph::build(n, b).unwrap();
            let (levels, edges) = substituted(n, b);
            assert_eq!(g.vertex_count(), levels.len(), "n={n} b={b}");
            assert_eq!(g.edge_count(), edges.len(), "n={n} b={b}");

            let mut adj = vec![Vec::new(); levels.len()];
            for &(u, v) in &edges {
                assert_eq!(levels[u] + 1, levels[v]);
                adj[u].push(v);
                adj[v].push(u);
            }
            let oracle: Vec<(u64, usize)> =
                (0..levels.len()).map(|v| (levels[v], adj[v].len())).collect();
            let built: Vec<(u64, usize)> =
                g.vertices().map(|v| (g.level(v), g.neighbors(v).len())).collect();
            assert_eq!(sorted(built), sorted(oracle), "n={n} b={b}");

            // distance profiles from the two poles
            let sink = levels.iter().position(|&l| l == 3u64.pow(n)).unwrap();
            for (ours, theirs) in [(g.root(), 0), (g.sink(), sink)] {
                let built: Vec<u64> = g.vertices().map(|v| g.distance(ours, v)).collect();
                assert_eq!(sorted(built), sorted(bfs(&adj, theirs)), "n={n} b={b}");
            }
        }
    }
}

/// `ω(r)` straight from ball inclusion: the largest realized target radius
/// `s` with `B(f x, s) ⊆ f(B(x, r))` for every `x`.
fn lower_modulus(map: &MetricMapTable, r: f64) -> f64 {
    let (s, t, f) = (map.source(), map.target(), map.assign());
    let covered = |x: usize, y: usize| (0..s.len()).any(|x2| f[x2] == y && s.dist(x, x2) <= r);
    let mut best: f64 = 0.0;
    for radius in t.realized_distances() {
        let inside = (0..s.len())
            .all(|x| (0..t.len()).all(|y| t.dist(f[x], y) > radius || covered(x, y)));
        if inside {
            best = best.max(radius);
        }
    }
    best
}

/// `Ω(r)`: the diameter bound of images of `r`-balls.
fn upper_modulus(map: &MetricMapTable, r: f64) -> f64 {
    let (s, t, f) = (map.source(), map.target(), map.assign());
    let mut best: f64 = 0.0;
    for x in 0..s.len() {
        for y in 0..s.len() {
            if s.dist(x, y) <= r {
                best = best.max(t.dist(f[x], f[y]));
            }
        }
    }
    best
}

#[test]
fn quotient_moduli_match_ball_inclusion() {
    for (name, map) in sample_maps().unwrap() {
        for k in 0..=24 {
            let r = k as f64 / 2.0;
            let (lo, hi) = map.quotient_moduli(r).unwrap();
            assert_eq!(lo, lower_modulus(&map, r), "{name} r={r}");
            assert_eq!(hi, upper_modulus(&map, r), "{name} r={r}");
        }
    }
}

/// Evaluates the ancestor co-Lipschitz condition on a dense grid of radii.
fn predicate_on_grid(map: &MetricMapTable, c: f64, delta: f64, step: f64) -> bool {
    let (s, t, f) = (map.source(), map.target(), map.assign());
    let top = s.realized_distances().last().copied().unwrap_or(0.0) + 2.0;
    let radii: Vec<f64> = (0..)
        .map(|k| delta + k as f64 * step)
        .take_while(|&r| r <= top)
        .collect();
    (0..s.len()).all(|sigma| {
        (0..t.len()).filter(|&nu| t.precedes(f[sigma], nu)).all(|nu| {
            let gap = t.dist(f[sigma], nu);
            radii.iter().all(|&r| {
                gap >= c * r || (0..s.len()).any(|x| f[x] == nu && s.dist(sigma, x) <= r)
            })
        })
    })
}

#[test]
fn ancestor_constant_is_the_predicate_supremum() {
    const STEP: f64 = 1.0 / 64.0;
    for (name, map) in sample_maps().unwrap() {
        for di in 0..6 {
            let delta = di as f64 / 2.0;
            let best = map.atd_colipschitz(delta).unwrap().unwrap();
            // scan c upward; the last passing grid value brackets the supremum
            let passing = (1..=128)
                .map(|k| k as f64 * STEP)
                .take_while(|&c| predicate_on_grid(&map, c, delta, STEP))
                .last()
                .unwrap_or(0.0);
            if best.is_finite() && best <= 2.0 - STEP {
                assert!(
                    (passing - best).abs() <= STEP,
                    "{name} δ={delta}: grid supremum {passing}, constant {best}"
                );
            } else {
                assert!(passing >= (2.0 - STEP).min(best) - STEP, "{name} δ={delta}");
            }
        }
    }
}

#[test]
fn ancestor_constant_of_a_folded_path() {
    let source = FiniteMetricSpace::path(4);
    let target = FiniteMetricSpace::path(2);
    let map = MetricMapTable::new(source, target, vec![0, 1, 1, 0]).unwrap();
    // σ = 3 sits over the root; the nearest preimage of 1 is at distance 1
    assert_eq!(map.atd_colipschitz(0.0).unwrap(), Some(1.0));
    assert!(map.check_atd_colip(1.0, 0.0).unwrap());
    assert!(!map.check_atd_colip(1.0 + 1e-9, 0.0).unwrap());
}

fn descend_first(g: &LaaksoGraph, mut v: VertexId, steps: u64) -> VertexId {
    for _ in 0..steps {
        v = g.children(v)[0];
    }
    v
}

#[test]
fn sibling_lifts_separate_linearly() {
    let map = PhiMap::new(LaaksoGraph::build(3, 4).unwrap());
    let g = map.graph();
    let (mut apart, mut merged) = (0, 0);
    for mu in g.vertices().filter(|&v| g.is_branching(v)) {
        let base = map.lift(&TreeNode::root(), mu).unwrap();
        let room = g.diameter() - g.level(mu);
        for depth in 1..=2.min(room) {
            let ends: Vec<(VertexId, TreeNode)> = g
                .children(mu)
                .iter()
                .map(|&child| {
                    let end = descend_first(g, child, depth - 1);
                    (end, map.lift(&base, end).unwrap())
                })
                .collect();
            for (i, (u, a)) in ends.iter().enumerate() {
                for (v, b) in &ends[i + 1..] {
                    if u == v {
                        // arms that rejoin lift to the same node
                        assert_eq!(a, b);
                        merged += 1;
                    } else {
                        assert_eq!(a.distance(b) as u64, 2 * depth, "{} depth {depth}", g.label(mu));
                        assert_eq!(g.distance(*u, *v), 2 * depth);
                        apart += 1;
                    }
                }
            }
        }
    }
    assert!(apart > 0 && merged > 0);
}

#[test]
fn fork_in_wide_graph_meets_separation_bound() {
    let map = PhiMap::new(LaaksoGraph::build(3, 4).unwrap());
    let g = map.graph();
    let w = map.fork(3, 0, &[1, 4]).unwrap();
    assert_eq!(w.r, 3.0);
    assert_eq!(g.level(w.mu0), 9);
    assert_eq!(g.level(w.mu1), 12);
    let check = w.check(1.0, |a, b| a.distance(b) as f64, |&a, &b| g.distance(a, b) as f64);
    assert!(check.passed(), "{check:?}");
    assert_eq!(w.arm_separation(|a, b| a.distance(b) as f64), 6.0);
    for (s, &m) in w.sigma2.iter().zip(&w.mu2) {
        assert_eq!(map.phi(s).unwrap(), m);
    }

    let report = sibling_separation_bound(&w.sigma2, 3);
    assert!(report.precondition_ok, "{:?}", report.precondition_note);
    assert!(report.passed, "{report:?}");
    assert_eq!(report.cardinality_bound, 3);
}

#[test]
fn fork_in_binary_graph_violates_ordering_precondition() {
    let map = PhiMap::new(LaaksoGraph::build(3, 2).unwrap());
    let w = map.fork(3, 0, &[1, 2]).unwrap();
    let g = map.graph();
    assert!(w
        .check(1.0, |a, b| a.distance(b) as f64, |&a, &b| g.distance(a, b) as f64)
        .passed());
    let report = sibling_separation_bound(&w.sigma2, 3);
    assert!(!report.precondition_ok);
    assert!(!report.passed);
}

#[test]
fn fork_rejects_bad_requests() {
    let map = PhiMap::new(LaaksoGraph::build(3, 3).unwrap());
    assert!(map.fork(1, 0, &[1, 2]).is_err());
    assert!(map.fork(3, 1, &[1, 2]).is_err());
    assert!(map.fork(3, 0, &[1]).is_err());
    assert!(map.fork(3, 0, &[1, 1]).is_err());
    assert!(map.fork(3, 0, &[1, 4]).is_err());
    assert!(map.fork(2, 2, &[2, 3]).is_ok());
}
