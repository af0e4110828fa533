//! Acceptance criteria, one line of output per criterion.
//!
//! Run with `cargo test -p laakso-lab --test acceptance`. The process exits
//! with status 1 if any criterion fails.

use std::time::{Duration, Instant};

use laakso_lab::james_model::{
    enumerate_subsets, verify_atd_bilipschitz, verify_eq_james, verify_lemma_3_1,
};
use laakso_lab::moduli::{
    check_beta_leq_auc, composed_power_type, half_unit_grid, power_type_fit, LpModel, MidpointSign,
    ModulusKind, ModulusTable,
};
use laakso_lab::quotient_analysis::beta_bound_from_fork;
use laakso_lab::tree_to_laakso::Sampling;
use laakso_lab::verify::{sample_maps, verify_all, VerifyConfig};
use laakso_lab::{LaaksoGraph, MetricMapTable, PhiMap, TreeNode, TreeSpace};
use num_rational::Rational64;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

/// Vertex count by the recurrence, computed independently of the library.
fn expected_vertices(n: u32, b: u64) -> u64 {
    let mut v = b + 3;
    for _ in 1..n {
        v = (2 * b + 1) * (v - 2) + (b + 3);
    }
    v
}

fn tree_distance(a: &TreeNode, b: &TreeNode) -> u64 {
    let (x, y) = (a.elements(), b.elements());
    let common = x.iter().zip(y).take_while(|(p, q)| p == q).count();
    (x.len() + y.len() - 2 * common) as u64
}

fn bfs_matrix(g: &LaaksoGraph) -> Vec<Vec<u64>> {
    g.vertices().map(|v| g.bfs_distances(v)).collect()
}

fn laakso_structure() -> Outcome {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut literal_law_failures = Vec::new();
    for n in 1..=3u32 {
        for b in 2..=3u32 {
            let g = match LaaksoGraph::build(n, b) {
                Ok(g) => g,
                Err(e) => return outcome(false, format!("G_{n} b={b}: {e}")),
            };
            if g.vertex_count() as u64 != expected_vertices(n, b as u64) {
                problems.push(format!("G_{n} b={b} has {} vertices", g.vertex_count()));
            }
            let dist = bfs_matrix(&g);
            let diameter = dist.iter().flatten().copied().max().unwrap_or(0);
            if diameter != 3u64.pow(n) {
                problems.push(format!("G_{n} b={b} has diameter {diameter}"));
            }
            for v in g.vertices() {
                let level = dist[g.root().index()][v.index()];
                let literal = level % 3 == 1;
                if g.is_branching(v) != literal {
                    literal_law_failures.push(format!(
                        "G_{n} b={b} vertex {} at level {level}: branching = {}",
                        g.label(v),
                        g.is_branching(v)
                    ));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(5) {
        problems.push(format!("took {elapsed:?}"));
    }
    if let Some(first) = literal_law_failures.first() {
        problems.push(format!(
            "branching iff level ≡ 1 (mod 3) fails at {} vertices, first: {first}",
            literal_law_failures.len()
        ));
    }
    if problems.is_empty() {
        outcome(true, format!("counts, diameters and branching law hold ({elapsed:.2?})"))
    } else {
        outcome(false, problems.join("; "))
    }
}

fn distance_correctness() -> Outcome {
    let start = Instant::now();
    let mut pairs = 0u64;
    for (n, b) in [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2)] {
        let g = LaaksoGraph::build(n, b).expect("small instance");
        let dist = bfs_matrix(&g);
        for u in g.vertices() {
            for v in g.vertices() {
                pairs += 1;
                let analytic = g.distance(u, v);
                if analytic != dist[u.index()][v.index()] {
                    return outcome(
                        false,
                        format!(
                            "G_{n} b={b}: d({}, {}) = {analytic}, BFS gives {}",
                            g.label(u),
                            g.label(v),
                            dist[u.index()][v.index()]
                        ),
                    );
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        elapsed < Duration::from_secs(60),
        format!("{pairs} pairs match BFS ({elapsed:.2?})"),
    )
}

fn phi_suite() -> Outcome {
    let g = LaaksoGraph::build(2, 2).expect("G_2");
    let dist = bfs_matrix(&g);
    let root = g.root().index();
    let map = PhiMap::new(g.clone());
    let tree = TreeSpace::new(2, 9, 4096).expect("T_{2,9}");
    let images: Vec<_> = tree.nodes().iter().map(|t| map.phi(t).unwrap()).collect();

    for (t, v) in tree.nodes().iter().zip(&images) {
        if dist[root][v.index()] != t.level() as u64 {
            return outcome(false, format!("level of φ({t}) is {}", dist[root][v.index()]));
        }
    }
    if (0..g.vertex_count()).any(|v| !images.iter().any(|i| i.index() == v)) {
        return outcome(false, "φ is not surjective");
    }
    let mut lipschitz_pairs = 0u64;
    for i in 0..tree.len() {
        for j in i + 1..tree.len() {
            lipschitz_pairs += 1;
            let (a, b) = (&tree.nodes()[i], &tree.nodes()[j]);
            if dist[images[i].index()][images[j].index()] > tree_distance(a, b) {
                return outcome(false, format!("φ stretches the pair {a}, {b}"));
            }
        }
    }
    let mut lifts = 0u64;
    for mu in g.vertices() {
        for nu in g.vertices() {
            let comparable = dist[root][nu.index()] == dist[root][mu.index()] + dist[mu.index()][nu.index()];
            if mu == nu || !comparable {
                continue;
            }
            for (t, image) in tree.nodes().iter().zip(&images) {
                if *image != mu {
                    continue;
                }
                lifts += 1;
                let lifted = map.lift(t, nu).unwrap();
                let ok = map.phi(&lifted).unwrap() == nu
                    && t.is_prefix_of(&lifted)
                    && tree_distance(t, &lifted) == dist[mu.index()][nu.index()];
                if !ok {
                    return outcome(false, format!("lift of {t} to {} is {lifted}", g.label(nu)));
                }
            }
        }
    }
    let report = map.verify(Sampling::Exhaustive).unwrap();
    if !report.passed {
        return outcome(false, "library verification reports a failure");
    }
    outcome(
        true,
        format!("levels on {} nodes, {lipschitz_pairs} Lipschitz pairs, {lifts} exact lifts", tree.len()),
    )
}

fn atd_constants() -> Outcome {
    for (n, b) in [(1, 2), (2, 2)] {
        let map = PhiMap::new(LaaksoGraph::build(n, b).unwrap());
        let table = map.to_map_table(&map.source_space(4096).unwrap()).unwrap();
        let deltas = table.source().realized_distances();
        let profile = table.coarse_profile(&deltas).unwrap();
        let atd = profile.atd_colipschitz.unwrap();
        let constrained: Vec<(f64, f64)> = deltas
            .iter()
            .copied()
            .zip(atd.iter().copied())
            .filter(|(_, c)| c.is_finite())
            .collect();
        if constrained.is_empty() || constrained.iter().any(|&(_, c)| c != 1.0) {
            return outcome(false, format!("φ into G_{n}: constants {constrained:?}"));
        }
        if atd.iter().any(|&c| c != 1.0 && c != f64::INFINITY) {
            return outcome(false, format!("φ into G_{n}: unexpected constants {atd:?}"));
        }
    }
    let floor = MetricMapTable::floor_quotient(10, 3);
    for delta in [0.0, 1e-9, 0.5] {
        let c = floor.atd_colipschitz(delta).unwrap();
        if c != Some(1.0 / 3.0) {
            return outcome(false, format!("floor-by-3 constant at δ = {delta} is {c:?}"));
        }
    }
    let maps = sample_maps().unwrap();
    let mut grid_points = 0;
    for (name, map) in &maps {
        for di in 0..10 {
            let delta = di as f64 / 2.0;
            let best = map.atd_colipschitz(delta).unwrap().unwrap();
            for ci in 1..=10 {
                let c = ci as f64 / 8.0;
                grid_points += 1;
                if map.check_atd_colip(c, delta).unwrap() != (c <= best) {
                    return outcome(false, format!("{name}: predicate and constant disagree at c={c}, δ={delta}"));
                }
            }
        }
    }
    outcome(
        true,
        format!("φ constant 1 on G_1, G_2; floor-by-3 constant 1/3; {grid_points} grid points agree on {} maps", maps.len()),
    )
}

fn fork_argument() -> Outcome {
    let map = PhiMap::new(LaaksoGraph::build(1, 2).unwrap());
    let table = map.to_map_table(&map.source_space(100).unwrap()).unwrap();
    let Some(w) = table.fork_search(0.0, 1.0, usize::MAX).unwrap() else {
        return outcome(false, "no fork found");
    };
    let s = table.source();
    let arms = s.dist(w.sigma0, w.sigma1) == w.r && w.sigma2.iter().all(|&x| s.dist(w.sigma1, x) == w.r);
    let spread = w.sigma2.iter().all(|&x| s.dist(w.sigma0, x) == 2.0 * w.r);
    let check = w.verify(&table, 1.0);
    let b0 = beta_bound_from_fork(0.0);
    let b80 = beta_bound_from_fork(1.0 / 80.0);
    let passed = arms && spread && check.passed() && w.sigma2.len() >= 2 && b0 == 0.0 && b80 == 1.0;
    outcome(
        passed,
        format!(
            "r = {}, {} arms, arms exact: {arms}, spread exact: {spread}, bound(0) = {b0}, bound(1/80) = {b80}",
            w.r,
            w.sigma2.len()
        ),
    )
}

fn james_suite() -> Outcome {
    let start = Instant::now();
    let theta = Rational64::new(3, 4);
    let family = enumerate_subsets(12, 6);
    let expected: usize = (0..=6).map(|k| binomial(12, k)).sum();
    if family.len() != expected {
        return outcome(false, format!("{} subsets, expected {expected}", family.len()));
    }
    let reports = [
        verify_lemma_3_1(theta, 12, 6),
        verify_eq_james(12, 6),
        verify_atd_bilipschitz(theta, 12, 6),
    ];
    let violations: u64 = reports.iter().flat_map(|r| &r.checks).map(|c| c.violations).sum();
    let checked: u64 = reports.iter().flat_map(|r| &r.checks).map(|c| c.checked).sum();
    // pairs with max J < min J′ counted independently: choose the union, then the cut
    let separated: u64 = (0..=12usize)
        .flat_map(|total| (0..=total.min(6)).map(move |k| (total, k)))
        .filter(|&(total, k)| total - k <= 6 && total > 0)
        .map(|(total, _)| binomial(12, total) as u64)
        .sum();
    let counted = reports[0].check("separated_difference").map_or(0, |c| c.checked);
    let elapsed = start.elapsed();
    let passed = violations == 0 && counted == separated && elapsed < Duration::from_secs(30);
    outcome(
        passed,
        format!("{checked} exact checks, {violations} violations, {counted}/{separated} separated pairs ({elapsed:.2?})"),
    )
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn moduli_suite() -> Outcome {
    let mut problems = Vec::new();
    for p in [1.5, 2.0, 3.0, 4.0] {
        let model = LpModel::new(p).unwrap();
        let report = check_beta_leq_auc(&model, &half_unit_grid(50)).unwrap();
        if !report.passed {
            problems.push(format!("p={p}: β(t) > δ(2t) at {:?}", report.violations.first()));
        }
        for t in [0.01, 0.1, 0.3, 0.5, 0.8, 1.0] {
            let da = (model.auc(t).unwrap() - model.auc_oracle(t).unwrap()).abs();
            let db = (model.beta(t).unwrap() - model.beta_oracle(t, MidpointSign::Plus).unwrap()).abs();
            if da > 1e-9 || db > 1e-6 {
                problems.push(format!("p={p}, t={t}: oracle gaps {da:e}, {db:e}"));
            }
        }
        for kind in [ModulusKind::Auc, ModulusKind::Beta] {
            let table = ModulusTable::tabulate(model, kind, 1e-3, 0.1, 20, true).unwrap();
            let (_, fitted) = power_type_fit(&table.samples).unwrap();
            if ((fitted - p) / p).abs() > 0.05 {
                problems.push(format!("p={p} {kind:?}: fitted exponent {fitted}"));
            }
        }
        let ratios: Vec<f64> = (1..=4)
            .map(|k| {
                let eps = 10f64.powi(-k);
                (composed_power_type(p, eps).unwrap() - p).abs() / eps
            })
            .collect();
        let bound = (p + 1.0) / (p - 1.0 - 0.1);
        if ratios.iter().any(|&r| !(r.is_finite() && r <= bound)) {
            problems.push(format!("p={p}: |f−p|/ε = {ratios:?}"));
        }
    }
    if problems.is_empty() {
        outcome(true, "β ≤ δ(2t) grids, oracles, fits and composed exponent all within tolerance")
    } else {
        outcome(false, problems.join("; "))
    }
}

fn determinism() -> Outcome {
    let config = VerifyConfig::default();
    let first = serde_json::to_string_pretty(&verify_all(&config).unwrap()).unwrap();
    let second = serde_json::to_string_pretty(&verify_all(&config).unwrap()).unwrap();
    outcome(first == second, format!("{} bytes, identical: {}", first.len(), first == second))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("Laakso structure", laakso_structure),
        ("distance correctness", distance_correctness),
        ("tree map: levels, Lipschitz, lifts", phi_suite),
        ("ancestor co-Lipschitz constants", atd_constants),
        ("fork argument", fork_argument),
        ("James suite", james_suite),
        ("moduli", moduli_suite),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        let tag = if result.passed { "PASS" } else { "FAIL" };
        println!("criterion {} [{tag}] {name}: {}", i + 1, result.detail);
        failed += usize::from(!result.passed);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
