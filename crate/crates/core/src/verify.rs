//! Every verification suite at desk-scale defaults, gathered into one report.
//!
//! Reports contain no timings or other run-dependent data, so the same
//! configuration always serializes to the same bytes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Result;
use crate::james_model::{
    verify_atd_bilipschitz, verify_biorthogonality, verify_eq_james, verify_lemma_3_1, JamesReport,
};
use crate::laakso_graph::{vertex_count, LaaksoGraph};
use crate::moduli::{
    check_beta_leq_auc, composed_power_type, half_unit_grid, power_type_fit, LpModel, MidpointSign,
    ModulusKind, ModulusTable,
};
use crate::quotient_analysis::{beta_bound_from_fork, FiniteMetricSpace, MetricMapTable};
use crate::tree_space::{TreeNode, TreeSpace};
use crate::tree_to_laakso::{Counterexample, PhiMap, Sampling};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Swap two branches of `φ` below `{1}` to exercise failure reporting.
    pub inject_fault: bool,
    pub phi_scale: u32,
    pub phi_branching: u32,
    pub james_theta: (i64, i64),
    pub james_indices: u32,
    pub james_max_size: usize,
    pub moduli_p: Vec<f64>,
    pub moduli_points: usize,
    pub oracle_draws: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            inject_fault: false,
            phi_scale: 2,
            phi_branching: 2,
            james_theta: (3, 4),
            james_indices: 12,
            james_max_size: 6,
            moduli_p: vec![1.5, 2.0, 3.0, 4.0],
            moduli_points: 50,
            oracle_draws: 100,
        }
    }
}

/// Enough to re-run one failed `φ` check from a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiReplay {
    pub n: u32,
    pub b: u32,
    #[serde(default)]
    pub fault: Option<TreeNode>,
    pub counterexample: Counterexample,
}

impl PhiReplay {
    /// `true` when the counterexample still fails.
    pub fn run(&self) -> Result<bool> {
        let mut map = PhiMap::new(LaaksoGraph::build(self.n, self.b)?);
        if let Some(at) = &self.fault {
            map = map.with_fault(at.clone());
        }
        map.replay(&self.counterexample)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub suite: String,
    pub invariant: String,
    pub counterexample: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replay: Option<PhiReplay>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub checked: u64,
    pub details: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateReport {
    pub schema: u32,
    pub seed: u64,
    pub fault_injected: bool,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
    pub failures: Vec<Failure>,
}

#[derive(Default)]
struct Collector {
    checked: u64,
    failures: Vec<Failure>,
}

impl Collector {
    fn expect(&mut self, suite: &str, ok: bool, invariant: &str, counterexample: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok {
            self.failures.push(Failure {
                suite: suite.into(),
                invariant: invariant.into(),
                counterexample: counterexample(),
                replay: None,
            });
        }
    }

    fn finish(self, name: &str, details: Value, all: &mut Vec<Failure>) -> SuiteReport {
        let passed = self.failures.is_empty();
        all.extend(self.failures);
        SuiteReport { name: name.into(), passed, checked: self.checked, details }
    }
}

/// A vertex of `G_n` branches exactly when the lowest nonzero ternary
/// digit of its level is 1 (and it is not the sink).
pub fn branching_level(level: u64, scale: u32) -> bool {
    if level == 0 || level >= 3u64.pow(scale) {
        return false;
    }
    let mut l = level;
    while l.is_multiple_of(3) {
        l /= 3;
    }
    l % 3 == 1
}

fn laakso_structure(all: &mut Vec<Failure>) -> Result<SuiteReport> {
    const SUITE: &str = "laakso_structure";
    let mut c = Collector::default();
    let mut built = Vec::new();
    for n in 1..=3 {
        for b in 2..=3 {
            let g = LaaksoGraph::build(n, b)?;
            let expected = vertex_count(n, b).expect("small instances fit");
            let inst = || json!({ "n": n, "b": b });
            c.expect(SUITE, g.vertex_count() as u128 == expected, "vertex recurrence", inst);
            c.expect(SUITE, g.edge_count() as u64 == (2 * b as u64 + 1).pow(n), "edge count", inst);
            c.expect(SUITE, g.diameter() == 3u64.pow(n), "diameter", inst);
            let far = g.distance(g.root(), g.sink());
            c.expect(SUITE, far == 3u64.pow(n), "root to sink distance", inst);
            for v in g.vertices() {
                let law = branching_level(g.level(v), n);
                c.expect(SUITE, g.is_branching(v) == law, "branching levels", || {
                    json!({ "n": n, "b": b, "vertex": g.label(v) })
                });
            }
            built.push(json!({ "n": n, "b": b, "vertices": g.vertex_count(), "edges": g.edge_count() }));
        }
    }
    Ok(c.finish(SUITE, json!({ "instances": built }), all))
}

fn distances(all: &mut Vec<Failure>) -> Result<SuiteReport> {
    const SUITE: &str = "distance";
    let mut c = Collector::default();
    let mut instances = Vec::new();
    for (n, b) in [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2)] {
        let g = LaaksoGraph::build(n, b)?;
        for u in g.vertices() {
            let bfs = g.bfs_distances(u);
            for v in g.vertices() {
                let d = g.distance(u, v);
                c.expect(SUITE, d == bfs[v.index()], "analytic distance equals BFS", || {
                    json!({ "n": n, "b": b, "u": g.label(u), "v": g.label(v), "analytic": d, "bfs": bfs[v.index()] })
                });
            }
        }
        instances.push(json!({ "n": n, "b": b, "pairs": g.vertex_count().pow(2) }));
    }
    Ok(c.finish(SUITE, json!({ "instances": instances }), all))
}

fn phi_suite(config: &VerifyConfig, all: &mut Vec<Failure>) -> Result<SuiteReport> {
    let (n, b) = (config.phi_scale, config.phi_branching);
    let mut map = PhiMap::new(LaaksoGraph::build(n, b)?);
    let fault = config.inject_fault.then(|| TreeNode::new(vec![1]).expect("valid node"));
    if let Some(at) = &fault {
        map = map.with_fault(at.clone());
    }
    let tree_nodes = TreeSpace::node_count(b, map.depth()).unwrap_or(usize::MAX);
    let report = map.verify(Sampling::auto(tree_nodes, config.seed))?;
    let checks = [
        ("surjective and level preserving", &report.surjective_levels),
        ("1-Lipschitz", &report.lipschitz),
        ("lift exactness", &report.lift),
    ];
    for (invariant, summary) in checks {
        if let Some(cx) = summary.counterexamples.first() {
            all.push(Failure {
                suite: "phi".into(),
                invariant: invariant.into(),
                counterexample: serde_json::to_value(cx).expect("counterexamples serialize"),
                replay: Some(PhiReplay { n, b, fault: fault.clone(), counterexample: cx.clone() }),
            });
        }
    }
    let checked = report.surjective_levels.checked + report.lipschitz.checked + report.lift.checked;
    Ok(SuiteReport {
        name: "phi".into(),
        passed: report.passed,
        checked,
        details: serde_json::to_value(&report).expect("reports serialize"),
    })
}

/// Maps used to compare the ancestor co-Lipschitz predicate with its
/// closed-form computation.
pub fn sample_maps() -> Result<Vec<(String, MetricMapTable)>> {
    let phi_table = |n: u32, b: u32| -> Result<MetricMapTable> {
        let map = PhiMap::new(LaaksoGraph::build(n, b)?);
        map.to_map_table(&map.source_space(10_000)?)
    };
    Ok(vec![
        ("identity path 6".into(), MetricMapTable::identity(FiniteMetricSpace::path(6))),
        ("floor path 10 by 3".into(), MetricMapTable::floor_quotient(10, 3)),
        ("floor path 12 by 2".into(), MetricMapTable::floor_quotient(12, 2)),
        ("phi T(2,3) to G1".into(), phi_table(1, 2)?),
        ("phi T(3,3) to G1".into(), phi_table(1, 3)?),
    ])
}

fn atd_constants(all: &mut Vec<Failure>) -> Result<SuiteReport> {
    const SUITE: &str = "atd_constants";
    let mut c = Collector::default();
    let phi = PhiMap::new(LaaksoGraph::build(1, 2)?);
    let table = phi.to_map_table(&phi.source_space(100)?)?;
    let deltas = table.source().realized_distances();
    let profile = table.coarse_profile(&deltas)?;
    let atd = profile.atd_colipschitz.clone().unwrap_or_default();
    for (&delta, &value) in deltas.iter().zip(&atd) {
        c.expect(SUITE, value == 1.0 || value == f64::INFINITY, "phi ancestor constant is 1", || {
            json!({ "delta": delta, "value": value })
        });
    }
    c.expect(SUITE, atd.first() == Some(&1.0), "phi ancestor constant is attained", || json!(atd));
    let floor = MetricMapTable::floor_quotient(10, 3);
    let floor_c = floor.atd_colipschitz(0.0)?;
    c.expect(SUITE, floor_c == Some(1.0 / 3.0), "floor quotient constant is 1/3", || json!(floor_c));

    let mut agreement = Vec::new();
    for (name, map) in sample_maps()? {
        let mut disagreements = 0u64;
        for di in 0..10 {
            let delta = di as f64 / 2.0;
            let best = map.atd_colipschitz(delta)?.expect("sample maps are ordered");
            for ci in 1..=10 {
                let cst = ci as f64 / 8.0;
                let predicate = map.check_atd_colip(cst, delta)?;
                let agree = predicate == (cst <= best);
                disagreements += u64::from(!agree);
                c.expect(SUITE, agree, "predicate agrees with computed constant", || {
                    json!({ "map": name, "c": cst, "delta": delta, "predicate": predicate, "constant": best })
                });
            }
        }
        agreement.push(json!({ "map": name, "grid": 100, "disagreements": disagreements }));
    }
    Ok(c.finish(
        SUITE,
        json!({ "phi_profile": profile, "floor_constant": floor_c, "agreement": agreement }),
        all,
    ))
}

fn fork_suite(all: &mut Vec<Failure>) -> Result<SuiteReport> {
    const SUITE: &str = "fork";
    let mut c = Collector::default();
    let phi = PhiMap::new(LaaksoGraph::build(1, 2)?);
    let table = phi.to_map_table(&phi.source_space(100)?)?;
    let witness = table.fork_search(0.0, 1.0, usize::MAX)?;
    c.expect(SUITE, witness.is_some(), "fork exists at eps = 0", || Value::Null);
    let mut details = json!({ "witness": witness });
    if let Some(w) = &witness {
        let check = w.verify(&table, 1.0);
        let arms_exact = table.source().dist(w.sigma0, w.sigma1) == w.r
            && w.sigma2.iter().all(|&s| table.source().dist(w.sigma1, s) == w.r);
        let spread_exact = w.sigma2.iter().all(|&s| table.source().dist(w.sigma0, s) == 2.0 * w.r);
        c.expect(SUITE, check.passed(), "fork inequalities", || json!(check));
        c.expect(SUITE, arms_exact, "arms are exactly r", || json!(w));
        c.expect(SUITE, spread_exact, "spread is exactly 2r", || json!(w));
        details["check"] = json!(check);
    }
    let (b0, b1) = (beta_bound_from_fork(0.0), beta_bound_from_fork(1.0 / 80.0));
    c.expect(SUITE, b0 == 0.0, "bound vanishes at eps = 0", || json!(b0));
    c.expect(SUITE, b1 == 1.0, "bound is 1 at eps = 1/80", || json!(b1));
    details["bounds"] = json!({ "eps_0": b0, "eps_1_80": b1 });
    Ok(c.finish(SUITE, details, all))
}

fn james_suite(config: &VerifyConfig, all: &mut Vec<Failure>) -> Result<SuiteReport> {
    const SUITE: &str = "james";
    let theta = num_rational::Rational64::new(config.james_theta.0, config.james_theta.1);
    let (idx, size) = (config.james_indices, config.james_max_size);
    let reports: Vec<JamesReport> = vec![
        verify_lemma_3_1(theta, idx, size),
        verify_eq_james(idx, size),
        verify_atd_bilipschitz(theta, idx, size),
        verify_biorthogonality(theta, idx),
    ];
    let mut c = Collector::default();
    for r in &reports {
        for check in &r.checks {
            c.checked += check.checked.saturating_sub(1);
            c.expect(SUITE, check.passed(), &format!("{} {}", r.suite, check.name), || {
                json!(check.first_violation)
            });
        }
    }
    Ok(c.finish(SUITE, json!(reports), all))
}

fn moduli_suite(config: &VerifyConfig, all: &mut Vec<Failure>) -> Result<SuiteReport> {
    const SUITE: &str = "moduli";
    let mut c = Collector::default();
    let grid = half_unit_grid(config.moduli_points);
    let mut beta_vs_convexity = Vec::new();
    let mut fits = Vec::new();
    for &p in &config.moduli_p {
        let model = LpModel::new(p)?;
        let report = check_beta_leq_auc(&model, &grid)?;
        c.expect(SUITE, report.passed, "beta(t) <= auc(2t)", || json!(report.violations));
        beta_vs_convexity.push(report);
        for kind in [ModulusKind::Auc, ModulusKind::Beta] {
            let table = ModulusTable::tabulate(model, kind, 1e-3, 0.1, 20, true)?;
            let (_, exponent) = power_type_fit(&table.samples)?;
            let ok = ((exponent - p) / p).abs() <= 0.05;
            c.expect(SUITE, ok, "small-t power type", || json!({ "p": p, "kind": kind, "fit": exponent }));
            let full = ModulusTable::tabulate(model, kind, 0.01, 1.0, 50, false)?;
            c.expect(SUITE, full.is_monotone(), "modulus is non-decreasing", || json!({ "p": p, "kind": kind }));
            fits.push(json!({ "p": p, "kind": kind, "exponent": exponent }));
        }
        let ratios: Vec<f64> = (1..=4)
            .map(|k| {
                let eps = 10f64.powi(-k);
                composed_power_type(p, eps).map(|f| (f - p).abs() / eps)
            })
            .collect::<Result<_>>()?;
        let bounded = ratios.iter().all(|r| r.is_finite()) && ratios.windows(2).all(|w| w[1] <= w[0]);
        c.expect(SUITE, bounded, "composed exponent is p + O(eps)", || json!({ "p": p, "ratios": ratios }));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (mut auc_err, mut beta_err): (f64, f64) = (0.0, 0.0);
    for _ in 0..config.oracle_draws {
        let model = LpModel::new(rng.gen_range(1.2..5.0))?;
        let t = rng.gen_range(0.0..1.0f64).max(1e-3);
        let tb = (rng.gen_range(0.0..1.0f64) * model.beta_domain_end()).max(1e-3);
        let da = (model.auc(t)? - model.auc_oracle(t)?).abs();
        let db = (model.beta(tb)? - model.beta_oracle(tb, MidpointSign::Plus)?).abs();
        auc_err = auc_err.max(da);
        beta_err = beta_err.max(db);
        c.expect(SUITE, da <= 1e-9, "auc closed form matches oracle", || json!({ "p": model.p(), "t": t, "error": da }));
        c.expect(SUITE, db <= 1e-6, "beta closed form matches oracle", || json!({ "p": model.p(), "t": tb, "error": db }));
    }
    Ok(c.finish(
        SUITE,
        json!({ "beta_vs_convexity": beta_vs_convexity, "fits": fits, "oracle_max_error": { "auc": auc_err, "beta": beta_err } }),
        all,
    ))
}

/// Runs every suite. Failures never abort the run; they are collected.
pub fn verify_all(config: &VerifyConfig) -> Result<AggregateReport> {
    let mut failures = Vec::new();
    let suites = vec![
        laakso_structure(&mut failures)?,
        distances(&mut failures)?,
        phi_suite(config, &mut failures)?,
        atd_constants(&mut failures)?,
        fork_suite(&mut failures)?,
        james_suite(config, &mut failures)?,
        moduli_suite(config, &mut failures)?,
    ];
    Ok(AggregateReport {
        schema: SCHEMA_VERSION,
        seed: config.seed,
        fault_injected: config.inject_fault,
        passed: suites.iter().all(|s| s.passed),
        suites,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branching_levels() {
        let branching: Vec<u64> = (0..=9).filter(|&l| branching_level(l, 2)).collect();
        assert_eq!(branching, vec![1, 3, 4, 7]);
        assert!(!branching_level(27, 3));
        assert!(branching_level(12, 3));
    }

    #[test]
    fn replay_round_trip() {
        let cx = Counterexample::Lipschitz {
            a: TreeNode::root(),
            b: TreeNode::new(vec![1]).unwrap(),
            tree_distance: 1,
            graph_distance: 1,
        };
        let replay = PhiReplay { n: 1, b: 2, fault: None, counterexample: cx };
        let text = serde_json::to_string(&replay).unwrap();
        let back: PhiReplay = serde_json::from_str(&text).unwrap();
        assert_eq!(back, replay);
        assert!(!back.run().unwrap());
    }
}
