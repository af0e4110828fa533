//! A concrete James sequence in finitely supported sequences with the sup
//! norm: `u_k = θ(e_1 + … + e_k)`, with the coordinate functionals as the
//! biorthogonal family. For a finite set `J`, `v_J = Σ_{n∈J} u_n`.
//!
//! Every coordinate is an integer multiple of `θ`, so vectors store the
//! integer multipliers and all comparisons are exact.

use std::collections::HashSet;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree_space::TreeNode;

/// A finitely supported sequence whose `i`-th coordinate is `θ·steps[i−1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StaircaseVector {
    theta: Rational64,
    steps: Vec<i64>,
}

impl StaircaseVector {
    pub fn zero(theta: Rational64) -> Self {
        StaircaseVector { theta, steps: Vec::new() }
    }

    /// `u_k = θ·(e_1 + … + e_k)`.
    pub fn basis(k: u32, theta: Rational64) -> Self {
        StaircaseVector { theta, steps: vec![1; k as usize] }
    }

    pub fn theta(&self) -> Rational64 {
        self.theta
    }

    /// Coordinate `i` (1-based).
    pub fn coord(&self, i: usize) -> Rational64 {
        let step = i.checked_sub(1).and_then(|k| self.steps.get(k)).copied().unwrap_or(0);
        self.theta * step
    }

    /// Coordinates up to the last nonzero one.
    pub fn coords(&self) -> Vec<Rational64> {
        let mut steps = self.steps.clone();
        while steps.last() == Some(&0) {
            steps.pop();
        }
        steps.into_iter().map(|s| self.theta * s).collect()
    }

    fn trimmed(mut self) -> Self {
        while self.steps.last() == Some(&0) {
            self.steps.pop();
        }
        self
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        assert_eq!(self.theta, other.theta, "vectors built with different θ");
        let len = self.steps.len().max(other.steps.len());
        let at = |v: &[i64], i: usize| v.get(i).copied().unwrap_or(0);
        let steps = (0..len)
            .map(|i| at(&self.steps, i) + sign * at(&other.steps, i))
            .collect();
        StaircaseVector { theta: self.theta, steps }.trimmed()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1)
    }

    pub fn sup_norm(&self) -> Rational64 {
        self.theta * self.steps.iter().map(|s| s.abs()).max().unwrap_or(0)
    }
}

/// `v_J`: coordinate `i` is `θ·|{n ∈ J : n ≥ i}|`.
pub fn v_of(node: &TreeNode, theta: Rational64) -> StaircaseVector {
    let top = node.elements().last().copied().unwrap_or(0) as usize;
    let steps = (1..=top)
        .map(|i| node.elements().iter().filter(|&&n| n as usize >= i).count() as i64)
        .collect();
    StaircaseVector { theta, steps }.trimmed()
}

/// Parses `p/q` or an integer and requires `0 < θ < 1`.
pub fn parse_theta(text: &str) -> Result<Rational64> {
    let bad = || Error::Parse(format!("θ must be a fraction p/q, got {text:?}"));
    let theta = match text.trim().split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Rational64::new(p, q)
        }
        None => Rational64::from_integer(text.trim().parse().map_err(|_| bad())?),
    };
    if theta <= Rational64::zero() || theta >= Rational64::one() {
        return Err(Error::Domain(format!("θ = {theta} is not in (0, 1)")));
    }
    Ok(theta)
}

/// All strictly increasing subsets of `{1..index_bound}` with at most
/// `size_bound` elements, in lexicographic order.
pub fn enumerate_subsets(index_bound: u32, size_bound: usize) -> Vec<TreeNode> {
    let mut out = Vec::new();
    let mut stack = vec![TreeNode::root()];
    while let Some(node) = stack.pop() {
        if node.level() < size_bound {
            let next = node.elements().last().map_or(1, |m| m + 1);
            for n in (next..=index_bound).rev() {
                stack.push(node.child(n - node.max_element()));
            }
        }
        out.push(node);
    }
    out
}

fn max_or_zero(node: &TreeNode) -> u32 {
    node.elements().last().copied().unwrap_or(0)
}

fn min_or_inf(node: &TreeNode) -> u32 {
    node.elements().first().copied().unwrap_or(u32::MAX)
}

/// A violated inequality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JamesViolation {
    pub j: TreeNode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_prime: Option<TreeNode>,
    pub value: String,
    pub lower: String,
    pub upper: String,
}

/// One family of inequalities: how many instances were checked, how many
/// failed, and the smallest observed `value / lower` and `upper / value`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub checked: u64,
    pub violations: u64,
    pub tightest_lower_ratio: Option<String>,
    pub tightest_upper_ratio: Option<String>,
    pub first_violation: Option<JamesViolation>,
}

impl InequalityCheck {
    fn new(name: &str) -> Self {
        InequalityCheck {
            name: name.into(),
            checked: 0,
            violations: 0,
            tightest_lower_ratio: None,
            tightest_upper_ratio: None,
            first_violation: None,
        }
    }

    fn tighten(slot: &mut Option<String>, best: &mut Option<Rational64>, ratio: Rational64) {
        if best.is_none_or(|b| ratio < b) {
            *best = Some(ratio);
            *slot = Some(ratio.to_string());
        }
    }

    fn check(
        &mut self,
        ratios: &mut (Option<Rational64>, Option<Rational64>),
        lower: Rational64,
        value: Rational64,
        upper: Rational64,
        pair: (&TreeNode, Option<&TreeNode>),
    ) {
        self.checked += 1;
        if lower > Rational64::zero() {
            Self::tighten(&mut self.tightest_lower_ratio, &mut ratios.0, value / lower);
        }
        if value > Rational64::zero() {
            Self::tighten(&mut self.tightest_upper_ratio, &mut ratios.1, upper / value);
        }
        if !(lower <= value && value <= upper) {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(JamesViolation {
                    j: pair.0.clone(),
                    j_prime: pair.1.cloned(),
                    value: value.to_string(),
                    lower: lower.to_string(),
                    upper: upper.to_string(),
                });
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// A family of inequality checks over one enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JamesReport {
    pub suite: String,
    pub theta: String,
    pub index_bound: u32,
    pub size_bound: usize,
    pub subsets: usize,
    pub passed: bool,
    pub checks: Vec<InequalityCheck>,
}

impl JamesReport {
    fn new(suite: &str, theta: Rational64, index_bound: u32, size_bound: usize, subsets: usize, checks: Vec<InequalityCheck>) -> Self {
        JamesReport {
            suite: suite.into(),
            theta: theta.to_string(),
            index_bound,
            size_bound,
            subsets,
            passed: checks.iter().all(InequalityCheck::passed),
            checks,
        }
    }

    pub fn check(&self, name: &str) -> Option<&InequalityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn rat(n: usize) -> Rational64 {
    Rational64::from_integer(n as i64)
}

/// Pairs `(J, J′)` with `max J < min J′`, not both empty.
fn separated_pairs(family: &[TreeNode]) -> impl Iterator<Item = (&TreeNode, &TreeNode)> {
    family.iter().flat_map(move |a| {
        family
            .iter()
            .filter(move |b| max_or_zero(a) < min_or_inf(b) && !(a.is_root() && b.is_root()))
            .map(move |b| (a, b))
    })
}

/// Injectivity, `θk ≤ ‖v_J‖ ≤ k`, and `(θ/3)(k+l) ≤ ‖v_J − v_J′‖ ≤ k+l`
/// when `max J < min J′`.
pub fn verify_lemma_3_1(theta: Rational64, index_bound: u32, size_bound: usize) -> JamesReport {
    let family = enumerate_subsets(index_bound, size_bound);
    let vectors: Vec<StaircaseVector> = family.iter().map(|j| v_of(j, theta)).collect();

    let mut injective = InequalityCheck::new("injective");
    let mut seen = HashSet::new();
    for (j, v) in family.iter().zip(&vectors) {
        injective.checked += 1;
        if !seen.insert(v.clone()) {
            injective.violations += 1;
            injective.first_violation.get_or_insert_with(|| JamesViolation {
                j: j.clone(),
                j_prime: None,
                value: "duplicate".into(),
                lower: String::new(),
                upper: String::new(),
            });
        }
    }

    let mut norms = InequalityCheck::new("norm_bounds");
    let mut ratios = (None, None);
    for (j, v) in family.iter().zip(&vectors) {
        let k = rat(j.level());
        norms.check(&mut ratios, theta * k, v.sup_norm(), k, (j, None));
    }

    let mut separated = InequalityCheck::new("separated_difference");
    let mut ratios = (None, None);
    let index = |node: &TreeNode| family.binary_search(node).expect("pairs come from the family");
    for (a, b) in separated_pairs(&family) {
        let total = rat(a.level() + b.level());
        let norm = vectors[index(a)].sub(&vectors[index(b)]).sup_norm();
        separated.check(&mut ratios, theta / 3 * total, norm, total, (a, Some(b)));
    }

    JamesReport::new(
        "sequences",
        theta,
        index_bound,
        size_bound,
        family.len(),
        vec![injective, norms, separated],
    )
}

/// The three bounds with constant `1/4` at `θ = 3/4`, for `max J < min J′`.
pub fn verify_eq_james(index_bound: u32, size_bound: usize) -> JamesReport {
    let theta = Rational64::new(3, 4);
    let family = enumerate_subsets(index_bound, size_bound);
    let vectors: Vec<StaircaseVector> = family.iter().map(|j| v_of(j, theta)).collect();
    let quarter = Rational64::new(1, 4);
    let index = |node: &TreeNode| family.binary_search(node).expect("pairs come from the family");
    let mut left = InequalityCheck::new("left_norm");
    let mut right = InequalityCheck::new("right_norm");
    let mut diff = InequalityCheck::new("difference");
    let (mut lr, mut rr, mut dr) = ((None, None), (None, None), (None, None));
    for (a, b) in separated_pairs(&family) {
        let (va, vb) = (&vectors[index(a)], &vectors[index(b)]);
        let (k, l) = (rat(a.level()), rat(b.level()));
        left.check(&mut lr, quarter * k, va.sup_norm(), k, (a, Some(b)));
        right.check(&mut rr, quarter * l, vb.sup_norm(), l, (a, Some(b)));
        diff.check(&mut dr, quarter * (k + l), va.sub(vb).sup_norm(), k + l, (a, Some(b)));
    }
    JamesReport::new(
        "display",
        theta,
        index_bound,
        size_bound,
        family.len(),
        vec![left, right, diff],
    )
}

/// `‖v_J′ − v_J‖ = θ(|J′| − |J|)` for every prefix pair `J ⊑ J′`.
pub fn verify_atd_bilipschitz(theta: Rational64, index_bound: u32, size_bound: usize) -> JamesReport {
    let family = enumerate_subsets(index_bound, size_bound);
    let mut exact = InequalityCheck::new("ancestor_exactness");
    let mut ratios = (None, None);
    for descendant in &family {
        let vd = v_of(descendant, theta);
        let mut ancestor = Some(descendant.clone());
        while let Some(a) = ancestor {
            let expected = theta * rat(descendant.level() - a.level());
            let norm = vd.sub(&v_of(&a, theta)).sup_norm();
            exact.check(&mut ratios, expected, norm, expected, (&a, Some(descendant)));
            ancestor = a.parent();
        }
    }
    JamesReport::new("ancestor", theta, index_bound, size_bound, family.len(), vec![exact])
}

/// The `n`-th coordinate of `u_k` is `θ` when `n ≤ k` and `0` otherwise.
pub fn verify_biorthogonality(theta: Rational64, index_bound: u32) -> JamesReport {
    let mut check = InequalityCheck::new("biorthogonality");
    let mut ratios = (None, None);
    for k in 1..=index_bound {
        let u = StaircaseVector::basis(k, theta);
        let node = TreeNode::new(vec![k]).expect("singletons are valid");
        for n in 1..=index_bound {
            let expected = if n <= k { theta } else { Rational64::zero() };
            check.check(&mut ratios, expected, u.coord(n as usize), expected, (&node, None));
        }
    }
    JamesReport::new("biorthogonal", theta, index_bound, 1, index_bound as usize, vec![check])
}

/// Result of the separation bound for the arm ends of a fork.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub precondition_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precondition_note: Option<String>,
    pub common_prefix: TreeNode,
    pub tail_sizes: Vec<usize>,
    pub cardinality_bound: u64,
    pub cardinality_ok: bool,
    pub norm_bound: String,
    pub min_pairwise_norm: Option<String>,
    pub norm_ok: bool,
    pub passed: bool,
}

/// With `θ = 3/4`: every tail beyond the common prefix has at least
/// `3^(N−2)` elements, and arm vectors are pairwise at least `½·3^(N−2)` apart.
///
/// Tails must be ordered so that each one ends before the next begins.
pub fn sibling_separation_bound(witness: &[TreeNode], scale_exp: u32) -> SeparationReport {
    let theta = Rational64::new(3, 4);
    let r = 3u64.pow(scale_exp.saturating_sub(2));
    let norm_bound = Rational64::new(r as i64, 2);
    let prefix = witness
        .iter()
        .skip(1)
        .fold(witness.first().cloned().unwrap_or_default(), |p, w| p.lcp(w));
    let mut tails: Vec<&[u32]> = witness
        .iter()
        .map(|w| w.tail_after(&prefix).expect("the common prefix is a prefix"))
        .collect();
    tails.sort();
    let mut note = None;
    if scale_exp < 2 {
        note = Some("scale exponent must be at least 2".to_string());
    } else if let Some(w) = tails.windows(2).find(|w| {
        let end = w[0].last().copied().unwrap_or(0);
        let start = w[1].first().copied().unwrap_or(u32::MAX);
        end >= start
    }) {
        note = Some(format!("tails {:?} and {:?} are not disjointly ordered", w[0], w[1]));
    }
    let tail_sizes: Vec<usize> = witness.iter().map(|w| w.level() - prefix.level()).collect();
    let cardinality_ok = tail_sizes.len() < 2 || tail_sizes.iter().all(|&s| s as u64 >= r);
    let vectors: Vec<StaircaseVector> = witness.iter().map(|w| v_of(w, theta)).collect();
    let mut min_norm: Option<Rational64> = None;
    for (i, a) in vectors.iter().enumerate() {
        for b in &vectors[i + 1..] {
            let d = a.sub(b).sup_norm();
            min_norm = Some(min_norm.map_or(d, |m| m.min(d)));
        }
    }
    let norm_ok = min_norm.is_none_or(|m| m >= norm_bound);
    let precondition_ok = note.is_none();
    SeparationReport {
        precondition_ok,
        precondition_note: note,
        common_prefix: prefix,
        tail_sizes,
        cardinality_bound: r,
        cardinality_ok,
        norm_bound: norm_bound.to_string(),
        min_pairwise_norm: min_norm.map(|m| m.to_string()),
        norm_ok,
        passed: precondition_ok && cardinality_ok && norm_ok,
    }
}
