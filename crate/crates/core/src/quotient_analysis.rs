//! Maps between finite metric spaces: Lipschitz and co-Lipschitz constants,
//! the uniform-quotient moduli `ω`/`Ω`, coarse profiles restricted to the
//! ancestor-to-descendant relation, and the search for fork configurations.
//!
//! Co-Lipschitz constants are computed from the pair table
//! `(σ, ν) ↦ (D, ρ)` with `D = d(λσ, ν)` and `ρ = d(σ, λ⁻¹(ν))`: a constant
//! `c` works at scale `δ` exactly when `c ≤ D/ρ` for every pair with `ρ > δ`.
//! [`MetricMapTable::check_atd_colip`] evaluates the defining quantifiers
//! directly and is kept independent of that shortcut.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack for comparisons against bounds computed in floating point.
const SLACK: f64 = 1e-12;

fn approx_le(a: f64, b: f64) -> bool {
    a <= b + SLACK * b.abs().max(1.0)
}

fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= SLACK * a.abs().max(b.abs()).max(1.0)
}

/// A finite metric space with an optional strict ancestor relation.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    len: usize,
    dist: Vec<f64>,
    order: Option<Vec<bool>>,
}

impl FiniteMetricSpace {
    /// Validates symmetry, zero diagonal, positivity off the diagonal and
    /// the triangle inequality.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let len = rows.len();
        if let Some(i) = rows.iter().position(|r| r.len() != len) {
            return Err(Error::InvalidMetric(format!("row {i} has the wrong length")));
        }
        let dist: Vec<f64> = rows.into_iter().flatten().collect();
        let space = FiniteMetricSpace { len, dist, order: None };
        space.validate()?;
        Ok(space)
    }

    /// Builds a space from a distance function known to be a metric.
    pub fn from_fn(len: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut dist = vec![0.0; len * len];
        for i in 0..len {
            for j in 0..len {
                dist[i * len + j] = f(i, j);
            }
        }
        FiniteMetricSpace { len, dist, order: None }
    }

    fn validate(&self) -> Result<()> {
        let n = self.len;
        for i in 0..n {
            if self.dist(i, i) != 0.0 {
                return Err(Error::InvalidMetric(format!("d({i},{i}) ≠ 0")));
            }
            for j in 0..n {
                let d = self.dist(i, j);
                if !d.is_finite() || d < 0.0 || (i != j && d == 0.0) {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) = {d}")));
                }
                if d != self.dist(j, i) {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) ≠ d({j},{i})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !approx_le(self.dist(i, k), self.dist(i, j) + self.dist(j, k)) {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails for ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Attaches a strict partial order given as `(ancestor, descendant)` pairs.
    pub fn with_order(mut self, pairs: &[[usize; 2]]) -> Result<Self> {
        let n = self.len;
        let mut order = vec![false; n * n];
        for &[i, j] in pairs {
            if i >= n || j >= n {
                return Err(Error::InvalidMetric(format!("order pair ({i},{j}) out of range")));
            }
            if i == j {
                return Err(Error::InvalidMetric(format!("order pair ({i},{i}) is reflexive")));
            }
            order[i * n + j] = true;
        }
        for i in 0..n {
            for j in 0..n {
                if order[i * n + j] && order[j * n + i] {
                    return Err(Error::InvalidMetric(format!("order is not antisymmetric at ({i},{j})")));
                }
                for k in 0..n {
                    if order[i * n + j] && order[j * n + k] && !order[i * n + k] {
                        return Err(Error::InvalidMetric(format!(
                            "order is not transitive at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        self.order = Some(order);
        Ok(self)
    }

    /// Attaches an order from a predicate known to be a strict partial order.
    pub fn with_order_fn(mut self, mut precedes: impl FnMut(usize, usize) -> bool) -> Self {
        let n = self.len;
        let mut order = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                order[i * n + j] = i != j && precedes(i, j);
            }
        }
        self.order = Some(order);
        self
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len + j]
    }

    pub fn has_order(&self) -> bool {
        self.order.is_some()
    }

    /// `i < j` in the attached order; false when there is none.
    pub fn precedes(&self, i: usize, j: usize) -> bool {
        self.order.as_ref().is_some_and(|o| o[i * self.len + j])
    }

    pub fn order_pairs(&self) -> Option<Vec<[usize; 2]>> {
        let order = self.order.as_ref()?;
        let n = self.len;
        Some(
            (0..n * n)
                .filter(|&k| order[k])
                .map(|k| [k / n, k % n])
                .collect(),
        )
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.len.max(1)).take(self.len).map(<[f64]>::to_vec).collect()
    }

    /// Sorted distinct distances, including 0.
    pub fn realized_distances(&self) -> Vec<f64> {
        let mut d = self.dist.clone();
        d.push(0.0);
        sorted_unique(d)
    }

    /// Path `0 − 1 − … − (len−1)` ordered from `0`.
    pub fn path(len: usize) -> Self {
        Self::from_fn(len, |i, j| i.abs_diff(j) as f64).with_order_fn(|i, j| i < j)
    }
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// A total map between two finite metric spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMapTable {
    source: FiniteMetricSpace,
    target: FiniteMetricSpace,
    assign: Vec<usize>,
    surjective: bool,
    preimages: Vec<Vec<usize>>,
}

/// One row of the co-Lipschitz pair table.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PairStat {
    gap: f64,
    reach: f64,
    related: bool,
}

/// Measured large-scale constants of a map over a grid of scales `δ`.
///
/// Co-Lipschitz entries are `+∞` where no pair constrains the constant at
/// that scale; they serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoarseProfile {
    pub lip: f64,
    pub deltas: Vec<f64>,
    pub lipschitz: Vec<f64>,
    pub colipschitz: Vec<f64>,
    pub atd_colipschitz: Option<Vec<f64>>,
    pub atd_colipschitz_inf: Option<f64>,
}

/// Points of an (approximate) fork, in the target and in the source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForkWitness<S = usize, T = usize> {
    pub r: f64,
    pub mu0: T,
    pub mu1: T,
    pub mu2: Vec<T>,
    pub sigma0: S,
    pub sigma1: S,
    pub sigma2: Vec<S>,
    pub eps: f64,
}

/// Outcome of re-checking a fork witness against distance tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ForkCheck {
    /// `d(μ0,μ1) = d(μ1,μ2k) = d(μ0,μ2k)/2 = r` for every arm.
    pub target_fork: bool,
    /// `d(σ0,σ1)` and `d(σ1,σ2k)` at most `(1+3ε)·r/c`.
    pub short_arms: bool,
    /// `d(σ0,σ2k)/2 ≥ (1−80ε)·r/c`.
    pub wide_spread: bool,
    /// Preimage relations `λσ = μ` hold pointwise (true when not checkable).
    pub preimages: bool,
}

impl ForkCheck {
    pub fn passed(&self) -> bool {
        self.target_fork && self.short_arms && self.wide_spread && self.preimages
    }
}

impl<S, T> ForkWitness<S, T> {
    /// Re-evaluates the fork inequalities with the given distances and constant.
    pub fn check(
        &self,
        c_inf: f64,
        source_dist: impl Fn(&S, &S) -> f64,
        target_dist: impl Fn(&T, &T) -> f64,
    ) -> ForkCheck {
        let r = self.r;
        let arm_bound = (1.0 + 3.0 * self.eps) * r / c_inf;
        let spread_bound = (1.0 - 80.0 * self.eps) * r / c_inf;
        let target_fork = approx_eq(target_dist(&self.mu0, &self.mu1), r)
            && self.mu2.iter().all(|m| {
                approx_eq(target_dist(&self.mu1, m), r)
                    && approx_eq(target_dist(&self.mu0, m), 2.0 * r)
            });
        let short_arms = approx_le(source_dist(&self.sigma0, &self.sigma1), arm_bound)
            && self
                .sigma2
                .iter()
                .all(|s| approx_le(source_dist(&self.sigma1, s), arm_bound));
        let wide_spread = self
            .sigma2
            .iter()
            .all(|s| approx_le(spread_bound, source_dist(&self.sigma0, s) / 2.0));
        ForkCheck {
            target_fork,
            short_arms,
            wide_spread,
            preimages: self.mu2.len() == self.sigma2.len(),
        }
    }

    /// Smallest pairwise source distance among the arm ends.
    pub fn arm_separation(&self, source_dist: impl Fn(&S, &S) -> f64) -> f64 {
        let mut sep = f64::INFINITY;
        for (i, a) in self.sigma2.iter().enumerate() {
            for b in &self.sigma2[i + 1..] {
                sep = sep.min(source_dist(a, b));
            }
        }
        sep
    }
}

impl ForkWitness {
    /// Re-checks the witness directly from the distance tables of `map`.
    pub fn verify(&self, map: &MetricMapTable, c_inf: f64) -> ForkCheck {
        let mut check = self.check(
            c_inf,
            |&a, &b| map.source.dist(a, b),
            |&a, &b| map.target.dist(a, b),
        );
        check.preimages &= map.assign[self.sigma0] == self.mu0
            && map.assign[self.sigma1] == self.mu1
            && self.sigma2.iter().zip(&self.mu2).all(|(&s, &m)| map.assign[s] == m);
        check
    }
}

/// The bound on `β̄` produced by a fork with parameter `ε`: `83ε / (1 + 3ε)`.
pub fn beta_bound_from_fork(eps: f64) -> f64 {
    83.0 * eps / (1.0 + 3.0 * eps)
}

#[derive(Serialize, Deserialize)]
struct SpaceJson {
    n: usize,
    dist: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct MapTableJson {
    source: SpaceJson,
    target: SpaceJson,
    assign: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source_order: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target_order: Option<Vec<[usize; 2]>>,
}

fn load_space(json: SpaceJson, order: Option<Vec<[usize; 2]>>) -> Result<FiniteMetricSpace> {
    if json.dist.len() != json.n {
        return Err(Error::InvalidMetric(format!(
            "n = {} but the distance table has {} rows",
            json.n,
            json.dist.len()
        )));
    }
    let space = FiniteMetricSpace::new(json.dist)?;
    match order {
        Some(pairs) => space.with_order(&pairs),
        None => Ok(space),
    }
}

impl MetricMapTable {
    pub fn new(
        source: FiniteMetricSpace,
        target: FiniteMetricSpace,
        assign: Vec<usize>,
    ) -> Result<Self> {
        if assign.len() != source.len() {
            return Err(Error::Domain(format!(
                "assignment has {} entries for {} source points",
                assign.len(),
                source.len()
            )));
        }
        if let Some(&bad) = assign.iter().find(|&&y| y >= target.len()) {
            return Err(Error::Domain(format!("assignment hits missing target point {bad}")));
        }
        let mut preimages = vec![Vec::new(); target.len()];
        for (x, &y) in assign.iter().enumerate() {
            preimages[y].push(x);
        }
        let surjective = preimages.iter().all(|p| !p.is_empty());
        Ok(MetricMapTable { source, target, assign, surjective, preimages })
    }

    /// Identity of a space onto itself.
    pub fn identity(space: FiniteMetricSpace) -> Self {
        let assign = (0..space.len()).collect();
        Self::new(space.clone(), space, assign).expect("identity is total")
    }

    /// `x ↦ ⌊x / factor⌋` from the ordered path on `len` points onto the
    /// ordered path on `⌈len / factor⌉` points.
    pub fn floor_quotient(len: usize, factor: usize) -> Self {
        let target_len = len.div_ceil(factor);
        let assign = (0..len).map(|x| x / factor).collect();
        Self::new(FiniteMetricSpace::path(len), FiniteMetricSpace::path(target_len), assign)
            .expect("floor quotient is total")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let json: MapTableJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let source = load_space(json.source, json.source_order)?;
        let target = load_space(json.target, json.target_order)?;
        Self::new(source, target, json.assign)
    }

    pub fn to_json(&self) -> String {
        let json = MapTableJson {
            source: SpaceJson { n: self.source.len(), dist: self.source.rows() },
            target: SpaceJson { n: self.target.len(), dist: self.target.rows() },
            assign: self.assign.clone(),
            source_order: self.source.order_pairs(),
            target_order: self.target.order_pairs(),
        };
        serde_json::to_string(&json).expect("map tables serialize")
    }

    pub fn source(&self) -> &FiniteMetricSpace {
        &self.source
    }

    pub fn target(&self) -> &FiniteMetricSpace {
        &self.target
    }

    pub fn assign(&self) -> &[usize] {
        &self.assign
    }

    pub fn image(&self, x: usize) -> usize {
        self.assign[x]
    }

    pub fn is_surjective(&self) -> bool {
        self.surjective
    }

    pub fn preimages(&self, y: usize) -> &[usize] {
        &self.preimages[y]
    }

    fn require_surjective(&self) -> Result<()> {
        if self.surjective {
            Ok(())
        } else {
            Err(Error::Domain("map is not surjective".into()))
        }
    }

    fn has_orders(&self) -> bool {
        self.source.has_order() && self.target.has_order()
    }

    fn image_distance(&self, x: usize, y: usize) -> f64 {
        self.target.dist(self.assign[x], self.assign[y])
    }

    /// Best Lipschitz constant; 0 for spaces with fewer than two points.
    pub fn lipschitz_constant(&self) -> f64 {
        self.large_scale_lipschitz(0.0)
    }

    /// `L(δ)`: largest ratio over pairs with `d_S ≥ δ` (0 if there are none).
    pub fn large_scale_lipschitz(&self, delta: f64) -> f64 {
        let n = self.source.len();
        let mut best: f64 = 0.0;
        for x in 0..n {
            for y in x + 1..n {
                let d = self.source.dist(x, y);
                if d >= delta {
                    best = best.max(self.image_distance(x, y) / d);
                }
            }
        }
        best
    }

    /// `(ω(r), Ω(r))` for closed balls, evaluated over realized distances.
    pub fn quotient_moduli(&self, r: f64) -> Result<(f64, f64)> {
        self.require_surjective()?;
        let n = self.source.len();
        let mut upper: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                if self.source.dist(x, y) <= r {
                    upper = upper.max(self.image_distance(x, y));
                }
            }
        }
        // nearest image point that has no preimage within r of some x
        let mut blocked = f64::INFINITY;
        for x in 0..n {
            let fx = self.assign[x];
            for y in 0..self.target.len() {
                let reachable = self.preimages[y].iter().any(|&x2| self.source.dist(x, x2) <= r);
                if !reachable {
                    blocked = blocked.min(self.target.dist(fx, y));
                }
            }
        }
        let realized = self.target.realized_distances();
        let lower = realized
            .iter()
            .copied()
            .filter(|&s| s < blocked)
            .fold(0.0, f64::max);
        Ok((lower, upper))
    }

    fn pair_table(&self) -> Vec<PairStat> {
        let mut pairs = Vec::new();
        for sigma in 0..self.source.len() {
            let mu = self.assign[sigma];
            for nu in 0..self.target.len() {
                if nu == mu {
                    continue;
                }
                let reach = self.preimages[nu]
                    .iter()
                    .map(|&s| self.source.dist(sigma, s))
                    .fold(f64::INFINITY, f64::min);
                pairs.push(PairStat {
                    gap: self.target.dist(mu, nu),
                    reach,
                    related: self.target.precedes(mu, nu),
                });
            }
        }
        pairs
    }

    fn colipschitz_from(pairs: &[PairStat], delta: f64, related_only: bool) -> f64 {
        pairs
            .iter()
            .filter(|p| (!related_only || p.related) && p.reach > delta)
            .map(|p| p.gap / p.reach)
            .fold(f64::INFINITY, f64::min)
    }

    /// `c_δ^ATD`, or `None` when either space lacks an order.
    pub fn atd_colipschitz(&self, delta: f64) -> Result<Option<f64>> {
        self.require_surjective()?;
        if !self.has_orders() {
            return Ok(None);
        }
        Ok(Some(Self::colipschitz_from(&self.pair_table(), delta, true)))
    }

    /// `L(δ)`, `c(δ)` and `c_δ^ATD` over `deltas`.
    pub fn coarse_profile(&self, deltas: &[f64]) -> Result<CoarseProfile> {
        self.require_surjective()?;
        let pairs = self.pair_table();
        let lipschitz = deltas.iter().map(|&d| self.large_scale_lipschitz(d)).collect();
        let colipschitz = deltas
            .iter()
            .map(|&d| Self::colipschitz_from(&pairs, d, false))
            .collect();
        let atd: Option<Vec<f64>> = self.has_orders().then(|| {
            deltas
                .iter()
                .map(|&d| Self::colipschitz_from(&pairs, d, true))
                .collect()
        });
        let atd_inf = atd.as_ref().map(|v| {
            v.iter()
                .copied()
                .filter(|c| c.is_finite())
                .fold(f64::NEG_INFINITY, f64::max)
        });
        Ok(CoarseProfile {
            lip: self.lipschitz_constant(),
            deltas: deltas.to_vec(),
            lipschitz,
            colipschitz,
            atd_colipschitz: atd,
            atd_colipschitz_inf: atd_inf.map(|c| if c.is_finite() { c } else { f64::INFINITY }),
        })
    }

    /// Evaluates "for all `R ≥ δ`, every `σ` and every descendant `ν` of
    /// `λσ` with `d(λσ, ν) < cR` has a preimage within `R` of `σ`".
    ///
    /// Both clauses only change at `R = D/c` and at realized source
    /// distances, so it suffices to test those thresholds, the midpoints
    /// between consecutive thresholds, and one point beyond the last.
    pub fn check_atd_colip(&self, c: f64, delta: f64) -> Result<bool> {
        if !self.has_orders() {
            return Err(Error::Domain("ancestor relations are required on both spaces".into()));
        }
        for sigma in 0..self.source.len() {
            let mu = self.assign[sigma];
            for nu in (0..self.target.len()).filter(|&nu| self.target.precedes(mu, nu)) {
                let gap = self.target.dist(mu, nu);
                let reach: Vec<f64> =
                    self.preimages[nu].iter().map(|&s| self.source.dist(sigma, s)).collect();
                let mut thresholds: Vec<f64> = reach.clone();
                thresholds.push(delta);
                if c > 0.0 {
                    thresholds.push(gap / c);
                }
                let thresholds = sorted_unique(
                    thresholds.into_iter().filter(|&t| t >= delta && t.is_finite()).collect(),
                );
                let mut candidates = thresholds.clone();
                candidates.extend(thresholds.windows(2).map(|w| (w[0] + w[1]) / 2.0));
                if let Some(last) = thresholds.last() {
                    candidates.push(last + 1.0);
                }
                for radius in candidates {
                    let constrained = gap < c * radius;
                    let covered = reach.iter().any(|&d| d <= radius);
                    if constrained && !covered {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Searches for a fork `μ0 < μ1 < μ2,k` in the target with arm length
    /// `r ≥ r_min`, and preimages `σ` satisfying the fork inequalities with
    /// `c = c_∞^ATD` measured over all realized source scales.
    ///
    /// Arms are chosen greedily (lowest index first) among pairwise
    /// `2r`-separated candidates, at most `max_arms` of them and at least two.
    pub fn fork_search(&self, eps: f64, r_min: f64, max_arms: usize) -> Result<Option<ForkWitness>> {
        if self.source.len() < 4 || self.target.len() < 4 || !self.has_orders() {
            return Ok(None);
        }
        self.require_surjective()?;
        let deltas = self.source.realized_distances();
        let c_inf = match self.coarse_profile(&deltas)?.atd_colipschitz_inf {
            Some(c) if c.is_finite() && c > 0.0 => c,
            _ => return Ok(None),
        };
        Ok(self.fork_search_with(eps, r_min, max_arms, c_inf))
    }

    /// [`fork_search`](Self::fork_search) with a given constant `c`.
    pub fn fork_search_with(
        &self,
        eps: f64,
        r_min: f64,
        max_arms: usize,
        c: f64,
    ) -> Option<ForkWitness> {
        let t = &self.target;
        let s = &self.source;
        let arm_bound = (1.0 + 3.0 * eps) * c.recip();
        let spread_bound = (1.0 - 80.0 * eps) * c.recip();
        let radii: Vec<f64> = t
            .realized_distances()
            .into_iter()
            .filter(|&r| r > 0.0 && r >= r_min)
            .collect();
        for r in radii {
            for mu0 in 0..t.len() {
                for mu1 in (0..t.len()).filter(|&m| t.precedes(mu0, m) && t.dist(mu0, m) == r) {
                    let mut arms: Vec<usize> = Vec::new();
                    for y in 0..t.len() {
                        let on_fork = t.precedes(mu1, y)
                            && t.dist(mu1, y) == r
                            && t.dist(mu0, y) == 2.0 * r;
                        if on_fork
                            && arms.len() < max_arms
                            && arms.iter().all(|&a| t.dist(a, y) == 2.0 * r)
                        {
                            arms.push(y);
                        }
                    }
                    if arms.len() < 2 {
                        continue;
                    }
                    for &sigma0 in &self.preimages[mu0] {
                        for &sigma1 in &self.preimages[mu1] {
                            if !approx_le(s.dist(sigma0, sigma1), arm_bound * r) {
                                continue;
                            }
                            let sigma2: Option<Vec<usize>> = arms
                                .iter()
                                .map(|&y| {
                                    self.preimages[y].iter().copied().find(|&s2| {
                                        approx_le(s.dist(sigma1, s2), arm_bound * r)
                                            && approx_le(spread_bound * r, s.dist(sigma0, s2) / 2.0)
                                    })
                                })
                                .collect();
                            if let Some(sigma2) = sigma2 {
                                return Some(ForkWitness {
                                    r,
                                    mu0,
                                    mu1,
                                    mu2: arms,
                                    sigma0,
                                    sigma1,
                                    sigma2,
                                    eps,
                                });
                            }
                        }
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force search for the largest `c` on a fine grid accepted by the predicate.
    fn predicate_sup(map: &MetricMapTable, delta: f64) -> f64 {
        let mut best = 0.0;
        for k in 1..=400 {
            let c = k as f64 / 120.0;
            if map.check_atd_colip(c, delta).unwrap() {
                best = c;
            }
        }
        best
    }

    #[test]
    fn lipschitz_examples() {
        let id = MetricMapTable::identity(FiniteMetricSpace::path(5));
        assert_eq!(id.lipschitz_constant(), 1.0);
        let two = FiniteMetricSpace::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let one = FiniteMetricSpace::new(vec![vec![0.0]]).unwrap();
        let collapse = MetricMapTable::new(two, one, vec![0, 0]).unwrap();
        assert_eq!(collapse.lipschitz_constant(), 0.0);
    }

    #[test]
    fn moduli_of_floor_quotient() {
        let m = MetricMapTable::floor_quotient(10, 3);
        assert_eq!(m.target().len(), 4);
        let (_, upper) = m.quotient_moduli(1.0).unwrap();
        assert_eq!(upper, 1.0);
        let (lower, _) = m.quotient_moduli(2.0).unwrap();
        assert_eq!(lower, 0.0);
        let id = MetricMapTable::identity(FiniteMetricSpace::path(6));
        for r in [1.0, 2.0, 2.5, 3.0] {
            let (w, big_w) = id.quotient_moduli(r).unwrap();
            assert_eq!(w, r.floor());
            assert_eq!(big_w, r.floor());
        }
    }

    #[test]
    fn quotient_moduli_requires_surjection() {
        let path = FiniteMetricSpace::path(3);
        let m = MetricMapTable::new(path.clone(), path, vec![0, 0, 1]).unwrap();
        assert!(!m.is_surjective());
        assert!(matches!(m.quotient_moduli(1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn floor_quotient_atd_constant_is_one_third() {
        let m = MetricMapTable::floor_quotient(10, 3);
        assert_eq!(m.atd_colipschitz(0.0).unwrap(), Some(1.0 / 3.0));
        assert!(m.check_atd_colip(1.0 / 3.0, 0.0).unwrap());
        assert!(!m.check_atd_colip(0.34, 0.0).unwrap());
        assert_eq!(predicate_sup(&m, 0.0), 40.0 / 120.0);
    }

    #[test]
    fn identity_atd_constant_is_one() {
        let id = MetricMapTable::identity(FiniteMetricSpace::path(6));
        let p = id.coarse_profile(&[0.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(p.atd_colipschitz.unwrap(), vec![1.0; 4]);
        assert_eq!(p.colipschitz, vec![1.0; 4]);
        assert!(id.check_atd_colip(1.0, 1.0).unwrap());
        assert!(!id.check_atd_colip(1.01, 1.0).unwrap());
        assert!(id.check_atd_colip(1e-9, 3.0).unwrap());
    }

    #[test]
    fn profile_is_monotone() {
        let m = MetricMapTable::floor_quotient(12, 2);
        let deltas: Vec<f64> = (0..12).map(f64::from).collect();
        let p = m.coarse_profile(&deltas).unwrap();
        let atd = p.atd_colipschitz.unwrap();
        assert!(atd.windows(2).all(|w| w[0] <= w[1]));
        assert!(p.lipschitz.windows(2).all(|w| w[0] >= w[1]));
        assert!(p.colipschitz.iter().zip(&atd).all(|(c, a)| c <= a));
    }

    #[test]
    fn missing_order_leaves_atd_fields_empty() {
        let space = FiniteMetricSpace::new(vec![vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        let id = MetricMapTable::identity(space);
        let p = id.coarse_profile(&[1.0]).unwrap();
        assert!(p.atd_colipschitz.is_none());
        assert!(id.check_atd_colip(1.0, 1.0).is_err());
    }

    #[test]
    fn rejects_invalid_spaces() {
        assert!(FiniteMetricSpace::new(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(FiniteMetricSpace::new(vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0]
        ])
        .is_err());
        let p = FiniteMetricSpace::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(p.clone().with_order(&[[0, 1], [1, 0]]).is_err());
        assert!(p.with_order(&[[0, 0]]).is_err());
    }

    #[test]
    fn fork_search_degenerate_inputs() {
        let two = FiniteMetricSpace::path(2);
        let id = MetricMapTable::identity(two);
        assert_eq!(id.fork_search(0.0, 1.0, 8).unwrap(), None);
        // a path has no branching, so there are no forks
        let id = MetricMapTable::identity(FiniteMetricSpace::path(8));
        assert_eq!(id.fork_search(0.0, 1.0, 8).unwrap(), None);
    }

    #[test]
    fn beta_bound_values() {
        assert_eq!(beta_bound_from_fork(0.0), 0.0);
        assert!((beta_bound_from_fork(0.01) - 0.805_825_242_7).abs() < 1e-9);
        assert_eq!(beta_bound_from_fork(1.0 / 80.0), 1.0);
    }

    #[test]
    fn json_round_trip() {
        let m = MetricMapTable::floor_quotient(7, 3);
        let back = MetricMapTable::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert!(MetricMapTable::from_json(r#"{"source":{"n":1,"dist":[[0]]},"target":{"n":1,"dist":[[0]]},"assign":[3]}"#).is_err());
    }
}
