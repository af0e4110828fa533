//! Asymptotic moduli of the disjoint-support model of `ℓ_p`.
//!
//! In the model the perturbation `z` (or the tail `s·e_n` of a separated
//! sequence) is disjointly supported from everything else, so every norm
//! reduces to an `ℓ_p` sum of a few scalar blocks. The closed forms are
//! evaluated with `ln_1p`/`exp_m1` to keep small moduli accurate; each one
//! has an independent optimization oracle that computes the block norms
//! directly.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LpModel {
    p: f64,
}

/// Which asymptotic modulus a table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModulusKind {
    Auc,
    Aus,
    Beta,
}

impl std::str::FromStr for ModulusKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auc" => Ok(ModulusKind::Auc),
            "aus" => Ok(ModulusKind::Aus),
            "beta" => Ok(ModulusKind::Beta),
            other => Err(Error::Parse(format!("unknown modulus {other:?}"))),
        }
    }
}

/// Sign convention for the midpoint quantity of the β-modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MidpointSign {
    /// `‖x + x_n‖ / 2`
    Plus,
    /// `‖x − x_n‖ / 2`
    Minus,
}

fn pow_sum_root(terms: &[f64], p: f64) -> f64 {
    terms.iter().map(|t| t.abs().powf(p)).sum::<f64>().powf(p.recip())
}

impl LpModel {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::Domain(format!("p = {p} must be a finite number above 1")));
        }
        Ok(LpModel { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Largest admissible separation for the β-modulus, `2^{1/p}`.
    pub fn beta_domain_end(&self) -> f64 {
        2f64.powf(self.p.recip())
    }

    /// Right end of the domain of `kind`.
    pub fn domain_end(&self, kind: ModulusKind) -> f64 {
        match kind {
            ModulusKind::Beta => self.beta_domain_end(),
            ModulusKind::Auc | ModulusKind::Aus => 1.0,
        }
    }

    fn check_unit(t: f64) -> Result<()> {
        if t > 0.0 && t <= 1.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("t = {t} is outside (0, 1]")))
        }
    }

    fn check_beta(&self, t: f64) -> Result<()> {
        if t > 0.0 && t <= self.beta_domain_end() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "t = {t} is outside (0, {}]",
                self.beta_domain_end()
            )))
        }
    }

    /// `(1 + t^p)^{1/p} − 1`.
    pub fn auc(&self, t: f64) -> Result<f64> {
        Self::check_unit(t)?;
        Ok((t.powf(self.p).ln_1p() / self.p).exp_m1())
    }

    /// Same closed form as [`auc`](Self::auc): in `ℓ_p` both moduli are
    /// attained on disjointly supported perturbations.
    pub fn aus(&self, t: f64) -> Result<f64> {
        self.auc(t)
    }

    /// `1 − ½((1 + (1 − s^p)^{1/p})^p + s^p)^{1/p}` with `s = t·2^{−1/p}`.
    pub fn beta(&self, t: f64) -> Result<f64> {
        self.check_beta(t)?;
        let p = self.p;
        // s^p
        let sp = (t.powf(p) / 2.0).min(1.0);
        // half the gap 1 − (1 − s^p)^{1/p}
        let m = -((-sp).ln_1p() / p).exp_m1() / 2.0;
        let g_minus_1 = (p * (-m).ln_1p()).exp_m1() + sp / 2f64.powf(p);
        Ok(-(g_minus_1.ln_1p() / p).exp_m1())
    }

    pub fn modulus(&self, kind: ModulusKind, t: f64) -> Result<f64> {
        match kind {
            ModulusKind::Auc => self.auc(t),
            ModulusKind::Aus => self.aus(t),
            ModulusKind::Beta => self.beta(t),
        }
    }

    /// Minimizes `‖x + z‖ − 1` over `‖z‖ ∈ [t, 4]` with `x = e_1` and `z`
    /// supported on two further coordinates, by golden-section search in
    /// `‖z‖` for a fan of directions.
    pub fn auc_oracle(&self, t: f64) -> Result<f64> {
        Self::check_unit(t)?;
        let p = self.p;
        let mut best = f64::INFINITY;
        for k in 0..=8 {
            let angle = k as f64 / 8.0;
            // a point of the unit sphere of ℓ_p^2
            let (c1, c2) = (angle.powf(p.recip()), (1.0 - angle).powf(p.recip()));
            let norm = |zeta: f64| pow_sum_root(&[1.0, zeta * c1, zeta * c2], p) - 1.0;
            best = best.min(golden_min(norm, t, 4.0)).min(norm(t));
        }
        Ok(best)
    }

    /// Maximizes the midpoint norm over `x = a·(±ŵ) + b·y` with `‖x‖ = ρ`,
    /// and `x_n = w + s·e_n` with `‖w‖^p + s^p ≤ 1`, `2^{1/p}s ≥ t`.
    /// Grid search followed by a compass search from the best grid point.
    pub fn beta_oracle(&self, t: f64, sign: MidpointSign) -> Result<f64> {
        self.check_beta(t)?;
        let p = self.p;
        let s_min = t / self.beta_domain_end();
        let flip = match sign {
            MidpointSign::Plus => 1.0,
            MidpointSign::Minus => -1.0,
        };
        // coordinates in [0,1]^4: ρ, share of x along ŵ, s, ‖w‖ relative to its cap
        let half_norm = |u: &[f64; 4], align: f64| {
            let [rho, lambda, us, uw] = u.map(|v| v.clamp(0.0, 1.0));
            let a = rho * lambda.powf(p.recip());
            let b = rho * (1.0 - lambda).powf(p.recip());
            let s = s_min + (1.0 - s_min) * us;
            let w = uw * (1.0 - s.powf(p)).max(0.0).powf(p.recip());
            pow_sum_root(&[align * a + flip * w, b, s], p) / 2.0
        };
        let mut best = f64::NEG_INFINITY;
        for align in [1.0, -1.0] {
            let f = |u: &[f64; 4]| half_norm(u, align);
            let steps = 8;
            let mut start = [0.0; 4];
            let mut start_val = f64::NEG_INFINITY;
            for idx in 0..(steps + 1usize).pow(4) {
                let mut u = [0.0; 4];
                let mut rest = idx;
                for c in &mut u {
                    *c = (rest % (steps + 1)) as f64 / steps as f64;
                    rest /= steps + 1;
                }
                let v = f(&u);
                if v > start_val {
                    start_val = v;
                    start = u;
                }
            }
            best = best.max(compass_max(f, start));
        }
        Ok(1.0 - best)
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-13 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

fn compass_max(f: impl Fn(&[f64; 4]) -> f64, mut x: [f64; 4]) -> f64 {
    let mut fx = f(&x);
    let mut step = 0.125;
    while step > 1e-12 {
        let mut improved = false;
        for i in 0..4 {
            for dir in [1.0, -1.0] {
                let mut y = x;
                y[i] = (y[i] + dir * step).clamp(0.0, 1.0);
                let fy = f(&y);
                if fy > fx {
                    (x, fx, improved) = (y, fy, true);
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    fx
}

/// Tabulated values of one modulus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusTable {
    pub kind: ModulusKind,
    pub model: LpModel,
    pub samples: Vec<(f64, f64)>,
}

impl ModulusTable {
    /// Evaluates on `points` values from `t_min` to `t_max`, geometrically
    /// spaced when `log_spacing` is set and evenly spaced otherwise.
    pub fn tabulate(
        model: LpModel,
        kind: ModulusKind,
        t_min: f64,
        t_max: f64,
        points: usize,
        log_spacing: bool,
    ) -> Result<Self> {
        let end = model.domain_end(kind);
        if points < 2 || !(t_min > 0.0 && t_min < t_max && t_max <= end) {
            return Err(Error::Domain(format!(
                "need 0 < tmin < tmax ≤ {end} and at least two points, got [{t_min}, {t_max}] × {points}"
            )));
        }
        let last = (points - 1) as f64;
        let samples = (0..points)
            .map(|i| {
                let frac = i as f64 / last;
                let t = if i + 1 == points {
                    t_max
                } else if log_spacing {
                    t_min * (t_max / t_min).powf(frac)
                } else {
                    t_min + (t_max - t_min) * frac
                };
                model.modulus(kind, t).map(|v| (t, v))
            })
            .collect::<Result<_>>()?;
        Ok(ModulusTable { kind, model, samples })
    }

    /// `t,value` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (t, v) in &self.samples {
            out.push_str(&format!("{t},{v}\n"));
        }
        out
    }

    pub fn is_monotone(&self) -> bool {
        self.samples
            .windows(2)
            .all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1)
    }
}

/// Least-squares line through `(ln t, ln value)`: returns `(e^intercept, slope)`.
pub fn power_type_fit(samples: &[(f64, f64)]) -> Result<(f64, f64)> {
    if samples.len() < 3 {
        return Err(Error::Domain("a power-type fit needs at least 3 samples".into()));
    }
    if let Some((t, v)) = samples.iter().find(|(t, v)| !(*t > 0.0 && *v > 0.0)) {
        return Err(Error::Domain(format!("sample ({t}, {v}) is not positive")));
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, v)| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("all samples share one t".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(((my - slope * mx).exp(), slope))
}

/// `((p−ε)(p+ε) − (p−ε)) / ((p−ε) − 1)`.
pub fn composed_power_type(p: f64, eps: f64) -> Result<f64> {
    let low = p - eps;
    if low.is_nan() || low <= 1.0 {
        return Err(Error::Domain(format!("p − ε = {low} must exceed 1")));
    }
    Ok((low * (p + eps) - low) / (low - 1.0))
}

/// Pointwise comparison `β̄(t) ≤ δ̄(2t)` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaConvexityReport {
    pub p: f64,
    pub points: usize,
    pub passed: bool,
    /// Smallest and largest `δ̄(2t) − β̄(t)` seen.
    pub min_slack: f64,
    pub max_slack: f64,
    pub violations: Vec<(f64, f64, f64)>,
}

pub fn check_beta_leq_auc(model: &LpModel, grid: &[f64]) -> Result<BetaConvexityReport> {
    if let Some(t) = grid.iter().find(|&&t| !(t > 0.0 && t <= 0.5)) {
        return Err(Error::Domain(format!("grid point {t} is outside (0, 1/2]")));
    }
    let mut min_slack = f64::INFINITY;
    let mut max_slack = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for &t in grid {
        let (b, a) = (model.beta(t)?, model.auc(2.0 * t)?);
        min_slack = min_slack.min(a - b);
        max_slack = max_slack.max(a - b);
        if b > a {
            violations.push((t, b, a));
        }
    }
    Ok(BetaConvexityReport {
        p: model.p(),
        points: grid.len(),
        passed: violations.is_empty(),
        min_slack,
        max_slack,
        violations,
    })
}

/// `points` evenly spaced values `t_k = k/(2·points)` in `(0, 1/2]`.
pub fn half_unit_grid(points: usize) -> Vec<f64> {
    (1..=points).map(|k| k as f64 / (2 * points) as f64).collect()
}
