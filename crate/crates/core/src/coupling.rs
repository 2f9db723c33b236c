//! p-correlated decorations and the overlap curve γ(p).
//!
//! A coupled pair (X, Y) is built from three independent uniform fields X, Z
//! and W: `Y_u = X_u` when `W_u <= p`, otherwise `Y_u = Z_u`. Both marginals are
//! i.i.d. uniform, and for fixed (X, Z, W) the reuse pattern only grows with
//! p, which is what lets a whole p-grid share one set of draws per trial.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{generate_regular, tree_count};
use crate::localalg::{root_decision, run_rule, DecisionRule, Decoration, ImplicitTree, Labels, LocalRule};
use crate::rng::{substream, Channel, VertexField};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledDecoration {
    pub x: Decoration,
    pub y: Decoration,
    pub p: f64,
    /// `reuse_mask[u]` iff `y[u] == x[u]` by construction.
    pub reuse_mask: Vec<bool>,
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p", format!("must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// Lazily evaluated Y half of a coupled decoration.
#[derive(Debug, Clone, Copy)]
pub struct CoupledLabels {
    field: VertexField,
    p: f64,
}

impl CoupledLabels {
    pub fn new(field: VertexField, p: f64) -> Self {
        CoupledLabels { field, p }
    }
}

impl Labels for CoupledLabels {
    #[inline]
    fn label(&self, v: usize) -> f64 {
        let v = v as u64;
        if self.field.threshold(v) <= self.p {
            self.field.label(v, Channel::Base)
        } else {
            self.field.label(v, Channel::Fresh)
        }
    }
}

/// Draws a p-correlated pair on `n` vertices. `x` equals `Decoration::sample(n, seed)`.
pub fn sample_coupled(n: usize, p: f64, seed: u64) -> Result<CoupledDecoration> {
    check_p(p)?;
    let field = VertexField::new(seed);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut reuse_mask = Vec::with_capacity(n);
    for v in 0..n as u64 {
        let base = field.label(v, Channel::Base);
        let reuse = field.threshold(v) <= p;
        x.push(base);
        y.push(if reuse { base } else { field.label(v, Channel::Fresh) });
        reuse_mask.push(reuse);
    }
    Ok(CoupledDecoration {
        x: Decoration::new(x)?,
        y: Decoration::new(y)?,
        p,
        reuse_mask,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    pub p: f64,
    pub gamma_hat: f64,
    pub hits: u64,
    pub trials: u64,
    pub std_error: f64,
}

impl GammaEstimate {
    fn from_counts(p: f64, hits: u64, trials: u64) -> Self {
        let g = hits as f64 / trials as f64;
        GammaEstimate {
            p,
            gamma_hat: g,
            hits,
            trials,
            std_error: (g * (1.0 - g) / trials as f64).sqrt(),
        }
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    Ok(())
}

/// Probability that the rule selects the root of T_{d, r+1} under both X and Y.
///
/// Trial `t` uses the same stream as trial `t` of `estimate_density` with the
/// same seed, so at p = 1 the two estimators count exactly the same trials.
pub fn estimate_gamma<R: DecisionRule>(rule: &R, d: usize, p: f64, trials: u64, seed: u64) -> Result<GammaEstimate> {
    check_p(p)?;
    check_trials(trials)?;
    let tree = ImplicitTree::new(d, rule.radius() + 1)?;
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let field = VertexField::new(substream(seed, t));
            root_decision(rule, &tree, &field) && root_decision(rule, &tree, &CoupledLabels::new(field, p))
        })
        .count() as u64;
    Ok(GammaEstimate::from_counts(p, hits, trials))
}

/// γ̂ on a p-grid with common random numbers across grid points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaCurve {
    pub grid: Vec<f64>,
    pub gamma_hat: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub trials: u64,
    pub rule: LocalRule,
    pub d: usize,
    pub seed: u64,
}

impl GammaCurve {
    pub fn radius(&self) -> usize {
        DecisionRule::radius(&self.rule)
    }

    pub fn max_std_error(&self) -> f64 {
        self.std_errors.iter().copied().fold(0.0, f64::max)
    }

    /// Largest `|Δγ̂| - d^{r+1}·Δp` over adjacent grid points; nonpositive
    /// means the Lipschitz bound holds without any noise allowance.
    pub fn worst_lipschitz_excess(&self) -> f64 {
        let lip = (self.d as f64).powi(self.radius() as i32 + 1);
        self.grid
            .windows(2)
            .zip(self.gamma_hat.windows(2))
            .map(|(p, g)| (g[1] - g[0]).abs() - lip * (p[1] - p[0]))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Columns `p,gamma_hat,std_error,trials,rule,d,r,seed`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["p", "gamma_hat", "std_error", "trials", "rule", "d", "r", "seed"])
            .map_err(csv_error)?;
        let rule = self.rule.descriptor();
        for i in 0..self.grid.len() {
            w.write_record([
                self.grid[i].to_string(),
                self.gamma_hat[i].to_string(),
                self.std_errors[i].to_string(),
                self.trials.to_string(),
                rule.clone(),
                self.d.to_string(),
                self.radius().to_string(),
                self.seed.to_string(),
            ])
            .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

pub fn gamma_sweep(rule: &LocalRule, d: usize, grid: &[f64], trials: u64, seed: u64) -> Result<GammaCurve> {
    check_trials(trials)?;
    if grid.is_empty() {
        return Err(Error::invalid("p_grid", "must contain at least one point"));
    }
    for &p in grid {
        check_p(p)?;
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("p_grid", "must be strictly increasing"));
    }
    let tree = ImplicitTree::new(d, DecisionRule::radius(rule) + 1)?;
    let k = grid.len();
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; k],
            |mut acc, t| {
                let field = VertexField::new(substream(seed, t));
                if root_decision(rule, &tree, &field) {
                    for (slot, &p) in acc.iter_mut().zip(grid) {
                        *slot += root_decision(rule, &tree, &CoupledLabels::new(field, p)) as u64;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; k],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let estimates: Vec<GammaEstimate> = grid
        .iter()
        .zip(&counts)
        .map(|(&p, &hits)| GammaEstimate::from_counts(p, hits, trials))
        .collect();
    Ok(GammaCurve {
        grid: grid.to_vec(),
        gamma_hat: estimates.iter().map(|e| e.gamma_hat).collect(),
        std_errors: estimates.iter().map(|e| e.std_error).collect(),
        trials,
        rule: rule.clone(),
        d,
        seed,
    })
}

/// Overlap of the two independent sets a rule produces on one G_d(n) sample
/// under a p-correlated decoration pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapOutcome {
    pub n: usize,
    pub intersection: usize,
    pub size_x: usize,
    pub size_y: usize,
    pub ties: usize,
    /// Vertices whose radius-r ball is not isomorphic to T_{d,r}.
    pub non_tree: usize,
}

impl OverlapOutcome {
    pub fn overlap_density(&self) -> f64 {
        self.intersection as f64 / self.n as f64
    }
}

pub fn overlap_experiment(rule: &LocalRule, n: usize, d: usize, p: f64, seed: u64) -> Result<OverlapOutcome> {
    Ok(overlap_sweep(rule, n, d, &[p], seed)?.remove(0))
}

/// `overlap_experiment` at every p of `grid` on one graph; entry `i` equals
/// `overlap_experiment(rule, n, d, grid[i], seed)`.
pub fn overlap_sweep(rule: &LocalRule, n: usize, d: usize, grid: &[f64], seed: u64) -> Result<Vec<OverlapOutcome>> {
    for &p in grid {
        check_p(p)?;
    }
    let sample = generate_regular(n, d, substream(seed, 0))?;
    let non_tree = n - tree_count(&sample.graph, d, DecisionRule::radius(rule));
    let mut out = Vec::with_capacity(grid.len());
    for &p in grid {
        let pair = sample_coupled(n, p, substream(seed, 1))?;
        let i = run_rule(rule, &sample.graph, &pair.x)?;
        let j = run_rule(rule, &sample.graph, &pair.y)?;
        out.push(OverlapOutcome {
            n,
            intersection: i.intersection_size(&j),
            size_x: i.size(),
            size_y: j.size(),
            ties: i.ties + j.ties,
            non_tree,
        });
    }
    Ok(out)
}

/// Result of the bisection for γ(p) = target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PSearch {
    pub p: f64,
    pub estimate: GammaEstimate,
    pub iterations: usize,
    /// Midpoint estimates that fell outside their bracket's endpoint values;
    /// γ is only known to be continuous, so these are reported, not fatal.
    pub anomalies: Vec<String>,
}

const MAX_BISECTION_STEPS: usize = 64;

/// Bisection on p until `|γ̂(p) - target| <= tol`.
///
/// Every evaluation reuses `seed`, so all estimates share their random
/// numbers. `tol` must exceed three standard errors at `target`.
pub fn find_p_for_gamma(rule: &LocalRule, d: usize, target: f64, tol: f64, trials: u64, seed: u64) -> Result<PSearch> {
    check_trials(trials)?;
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::invalid("target", format!("must lie in [0, 1], got {target}")));
    }
    let resolution = 3.0 * (target * (1.0 - target) / trials as f64).sqrt();
    if !(tol > resolution) {
        return Err(Error::ToleranceBelowResolution { tol, resolution });
    }

    let at = |p: f64| estimate_gamma(rule, d, p, trials, seed);
    let hit = |e: &GammaEstimate| (e.gamma_hat - target).abs() <= tol;

    let top = at(1.0)?;
    if hit(&top) {
        return Ok(PSearch { p: 1.0, estimate: top, iterations: 0, anomalies: vec![] });
    }
    let bottom = at(0.0)?;
    if hit(&bottom) {
        return Ok(PSearch { p: 0.0, estimate: bottom, iterations: 0, anomalies: vec![] });
    }
    let (low, high) = (bottom.gamma_hat.min(top.gamma_hat), bottom.gamma_hat.max(top.gamma_hat));
    if target < low - tol || target > high + tol || (target - bottom.gamma_hat).signum() == (target - top.gamma_hat).signum() {
        return Err(Error::TargetOutOfRange { target, low, high, tol });
    }

    let mut lo = bottom;
    let mut hi = top;
    let mut anomalies = Vec::new();
    for step in 1..=MAX_BISECTION_STEPS {
        let mid = at(0.5 * (lo.p + hi.p))?;
        if hit(&mid) {
            return Ok(PSearch { p: mid.p, estimate: mid, iterations: step, anomalies });
        }
        let (a, b) = (lo.gamma_hat.min(hi.gamma_hat), lo.gamma_hat.max(hi.gamma_hat));
        if mid.gamma_hat < a || mid.gamma_hat > b {
            anomalies.push(format!(
                "gamma_hat({}) = {} outside bracket [{}, {}] at p in [{}, {}]",
                mid.p, mid.gamma_hat, a, b, lo.p, hi.p
            ));
        }
        // Keep the half whose endpoints still straddle the target.
        if (mid.gamma_hat - target).signum() == (lo.gamma_hat - target).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let last = if (lo.gamma_hat - target).abs() < (hi.gamma_hat - target).abs() { lo } else { hi };
    Err(Error::NotConverged {
        iterations: MAX_BISECTION_STEPS,
        p: last.p,
        gamma: last.gamma_hat,
    })
}
