use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rule::{run_rule, DecisionRule, Decoration, Labels, LocalRule};
use super::tree::ImplicitTree;
use crate::graph::{check_regular_params, generate_regular, neighborhood, tree_count, Graph};
use crate::rng::{substream, Channel, VertexField};
use crate::{Error, Result};

/// Monte Carlo estimate of a Bernoulli probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub alpha_hat: f64,
    pub hits: u64,
    pub trials: u64,
    pub std_error: f64,
}

impl DensityEstimate {
    pub(crate) fn from_counts(hits: u64, trials: u64) -> Self {
        let a = hits as f64 / trials as f64;
        DensityEstimate {
            alpha_hat: a,
            hits,
            trials,
            std_error: (a * (1.0 - a) / trials as f64).sqrt(),
        }
    }
}

/// The rule's decision at the root of `tree` (root id 0).
#[inline]
pub(crate) fn root_decision<R: DecisionRule, L: Labels + ?Sized>(rule: &R, tree: &ImplicitTree, labels: &L) -> bool {
    rule.decide(0, tree, labels)
}

pub(crate) fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    Ok(())
}

/// Probability that the rule selects the root of T_{d, r+1} under i.i.d.
/// uniform labels, r being the rule's radius.
///
/// Trial `t` draws its labels lazily from `substream(seed, t)`, so only the
/// labels the rule actually reads are generated.
pub fn estimate_density<R: DecisionRule>(rule: &R, d: usize, trials: u64, seed: u64) -> Result<DensityEstimate> {
    check_trials(trials)?;
    let tree = ImplicitTree::new(d, rule.radius() + 1)?;
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&t| root_decision(rule, &tree, &VertexField::new(substream(seed, t))))
        .count() as u64;
    Ok(DensityEstimate::from_counts(hits, trials))
}

/// Re-randomises every label outside B(u, radius) `trials` times and reports
/// whether the decision at `u` ever changed.
pub fn locality_check<R: DecisionRule>(
    rule: &R,
    g: &Graph,
    u: usize,
    x: &Decoration,
    trials: u64,
    seed: u64,
) -> Result<bool> {
    if x.len() < g.n() {
        return Err(Error::MissingLabels { labels: x.len(), n: g.n() });
    }
    let view = neighborhood(g, u, rule.radius())?;
    let mut inside = vec![false; g.n()];
    for &(v, _) in &view.vertices {
        inside[v] = true;
    }
    let reference = rule.decide(u, g, x);
    let stable = (0..trials).into_par_iter().all(|t| {
        let field = VertexField::new(substream(seed, t));
        let relabelled: Vec<f64> = (0..g.n())
            .map(|v| if inside[v] { x.label(v) } else { field.label(v as u64, Channel::Base) })
            .collect();
        rule.decide(u, g, &relabelled) == reference
    });
    Ok(stable)
}

/// One configuration-model run of a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub size: usize,
    pub ties: usize,
    /// Vertices whose radius-r ball is not isomorphic to T_{d,r}.
    pub non_tree: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSeries {
    pub n: usize,
    pub d: usize,
    pub records: Vec<RunRecord>,
}

impl RunSeries {
    pub fn mean_density(&self) -> f64 {
        let total: usize = self.records.iter().map(|r| r.size).sum();
        total as f64 / (self.records.len() * self.n) as f64
    }

    /// Sample variance of |I| divided by n.
    pub fn variance_per_n(&self) -> f64 {
        let k = self.records.len();
        if k < 2 {
            return 0.0;
        }
        let mean = self.records.iter().map(|r| r.size as f64).sum::<f64>() / k as f64;
        let ss: f64 = self.records.iter().map(|r| (r.size as f64 - mean).powi(2)).sum();
        ss / (k - 1) as f64 / self.n as f64
    }

    /// Standard error of `mean_density`.
    pub fn density_std_error(&self) -> f64 {
        (self.variance_per_n() / (self.n * self.records.len()) as f64).sqrt()
    }

    pub fn mean_non_tree_fraction(&self) -> f64 {
        let total: usize = self.records.iter().map(|r| r.non_tree).sum();
        total as f64 / (self.records.len() * self.n) as f64
    }

    pub fn total_ties(&self) -> usize {
        self.records.iter().map(|r| r.ties).sum()
    }
}

/// Runs the rule on `trials` fresh (graph, decoration) pairs from G_d(n).
pub fn measure_run(rule: &LocalRule, n: usize, d: usize, trials: u64, seed: u64) -> Result<RunSeries> {
    check_trials(trials)?;
    check_regular_params(n, d)?;
    let radius = DecisionRule::radius(rule);
    let records = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = substream(seed, t);
            let sample = generate_regular(n, d, substream(s, 0))?;
            let x = Decoration::sample(n, substream(s, 1));
            let out = run_rule(rule, &sample.graph, &x)?;
            Ok(RunRecord {
                size: out.size(),
                ties: out.ties,
                non_tree: n - tree_count(&sample.graph, d, radius),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunSeries { n, d, records })
}
