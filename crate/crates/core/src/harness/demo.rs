use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::Criterion;
use crate::coupling::{csv_error, gamma_sweep, overlap_sweep, GammaCurve, OverlapOutcome};
use crate::localalg::{estimate_density, DensityEstimate, LocalRule};
use crate::moments::{forbidden_window, Window, WindowOptions};
use crate::rng::substream;
use crate::{Error, Model, Result};

/// One p of the demo: tree estimate against graph overlaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemoPoint {
    pub p: f64,
    pub gamma_hat: f64,
    pub gamma_std_error: f64,
    pub overlap_density: f64,
    pub overlap_std_error: f64,
    pub non_tree_fraction: f64,
    pub in_window: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringDemo {
    pub rule: LocalRule,
    pub d: usize,
    pub n: usize,
    pub graphs: u64,
    pub alpha: DensityEstimate,
    /// α̂ d / log d - 1: the β whose set density (1 + β) log d / d is α̂.
    pub beta_hat: f64,
    /// Regular-model window at β̂; `None` when β̂ is outside (0, 1].
    pub window: Option<Window>,
    pub empty_by_theory: bool,
    pub points: Vec<DemoPoint>,
    pub note: String,
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Sweeps γ on the tree, measures overlaps of the rule's two outputs on
/// `graphs` regular graphs at every p, and checks the overlaps against the
/// forbidden window for the β implied by the rule's own density.
///
/// Graph `g` uses the same graph and decoration stream at every p.
pub fn clustering_demo(
    rule: &LocalRule,
    d: usize,
    n: usize,
    p_grid: &[f64],
    trials: u64,
    graphs: u64,
    seed: u64,
) -> Result<ClusteringDemo> {
    if graphs == 0 {
        return Err(Error::invalid("graphs", "must be at least 1"));
    }
    if d < 3 {
        return Err(Error::invalid("d", format!("must be at least 3, got {d}")));
    }
    let tree_seed = substream(seed, 0);
    let graph_seed = substream(seed, 1);
    let curve: GammaCurve = gamma_sweep(rule, d, p_grid, trials, tree_seed)?;
    let alpha = estimate_density(rule, d, trials, tree_seed)?;
    let beta_hat = alpha.alpha_hat * d as f64 / (d as f64).ln() - 1.0;

    let empty_by_theory = 2.0 * beta_hat * beta_hat - 1.0 <= crate::moments::THRESHOLD_SLACK || beta_hat <= 0.0;
    let window = if beta_hat > 0.0 && beta_hat <= 1.0 {
        Some(forbidden_window(d as u64, beta_hat, Model::Reg, &WindowOptions::default())?)
    } else {
        None
    };

    let runs: Vec<Vec<OverlapOutcome>> = (0..graphs)
        .into_par_iter()
        .map(|g| overlap_sweep(rule, n, d, p_grid, substream(graph_seed, g)))
        .collect::<Result<_>>()?;
    let mut points = Vec::with_capacity(p_grid.len());
    for (i, &p) in p_grid.iter().enumerate() {
        let densities: Vec<f64> = runs.iter().map(|r| r[i].overlap_density()).collect();
        let (overlap_density, overlap_std_error) = mean_and_se(&densities);
        let non_tree_fraction = runs.iter().map(|r| r[i].non_tree as f64 / n as f64).sum::<f64>() / graphs as f64;
        points.push(DemoPoint {
            p,
            gamma_hat: curve.gamma_hat[i],
            gamma_std_error: curve.std_errors[i],
            overlap_density,
            overlap_std_error,
            non_tree_fraction,
            in_window: window.is_some_and(|w| w.contains_density(overlap_density)),
        });
    }

    let note = if beta_hat <= 0.0 {
        format!(
            "beta_hat = {beta_hat:.4} <= 0: the rule's density is below log d / d, deep inside the allowed regime; no window applies"
        )
    } else if empty_by_theory {
        format!("beta_hat = {beta_hat:.4} <= 1/sqrt(2): the window is empty by theory")
    } else if beta_hat > 1.0 {
        format!("beta_hat = {beta_hat:.4} > 1: outside the scanned range")
    } else {
        format!("beta_hat = {beta_hat:.4}: window scanned at d = {d}")
    };

    Ok(ClusteringDemo {
        rule: rule.clone(),
        d,
        n,
        graphs,
        alpha,
        beta_hat,
        window,
        empty_by_theory,
        points,
        note,
    })
}

impl ClusteringDemo {
    /// The window is never entered, and the p = 0 and p = 1 graph overlaps
    /// reproduce α̂² and α̂ within three standard errors.
    pub fn criteria(&self) -> Vec<Criterion> {
        let entered: Vec<f64> = self.points.iter().filter(|q| q.in_window).map(|q| q.p).collect();
        let mut out = vec![Criterion::new(
            "window_not_entered",
            entered.is_empty(),
            if entered.is_empty() {
                self.note.clone()
            } else {
                format!("overlap entered the window at p = {entered:?}")
            },
        )];
        let a = self.alpha.alpha_hat;
        let sa = self.alpha.std_error;
        for (p, expect, se_expect, name) in [(0.0, a * a, 2.0 * a * sa, "p0_matches_alpha_squared"), (1.0, a, sa, "p1_matches_alpha")] {
            if let Some(q) = self.points.iter().find(|q| q.p == p) {
                let sigma = (q.overlap_std_error.powi(2) + se_expect.powi(2)).sqrt();
                let gap = (q.overlap_density - expect).abs();
                out.push(Criterion::new(
                    name,
                    gap <= 3.0 * sigma,
                    format!("overlap {} vs {expect}, |gap| = {gap:.3e}, 3 sigma = {:.3e}", q.overlap_density, 3.0 * sigma),
                ));
            }
        }
        out
    }

    /// Columns `p,gamma_hat,gamma_std_error,overlap_density,overlap_std_error,non_tree_fraction,in_window`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "p",
            "gamma_hat",
            "gamma_std_error",
            "overlap_density",
            "overlap_std_error",
            "non_tree_fraction",
            "in_window",
        ])
        .map_err(csv_error)?;
        for q in &self.points {
            w.write_record([
                q.p.to_string(),
                q.gamma_hat.to_string(),
                q.gamma_std_error.to_string(),
                q.overlap_density.to_string(),
                q.overlap_std_error.to_string(),
                q.non_tree_fraction.to_string(),
                q.in_window.to_string(),
            ])
            .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}
