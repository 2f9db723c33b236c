use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::graph::check_regular_params;
use crate::localalg::LocalRule;
use crate::moments::THRESHOLD_SLACK;
use crate::{Error, Model, Result};

/// A full command line, as parsed and as embedded in every report.
#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "localfactor", version, about = "Local independent-set rules, correlated runs and overlap windows")]
pub struct ExperimentConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, env = "LOCALFACTOR_THREADS")]
    pub threads: Option<usize>,

    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Sample a graph and write it as an edge list.
    Gen(GenArgs),
    /// Estimate a rule's density on the canonical tree, optionally on graphs.
    Density(DensityArgs),
    /// Estimate γ(p), or search for the p with γ(p) = target.
    Gamma(GammaArgs),
    /// Estimate γ over a p-grid with common random numbers.
    Sweep(SweepArgs),
    /// Run a rule on G_d(n) under a p-correlated decoration pair.
    Couple(CoupleArgs),
    /// Exact log first moment of an overlap count.
    Moments(MomentsArgs),
    /// Rate function at one ẑ or over the ẑ grid.
    Rate(RateArgs),
    /// Forbidden overlap window at one degree.
    Window(WindowArgs),
    /// Smallest degree whose window reaches a target.
    Mind(MindArgs),
    /// Overlap curve of a rule against the window its density implies.
    Demo(DemoArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Density(_) => "density",
            Command::Gamma(_) => "gamma",
            Command::Sweep(_) => "sweep",
            Command::Couple(_) => "couple",
            Command::Moments(_) => "moments",
            Command::Rate(_) => "rate",
            Command::Window(_) => "window",
            Command::Mind(_) => "mind",
            Command::Demo(_) => "demo",
        }
    }
}

/// A rule given by family name and parameters, or as a full descriptor.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RuleArgs {
    /// `local-min`, `multi-round-greedy`, `custom-table` or
    /// `rule=<family>;r=<radius>;params=<k=v>`.
    #[arg(long, default_value = "local-min")]
    pub rule: String,
    /// Round count for multi-round-greedy.
    #[arg(long)]
    pub rounds: Option<u32>,
    /// Accepting buckets for custom-table, as a 0/1 string.
    #[arg(long)]
    pub table: Option<String>,
}

impl RuleArgs {
    pub fn resolve(&self) -> Result<LocalRule> {
        if self.rule.contains('=') {
            if self.rounds.is_some() || self.table.is_some() {
                return Err(Error::invalid("rule", "a full descriptor takes no --rounds or --table"));
            }
            return self.rule.parse();
        }
        let descriptor = match (self.rule.as_str(), self.rounds, &self.table) {
            ("local-min", None, None) => "rule=local-min;r=1;params=".to_string(),
            ("multi-round-greedy", Some(t), None) => format!("rule=multi-round-greedy;r={t};params=rounds={t}"),
            ("custom-table", None, Some(table)) => format!("rule=custom-table;r=1;params=table={table}"),
            ("multi-round-greedy", None, _) => return Err(Error::invalid("rounds", "multi-round-greedy needs --rounds")),
            ("custom-table", _, None) => return Err(Error::invalid("table", "custom-table needs --table")),
            ("local-min" | "multi-round-greedy" | "custom-table", _, _) => {
                return Err(Error::invalid("rule", format!("{} takes different parameters", self.rule)))
            }
            (other, _, _) => return Err(Error::invalid("rule", format!("unknown rule family `{other}`"))),
        };
        descriptor.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GenArgs {
    #[arg(long)]
    pub model: Model,
    #[arg(long)]
    pub n: usize,
    /// Degree (reg) or average degree (er).
    #[arg(long)]
    pub d: f64,
    #[arg(long)]
    pub seed: u64,
    /// Edge-list output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DensityArgs {
    #[command(flatten)]
    pub rule_args: RuleArgs,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    /// Also run the rule on this many-vertex regular graphs.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub graphs: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GammaArgs {
    #[command(flatten)]
    pub rule_args: RuleArgs,
    #[arg(long)]
    pub d: usize,
    #[arg(long, conflicts_with = "target")]
    pub p: Option<f64>,
    /// Overlap density to hit by bisection on p.
    #[arg(long)]
    pub target: Option<f64>,
    /// Bisection tolerance (default: four standard errors at the target).
    #[arg(long, requires = "target")]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub rule_args: RuleArgs,
    #[arg(long)]
    pub d: usize,
    /// Uniform grid size on [0, 1].
    #[arg(long, default_value_t = 21)]
    pub points: usize,
    /// Explicit comma-separated p-grid; overrides --points.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    /// CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CoupleArgs {
    #[command(flatten)]
    pub rule_args: RuleArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 1)]
    pub graphs: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct MomentsArgs {
    #[arg(long)]
    pub model: Model,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub d: f64,
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub k: u64,
    /// Cross-edge count (reg only); all l are summed when absent.
    #[arg(long)]
    pub l: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RateArgs {
    #[arg(long)]
    pub model: Model,
    #[arg(long)]
    pub d: f64,
    #[arg(long)]
    pub beta: f64,
    /// Single ẑ; the whole symmetric grid is scanned when absent.
    #[arg(long)]
    pub zhat: Option<f64>,
    #[arg(long, default_value_t = 2001)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct WindowArgs {
    #[arg(long)]
    pub model: Model,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 1000)]
    pub d: u64,
    #[arg(long, default_value_t = 2001)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct MindArgs {
    #[arg(long)]
    pub model: Model,
    #[arg(long)]
    pub beta: f64,
    /// Target ẑ (default: 0.7 √(2β² - 1)).
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long, default_value_t = 2001)]
    pub points: usize,
    #[arg(long, default_value_t = 1 << 40)]
    pub ceiling: u64,
    /// CSV of every probed window.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DemoArgs {
    #[command(flatten)]
    pub rule_args: RuleArgs,
    #[arg(long, default_value_t = 50)]
    pub d: usize,
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 5)]
    pub points: usize,
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 200_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 4)]
    pub graphs: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p", format!("must lie in [0, 1], got {p}")));
    }
    Ok(())
}

fn check_positive(name: &'static str, v: u64) -> Result<()> {
    if v == 0 {
        return Err(Error::invalid(name, "must be at least 1"));
    }
    Ok(())
}

fn check_tree_degree(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::invalid("d", format!("tree estimates need d >= 2, got {d}")));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::invalid("beta", format!("must lie in (0, 1], got {beta}")));
    }
    Ok(())
}

fn check_points(points: usize) -> Result<()> {
    if points < 3 || points % 2 == 0 {
        return Err(Error::invalid("points", format!("must be odd and at least 3, got {points}")));
    }
    Ok(())
}

/// `points` evenly spaced values on [0, 1], or an explicit comma list.
pub(crate) fn p_grid(points: usize, grid: Option<&str>) -> Result<Vec<f64>> {
    let values = match grid {
        Some(list) => list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::invalid("grid", format!("`{s}` is not a number")))
            })
            .collect::<Result<Vec<_>>>()?,
        None => {
            if points < 2 {
                return Err(Error::invalid("points", "a p-grid needs at least 2 points"));
            }
            (0..points).map(|i| i as f64 / (points - 1) as f64).collect()
        }
    };
    for &p in &values {
        check_p(p)?;
    }
    if values.is_empty() || values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("grid", "must be nonempty and strictly increasing"));
    }
    Ok(values)
}

impl ExperimentConfig {
    /// Re-checks every module precondition the command will rely on.
    pub fn validate(&self) -> Result<()> {
        if self.threads == Some(0) {
            return Err(Error::invalid("threads", "must be at least 1"));
        }
        match &self.command {
            Command::Gen(a) => match a.model {
                Model::Reg => {
                    if a.d.fract() != 0.0 || a.d < 0.0 {
                        return Err(Error::invalid("d", format!("regular degree must be a nonnegative integer, got {}", a.d)));
                    }
                    check_regular_params(a.n, a.d as usize).map(|_| ())
                }
                Model::Er => {
                    if !(a.d.is_finite() && a.d >= 0.0) {
                        return Err(Error::invalid("d", format!("must be finite and nonnegative, got {}", a.d)));
                    }
                    Ok(())
                }
            },
            Command::Density(a) => {
                a.rule_args.resolve()?;
                check_tree_degree(a.d)?;
                check_positive("trials", a.trials)?;
                if let Some(n) = a.n {
                    check_positive("graphs", a.graphs)?;
                    check_regular_params(n, a.d)?;
                }
                Ok(())
            }
            Command::Gamma(a) => {
                a.rule_args.resolve()?;
                check_tree_degree(a.d)?;
                check_positive("trials", a.trials)?;
                match (a.p, a.target) {
                    (Some(p), None) => check_p(p),
                    (None, Some(t)) => {
                        if !(0.0..=1.0).contains(&t) {
                            return Err(Error::invalid("target", format!("must lie in [0, 1], got {t}")));
                        }
                        Ok(())
                    }
                    _ => Err(Error::invalid("p", "give exactly one of --p and --target")),
                }
            }
            Command::Sweep(a) => {
                a.rule_args.resolve()?;
                check_tree_degree(a.d)?;
                check_positive("trials", a.trials)?;
                p_grid(a.points, a.grid.as_deref()).map(|_| ())
            }
            Command::Couple(a) => {
                a.rule_args.resolve()?;
                check_p(a.p)?;
                check_positive("graphs", a.graphs)?;
                check_regular_params(a.n, a.d).map(|_| ())
            }
            Command::Moments(a) => {
                if a.model == Model::Er && a.l.is_some() {
                    return Err(Error::invalid("l", "only the regular model has a cross-edge count"));
                }
                Ok(())
            }
            Command::Rate(a) => {
                check_beta(a.beta)?;
                if !(a.d.is_finite() && a.d > 1.0) {
                    return Err(Error::invalid("d", format!("must exceed 1, got {}", a.d)));
                }
                if let Some(z) = a.zhat {
                    if !(z > -1.0 && z <= a.beta) {
                        return Err(Error::invalid("zhat", format!("must lie in (-1, beta], got {z}")));
                    }
                }
                check_points(a.points)
            }
            Command::Window(a) => {
                check_beta(a.beta)?;
                if a.d < 3 {
                    return Err(Error::invalid("d", format!("must be at least 3, got {}", a.d)));
                }
                check_points(a.points)
            }
            Command::Mind(a) => {
                check_points(a.points)?;
                if !(a.beta <= 1.0 && 2.0 * a.beta * a.beta - 1.0 > THRESHOLD_SLACK) {
                    return Err(Error::invalid("beta", format!("must lie in (1/sqrt(2), 1], got {}", a.beta)));
                }
                Ok(())
            }
            Command::Demo(a) => {
                a.rule_args.resolve()?;
                check_positive("trials", a.trials)?;
                check_positive("graphs", a.graphs)?;
                if a.d < 3 {
                    return Err(Error::invalid("d", format!("must be at least 3, got {}", a.d)));
                }
                check_regular_params(a.n, a.d)?;
                p_grid(a.points, a.grid.as_deref()).map(|_| ())
            }
        }
    }
}
