//! Configuration, structured reports and the `localfactor` command line.
//!
//! Every stochastic command takes a mandatory `--seed`; the number of worker
//! threads (`--threads`, falling back to `LOCALFACTOR_THREADS`) never changes
//! a result.

mod config;
mod demo;
mod report;
mod run;

pub use config::{
    CoupleArgs, DemoArgs, DensityArgs, ExperimentConfig, GammaArgs, GenArgs, MindArgs, MomentsArgs, RateArgs, RuleArgs,
    SweepArgs, WindowArgs,
};
pub use config::Command;
pub use demo::{clustering_demo, ClusteringDemo, DemoPoint};
pub use report::{Criterion, Report};
pub use run::{cli_main, execute};
