//! r-local independence rules: evaluation on graphs and on the canonical tree.

mod density;
mod rule;
mod tree;

pub use density::{estimate_density, locality_check, measure_run, DensityEstimate, RunRecord, RunSeries};
pub use rule::{evaluate_rule, run_rule, DecisionRule, Decoration, Labels, LocalRule, RuleFamily, RuleOutcome};
pub use tree::{canonical_tree, tree_size, CanonicalTree, ImplicitTree};

pub(crate) use density::root_decision;
