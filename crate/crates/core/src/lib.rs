//! Factor-of-i.i.d. local rules for independent sets on random sparse graphs.
//!
//! The crate has four computational layers and one orchestration layer:
//!
//! * [`graph`]: configuration-model and Erdős–Rényi samplers, rooted balls,
//!   tree-likeness checks and the edge-list file format.
//! * [`localalg`]: r-local independence rules evaluated on graphs and on the
//!   canonical tree, plus Monte Carlo density estimation.
//! * [`coupling`]: p-correlated decorations, the overlap curve γ(p) and the
//!   bisection that hits a prescribed overlap density.
//! * [`moments`]: exact first-moment counts of overlapping independent-set
//!   pairs, their rate functions and the forbidden overlap window.
//! * [`harness`]: configuration, reports and the `localfactor` CLI.
//!
//! All randomness flows through [`rng`], a keyed counter-based generator, so
//! every result is a pure function of its seed and independent of the number
//! of worker threads.

pub mod coupling;
pub mod error;
pub mod graph;
pub mod harness;
pub mod localalg;
pub mod moments;
pub mod rng;

mod model;

pub use error::{Error, Result};
pub use model::Model;
