use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::Result;

/// One named pass/fail check attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Criterion {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Criterion {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Structured record of one command: its full configuration, outputs and
/// timing. Everything except `wall_time_s` is a function of the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: ExperimentConfig,
    pub outputs: serde_json::Value,
    pub criteria: Vec<Criterion>,
    pub wall_time_s: f64,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
