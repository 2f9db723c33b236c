use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Error;

/// Random graph family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Sparse Erdős–Rényi graph with edge probability d/n.
    Er,
    /// Random d-regular graph from the configuration model.
    Reg,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Er => "er",
            Model::Reg => "reg",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "er" => Ok(Model::Er),
            "reg" => Ok(Model::Reg),
            other => Err(Error::invalid("model", format!("expected `er` or `reg`, got `{other}`"))),
        }
    }
}
