use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parity: n*d = {n}*{d} is odd, the configuration model needs an even replica count")]
    OddReplicaCount { n: u64, d: u64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("missing labels: decoration covers {labels} vertices, graph has {n}")]
    MissingLabels { labels: usize, n: usize },

    #[error("label {value} at vertex {vertex} is outside [0, 1]")]
    LabelOutOfRange { vertex: usize, value: f64 },

    #[error("domain: {0}")]
    Domain(String),

    #[error("l-range: l = {l} exceeds d*(m-k) = {max}")]
    CrossEdgeRange { l: u64, max: u64 },

    #[error("nonnegativity: {0}")]
    Nonnegativity(String),

    #[error("tolerance {tol} is below the statistical resolution 3*std_error = {resolution}")]
    ToleranceBelowResolution { tol: f64, resolution: f64 },

    #[error("target {target} is outside the achievable range [{low}, {high}] (tolerance {tol})")]
    TargetOutOfRange { target: f64, low: f64, high: f64, tol: f64 },

    #[error("bisection did not reach tolerance after {iterations} steps (last p = {p}, gamma = {gamma})")]
    NotConverged { iterations: usize, p: f64, gamma: f64 },

    #[error("no window of half-width {target} below the degree ceiling {ceiling}")]
    WindowNotFound { target: f64, ceiling: u64 },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("rule descriptor `{descriptor}`: {reason}")]
    RuleDescriptor { descriptor: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by caller input rather than by the environment.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Json(_) | Error::NotConverged { .. })
    }
}
