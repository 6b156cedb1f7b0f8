use std::path::PathBuf;

use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input contains no arcs or nodes")]
    EmptyGraph,

    #[error("node {node} is out of bounds for a graph with {node_count} nodes")]
    NodeOutOfBounds { node: NodeId, node_count: usize },

    #[error("non-finite or negative value {value} in column {column}, row {row}")]
    Numeric {
        row: usize,
        column: usize,
        value: f64,
    },

    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("parameter {name} = {value} is outside the open interval (0, 1)")]
    ParamRange { name: String, value: f64 },

    #[error("alpha values sum to {sum}, which is more than 0.05 away from 1")]
    AlphaSum { sum: f64 },

    #[error("could not extract 10 parameter values from the response ({found} found)")]
    AnswerParse { found: usize, raw: String },

    #[error("conflicting values for {label}: {first} and {second}")]
    AmbiguousAnswer {
        label: String,
        first: f64,
        second: f64,
    },

    #[error("the RULES ANSWERING section cannot be omitted")]
    PromptRefused,

    #[error("prompt needs ~{estimate} tokens plus {max_output} output tokens but the usable window is {window}")]
    ContextOverflow {
        estimate: usize,
        max_output: usize,
        window: usize,
    },

    #[error("credential error: {0}")]
    Credential(String),

    #[error("transport error: {0}")]
    Transport(String),

    #[error("no recorded exchange matches prompt hash {hash}")]
    ReplayMiss { hash: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("correlation is undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("stale guidance: {0}")]
    Fingerprint(String),

    #[error("missing instance file {}", .0.display())]
    MissingInstance(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}
