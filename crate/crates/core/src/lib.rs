//! Guided BRKGA for the k-d dominating set problem on directed graphs.
//!
//! Node metrics are turned into per-node sampling probabilities by a small
//! parametric model; the parameters come from a language model, a tuner, or
//! a random draw, and the resulting probabilities bias the decoder of a
//! biased random-key genetic algorithm.

pub mod brkga;
pub mod error;
pub mod gateway;
pub mod graph;
pub mod guidance;
pub mod harness;
pub mod influence;
pub mod metrics;
pub mod prompting;

pub use brkga::{BrkgaConfig, Budget, GuidanceMode, RunOutcome};
pub use error::{Error, Result};
pub use gateway::{LlmClient, LlmExchange, ModelConfig, Provider};
pub use graph::{DirectedGraph, GraphFingerprint, IdMap, NodeId};
pub use guidance::{GuidanceParams, ParamsFile, ParamsSource, ProbabilityVector};
pub use influence::{SeedSet, Solution};
pub use metrics::{Metric, MetricRow, MetricsConfig, MetricsTable, METRIC_COUNT};
pub use prompting::{PromptDocument, PromptOptions};
