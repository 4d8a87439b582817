//! Shared-memory MapReduce.

pub mod app;
pub mod apps;
pub mod config;
pub mod containers;
pub mod error;
pub mod hashkit;
pub mod job;
pub mod pipeline;
pub mod pricing;
pub mod split;
pub mod strategy;
mod worker;

pub use app::{App, AppSpec, ArraySize, ContainerHint, Emit, Pair, Payload};
pub use config::{ContainerMode, HashMode, JobConfig, MapStyle, PipelineMode};
pub use containers::KeyRef;
pub use error::{Error, Phase, Result};
pub use job::{run_job, JobResult, PhaseTimings, PipelineStats};
pub use strategy::{select_strategy, ContainerKind, ExecutionPlan};

/// Option parameters in double precision, as used by the pricing apps.
pub type OptionParams = pricing::OptionParams<f64>;
/// Option parameters in single precision.
pub type OptionParams32 = pricing::OptionParams<f32>;
