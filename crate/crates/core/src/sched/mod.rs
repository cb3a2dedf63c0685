//! Decode planning: batch same-shaped networks so every batch decodes in
//! uniform time, and run batches in parallel from memory.

mod decode;
mod plan;

use thiserror::Error;

use crate::codec::CodecError;

pub use decode::{decode_batch, decode_planned, DecodeJob};
pub use plan::{
    batch_latency, group_by_arch, plan_latency, random_plan, sequential_plan, ArchKey, BatchPlan,
    LatencyModel, PlanJob, RemainderPolicy,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchedError {
    #[error("batch size must be at least 1")]
    InvalidBatchSize,
    #[error("thread budget must be at least 1")]
    InvalidThreadBudget,
    #[error("invalid latency model: {0}")]
    InvalidLatencyModel(String),
    #[error("batch is empty")]
    EmptyBatch,
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("invalid architecture key {0}")]
    InvalidArchKey(String),
    #[error("failed to build thread pool: {0}")]
    ThreadPool(String),
    #[error("decoding {image_id}: {source}")]
    Decode {
        image_id: String,
        #[source]
        source: CodecError,
    },
}
