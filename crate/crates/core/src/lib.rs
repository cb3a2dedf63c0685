//! Region-aware implicit neural representation (INR) image codec.
//!
//! An image is stored as two small coordinate MLPs: a background network fitted
//! to the whole frame and an object network fitted to the bounding-box residual
//! left by the background. The crate also carries the weight quantizer and
//! container format, a decode scheduler that batches same-shaped networks, and
//! a fog/edge communication cost planner.

pub mod codec;
pub mod comm;
pub mod inr;
pub mod quant;
pub mod sched;
