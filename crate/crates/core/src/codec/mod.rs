//! Region-aware encoding: a background network over the whole frame plus a
//! small object network over the bounding-box residual.

mod image;
mod metrics;
mod pipeline;
mod residual;
mod table;

use thiserror::Error;

use crate::inr::InrError;

pub use image::{crop, paste, BoundingBox, Image};
pub use metrics::{compression_ratio, entropy, mse, psnr, psnr_outside, Histogram};
pub use pipeline::{decode, decode_background, encode, encode_object, EncodedImage, ObjectMode};
pub use residual::{apply_residual, compute_residual, ResidualPatch};
pub use table::{select_object_arch, ObjectSizeTable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodecError {
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("bounding box {bbox:?} does not fit a {width}x{height} image")]
    InvalidBoundingBox {
        bbox: BoundingBox,
        width: usize,
        height: usize,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid size table: {0}")]
    InvalidTable(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Inr(#[from] InrError),
}
