//! Min-max weight quantization and the `.rinr` container format.

mod container;
mod tensor;

use thiserror::Error;

use crate::codec::CodecError;
use crate::inr::InrError;

pub use container::{
    baseline_container_size, container_size, network_payload_bytes, pack, unpack, ContainerFile,
    PackPolicy, CRC_BYTES, FORMAT_VERSION, HEADER_BYTES, MAGIC, RECORD_OVERHEAD_BYTES,
};
pub use tensor::{dequantize, quantize, BitWidth, QuantizedTensor};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantError {
    #[error("cannot quantize an empty tensor")]
    EmptyTensor,
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("invalid quantization range [{min}, {max}]")]
    InvalidRange { min: f32, max: f32 },
    #[error("code {code} exceeds the {bits}-bit range")]
    CodeOutOfRange { code: u16, bits: u8 },
    #[error("unsupported bit width {0} (expected 8 or 16)")]
    UnsupportedBitWidth(u8),
    #[error("bad magic {found:?}, not a .rinr container")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u16),
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    CrcMismatch { stored: u32, computed: u32 },
    #[error("container truncated: {needed} bytes needed at offset {offset}")]
    Truncated { offset: usize, needed: usize },
    #[error("malformed container: {0}")]
    Malformed(String),
    #[error("value not representable in the container: {0}")]
    Unrepresentable(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Inr(#[from] InrError),
}
