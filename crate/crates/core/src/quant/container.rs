//! The `.rinr` byte layout. All integers and floats are little-endian.
//!
//! ```text
//! magic "RINR" | version u16 | width u32 | height u32 | bbox x,y,w,h u32
//! | obj_mode u8 | bg arch | obj arch | bg records | obj records | crc32 u32
//! arch   = layer_count u32 | hidden_dim u32 | frequency_scale f32
//! record = bits u8 | min f32 | max f32 | codes (u8 or u16 each)
//! ```
//!
//! Records come per layer, weight then bias; their lengths follow from the
//! architecture. The CRC covers every preceding byte.

use crate::codec::{BoundingBox, EncodedImage, ObjectMode};
use crate::inr::{DenseLayer, MlpArchitecture, ParameterSet, INPUT_DIM, OUTPUT_DIM};

use super::{dequantize, quantize, BitWidth, QuantError, QuantizedTensor};

pub const MAGIC: [u8; 4] = *b"RINR";
pub const FORMAT_VERSION: u16 = 1;
/// Fixed bytes before the first tensor record.
pub const HEADER_BYTES: usize = 4 + 2 + 4 * 2 + 4 * 4 + 1 + 12 * 2;
/// `bits`, `min` and `max` ahead of each record's codes.
pub const RECORD_OVERHEAD_BYTES: usize = 1 + 4 + 4;
pub const CRC_BYTES: usize = 4;

/// Code widths for the two networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackPolicy {
    pub background: BitWidth,
    pub object: BitWidth,
}

impl Default for PackPolicy {
    /// 8-bit background, 16-bit object.
    fn default() -> Self {
        Self {
            background: BitWidth::Eight,
            object: BitWidth::Sixteen,
        }
    }
}

/// Record bytes for one network: per layer a weight and a bias record.
pub fn network_payload_bytes(arch: &MlpArchitecture, bits: BitWidth) -> usize {
    arch.layer_shapes()
        .into_iter()
        .map(|(i, o)| 2 * RECORD_OVERHEAD_BYTES + (i * o + o) * bits.code_bytes())
        .sum()
}

/// Exact file length for a background/object pair; depends only on the architectures.
pub fn container_size(
    bg_arch: &MlpArchitecture,
    obj_arch: &MlpArchitecture,
    policy: PackPolicy,
) -> usize {
    HEADER_BYTES
        + network_payload_bytes(bg_arch, policy.background)
        + network_payload_bytes(obj_arch, policy.object)
        + CRC_BYTES
}

/// Length of a single-network file under the same framing (header, records,
/// CRC). Used as the size of a one-network baseline encoding.
pub fn baseline_container_size(arch: &MlpArchitecture, bits: BitWidth) -> usize {
    HEADER_BYTES + network_payload_bytes(arch, bits) + CRC_BYTES
}

/// The quantized, on-disk form of an [`EncodedImage`].
#[derive(Debug, Clone, PartialEq)]
pub struct ContainerFile {
    pub width: u32,
    pub height: u32,
    pub bbox: [u32; 4],
    pub obj_mode: ObjectMode,
    pub bg_arch: MlpArchitecture,
    pub obj_arch: MlpArchitecture,
    /// Weight then bias per layer.
    pub bg_tensors: Vec<QuantizedTensor>,
    pub obj_tensors: Vec<QuantizedTensor>,
}

fn to_u32(v: usize, what: &str) -> Result<u32, QuantError> {
    u32::try_from(v).map_err(|_| QuantError::Unrepresentable(format!("{what} {v} exceeds u32")))
}

fn quantize_network(
    params: &ParameterSet,
    bits: BitWidth,
) -> Result<Vec<QuantizedTensor>, QuantError> {
    let mut out = Vec::with_capacity(params.layers().len() * 2);
    for layer in params.layers() {
        out.push(quantize(&layer.weight, bits)?);
        out.push(quantize(&layer.bias, bits)?);
    }
    Ok(out)
}

fn dequantize_network(
    arch: &MlpArchitecture,
    tensors: &[QuantizedTensor],
) -> Result<ParameterSet, QuantError> {
    let shapes = arch.layer_shapes();
    if tensors.len() != shapes.len() * 2 {
        return Err(QuantError::Malformed(format!(
            "{} tensors for a {}-layer network",
            tensors.len(),
            shapes.len()
        )));
    }
    let layers = shapes
        .iter()
        .zip(tensors.chunks_exact(2))
        .map(|(&(i, o), wb)| DenseLayer::from_parts(i, o, dequantize(&wb[0]), dequantize(&wb[1])))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ParameterSet::from_layers(layers, arch.frequency_scale())?)
}

fn mode_byte(mode: ObjectMode) -> u8 {
    match mode {
        ObjectMode::Residual => 0,
        ObjectMode::Direct => 1,
    }
}

impl ContainerFile {
    pub fn from_encoded(encoded: &EncodedImage, policy: PackPolicy) -> Result<Self, QuantError> {
        encoded.validate()?;
        let b = &encoded.bbox;
        Ok(Self {
            width: to_u32(encoded.width, "width")?,
            height: to_u32(encoded.height, "height")?,
            bbox: [
                to_u32(b.x, "bbox x")?,
                to_u32(b.y, "bbox y")?,
                to_u32(b.w, "bbox w")?,
                to_u32(b.h, "bbox h")?,
            ],
            obj_mode: encoded.obj_mode,
            bg_arch: encoded.bg_arch,
            obj_arch: encoded.obj_arch,
            bg_tensors: quantize_network(&encoded.bg_params, policy.background)?,
            obj_tensors: quantize_network(&encoded.obj_params, policy.object)?,
        })
    }

    /// Dequantized parameters in an [`EncodedImage`].
    pub fn to_encoded(&self) -> Result<EncodedImage, QuantError> {
        let [x, y, w, h] = self.bbox.map(|v| v as usize);
        let encoded = EncodedImage {
            width: self.width as usize,
            height: self.height as usize,
            bbox: BoundingBox::new(x, y, w, h),
            bg_arch: self.bg_arch,
            bg_params: dequantize_network(&self.bg_arch, &self.bg_tensors)?,
            obj_arch: self.obj_arch,
            obj_params: dequantize_network(&self.obj_arch, &self.obj_tensors)?,
            obj_mode: self.obj_mode,
        };
        encoded.validate()?;
        Ok(encoded)
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, QuantError> {
        let mut out = Vec::with_capacity(self.byte_len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&self.width.to_le_bytes());
        out.extend_from_slice(&self.height.to_le_bytes());
        for v in self.bbox {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.push(mode_byte(self.obj_mode));
        for arch in [&self.bg_arch, &self.obj_arch] {
            out.extend_from_slice(&to_u32(arch.layer_count(), "layer count")?.to_le_bytes());
            out.extend_from_slice(&to_u32(arch.hidden_dim(), "hidden dim")?.to_le_bytes());
            out.extend_from_slice(&arch.frequency_scale().to_le_bytes());
        }
        for (arch, tensors) in [
            (&self.bg_arch, &self.bg_tensors),
            (&self.obj_arch, &self.obj_tensors),
        ] {
            check_tensor_shapes(arch, tensors)?;
            for t in tensors {
                out.push(t.bits().bits());
                out.extend_from_slice(&t.min().to_le_bytes());
                out.extend_from_slice(&t.max().to_le_bytes());
                match t.bits() {
                    BitWidth::Eight => out.extend(t.codes().iter().map(|&c| c as u8)),
                    BitWidth::Sixteen => {
                        for &c in t.codes() {
                            out.extend_from_slice(&c.to_le_bytes());
                        }
                    }
                }
            }
        }
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        Ok(out)
    }

    fn byte_len(&self) -> usize {
        let records = |ts: &[QuantizedTensor]| -> usize {
            ts.iter()
                .map(|t| RECORD_OVERHEAD_BYTES + t.len() * t.bits().code_bytes())
                .sum()
        };
        HEADER_BYTES + records(&self.bg_tensors) + records(&self.obj_tensors) + CRC_BYTES
    }

    /// Parses and verifies a container.
    ///
    /// Checks run in order: magic, version, record structure (truncation),
    /// trailing bytes, CRC, then field semantics.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, QuantError> {
        let prefix = &bytes[..bytes.len().min(4)];
        if prefix != &MAGIC[..prefix.len()] {
            let mut found = [0u8; 4];
            found[..prefix.len()].copy_from_slice(prefix);
            return Err(QuantError::BadMagic { found });
        }
        let mut r = Reader { buf: bytes, pos: 0 };
        r.take(4)?;
        let version = r.u16()?;
        if version != FORMAT_VERSION {
            return Err(QuantError::UnsupportedVersion(version));
        }
        let width = r.u32()?;
        let height = r.u32()?;
        let bbox = [r.u32()?, r.u32()?, r.u32()?, r.u32()?];
        let mode = r.u8()?;
        let bg = RawArch::read(&mut r)?;
        let obj = RawArch::read(&mut r)?;
        let bg_records = bg.read_records(&mut r)?;
        let obj_records = obj.read_records(&mut r)?;
        let body_len = r.pos;
        let stored_crc = r.u32()?;
        if r.pos != bytes.len() {
            return Err(QuantError::Malformed(format!(
                "{} trailing bytes after the checksum",
                bytes.len() - r.pos
            )));
        }
        let computed = crc32fast::hash(&bytes[..body_len]);
        if computed != stored_crc {
            return Err(QuantError::CrcMismatch {
                stored: stored_crc,
                computed,
            });
        }

        let obj_mode = match mode {
            0 => ObjectMode::Residual,
            1 => ObjectMode::Direct,
            other => {
                return Err(QuantError::Malformed(format!(
                    "unknown object mode {other}"
                )))
            }
        };
        let file = Self {
            width,
            height,
            bbox,
            obj_mode,
            bg_arch: bg.arch()?,
            obj_arch: obj.arch()?,
            bg_tensors: build_tensors(bg_records)?,
            obj_tensors: build_tensors(obj_records)?,
        };
        let [x, y, w, h] = bbox.map(|v| v as usize);
        if width == 0 || height == 0 {
            return Err(QuantError::Malformed(format!(
                "image size {width}x{height}"
            )));
        }
        BoundingBox::new(x, y, w, h)
            .validate(width as usize, height as usize)
            .map_err(|e| QuantError::Malformed(e.to_string()))?;
        Ok(file)
    }
}

fn check_tensor_shapes(
    arch: &MlpArchitecture,
    tensors: &[QuantizedTensor],
) -> Result<(), QuantError> {
    let expected: Vec<usize> = arch
        .layer_shapes()
        .into_iter()
        .flat_map(|(i, o)| [i * o, o])
        .collect();
    let actual: Vec<usize> = tensors.iter().map(QuantizedTensor::len).collect();
    if expected != actual {
        return Err(QuantError::Malformed(format!(
            "tensor lengths {actual:?} do not match {arch}"
        )));
    }
    Ok(())
}

fn build_tensors(records: Vec<RawRecord>) -> Result<Vec<QuantizedTensor>, QuantError> {
    records
        .into_iter()
        .map(|r| {
            QuantizedTensor::from_parts(r.bits, r.min, r.max, r.codes)
                .map_err(|e| QuantError::Malformed(e.to_string()))
        })
        .collect()
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], QuantError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or(QuantError::Truncated {
                offset: self.pos,
                needed: n,
            })?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn u8(&mut self) -> Result<u8, QuantError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, QuantError> {
        Ok(u16::from_le_bytes(
            self.take(2)?.try_into().expect("2 bytes"),
        ))
    }

    fn u32(&mut self) -> Result<u32, QuantError> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }

    fn f32(&mut self) -> Result<f32, QuantError> {
        Ok(f32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }
}

struct RawArch {
    layers: usize,
    hidden: usize,
    scale: f32,
}

struct RawRecord {
    bits: BitWidth,
    min: f32,
    max: f32,
    codes: Vec<u16>,
}

impl RawArch {
    fn read(r: &mut Reader<'_>) -> Result<Self, QuantError> {
        Ok(Self {
            layers: r.u32()? as usize,
            hidden: r.u32()? as usize,
            scale: r.f32()?,
        })
    }

    fn arch(&self) -> Result<MlpArchitecture, QuantError> {
        MlpArchitecture::with_frequency_scale(self.layers, self.hidden, self.scale)
            .map_err(|e| QuantError::Malformed(e.to_string()))
    }

    /// Walks the records this architecture implies without trusting the
    /// header enough to preallocate from it.
    fn read_records(&self, r: &mut Reader<'_>) -> Result<Vec<RawRecord>, QuantError> {
        if self.layers < 2 || self.hidden == 0 {
            return Err(QuantError::Malformed(format!(
                "architecture {}x{}",
                self.layers, self.hidden
            )));
        }
        // Every layer needs at least two record headers.
        let floor = self.layers.saturating_mul(2 * RECORD_OVERHEAD_BYTES);
        if floor > r.remaining() {
            return Err(QuantError::Truncated {
                offset: r.pos,
                needed: floor,
            });
        }
        let mut records = Vec::with_capacity(self.layers * 2);
        for layer in 0..self.layers {
            let inputs = if layer == 0 { INPUT_DIM } else { self.hidden };
            let outputs = if layer + 1 == self.layers {
                OUTPUT_DIM
            } else {
                self.hidden
            };
            let weights = inputs
                .checked_mul(outputs)
                .ok_or_else(|| QuantError::Malformed(format!("layer {layer} size overflows")))?;
            for count in [weights, outputs] {
                records.push(read_record(r, count)?);
            }
        }
        Ok(records)
    }
}

fn read_record(r: &mut Reader<'_>, count: usize) -> Result<RawRecord, QuantError> {
    let bits = BitWidth::from_bits(r.u8()?).map_err(|e| QuantError::Malformed(e.to_string()))?;
    let min = r.f32()?;
    let max = r.f32()?;
    let len = count
        .checked_mul(bits.code_bytes())
        .ok_or(QuantError::Truncated {
            offset: r.pos,
            needed: usize::MAX,
        })?;
    let raw = r.take(len)?;
    let codes = match bits {
        BitWidth::Eight => raw.iter().map(|&b| b as u16).collect(),
        BitWidth::Sixteen => raw
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect(),
    };
    Ok(RawRecord {
        bits,
        min,
        max,
        codes,
    })
}

/// Quantizes `encoded` under `policy` and serializes it.
pub fn pack(encoded: &EncodedImage, policy: PackPolicy) -> Result<Vec<u8>, QuantError> {
    ContainerFile::from_encoded(encoded, policy)?.to_bytes()
}

/// Parses, verifies and dequantizes a container.
pub fn unpack(bytes: &[u8]) -> Result<EncodedImage, QuantError> {
    ContainerFile::from_bytes(bytes)?.to_encoded()
}
