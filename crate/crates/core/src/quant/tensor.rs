use super::QuantError;

/// Supported code widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BitWidth {
    Eight,
    Sixteen,
}

impl BitWidth {
    pub fn from_bits(bits: u8) -> Result<Self, QuantError> {
        match bits {
            8 => Ok(BitWidth::Eight),
            16 => Ok(BitWidth::Sixteen),
            other => Err(QuantError::UnsupportedBitWidth(other)),
        }
    }

    #[inline]
    pub fn bits(self) -> u8 {
        match self {
            BitWidth::Eight => 8,
            BitWidth::Sixteen => 16,
        }
    }

    /// Bytes per stored code.
    #[inline]
    pub fn code_bytes(self) -> usize {
        self.bits() as usize / 8
    }

    /// `2^bits - 1`.
    #[inline]
    pub fn max_code(self) -> u16 {
        match self {
            BitWidth::Eight => u8::MAX as u16,
            BitWidth::Sixteen => u16::MAX,
        }
    }
}

/// Per-tensor min-max affine quantization of one weight or bias tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedTensor {
    bits: BitWidth,
    // Stored as bit patterns so equality is exact and NaN-free by construction.
    min_bits: u32,
    max_bits: u32,
    codes: Vec<u16>,
}

impl QuantizedTensor {
    /// Assembles a tensor from stored fields, checking the range and every code.
    pub fn from_parts(
        bits: BitWidth,
        min: f32,
        max: f32,
        codes: Vec<u16>,
    ) -> Result<Self, QuantError> {
        if !(min.is_finite() && max.is_finite() && min <= max) {
            return Err(QuantError::InvalidRange { min, max });
        }
        if codes.is_empty() {
            return Err(QuantError::EmptyTensor);
        }
        let max_code = bits.max_code();
        if let Some(&code) = codes.iter().find(|&&c| c > max_code) {
            return Err(QuantError::CodeOutOfRange {
                code,
                bits: bits.bits(),
            });
        }
        if min == max && codes.iter().any(|&c| c != 0) {
            return Err(QuantError::InvalidRange { min, max });
        }
        Ok(Self {
            bits,
            min_bits: min.to_bits(),
            max_bits: max.to_bits(),
            codes,
        })
    }

    #[inline]
    pub fn bits(&self) -> BitWidth {
        self.bits
    }

    #[inline]
    pub fn min(&self) -> f32 {
        f32::from_bits(self.min_bits)
    }

    #[inline]
    pub fn max(&self) -> f32 {
        f32::from_bits(self.max_bits)
    }

    #[inline]
    pub fn codes(&self) -> &[u16] {
        &self.codes
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Quantization step `(max - min) / (2^bits - 1)`.
    pub fn step(&self) -> f64 {
        (self.max() as f64 - self.min() as f64) / self.bits.max_code() as f64
    }
}

/// `q = round((w - min) / (max - min) · (2^bits - 1))`, rounding half away from zero.
///
/// A constant tensor stores `min == max` and all-zero codes.
pub fn quantize(values: &[f32], bits: BitWidth) -> Result<QuantizedTensor, QuantError> {
    if values.is_empty() {
        return Err(QuantError::EmptyTensor);
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(QuantError::NonFinite { index });
    }
    let min = values.iter().copied().fold(f32::INFINITY, f32::min);
    let max = values.iter().copied().fold(f32::NEG_INFINITY, f32::max);
    let codes = if min == max {
        vec![0; values.len()]
    } else {
        let (lo, span) = (min as f64, max as f64 - min as f64);
        let scale = bits.max_code() as f64;
        values
            .iter()
            // f64::round is half-away-from-zero; the operand is non-negative.
            .map(|&w| ((w as f64 - lo) / span * scale).round() as u16)
            .collect()
    };
    QuantizedTensor::from_parts(bits, min, max, codes)
}

/// `w' = min + code / (2^bits - 1) · (max - min)`.
pub fn dequantize(q: &QuantizedTensor) -> Vec<f32> {
    let (lo, hi) = (q.min() as f64, q.max() as f64);
    if lo == hi {
        return vec![q.min(); q.len()];
    }
    let scale = q.bits.max_code() as f64;
    q.codes
        .iter()
        .map(|&c| (lo + c as f64 / scale * (hi - lo)) as f32)
        .collect()
}
