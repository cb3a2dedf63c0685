use super::{CodecError, Image};

/// Object-region residual mapped into `[0, 1]`.
///
/// The signed residual `r = raw - recon` lies in `[-1, 1]`; it is stored as
/// `(r + 1) / 2` so the object network fits a target in the same range as raw
/// pixels. A zero residual maps to the center value `0.5`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualPatch {
    width: usize,
    height: usize,
    stored: Vec<f32>,
}

impl ResidualPatch {
    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    /// Stored-space values, interleaved RGB.
    #[inline]
    pub fn stored(&self) -> &[f32] {
        &self.stored
    }

    /// Signed residuals `2·stored - 1`.
    pub fn residuals(&self) -> Vec<f32> {
        self.stored.iter().map(|&s| unmap(s)).collect()
    }
}

#[inline]
fn unmap(stored: f32) -> f32 {
    2.0 * stored - 1.0
}

fn check_dims(a: &Image, b: &Image) -> Result<(), CodecError> {
    if a.same_dims(b) {
        Ok(())
    } else {
        Err(CodecError::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )))
    }
}

/// Maps `raw - recon` into stored space, `(raw - recon + 1) / 2`.
pub fn compute_residual(raw: &Image, recon: &Image) -> Result<ResidualPatch, CodecError> {
    check_dims(raw, recon)?;
    let stored = raw
        .data()
        .iter()
        .zip(recon.data())
        .map(|(&r, &b)| ((r as f64 - b as f64 + 1.0) * 0.5) as f32)
        .collect();
    Ok(ResidualPatch {
        width: raw.width(),
        height: raw.height(),
        stored,
    })
}

/// Adds a stored-space residual prediction back onto `recon`, clamped to `[0, 1]`.
///
/// `residual_pred` is the object network's raw output, so it may leave `[0, 1]`.
pub fn apply_residual(recon: &Image, residual_pred: &[f32]) -> Result<Image, CodecError> {
    if residual_pred.len() != recon.data().len() {
        return Err(CodecError::DimensionMismatch(format!(
            "{} residual values for a {}x{} patch",
            residual_pred.len(),
            recon.width(),
            recon.height()
        )));
    }
    let data = recon
        .data()
        .iter()
        .zip(residual_pred)
        .map(|(&b, &s)| (b as f64 + (2.0 * s as f64 - 1.0)) as f32)
        .collect();
    Image::from_unclamped(recon.width(), recon.height(), data)
}
