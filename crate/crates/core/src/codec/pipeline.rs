use std::fmt;
use std::str::FromStr;

use crate::inr::{
    fit, forward, CoordinateGrid, FitReport, MlpArchitecture, ParameterSet, TrainConfig,
};

use super::{
    apply_residual, compute_residual, crop, paste, BoundingBox, CodecError, Image, ObjectSizeTable,
};

/// What the object network is trained on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectMode {
    /// Residual against the clamped background reconstruction.
    Residual,
    /// Raw object pixels, ignoring the background.
    Direct,
}

impl fmt::Display for ObjectMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectMode::Residual => "residual",
            ObjectMode::Direct => "direct",
        })
    }
}

impl FromStr for ObjectMode {
    type Err = CodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "residual" => Ok(ObjectMode::Residual),
            "direct" => Ok(ObjectMode::Direct),
            _ => Err(CodecError::InvalidInput(format!(
                "unknown object mode {s:?} (expected residual or direct)"
            ))),
        }
    }
}

/// A background network plus an object network for one bounding box.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedImage {
    pub width: usize,
    pub height: usize,
    pub bbox: BoundingBox,
    pub bg_arch: MlpArchitecture,
    pub bg_params: ParameterSet,
    pub obj_arch: MlpArchitecture,
    pub obj_params: ParameterSet,
    pub obj_mode: ObjectMode,
}

impl EncodedImage {
    /// Checks that the box fits and both parameter sets match their architectures.
    pub fn validate(&self) -> Result<(), CodecError> {
        if self.width == 0 || self.height == 0 {
            return Err(CodecError::InvalidImage(format!(
                "dimensions must be positive, got {}x{}",
                self.width, self.height
            )));
        }
        self.bbox.validate(self.width, self.height)?;
        self.bg_params.ensure_matches(&self.bg_arch)?;
        self.obj_params.ensure_matches(&self.obj_arch)?;
        Ok(())
    }

    /// Parameters across both networks.
    pub fn parameter_count(&self) -> usize {
        self.bg_arch.parameter_count() + self.obj_arch.parameter_count()
    }
}

/// Fits the background network, then the object network on the box region.
///
/// `cfg_obj.seed` seeds the object network independently of the background.
#[allow(clippy::too_many_arguments)]
pub fn encode(
    image: &Image,
    bbox: &BoundingBox,
    bg_arch: &MlpArchitecture,
    table: &ObjectSizeTable,
    cfg_bg: &TrainConfig,
    cfg_obj: &TrainConfig,
    mode: ObjectMode,
) -> Result<(EncodedImage, FitReport, FitReport), CodecError> {
    bbox.validate(image.width(), image.height())?;
    let grid = CoordinateGrid::new(image.width(), image.height())?;
    let (bg_params, bg_report) = fit(bg_arch, &grid, image.data(), cfg_bg)?;
    let obj_arch = table.select(bbox);
    let (encoded, obj_report) = encode_object(image, bbox, bg_params, &obj_arch, cfg_obj, mode)?;
    Ok((encoded, bg_report, obj_report))
}

/// Second stage of [`encode`]: fits an object network of a given size against
/// an already-fitted background.
///
/// Lets callers compare object modes or sizes without refitting the background.
pub fn encode_object(
    image: &Image,
    bbox: &BoundingBox,
    bg_params: ParameterSet,
    obj_arch: &MlpArchitecture,
    cfg_obj: &TrainConfig,
    mode: ObjectMode,
) -> Result<(EncodedImage, FitReport), CodecError> {
    bbox.validate(image.width(), image.height())?;
    let bg_arch = bg_params.architecture()?;
    let raw_patch = crop(image, bbox)?;
    let obj_target = match mode {
        ObjectMode::Residual => {
            let grid = CoordinateGrid::new(image.width(), image.height())?;
            let background = background_image(&bg_params, &grid)?;
            let recon_patch = crop(&background, bbox)?;
            compute_residual(&raw_patch, &recon_patch)?
                .stored()
                .to_vec()
        }
        ObjectMode::Direct => raw_patch.into_data(),
    };
    let patch_grid = CoordinateGrid::new(bbox.w, bbox.h)?;
    let (obj_params, obj_report) = fit(obj_arch, &patch_grid, &obj_target, cfg_obj)?;

    let encoded = EncodedImage {
        width: image.width(),
        height: image.height(),
        bbox: *bbox,
        bg_arch,
        bg_params,
        obj_arch: *obj_arch,
        obj_params,
        obj_mode: mode,
    };
    Ok((encoded, obj_report))
}

fn background_image(params: &ParameterSet, grid: &CoordinateGrid) -> Result<Image, CodecError> {
    let out = forward(params, grid)?;
    Image::from_unclamped(grid.width(), grid.height(), out)
}

/// Clamped background-only reconstruction.
pub fn decode_background(encoded: &EncodedImage) -> Result<Image, CodecError> {
    encoded.validate()?;
    let grid = CoordinateGrid::new(encoded.width, encoded.height)?;
    background_image(&encoded.bg_params, &grid)
}

/// Background over the full frame, then the object network over the box.
///
/// Pixels outside the box depend only on the background parameters.
pub fn decode(encoded: &EncodedImage) -> Result<Image, CodecError> {
    let mut out = decode_background(encoded)?;
    let bbox = &encoded.bbox;
    let patch_grid = CoordinateGrid::new(bbox.w, bbox.h)?;
    let pred = forward(&encoded.obj_params, &patch_grid)?;
    let patch = match encoded.obj_mode {
        ObjectMode::Residual => apply_residual(&crop(&out, bbox)?, &pred)?,
        ObjectMode::Direct => Image::from_unclamped(bbox.w, bbox.h, pred)?,
    };
    paste(&mut out, &patch, bbox)?;
    Ok(out)
}
