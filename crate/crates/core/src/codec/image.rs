use super::CodecError;

/// Row-major RGB image with channels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl Image {
    /// Wraps interleaved RGB values; every channel must lie in `[0, 1]`.
    pub fn new(width: usize, height: usize, data: Vec<f32>) -> Result<Self, CodecError> {
        if width == 0 || height == 0 {
            return Err(CodecError::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height * 3 {
            return Err(CodecError::InvalidImage(format!(
                "{width}x{height} image needs {} values, got {}",
                width * height * 3,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(CodecError::InvalidImage(format!(
                "channel value {bad} outside [0, 1]"
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Clamps raw network output into a valid image.
    pub fn from_unclamped(
        width: usize,
        height: usize,
        mut data: Vec<f32>,
    ) -> Result<Self, CodecError> {
        for v in &mut data {
            // NaN clamps to NaN; map it to 0 so the result stays a valid image.
            *v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        }
        Self::new(width, height, data)
    }

    pub fn filled(width: usize, height: usize, rgb: [f32; 3]) -> Result<Self, CodecError> {
        let data = (0..width * height).flat_map(|_| rgb).collect();
        Self::new(width, height, data)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [f32; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn same_dims(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Axis-aligned object region: top-left `(x, y)`, size `w × h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundingBox {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl BoundingBox {
    pub fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Self { x, y, w, h }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self::new(0, 0, width, height)
    }

    #[inline]
    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn validate(&self, width: usize, height: usize) -> Result<(), CodecError> {
        let fits = self.w >= 1
            && self.h >= 1
            && self.x.checked_add(self.w).is_some_and(|r| r <= width)
            && self.y.checked_add(self.h).is_some_and(|b| b <= height);
        if fits {
            Ok(())
        } else {
            Err(CodecError::InvalidBoundingBox {
                bbox: *self,
                width,
                height,
            })
        }
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.x + self.w && y >= self.y && y < self.y + self.h
    }
}

/// Copies the `bbox` region out of `image`.
pub fn crop(image: &Image, bbox: &BoundingBox) -> Result<Image, CodecError> {
    bbox.validate(image.width, image.height)?;
    let mut data = Vec::with_capacity(bbox.area() * 3);
    for row in bbox.y..bbox.y + bbox.h {
        let start = (row * image.width + bbox.x) * 3;
        data.extend_from_slice(&image.data[start..start + bbox.w * 3]);
    }
    Image::new(bbox.w, bbox.h, data)
}

/// Writes `patch` into `image` at the top-left corner of `bbox`.
pub fn paste(image: &mut Image, patch: &Image, bbox: &BoundingBox) -> Result<(), CodecError> {
    bbox.validate(image.width, image.height)?;
    if patch.width != bbox.w || patch.height != bbox.h {
        return Err(CodecError::DimensionMismatch(format!(
            "patch {}x{} does not fit box {}x{}",
            patch.width, patch.height, bbox.w, bbox.h
        )));
    }
    for row in 0..bbox.h {
        let dst = ((bbox.y + row) * image.width + bbox.x) * 3;
        let src = row * bbox.w * 3;
        image.data[dst..dst + bbox.w * 3].copy_from_slice(&patch.data[src..src + bbox.w * 3]);
    }
    Ok(())
}
