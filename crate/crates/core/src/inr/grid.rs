use super::InrError;

/// Row-major pixel coordinates normalized to `[-1, 1]` per axis.
///
/// Column `c` of a `W`-wide grid maps to `2c/(W-1) - 1`, so corner pixels land
/// exactly on `±1`. A single-pixel axis maps to `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateGrid {
    width: usize,
    height: usize,
    coords: Vec<[f32; 2]>,
}

fn normalize(index: usize, extent: usize) -> f32 {
    if extent == 1 {
        0.0
    } else {
        (2.0 * index as f64 / (extent - 1) as f64 - 1.0) as f32
    }
}

impl CoordinateGrid {
    pub fn new(width: usize, height: usize) -> Result<Self, InrError> {
        if width == 0 || height == 0 {
            return Err(InrError::EmptyGrid);
        }
        let mut coords = Vec::with_capacity(width * height);
        for row in 0..height {
            let y = normalize(row, height);
            for col in 0..width {
                coords.push([normalize(col, width), y]);
            }
        }
        Ok(Self {
            width,
            height,
            coords,
        })
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
    pub fn coords(&self) -> &[[f32; 2]] {
        &self.coords
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}
