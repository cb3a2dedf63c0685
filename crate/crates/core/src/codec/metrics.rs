//! Reconstruction quality and information metrics.

use crate::inr::psnr_from_mse;

use super::{BoundingBox, CodecError, Image};

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

/// Squared error summed over the pixels selected by `keep`, and how many channel
/// values were summed.
fn masked_sse(a: &Image, b: &Image, keep: impl Fn(usize, usize) -> bool) -> (f64, usize) {
    let mut sse = 0.0;
    let mut count = 0;
    for y in 0..a.height() {
        for x in 0..a.width() {
            if !keep(x, y) {
                continue;
            }
            let (pa, pb) = (a.pixel(x, y), b.pixel(x, y));
            for c in 0..3 {
                let d = pa[c] as f64 - pb[c] as f64;
                sse += d * d;
            }
            count += 3;
        }
    }
    (sse, count)
}

/// Mean squared error over the whole image or only inside `region`.
pub fn mse(a: &Image, b: &Image, region: Option<&BoundingBox>) -> Result<f64, CodecError> {
    check_dims(a, b)?;
    if let Some(r) = region {
        r.validate(a.width(), a.height())?;
    }
    let (sse, n) = masked_sse(a, b, |x, y| region.is_none_or(|r| r.contains(x, y)));
    Ok(sse / n as f64)
}

/// Peak signal-to-noise ratio in dB with unit peak, `10·log10(1/MSE)`.
///
/// Identical inputs give `f64::INFINITY`.
pub fn psnr(a: &Image, b: &Image, region: Option<&BoundingBox>) -> Result<f64, CodecError> {
    mse(a, b, region).map(psnr_from_mse)
}

/// PSNR over the pixels outside `bbox`; `None` when the box covers the image.
pub fn psnr_outside(a: &Image, b: &Image, bbox: &BoundingBox) -> Result<Option<f64>, CodecError> {
    check_dims(a, b)?;
    bbox.validate(a.width(), a.height())?;
    let (sse, n) = masked_sse(a, b, |x, y| !bbox.contains(x, y));
    Ok((n > 0).then(|| psnr_from_mse(sse / n as f64)))
}

/// Equal-width histogram over `[0, 1]`; `1.0` falls in the last bin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn from_values(values: &[f32], bin_count: usize) -> Result<Self, CodecError> {
        if bin_count == 0 {
            return Err(CodecError::InvalidInput(
                "bin count must be at least 1".to_owned(),
            ));
        }
        if values.is_empty() {
            return Err(CodecError::InvalidInput("no values to bin".to_owned()));
        }
        let mut counts = vec![0u64; bin_count];
        for &v in values {
            if !(0.0..=1.0).contains(&v) {
                return Err(CodecError::InvalidInput(format!(
                    "value {v} outside [0, 1]"
                )));
            }
            let bin = ((v as f64 * bin_count as f64) as usize).min(bin_count - 1);
            counts[bin] += 1;
        }
        Ok(Self {
            counts,
            total: values.len() as u64,
        })
    }

    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// `P(x_i) = count_i / total`.
    pub fn probability(&self, bin: usize) -> f64 {
        self.counts[bin] as f64 / self.total as f64
    }

    /// Shannon entropy in bits over the non-empty bins.
    pub fn entropy_bits(&self) -> f64 {
        let h: f64 = self
            .counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / self.total as f64;
                -p * p.log2()
            })
            .sum();
        // A single occupied bin yields -0.0.
        h.max(0.0)
    }
}

/// Shannon entropy (bits) of `values` binned into `bin_count` bins over `[0, 1]`.
pub fn entropy(values: &[f32], bin_count: usize) -> Result<f64, CodecError> {
    Histogram::from_values(values, bin_count).map(|h| h.entropy_bits())
}

/// Compressed size over reference size.
pub fn compression_ratio(encoded_bytes: u64, reference_bytes: u64) -> Result<f64, CodecError> {
    if reference_bytes == 0 {
        return Err(CodecError::InvalidInput(
            "reference size is zero".to_owned(),
        ));
    }
    Ok(encoded_bytes as f64 / reference_bytes as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn shifted(img: &Image, d: f32) -> Image {
        Image::new(
            img.width(),
            img.height(),
            img.data().iter().map(|v| v + d).collect(),
        )
        .unwrap()
    }

    #[test]
    fn identical_images_are_infinite() {
        let a = Image::filled(4, 4, [0.3; 3]).unwrap();
        assert_eq!(psnr(&a, &a, None).unwrap(), f64::INFINITY);
    }

    #[test]
    fn uniform_offsets() {
        let a = Image::filled(4, 4, [0.25; 3]).unwrap();
        let p = psnr(&a, &shifted(&a, 0.1), None).unwrap();
        assert!((p - 20.0).abs() < 1e-5, "{p}");
        let p = psnr(&a, &shifted(&a, 0.01), None).unwrap();
        assert!((p - 40.0).abs() < 1e-4, "{p}");
    }

    #[test]
    fn region_restricts_the_average() {
        let a = Image::filled(4, 4, [0.5; 3]).unwrap();
        let mut data = a.data().to_vec();
        // Perturb only pixel (3, 3).
        for c in 0..3 {
            data[(3 * 4 + 3) * 3 + c] = 0.6;
        }
        let b = Image::new(4, 4, data).unwrap();
        let inside = BoundingBox::new(3, 3, 1, 1);
        assert!((psnr(&a, &b, Some(&inside)).unwrap() - 20.0).abs() < 1e-5);
        assert_eq!(
            psnr(&a, &b, Some(&BoundingBox::new(0, 0, 2, 2))).unwrap(),
            f64::INFINITY
        );
        assert_eq!(psnr_outside(&a, &b, &inside).unwrap(), Some(f64::INFINITY));
        assert_eq!(
            psnr_outside(&a, &b, &BoundingBox::full(4, 4)).unwrap(),
            None
        );
    }

    #[test]
    fn psnr_rejects_mismatch() {
        let a = Image::filled(4, 4, [0.5; 3]).unwrap();
        let b = Image::filled(4, 3, [0.5; 3]).unwrap();
        assert!(psnr(&a, &b, None).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[0.3; 50], 256).unwrap(), 0.0);
        let uniform: Vec<f32> = (0..256).map(|i| (i as f32 + 0.5) / 256.0).collect();
        assert!((entropy(&uniform, 256).unwrap() - 8.0).abs() < 1e-12);
        let halves = [0.1f32, 0.2, 0.7, 0.9];
        assert!((entropy(&halves, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!(entropy(&[], 4).is_err());
        assert!(entropy(&[0.5], 0).is_err());
        assert!(entropy(&[1.5], 4).is_err());
    }

    #[test]
    fn top_edge_lands_in_last_bin() {
        let h = Histogram::from_values(&[0.0, 1.0, 1.0], 4).unwrap();
        assert_eq!(h.counts(), &[1, 0, 0, 2]);
        assert_eq!(h.total(), 3);
        assert!((h.probability(3) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn compression_ratio_examples() {
        assert!((compression_ratio(10_000, 100_000).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(compression_ratio(5, 5).unwrap(), 1.0);
        assert!(compression_ratio(5, 0).is_err());
    }

    proptest! {
        #[test]
        fn psnr_symmetric_and_monotone(
            base in prop::collection::vec(0.2f32..=0.8, 27),
            amps in prop::collection::vec(0.001f32..0.2, 2),
        ) {
            let a = Image::new(3, 3, base).unwrap();
            let (lo, hi) = if amps[0] <= amps[1] { (amps[0], amps[1]) } else { (amps[1], amps[0]) };
            prop_assume!(hi - lo > 1e-4);
            // Deterministic ±amp pattern.
            let noisy = |amp: f32| {
                let d = a.data().iter().enumerate()
                    .map(|(i, v)| (v + if i % 2 == 0 { amp } else { -amp }).clamp(0.0, 1.0))
                    .collect();
                Image::new(3, 3, d).unwrap()
            };
            let (b_lo, b_hi) = (noisy(lo), noisy(hi));
            prop_assert_eq!(psnr(&a, &b_lo, None).unwrap(), psnr(&b_lo, &a, None).unwrap());
            prop_assert!(psnr(&a, &b_lo, None).unwrap() > psnr(&a, &b_hi, None).unwrap());
        }
    }
}
