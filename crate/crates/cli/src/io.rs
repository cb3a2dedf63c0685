//! Image files: binary PPM (P6) and PNG.

use std::fs;
use std::path::Path;

use rinr_core::codec::Image;

use crate::CliError;

fn runtime(path: &Path, detail: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("{}: {detail}", path.display()))
}

/// Loads a PPM (any maxval up to 65535) or PNG; the format is sniffed from the bytes.
pub fn read_image(path: &Path) -> Result<Image, CliError> {
    let bytes = fs::read(path).map_err(|e| runtime(path, e))?;
    if bytes.starts_with(b"P6") {
        parse_ppm(&bytes).map_err(|e| runtime(path, e))
    } else {
        let img = image::load_from_memory(&bytes).map_err(|e| runtime(path, e))?;
        let rgb = img.to_rgb32f();
        let (w, h) = rgb.dimensions();
        Image::new(w as usize, h as usize, rgb.into_raw()).map_err(|e| runtime(path, e))
    }
}

/// Writes 8-bit RGB: PNG for a `.png` extension, PPM otherwise.
pub fn write_image(path: &Path, img: &Image) -> Result<(), CliError> {
    let bytes = to_rgb8(img);
    let is_png = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    if is_png {
        image::save_buffer(
            path,
            &bytes,
            img.width() as u32,
            img.height() as u32,
            image::ExtendedColorType::Rgb8,
        )
        .map_err(|e| runtime(path, e))
    } else {
        fs::write(path, encode_ppm(img.width(), img.height(), &bytes)).map_err(|e| runtime(path, e))
    }
}

/// Channel values to bytes, `round(v · 255)`.
pub fn to_rgb8(img: &Image) -> Vec<u8> {
    img.data()
        .iter()
        .map(|&v| (v as f64 * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect()
}

pub fn encode_ppm(width: usize, height: usize, rgb: &[u8]) -> Vec<u8> {
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(rgb);
    out
}

/// Parses binary PPM. Samples are scaled by `1 / maxval`; maxval above 255
/// means two big-endian bytes per sample.
pub fn parse_ppm(bytes: &[u8]) -> Result<Image, String> {
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        // Whitespace and `#` comments may separate header tokens.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err("truncated PPM header".to_owned()),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or("malformed PPM header")?;
    }
    // Exactly one whitespace byte before the raster.
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err("malformed PPM header".to_owned());
    }
    pos += 1;
    let [width, height, maxval] = fields;
    if maxval == 0 || maxval > 65535 {
        return Err(format!("PPM maxval {maxval} out of range"));
    }
    let sample_bytes = if maxval > 255 { 2 } else { 1 };
    let needed = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3 * sample_bytes))
        .ok_or("PPM dimensions overflow")?;
    let raster = bytes
        .get(pos..pos + needed)
        .ok_or_else(|| format!("PPM raster truncated: need {needed} bytes"))?;
    let scale = maxval as f64;
    let data = raster
        .chunks_exact(sample_bytes)
        .map(|c| {
            let s = if sample_bytes == 2 {
                u16::from_be_bytes([c[0], c[1]]) as usize
            } else {
                c[0] as usize
            };
            (s.min(maxval) as f64 / scale) as f32
        })
        .collect();
    Image::new(width, height, data).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_round_trip() {
        let img = Image::new(2, 1, vec![0.0, 0.5, 1.0, 0.2, 0.4, 0.6]).unwrap();
        let bytes = encode_ppm(2, 1, &to_rgb8(&img));
        let back = parse_ppm(&bytes).unwrap();
        assert_eq!(to_rgb8(&back), to_rgb8(&img));
    }

    #[test]
    fn header_comments_and_maxval() {
        let mut bytes = b"P6 # made by hand\n1 1\n# max\n10\n".to_vec();
        bytes.extend_from_slice(&[0, 5, 10]);
        let img = parse_ppm(&bytes).unwrap();
        assert_eq!(img.data(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn sixteen_bit_samples() {
        let mut bytes = b"P6\n1 1\n65535\n".to_vec();
        bytes.extend_from_slice(&[0xff, 0xff, 0x00, 0x00, 0x80, 0x00]);
        let img = parse_ppm(&bytes).unwrap();
        assert_eq!(img.data()[0], 1.0);
        assert_eq!(img.data()[1], 0.0);
    }

    #[test]
    fn rejects_broken_files() {
        assert!(parse_ppm(b"P6\n2 2\n255\n\x00\x00").is_err());
        assert!(parse_ppm(b"P6\n2").is_err());
        assert!(parse_ppm(b"P6\n1 1\n0\n\x00\x00\x00").is_err());
    }
}
