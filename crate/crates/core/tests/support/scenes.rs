//! Synthetic scenes: smooth background plus a textured object patch.

#![allow(dead_code)]
// Phase ranges are pinned literals; the measured scenes depend on them.
#![allow(clippy::approx_constant)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rinr_core::codec::{BoundingBox, Image};

const WAVES: usize = 10;

pub struct Scene {
    pub image: Image,
    pub bbox: BoundingBox,
}

/// Builds scene `seed` at `size × size` with an `obj × obj` object.
///
/// Background: a slow product of sinusoids per channel. Object: a tinted
/// base colour with a gradient and a soft radial blob under a random plane-wave texture.
pub fn scene(seed: u64, size: usize, obj: usize) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bx = rng.gen_range(0..=size - obj);
    let by = rng.gen_range(0..=size - obj);
    let bbox = BoundingBox::new(bx, by, obj, obj);

    let bg: Vec<[f64; 4]> = (0..3)
        .map(|_| {
            [
                rng.gen_range(0.8..2.0),
                rng.gen_range(0.8..2.0),
                rng.gen_range(0.0..6.28),
                rng.gen_range(0.35..0.65),
            ]
        })
        .collect();
    let base: Vec<f64> = (0..3).map(|_| rng.gen_range(0.3..0.7)).collect();
    let grad: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.15..0.15)).collect();
    // Texture: a sum of random plane waves, one independent set per channel.
    let waves: Vec<Vec<[f64; 4]>> = (0..3)
        .map(|_| {
            (0..WAVES)
                .map(|_| {
                    let k = rng.gen_range(0.3..1.5);
                    let th = rng.gen_range(0.0..std::f64::consts::PI);
                    [
                        k * th.cos(),
                        k * th.sin(),
                        rng.gen_range(0.0..6.28),
                        rng.gen_range(0.02..0.05),
                    ]
                })
                .collect()
        })
        .collect();
    let blob = rng.gen_range(0.25..0.35);

    let mut data = Vec::with_capacity(size * size * 3);
    for y in 0..size {
        for x in 0..size {
            let u = x as f64 / (size - 1) as f64 * 2.0 - 1.0;
            let v = y as f64 / (size - 1) as f64 * 2.0 - 1.0;
            for c in 0..3 {
                let val = if bbox.contains(x, y) {
                    let (i, j) = ((x - bx) as f64, (y - by) as f64);
                    let t = (i + j) / (2.0 * (obj - 1) as f64) - 0.5;
                    let half = (obj - 1) as f64 / 2.0;
                    let r = ((i - half).powi(2) + (j - half).powi(2)).sqrt() / half;
                    base[c]
                        + grad[c] * t
                        + blob * (r * 1.5).cos()
                        + waves[c]
                            .iter()
                            .map(|[wx, wy, ph, a]| a * (wx * i + wy * j + ph).sin())
                            .sum::<f64>()
                } else {
                    let [fx, fy, ph, off] = bg[c];
                    off + 0.25 * (fx * u + ph).sin() * (fy * v + 0.5 * ph).cos()
                };
                data.push(val.clamp(0.0, 1.0) as f32);
            }
        }
    }
    Scene {
        image: Image::new(size, size, data).unwrap(),
        bbox,
    }
}
