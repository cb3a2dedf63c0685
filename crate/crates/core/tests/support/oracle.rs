//! Reference evaluation for gradient checks.
//!
//! A straightforward per-pixel f64 implementation of the sinusoidal MLP and its
//! MSE loss, written without sharing any code with the library's chunked
//! engine. Central finite differences over this loss are the gradient oracle.

#![allow(dead_code)]

use rinr_core::inr::ParameterSet;

/// Flat f64 copy of a parameter set: per layer `(in, out, weights, biases)`.
#[derive(Clone)]
pub struct RefNet {
    pub layers: Vec<(usize, usize, Vec<f64>, Vec<f64>)>,
    pub w0: f64,
}

impl RefNet {
    pub fn from_params(p: &ParameterSet) -> Self {
        Self {
            layers: p
                .layers()
                .iter()
                .map(|l| {
                    (
                        l.in_dim(),
                        l.out_dim(),
                        l.weight.iter().map(|&v| v as f64).collect(),
                        l.bias.iter().map(|&v| v as f64).collect(),
                    )
                })
                .collect(),
            w0: p.frequency_scale() as f64,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> Vec<f64> {
        let mut a = vec![x, y];
        let last = self.layers.len() - 1;
        for (i, (fin, fout, w, b)) in self.layers.iter().enumerate() {
            let mut z = vec![0.0; *fout];
            for j in 0..*fout {
                let mut s = b[j];
                for k in 0..*fin {
                    s += w[j * fin + k] * a[k];
                }
                z[j] = if i < last { (self.w0 * s).sin() } else { s };
            }
            a = z;
        }
        a
    }

    pub fn loss(&self, coords: &[[f32; 2]], target: &[f32]) -> f64 {
        let mut sum = 0.0;
        for (p, c) in coords.iter().enumerate() {
            let out = self.eval(c[0] as f64, c[1] as f64);
            for ch in 0..3 {
                let d = out[ch] - target[p * 3 + ch] as f64;
                sum += d * d;
            }
        }
        sum / target.len() as f64
    }

    /// Number of scalar parameters, same order as `ParameterSet::values`.
    pub fn len(&self) -> usize {
        self.layers.iter().map(|l| l.2.len() + l.3.len()).sum()
    }

    fn slot(&mut self, mut idx: usize) -> &mut f64 {
        for l in &mut self.layers {
            if idx < l.2.len() {
                return &mut l.2[idx];
            }
            idx -= l.2.len();
            if idx < l.3.len() {
                return &mut l.3[idx];
            }
            idx -= l.3.len();
        }
        panic!("parameter index out of range")
    }

    /// Central difference `(L(θ+h) - L(θ-h)) / 2h` for every parameter.
    pub fn finite_difference(&self, coords: &[[f32; 2]], target: &[f32], h: f64) -> Vec<f64> {
        let mut net = self.clone();
        (0..self.len())
            .map(|i| {
                let orig = *net.slot(i);
                *net.slot(i) = orig + h;
                let up = net.loss(coords, target);
                *net.slot(i) = orig - h;
                let down = net.loss(coords, target);
                *net.slot(i) = orig;
                (up - down) / (2.0 * h)
            })
            .collect()
    }
}
