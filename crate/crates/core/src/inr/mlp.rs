//! Forward evaluation and exact reverse-mode gradients of a sinusoidal MLP.
//!
//! Pixels are processed in fixed chunks of [`PIXEL_CHUNK`] coordinates. Inside a
//! chunk activations are stored feature-major so the inner loops run across
//! pixels. Chunks may be evaluated on any thread; per-chunk partial sums are
//! always combined in chunk order, which makes every result independent of how
//! the work was scheduled.

use rayon::prelude::*;

use super::{CoordinateGrid, DenseLayer, InrError, ParameterSet, OUTPUT_DIM};

/// Number of pixels evaluated together.
pub const PIXEL_CHUNK: usize = 64;

struct Layer64 {
    in_dim: usize,
    out_dim: usize,
    weight: Vec<f64>,
    bias: Vec<f64>,
}

impl From<&DenseLayer> for Layer64 {
    fn from(l: &DenseLayer) -> Self {
        Self {
            in_dim: l.in_dim(),
            out_dim: l.out_dim(),
            weight: l.weight.iter().map(|&w| w as f64).collect(),
            bias: l.bias.iter().map(|&b| b as f64).collect(),
        }
    }
}

/// Parameters widened to f64 once per call.
struct Network {
    layers: Vec<Layer64>,
    w0: f64,
}

impl Network {
    fn new(params: &ParameterSet) -> Self {
        Self {
            layers: params.layers().iter().map(Layer64::from).collect(),
            w0: params.frequency_scale() as f64,
        }
    }

    fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weight.len() + l.bias.len())
            .sum()
    }
}

/// `out[j][p] = b[j] + Σ_k W[j][k] · input[k][p]`, feature-major with `n` pixels.
fn affine(layer: &Layer64, input: &[f64], n: usize, out: &mut [f64]) {
    for j in 0..layer.out_dim {
        let row = &layer.weight[j * layer.in_dim..(j + 1) * layer.in_dim];
        let o = &mut out[j * n..(j + 1) * n];
        o.fill(layer.bias[j]);
        for (k, &w) in row.iter().enumerate() {
            let a = &input[k * n..(k + 1) * n];
            for (o, &a) in o.iter_mut().zip(a) {
                *o += w * a;
            }
        }
    }
}

const LANES: usize = 8;

/// Sum of `a[p]·b[p]` using eight fixed partial sums combined in a fixed order.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; LANES];
    let split = a.len() - a.len() % LANES;
    for (ca, cb) in a[..split]
        .chunks_exact(LANES)
        .zip(b[..split].chunks_exact(LANES))
    {
        for l in 0..LANES {
            acc[l] += ca[l] * cb[l];
        }
    }
    let mut tail = 0.0;
    for (x, y) in a[split..].iter().zip(&b[split..]) {
        tail += x * y;
    }
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail
}

#[inline]
fn sum(a: &[f64]) -> f64 {
    let mut acc = [0.0f64; LANES];
    let split = a.len() - a.len() % LANES;
    for c in a[..split].chunks_exact(LANES) {
        for l in 0..LANES {
            acc[l] += c[l];
        }
    }
    let tail: f64 = a[split..].iter().sum();
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail
}

/// Saved state of one chunk's forward pass.
struct Trace {
    n: usize,
    /// Input to each layer, feature-major. `inputs[0]` is the coordinates.
    inputs: Vec<Vec<f64>>,
    /// `cos(w0·z)` for each hidden layer.
    slopes: Vec<Vec<f64>>,
    output: Vec<f64>,
}

fn forward_chunk(net: &Network, coords: &[[f32; 2]], keep_trace: bool) -> Result<Trace, InrError> {
    let n = coords.len();
    let mut x = vec![0.0; 2 * n];
    for (p, c) in coords.iter().enumerate() {
        x[p] = c[0] as f64;
        x[n + p] = c[1] as f64;
    }
    let last = net.layers.len() - 1;
    let mut inputs = Vec::with_capacity(net.layers.len());
    let mut slopes = Vec::with_capacity(last);
    for (i, layer) in net.layers.iter().enumerate() {
        let mut z = vec![0.0; layer.out_dim * n];
        affine(layer, &x, n, &mut z);
        if i < last {
            let mut slope = if keep_trace {
                vec![0.0; z.len()]
            } else {
                Vec::new()
            };
            for (idx, v) in z.iter_mut().enumerate() {
                let (s, c) = (net.w0 * *v).sin_cos();
                *v = s;
                if keep_trace {
                    slope[idx] = c;
                }
            }
            if keep_trace {
                slopes.push(slope);
            }
        }
        if !z.iter().all(|v| v.is_finite()) {
            return Err(InrError::NonFinite { layer: i });
        }
        let prev = std::mem::replace(&mut x, z);
        if keep_trace {
            inputs.push(prev);
        }
    }
    Ok(Trace {
        n,
        inputs,
        slopes,
        output: x,
    })
}

fn check_inputs(params: &ParameterSet, coords: &[[f32; 2]]) -> Result<(), InrError> {
    if coords.is_empty() {
        return Err(InrError::EmptyGrid);
    }
    params.architecture().map(|_| ())
}

/// Evaluates the network at arbitrary coordinates.
///
/// Returns interleaved RGB, `3 · coords.len()` values, unclamped.
pub fn forward_points(params: &ParameterSet, coords: &[[f32; 2]]) -> Result<Vec<f32>, InrError> {
    check_inputs(params, coords)?;
    let net = Network::new(params);
    let chunks: Vec<Vec<f32>> = coords
        .par_chunks(PIXEL_CHUNK)
        .map(|chunk| {
            let trace = forward_chunk(&net, chunk, false)?;
            let n = trace.n;
            let mut rgb = vec![0.0f32; OUTPUT_DIM * n];
            for p in 0..n {
                for c in 0..OUTPUT_DIM {
                    rgb[p * OUTPUT_DIM + c] = trace.output[c * n + p] as f32;
                }
            }
            Ok(rgb)
        })
        .collect::<Result<_, InrError>>()?;
    Ok(chunks.concat())
}

/// Evaluates the network over every pixel of `grid`, row-major interleaved RGB.
pub fn forward(params: &ParameterSet, grid: &CoordinateGrid) -> Result<Vec<f32>, InrError> {
    forward_points(params, grid.coords())
}

/// Mean of squared differences over every entry, accumulated in f64.
pub fn mse_loss(pred: &[f32], target: &[f32]) -> Result<f64, InrError> {
    if pred.len() != target.len() {
        return Err(InrError::ShapeMismatch(format!(
            "prediction has {} values, target has {}",
            pred.len(),
            target.len()
        )));
    }
    if pred.is_empty() {
        return Err(InrError::EmptyGrid);
    }
    let sum: f64 = pred
        .iter()
        .zip(target)
        .map(|(&p, &t)| {
            let d = p as f64 - t as f64;
            d * d
        })
        .sum();
    Ok(sum / pred.len() as f64)
}

/// Squared-error sum and gradient contributions of one chunk.
fn backward_chunk(
    net: &Network,
    coords: &[[f32; 2]],
    target: &[f32],
    scale: f64,
) -> Result<(f64, Vec<f64>), InrError> {
    let trace = forward_chunk(net, coords, true)?;
    let n = trace.n;

    // d(loss)/d(output) in feature-major layout.
    let mut sq = 0.0;
    let mut delta = vec![0.0; OUTPUT_DIM * n];
    for p in 0..n {
        for c in 0..OUTPUT_DIM {
            let d = trace.output[c * n + p] - target[p * OUTPUT_DIM + c] as f64;
            sq += d * d;
            delta[c * n + p] = scale * d;
        }
    }

    let mut grad = vec![0.0; net.param_count()];
    let mut offsets = Vec::with_capacity(net.layers.len());
    let mut off = 0;
    for l in &net.layers {
        offsets.push(off);
        off += l.weight.len() + l.bias.len();
    }

    for (i, layer) in net.layers.iter().enumerate().rev() {
        let input = &trace.inputs[i];
        let base = offsets[i];
        let (gw, gb) = grad[base..base + layer.weight.len() + layer.bias.len()]
            .split_at_mut(layer.weight.len());
        for j in 0..layer.out_dim {
            let d = &delta[j * n..(j + 1) * n];
            gb[j] = sum(d);
            for k in 0..layer.in_dim {
                gw[j * layer.in_dim + k] = dot(d, &input[k * n..(k + 1) * n]);
            }
        }
        if i == 0 {
            break;
        }
        // Propagate through W, then through sin(w0·z) of the layer below.
        let mut below = vec![0.0; layer.in_dim * n];
        for j in 0..layer.out_dim {
            let d = &delta[j * n..(j + 1) * n];
            for k in 0..layer.in_dim {
                let w = layer.weight[j * layer.in_dim + k];
                let b = &mut below[k * n..(k + 1) * n];
                for (b, &d) in b.iter_mut().zip(d) {
                    *b += w * d;
                }
            }
        }
        let slope = &trace.slopes[i - 1];
        for (b, &s) in below.iter_mut().zip(slope) {
            *b *= net.w0 * s;
        }
        if !below.iter().all(|v| v.is_finite()) {
            return Err(InrError::NonFinite { layer: i - 1 });
        }
        delta = below;
    }
    Ok((sq, grad))
}

/// Mean-squared-error loss of `params` on `(grid, target)` and its exact gradient.
///
/// The loss is evaluated on the full-precision network output (before rounding to
/// f32). Reductions run in a fixed order, so results are bit-reproducible.
pub fn loss_and_gradient(
    params: &ParameterSet,
    coords: &[[f32; 2]],
    target: &[f32],
) -> Result<(f64, ParameterSet), InrError> {
    check_inputs(params, coords)?;
    if target.len() != coords.len() * OUTPUT_DIM {
        return Err(InrError::ShapeMismatch(format!(
            "target has {} values for {} pixels",
            target.len(),
            coords.len()
        )));
    }
    let net = Network::new(params);
    let count = target.len() as f64;
    let scale = 2.0 / count;
    let parts: Vec<(f64, Vec<f64>)> = coords
        .par_chunks(PIXEL_CHUNK)
        .zip(target.par_chunks(PIXEL_CHUNK * OUTPUT_DIM))
        .map(|(c, t)| backward_chunk(&net, c, t, scale))
        .collect::<Result<_, _>>()?;

    let mut sq = 0.0;
    let mut total = vec![0.0f64; net.param_count()];
    for (s, g) in &parts {
        sq += s;
        for (t, v) in total.iter_mut().zip(g) {
            *t += v;
        }
    }

    let mut grads = params.clone();
    for (slot, g) in grads.values_mut().zip(&total) {
        *slot = *g as f32;
    }
    Ok((sq / count, grads))
}

/// Gradient of the mean-squared-error loss with respect to every parameter.
pub fn backward(
    params: &ParameterSet,
    grid: &CoordinateGrid,
    target: &[f32],
) -> Result<ParameterSet, InrError> {
    loss_and_gradient(params, grid.coords(), target).map(|(_, g)| g)
}
