use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{InrError, MlpArchitecture};

/// One affine layer. `weight` is row-major `[out × in]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    in_dim: usize,
    out_dim: usize,
    pub weight: Vec<f32>,
    pub bias: Vec<f32>,
}

impl DenseLayer {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Self {
            in_dim,
            out_dim,
            weight: vec![0.0; in_dim * out_dim],
            bias: vec![0.0; out_dim],
        }
    }

    pub fn from_parts(
        in_dim: usize,
        out_dim: usize,
        weight: Vec<f32>,
        bias: Vec<f32>,
    ) -> Result<Self, InrError> {
        if weight.len() != in_dim * out_dim || bias.len() != out_dim {
            return Err(InrError::ShapeMismatch(format!(
                "layer {out_dim}x{in_dim} got {} weights and {} biases",
                weight.len(),
                bias.len()
            )));
        }
        Ok(Self {
            in_dim,
            out_dim,
            weight,
            bias,
        })
    }

    #[inline]
    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    #[inline]
    pub fn out_dim(&self) -> usize {
        self.out_dim
    }
}

/// The weights of a coordinate MLP. This is the compressed image.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    layers: Vec<DenseLayer>,
    frequency_scale: f32,
}

impl ParameterSet {
    /// All-zero parameters laid out for `arch`.
    pub fn zeros(arch: &MlpArchitecture) -> Self {
        Self {
            layers: arch
                .layer_shapes()
                .into_iter()
                .map(|(i, o)| DenseLayer::zeros(i, o))
                .collect(),
            frequency_scale: arch.frequency_scale(),
        }
    }

    /// Builds a parameter set from explicit layers and checks that the shapes chain.
    pub fn from_layers(layers: Vec<DenseLayer>, frequency_scale: f32) -> Result<Self, InrError> {
        if !(frequency_scale.is_finite() && frequency_scale > 0.0) {
            return Err(InrError::InvalidArchitecture(format!(
                "frequency scale must be finite and positive, got {frequency_scale}"
            )));
        }
        let params = Self {
            layers,
            frequency_scale,
        };
        params.check_chain()?;
        // Uniform hidden width is part of the LxH contract.
        params.architecture()?;
        Ok(params)
    }

    #[inline]
    pub fn frequency_scale(&self) -> f32 {
        self.frequency_scale
    }

    /// The `LxH` architecture these parameters realize.
    pub fn architecture(&self) -> Result<MlpArchitecture, InrError> {
        let hidden = self.layers[0].out_dim;
        let arch =
            MlpArchitecture::with_frequency_scale(self.layers.len(), hidden, self.frequency_scale)?;
        self.ensure_matches(&arch)?;
        Ok(arch)
    }

    fn check_chain(&self) -> Result<(), InrError> {
        let (first, last) = match (self.layers.first(), self.layers.last()) {
            (Some(f), Some(l)) if self.layers.len() >= 2 => (f, l),
            _ => {
                return Err(InrError::ShapeMismatch(
                    "a parameter set needs at least two layers".to_owned(),
                ))
            }
        };
        if first.in_dim != super::INPUT_DIM || last.out_dim != super::OUTPUT_DIM {
            return Err(InrError::ShapeMismatch(format!(
                "network maps {} -> {}, expected {} -> {}",
                first.in_dim,
                last.out_dim,
                super::INPUT_DIM,
                super::OUTPUT_DIM
            )));
        }
        for (i, pair) in self.layers.windows(2).enumerate() {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(InrError::ShapeMismatch(format!(
                    "layer {} outputs {} values but layer {} expects {}",
                    i,
                    pair[0].out_dim,
                    i + 1,
                    pair[1].in_dim
                )));
            }
        }
        Ok(())
    }

    /// Whether these parameters have exactly the layout `arch` calls for.
    pub fn matches(&self, arch: &MlpArchitecture) -> bool {
        let shapes = arch.layer_shapes();
        self.frequency_scale == arch.frequency_scale()
            && shapes.len() == self.layers.len()
            && shapes
                .iter()
                .zip(&self.layers)
                .all(|(&(i, o), l)| l.in_dim == i && l.out_dim == o)
    }

    pub fn ensure_matches(&self, arch: &MlpArchitecture) -> Result<(), InrError> {
        if self.matches(arch) {
            Ok(())
        } else {
            Err(InrError::ShapeMismatch(format!(
                "parameters do not match architecture {arch}"
            )))
        }
    }

    #[inline]
    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    #[inline]
    pub fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weight.len() + l.bias.len())
            .sum()
    }

    /// Every value, layer by layer, weights before biases.
    pub fn values(&self) -> impl Iterator<Item = f32> + '_ {
        self.layers
            .iter()
            .flat_map(|l| l.weight.iter().chain(l.bias.iter()).copied())
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut f32> + '_ {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weight.iter_mut().chain(l.bias.iter_mut()))
    }

    pub fn is_finite(&self) -> bool {
        self.values().all(f32::is_finite)
    }

    pub(crate) fn same_shape(&self, other: &ParameterSet) -> bool {
        self.frequency_scale == other.frequency_scale
            && self.layers.len() == other.layers.len()
            && self
                .layers
                .iter()
                .zip(&other.layers)
                .all(|(a, b)| a.in_dim == b.in_dim && a.out_dim == b.out_dim)
    }
}

/// Sinusoidal-network initialization.
///
/// First layer weights are drawn from `U(-1/fan_in, 1/fan_in)`, later layers from
/// `U(-sqrt(6/fan_in)/w0, sqrt(6/fan_in)/w0)`. Biases start at zero.
pub fn init_parameters(arch: &MlpArchitecture, seed: u64) -> ParameterSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w0 = arch.frequency_scale() as f64;
    let layers = arch
        .layer_shapes()
        .into_iter()
        .enumerate()
        .map(|(i, (fan_in, fan_out))| {
            let bound = if i == 0 {
                1.0 / fan_in as f64
            } else {
                (6.0 / fan_in as f64).sqrt() / w0
            } as f32;
            let dist = Uniform::new_inclusive(-bound, bound);
            let mut layer = DenseLayer::zeros(fan_in, fan_out);
            for w in &mut layer.weight {
                *w = dist.sample(&mut rng);
            }
            layer
        })
        .collect();
    ParameterSet {
        layers,
        frequency_scale: arch.frequency_scale(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_has_formula_size() {
        let arch = MlpArchitecture::new(10, 30).unwrap();
        let p = init_parameters(&arch, 7);
        assert_eq!(p.parameter_count(), 7623);
        assert!(p.matches(&arch));
    }

    #[test]
    fn init_is_deterministic() {
        let arch = MlpArchitecture::new(10, 30).unwrap();
        let a = init_parameters(&arch, 7);
        let b = init_parameters(&arch, 7);
        let bits = |p: &ParameterSet| p.values().map(f32::to_bits).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(bits(&a), bits(&init_parameters(&arch, 8)));
    }

    #[test]
    fn init_respects_bounds() {
        let arch = MlpArchitecture::new(3, 10).unwrap();
        let p = init_parameters(&arch, 1);
        let second = ((6.0f64 / 10.0).sqrt() / 30.0) as f32;
        assert!(p.layers()[1].weight.iter().all(|w| w.abs() <= second));
        assert!(p.layers()[0].weight.iter().all(|w| w.abs() <= 0.5));
        assert!(p.layers().iter().all(|l| l.bias.iter().all(|&b| b == 0.0)));
    }

    #[test]
    fn from_layers_checks_chain() {
        let ok = vec![DenseLayer::zeros(2, 4), DenseLayer::zeros(4, 3)];
        let p = ParameterSet::from_layers(ok, 30.0).unwrap();
        assert_eq!(p.architecture().unwrap().to_string(), "2x4");
        let broken = vec![DenseLayer::zeros(2, 4), DenseLayer::zeros(5, 3)];
        assert!(ParameterSet::from_layers(broken, 30.0).is_err());
        let wrong_out = vec![DenseLayer::zeros(2, 4), DenseLayer::zeros(4, 2)];
        assert!(ParameterSet::from_layers(wrong_out, 30.0).is_err());
        let ragged = vec![
            DenseLayer::zeros(2, 4),
            DenseLayer::zeros(4, 5),
            DenseLayer::zeros(5, 3),
        ];
        assert!(ParameterSet::from_layers(ragged, 30.0).is_err());
        assert!(DenseLayer::from_parts(2, 3, vec![0.0; 5], vec![0.0; 3]).is_err());
    }
}
