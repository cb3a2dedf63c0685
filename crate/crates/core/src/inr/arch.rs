use std::fmt;
use std::str::FromStr;

use super::InrError;

/// Pixel coordinates `(x, y)` in.
pub const INPUT_DIM: usize = 2;
/// RGB out.
pub const OUTPUT_DIM: usize = 3;
/// Default frequency scale of the sinusoidal activation.
pub const DEFAULT_FREQUENCY_SCALE: f32 = 30.0;

/// Shape of a coordinate MLP, written `LxH` (layer count × hidden width).
///
/// `layer_count` counts affine layers, so a `3x10` network has two sinusoidal
/// hidden layers of width 10 followed by a linear RGB head.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlpArchitecture {
    layer_count: usize,
    hidden_dim: usize,
    frequency_scale: f32,
}

impl MlpArchitecture {
    pub fn new(layer_count: usize, hidden_dim: usize) -> Result<Self, InrError> {
        Self::with_frequency_scale(layer_count, hidden_dim, DEFAULT_FREQUENCY_SCALE)
    }

    pub fn with_frequency_scale(
        layer_count: usize,
        hidden_dim: usize,
        frequency_scale: f32,
    ) -> Result<Self, InrError> {
        if layer_count < 2 {
            return Err(InrError::InvalidArchitecture(format!(
                "layer count must be at least 2, got {layer_count}"
            )));
        }
        if hidden_dim == 0 {
            return Err(InrError::InvalidArchitecture(
                "hidden dimension must be at least 1".to_owned(),
            ));
        }
        if !(frequency_scale.is_finite() && frequency_scale > 0.0) {
            return Err(InrError::InvalidArchitecture(format!(
                "frequency scale must be finite and positive, got {frequency_scale}"
            )));
        }
        Ok(Self {
            layer_count,
            hidden_dim,
            frequency_scale,
        })
    }

    #[inline]
    pub fn layer_count(&self) -> usize {
        self.layer_count
    }

    #[inline]
    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    #[inline]
    pub fn frequency_scale(&self) -> f32 {
        self.frequency_scale
    }

    #[inline]
    pub fn input_dim(&self) -> usize {
        INPUT_DIM
    }

    #[inline]
    pub fn output_dim(&self) -> usize {
        OUTPUT_DIM
    }

    /// `(in, out)` widths of every affine layer, input to output.
    pub fn layer_shapes(&self) -> Vec<(usize, usize)> {
        (0..self.layer_count)
            .map(|i| {
                let fan_in = if i == 0 { INPUT_DIM } else { self.hidden_dim };
                let fan_out = if i + 1 == self.layer_count {
                    OUTPUT_DIM
                } else {
                    self.hidden_dim
                };
                (fan_in, fan_out)
            })
            .collect()
    }

    /// Total number of weights and biases.
    pub fn parameter_count(&self) -> usize {
        let h = self.hidden_dim;
        (INPUT_DIM + 1) * h + (self.layer_count - 2) * (h + 1) * h + (h + 1) * OUTPUT_DIM
    }
}

// The frequency scale is validated finite and positive, so bitwise identity
// agrees with `==`.
impl Eq for MlpArchitecture {}

impl std::hash::Hash for MlpArchitecture {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (
            self.layer_count,
            self.hidden_dim,
            self.frequency_scale.to_bits(),
        )
            .hash(state);
    }
}

impl PartialOrd for MlpArchitecture {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MlpArchitecture {
    /// Layer count, then width, then frequency scale.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (
            self.layer_count,
            self.hidden_dim,
            self.frequency_scale.to_bits(),
        )
            .cmp(&(
                other.layer_count,
                other.hidden_dim,
                other.frequency_scale.to_bits(),
            ))
    }
}

impl fmt::Display for MlpArchitecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.layer_count, self.hidden_dim)
    }
}

impl FromStr for MlpArchitecture {
    type Err = InrError;

    /// Parses `LxH`, e.g. `10x30`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || InrError::InvalidArchitecture(format!("expected `LxH`, got `{s}`"));
        let (l, h) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        let l = l.trim().parse().map_err(|_| bad())?;
        let h = h.trim().parse().map_err(|_| bad())?;
        Self::new(l, h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parameter_count_matches_known_sizes() {
        let a = MlpArchitecture::new(10, 30).unwrap();
        assert_eq!(a.parameter_count(), 3 * 30 + 8 * 31 * 30 + 31 * 3);
        assert_eq!(a.parameter_count(), 7623);
        assert_eq!(MlpArchitecture::new(3, 10).unwrap().parameter_count(), 173);
        assert_eq!(MlpArchitecture::new(5, 24).unwrap().parameter_count(), 1947);
        assert_eq!(
            MlpArchitecture::new(16, 48).unwrap().parameter_count(),
            33219
        );
    }

    #[test]
    fn rejects_invalid() {
        assert!(MlpArchitecture::new(1, 10).is_err());
        assert!(MlpArchitecture::new(3, 0).is_err());
        assert!(MlpArchitecture::with_frequency_scale(3, 4, 0.0).is_err());
        assert!(MlpArchitecture::with_frequency_scale(3, 4, f32::NAN).is_err());
    }

    #[test]
    fn parse_and_display() {
        let a: MlpArchitecture = "5x17".parse().unwrap();
        assert_eq!((a.layer_count(), a.hidden_dim()), (5, 17));
        assert_eq!(a.to_string(), "5x17");
        assert!("5-17".parse::<MlpArchitecture>().is_err());
        assert!("1x17".parse::<MlpArchitecture>().is_err());
        assert!("ax3".parse::<MlpArchitecture>().is_err());
    }

    proptest! {
        #[test]
        fn parameter_count_equals_sum_of_layer_sizes(l in 2usize..20, h in 1usize..80) {
            let a = MlpArchitecture::new(l, h).unwrap();
            let summed: usize = a.layer_shapes().iter().map(|&(i, o)| i * o + o).sum();
            prop_assert_eq!(a.parameter_count(), summed);
        }
    }
}
