//! Coordinate MLPs: definition, evaluation, gradients, and fitting.

mod adam;
mod arch;
mod fit;
mod grid;
mod mlp;
mod params;

use thiserror::Error;

pub use adam::{adam_step, AdamState};
pub use arch::{MlpArchitecture, DEFAULT_FREQUENCY_SCALE, INPUT_DIM, OUTPUT_DIM};
pub use fit::{fit, fit_points, psnr_from_mse, FitReport, TrainConfig};
pub use grid::CoordinateGrid;
pub use mlp::{backward, forward, forward_points, loss_and_gradient, mse_loss, PIXEL_CHUNK};
pub use params::{init_parameters, DenseLayer, ParameterSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InrError {
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("coordinate grid is empty")]
    EmptyGrid,
    #[error("non-finite activation or gradient in layer {layer}")]
    NonFinite { layer: usize },
    #[error("non-finite activation or gradient in layer {layer} at step {step}")]
    NonFiniteAtStep { layer: usize, step: u64 },
    #[error("loss became non-finite at step {step}")]
    Diverged { step: u64 },
}

impl InrError {
    pub(crate) fn at_step(self, step: u64) -> Self {
        match self {
            InrError::NonFinite { layer } => InrError::NonFiniteAtStep { layer, step },
            other => other,
        }
    }
}
