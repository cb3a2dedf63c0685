use std::time::{Duration, Instant};

use super::{
    adam_step, forward_points, init_parameters, loss_and_gradient, mse_loss, AdamState,
    CoordinateGrid, InrError, MlpArchitecture, ParameterSet, OUTPUT_DIM,
};

/// Optimizer settings for one fit. The loss is always mean squared error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub steps: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            steps: 1000,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Defaults for the full-image network.
    pub fn background() -> Self {
        Self {
            steps: 2000,
            ..Self::default()
        }
    }

    /// Defaults for the bounding-box network.
    pub fn object() -> Self {
        Self {
            steps: 1000,
            ..Self::default()
        }
    }

    pub fn with_steps(mut self, steps: u64) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_learning_rate(mut self, lr: f64) -> Self {
        self.learning_rate = lr;
        self
    }

    pub fn validate(&self) -> Result<(), InrError> {
        let ok = self.learning_rate.is_finite()
            && self.learning_rate > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.epsilon.is_finite()
            && self.epsilon > 0.0;
        if ok {
            Ok(())
        } else {
            Err(InrError::InvalidConfig(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    /// MSE before each optimizer step.
    pub loss_trace: Vec<f64>,
    /// PSNR of the clamped prediction of the returned parameters.
    pub final_psnr_db: f64,
    /// Number of optimizer updates applied to the returned parameters.
    pub best_step: u64,
    /// Unclamped MSE of the returned parameters.
    pub best_loss: f64,
    pub steps_run: u64,
    pub wall_time: Duration,
}

impl FitReport {
    pub fn final_loss(&self) -> Option<f64> {
        self.loss_trace.last().copied()
    }
}

/// `10·log10(1/mse)` for unit peak; `+inf` when the error vanishes.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * mse.log10()
    }
}

fn clamped_psnr(
    params: &ParameterSet,
    coords: &[[f32; 2]],
    target: &[f32],
) -> Result<f64, InrError> {
    let pred = forward_points(params, coords)?;
    let sum: f64 = pred
        .iter()
        .zip(target)
        .map(|(&p, &t)| {
            let d = p.clamp(0.0, 1.0) as f64 - t as f64;
            d * d
        })
        .sum();
    Ok(psnr_from_mse(sum / target.len() as f64))
}

/// Full-batch Adam fit of a fresh network to `target` over arbitrary coordinates.
///
/// Returns the lowest-loss iterate seen, which guards against the late loss
/// spikes Adam produces on deep sinusoidal networks.
pub fn fit_points(
    arch: &MlpArchitecture,
    coords: &[[f32; 2]],
    target: &[f32],
    config: &TrainConfig,
) -> Result<(ParameterSet, FitReport), InrError> {
    config.validate()?;
    if coords.is_empty() {
        return Err(InrError::EmptyGrid);
    }
    if target.len() != coords.len() * OUTPUT_DIM {
        return Err(InrError::ShapeMismatch(format!(
            "target has {} values for {} pixels",
            target.len(),
            coords.len()
        )));
    }
    let start = Instant::now();
    let mut params = init_parameters(arch, config.seed);
    let mut state = AdamState::new(&params);
    let mut loss_trace = Vec::with_capacity(config.steps as usize);
    let mut best: Option<(f64, u64, ParameterSet)> = None;
    for step in 1..=config.steps {
        let (loss, grads) =
            loss_and_gradient(&params, coords, target).map_err(|e| e.at_step(step))?;
        if !loss.is_finite() {
            return Err(InrError::Diverged { step });
        }
        loss_trace.push(loss);
        if best.as_ref().is_none_or(|b| loss < b.0) {
            best = Some((loss, step - 1, params.clone()));
        }
        adam_step(&mut params, &grads, &mut state, config, step)?;
        if !params.is_finite() {
            return Err(InrError::Diverged { step });
        }
    }
    let last_pred = forward_points(&params, coords).map_err(|e| e.at_step(config.steps))?;
    let last_loss = mse_loss(&last_pred, target)?;
    if !last_loss.is_finite() {
        return Err(InrError::Diverged { step: config.steps });
    }
    let (best_loss, best_step, params) = match best {
        Some(b) if b.0 <= last_loss => b,
        _ => (last_loss, config.steps, params),
    };
    let final_psnr_db = clamped_psnr(&params, coords, target)?;
    Ok((
        params,
        FitReport {
            loss_trace,
            final_psnr_db,
            best_step,
            best_loss,
            steps_run: config.steps,
            wall_time: start.elapsed(),
        },
    ))
}

/// Fits a network to an image-shaped target (`grid.len() · 3` values in `[0, 1]`).
pub fn fit(
    arch: &MlpArchitecture,
    grid: &CoordinateGrid,
    target: &[f32],
    config: &TrainConfig,
) -> Result<(ParameterSet, FitReport), InrError> {
    fit_points(arch, grid.coords(), target, config)
}
