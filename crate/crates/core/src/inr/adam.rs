use super::{InrError, ParameterSet, TrainConfig};

/// First and second moment estimates, shaped like the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first_moment: ParameterSet,
    pub second_moment: ParameterSet,
}

impl AdamState {
    pub fn new(params: &ParameterSet) -> Self {
        let mut zero = params.clone();
        zero.values_mut().for_each(|v| *v = 0.0);
        Self {
            first_moment: zero.clone(),
            second_moment: zero,
        }
    }
}

/// One Adam update with bias correction. `step` is 1-based.
///
/// ```text
/// m ← β1·m + (1-β1)·g
/// v ← β2·v + (1-β2)·g²
/// θ ← θ - lr · (m / (1-β1^t)) / (sqrt(v / (1-β2^t)) + ε)
/// ```
pub fn adam_step(
    params: &mut ParameterSet,
    grads: &ParameterSet,
    state: &mut AdamState,
    config: &TrainConfig,
    step: u64,
) -> Result<(), InrError> {
    if step == 0 {
        return Err(InrError::InvalidConfig(
            "adam step index is 1-based; got 0".to_owned(),
        ));
    }
    if !(params.same_shape(grads)
        && params.same_shape(&state.first_moment)
        && params.same_shape(&state.second_moment))
    {
        return Err(InrError::ShapeMismatch(
            "parameters, gradients and optimizer state differ in shape".to_owned(),
        ));
    }
    let (b1, b2) = (config.beta1, config.beta2);
    let t = i32::try_from(step).unwrap_or(i32::MAX);
    let c1 = 1.0 - b1.powi(t);
    let c2 = 1.0 - b2.powi(t);
    let lr = config.learning_rate;
    let eps = config.epsilon;

    for (((p, g), m), v) in params
        .values_mut()
        .zip(grads.values())
        .zip(state.first_moment.values_mut())
        .zip(state.second_moment.values_mut())
    {
        let g = g as f64;
        let m_new = b1 * *m as f64 + (1.0 - b1) * g;
        let v_new = b2 * *v as f64 + (1.0 - b2) * g * g;
        *m = m_new as f32;
        *v = v_new as f32;
        let update = lr * (m_new / c1) / ((v_new / c2).sqrt() + eps);
        *p = (*p as f64 - update) as f32;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inr::{init_parameters, DenseLayer, MlpArchitecture};

    fn scalar_net(v: f32) -> ParameterSet {
        // 2x1 network; only the output bias is used as "the scalar".
        let mut p = ParameterSet::zeros(&MlpArchitecture::new(2, 1).unwrap());
        p.layers_mut()[1].bias[0] = v;
        p
    }

    #[test]
    fn zero_gradient_leaves_parameters() {
        let arch = MlpArchitecture::new(3, 4).unwrap();
        let mut p = init_parameters(&arch, 2);
        let before = p.clone();
        let grads = ParameterSet::zeros(&arch);
        let mut state = AdamState::new(&p);
        adam_step(&mut p, &grads, &mut state, &TrainConfig::default(), 1).unwrap();
        assert_eq!(p, before);
        assert!(state.first_moment.values().all(|v| v == 0.0));
        assert!(state.second_moment.values().all(|v| v == 0.0));
    }

    #[test]
    fn first_step_scalar_matches_hand_evaluation() {
        let cfg = TrainConfig::default();
        let mut p = scalar_net(1.0);
        let mut g = scalar_net(0.0);
        g.layers_mut()[1].bias[0] = 0.5;
        let mut state = AdamState::new(&p);
        adam_step(&mut p, &g, &mut state, &cfg, 1).unwrap();

        // m = 0.1·0.5 = 0.05, v = 0.001·0.25 = 2.5e-4, m̂ = 0.5, v̂ = 0.25,
        // update = 1e-3 · 0.5 / (0.5 + 1e-8).
        let update = 1e-3 * 0.5 / (0.5 + 1e-8);
        let expected = (1.0f64 - update) as f32;
        assert_eq!(p.layers()[1].bias[0], expected);
        assert!((update - 1e-3).abs() < 1e-10);
        assert_eq!(state.first_moment.layers()[1].bias[0], 0.05f64 as f32);
    }

    #[test]
    fn moments_decay_geometrically_without_gradient() {
        let cfg = TrainConfig::default();
        let mut p = scalar_net(0.0);
        let mut g = scalar_net(0.0);
        g.layers_mut()[1].bias[0] = -0.3;
        let zero = scalar_net(0.0);
        let mut state = AdamState::new(&p);
        adam_step(&mut p, &g, &mut state, &cfg, 1).unwrap();
        let (mut m, mut v) = (
            state.first_moment.layers()[1].bias[0],
            state.second_moment.layers()[1].bias[0],
        );
        for t in 2..=3 {
            adam_step(&mut p, &zero, &mut state, &cfg, t).unwrap();
            m = (cfg.beta1 * m as f64) as f32;
            v = (cfg.beta2 * v as f64) as f32;
            assert_eq!(state.first_moment.layers()[1].bias[0], m);
            assert_eq!(state.second_moment.layers()[1].bias[0], v);
        }
    }

    #[test]
    fn step_zero_is_rejected() {
        let mut p = scalar_net(0.0);
        let g = p.clone();
        let mut state = AdamState::new(&p);
        assert!(adam_step(&mut p, &g, &mut state, &TrainConfig::default(), 0).is_err());
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let mut p = scalar_net(0.0);
        let other =
            ParameterSet::from_layers(vec![DenseLayer::zeros(2, 2), DenseLayer::zeros(2, 3)], 30.0)
                .unwrap();
        let mut state = AdamState::new(&p);
        assert!(adam_step(&mut p, &other, &mut state, &TrainConfig::default(), 1).is_err());
    }
}
