use super::network::{Gradients, Network};
use super::train::TrainingConfig;
use crate::error::{Error, Result};

/// First and second moment estimates, one buffer per parameter tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub first_moment: Vec<Vec<f64>>,
    pub second_moment: Vec<Vec<f64>>,
    pub step: u64,
}

impl AdamState {
    pub fn new(net: &Network) -> Self {
        let zeros: Vec<Vec<f64>> = net.tensors().iter().map(|t| vec![0.0; t.len()]).collect();
        AdamState {
            first_moment: zeros.clone(),
            second_moment: zeros,
            step: 0,
        }
    }
}

/// One bias-corrected Adam update of every parameter.
pub fn adam_step(
    net: &mut Network,
    grads: &Gradients,
    state: &mut AdamState,
    cfg: &TrainingConfig,
) -> Result<()> {
    let grads = grads.tensors();
    let mut params = net.tensors_mut();
    if grads.len() != params.len()
        || state.first_moment.len() != params.len()
        || params
            .iter()
            .zip(&grads)
            .zip(&state.first_moment)
            .any(|((p, g), m)| p.len() != g.len() || p.len() != m.len())
    {
        return Err(Error::ColumnMismatch(
            "gradient shapes do not match parameters".into(),
        ));
    }

    state.step += 1;
    let (b1, b2) = (cfg.adam_beta1, cfg.adam_beta2);
    let t = i32::try_from(state.step).unwrap_or(i32::MAX);
    let correction1 = 1.0 - b1.powi(t);
    let correction2 = 1.0 - b2.powi(t);
    let lr = cfg.learning_rate;
    let eps = cfg.adam_eps;
    for (((p, g), m), v) in params
        .iter_mut()
        .zip(grads)
        .zip(&mut state.first_moment)
        .zip(&mut state.second_moment)
    {
        for k in 0..p.len() {
            m[k] = b1 * m[k] + (1.0 - b1) * g[k];
            v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
            let m_hat = m[k] / correction1;
            let v_hat = v[k] / correction2;
            p[k] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn grads_like(net: &Network, value: f64) -> Gradients {
        let (_, mut g) = net.backward(array![[0.0, 0.0]].view(), &[0]).unwrap();
        for layer in &mut g.layers {
            if let crate::neuralnet::Layer::Dense(d) = layer {
                d.weights.fill(value);
                d.bias.fill(value);
            }
        }
        g
    }

    #[test]
    fn zero_gradient_is_fixed_point() {
        let mut net = Network::mlp(2, &[3], 1);
        let before = net.clone();
        let mut state = AdamState::new(&net);
        adam_step(&mut net, &grads_like(&before, 0.0), &mut state, &TrainingConfig::default()).unwrap();
        assert_eq!(net, before);
        assert_eq!(state.step, 1);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut net = Network::mlp(2, &[3], 1);
        let before = net.clone();
        let cfg = TrainingConfig::default();
        let mut state = AdamState::new(&net);
        adam_step(&mut net, &grads_like(&before, 0.37), &mut state, &cfg).unwrap();
        // m_hat = g and v_hat = g^2, so the step is lr * g / (|g| + eps).
        let expected = cfg.learning_rate * 0.37 / (0.37 + cfg.adam_eps);
        for (a, b) in before.tensors().iter().zip(net.tensors()) {
            for (x, y) in a.iter().zip(b) {
                assert!(((x - y) - expected).abs() < 1e-15);
                assert!(((x - y) - cfg.learning_rate).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn shape_mismatch() {
        let mut net = Network::mlp(2, &[3], 1);
        let other = Network::mlp(2, &[4], 1);
        let mut state = AdamState::new(&net);
        let g = grads_like(&other, 1.0);
        assert!(adam_step(&mut net, &g, &mut state, &TrainingConfig::default()).is_err());
    }
}
