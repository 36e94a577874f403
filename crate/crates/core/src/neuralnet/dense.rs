use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::Rng;

use super::activation::Activation;

/// Fully connected layer: `a = act(x W^T + b)` with `W` of shape out × in.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseLayer {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub activation: Activation,
}

pub(crate) struct DenseCache {
    pub input: Array2<f64>,
    pub pre: Array2<f64>,
    pub output: Array2<f64>,
}

impl DenseLayer {
    pub fn zeros(inputs: usize, outputs: usize, activation: Activation) -> Self {
        DenseLayer {
            weights: Array2::zeros((outputs, inputs)),
            bias: Array1::zeros(outputs),
            activation,
        }
    }

    /// Glorot-uniform weights, zero bias.
    pub fn glorot<R: Rng>(inputs: usize, outputs: usize, activation: Activation, rng: &mut R) -> Self {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        let mut layer = Self::zeros(inputs, outputs, activation);
        layer
            .weights
            .mapv_inplace(|_| rng.random_range(-limit..=limit));
        layer
    }

    pub fn inputs(&self) -> usize {
        self.weights.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.nrows()
    }

    pub fn forward(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let mut z = x.dot(&self.weights.t());
        z += &self.bias;
        let act = self.activation;
        z.mapv_inplace(|v| act.apply(v));
        z
    }

    pub(crate) fn forward_cached(&self, x: Array2<f64>) -> DenseCache {
        let mut pre = x.dot(&self.weights.t());
        pre += &self.bias;
        let act = self.activation;
        let output = pre.mapv(|v| act.apply(v));
        DenseCache {
            input: x,
            pre,
            output,
        }
    }

    /// `dL/dz` from `dL/da`.
    pub(crate) fn pre_activation_grad(&self, d_out: &Array2<f64>, cache: &DenseCache) -> Array2<f64> {
        let act = self.activation;
        let mut dz = d_out.clone();
        Zip::from(&mut dz)
            .and(&cache.pre)
            .and(&cache.output)
            .for_each(|d, &z, &a| *d *= act.derivative(z, a));
        dz
    }

    /// Parameter gradients and `dL/dx` from `dL/dz`.
    pub(crate) fn backward_from_pre(&self, dz: &Array2<f64>, cache: &DenseCache) -> (DenseLayer, Array2<f64>) {
        let grads = DenseLayer {
            weights: dz.t().dot(&cache.input),
            bias: dz.sum_axis(Axis(0)),
            activation: self.activation,
        };
        let dx = dz.dot(&self.weights);
        (grads, dx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn hand_evaluated_forward() {
        let layer = DenseLayer {
            weights: array![[1.0, -2.0], [0.5, 0.25]],
            bias: array![0.5, -1.0],
            activation: Activation::Relu,
        };
        let x = array![[1.0, 1.0], [4.0, 2.0]];
        // row 0: (1-2+0.5, 0.5+0.25-1) = (-0.5, -0.25) -> (0, 0)
        // row 1: (4-4+0.5, 2+0.5-1) = (0.5, 1.5)
        assert_eq!(layer.forward(x.view()), array![[0.0, 0.0], [0.5, 1.5]]);
    }
}
