use ndarray::{s, Array1, Array2, ArrayView2, Axis, Zip};
use rand::Rng;

use super::activation::sigmoid;

/// Weights for one gate over the concatenated `[x, h_prev]` input.
#[derive(Clone, Debug, PartialEq)]
pub struct GateParams {
    /// hidden × (input + hidden)
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl GateParams {
    fn zeros(input_size: usize, hidden_size: usize) -> Self {
        GateParams {
            weights: Array2::zeros((hidden_size, input_size + hidden_size)),
            bias: Array1::zeros(hidden_size),
        }
    }

    fn input_part(&self, input_size: usize) -> ArrayView2<'_, f64> {
        self.weights.slice(s![.., ..input_size])
    }

    fn recurrent_part(&self, input_size: usize) -> ArrayView2<'_, f64> {
        self.weights.slice(s![.., input_size..])
    }

    fn pre_activation(&self, x: ArrayView2<f64>, h_prev: Option<&Array2<f64>>, input_size: usize) -> Array2<f64> {
        let mut z = x.dot(&self.input_part(input_size).t());
        if let Some(h) = h_prev {
            z += &h.dot(&self.recurrent_part(input_size).t());
        }
        z += &self.bias;
        z
    }
}

/// Classic LSTM cell:
///
/// ```text
/// i = σ(W_i [x, h] + b_i)    f = σ(W_f [x, h] + b_f)
/// o = σ(W_o [x, h] + b_o)    g = tanh(W_g [x, h] + b_g)
/// c' = f ⊙ c + i ⊙ g         h' = o ⊙ tanh(c')
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct LstmCell {
    pub input_size: usize,
    pub hidden_size: usize,
    pub input_gate: GateParams,
    pub forget_gate: GateParams,
    pub output_gate: GateParams,
    pub candidate: GateParams,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LstmState {
    pub h: Array2<f64>,
    pub c: Array2<f64>,
}

pub(crate) struct LstmCache {
    x: Array2<f64>,
    prev: Option<LstmState>,
    i: Array2<f64>,
    f: Array2<f64>,
    o: Array2<f64>,
    g: Array2<f64>,
    tanh_c: Array2<f64>,
}

impl LstmCell {
    pub fn zeros(input_size: usize, hidden_size: usize) -> Self {
        LstmCell {
            input_size,
            hidden_size,
            input_gate: GateParams::zeros(input_size, hidden_size),
            forget_gate: GateParams::zeros(input_size, hidden_size),
            output_gate: GateParams::zeros(input_size, hidden_size),
            candidate: GateParams::zeros(input_size, hidden_size),
        }
    }

    /// Glorot-uniform weights (input and recurrent blocks scaled by their
    /// own fan), zero biases except the forget gate, which starts at 1.
    pub fn glorot<R: Rng>(input_size: usize, hidden_size: usize, rng: &mut R) -> Self {
        let mut cell = Self::zeros(input_size, hidden_size);
        let in_limit = (6.0 / (input_size + 4 * hidden_size) as f64).sqrt();
        let rec_limit = (6.0 / (5 * hidden_size) as f64).sqrt();
        for gate in cell.gates_mut() {
            for row in gate.weights.rows_mut() {
                for (k, w) in row.into_iter().enumerate() {
                    let limit = if k < input_size { in_limit } else { rec_limit };
                    *w = rng.random_range(-limit..=limit);
                }
            }
        }
        cell.forget_gate.bias.fill(1.0);
        cell
    }

    pub fn gates(&self) -> [&GateParams; 4] {
        [&self.input_gate, &self.forget_gate, &self.output_gate, &self.candidate]
    }

    pub fn gates_mut(&mut self) -> [&mut GateParams; 4] {
        [
            &mut self.input_gate,
            &mut self.forget_gate,
            &mut self.output_gate,
            &mut self.candidate,
        ]
    }

    /// One time step; `prev = None` means the zero initial state.
    pub fn step(&self, x: ArrayView2<f64>, prev: Option<&LstmState>) -> LstmState {
        let (state, _) = self.step_cached(x.to_owned(), prev);
        state
    }

    pub(crate) fn step_cached(&self, x: Array2<f64>, prev: Option<&LstmState>) -> (LstmState, LstmCache) {
        let n = self.input_size;
        let h_prev = prev.map(|p| &p.h);
        let i = self.input_gate.pre_activation(x.view(), h_prev, n).mapv(sigmoid);
        let f = self.forget_gate.pre_activation(x.view(), h_prev, n).mapv(sigmoid);
        let o = self.output_gate.pre_activation(x.view(), h_prev, n).mapv(sigmoid);
        let g = self.candidate.pre_activation(x.view(), h_prev, n).mapv(f64::tanh);
        let mut c = &i * &g;
        if let Some(p) = prev {
            c += &(&f * &p.c);
        }
        let tanh_c = c.mapv(f64::tanh);
        let h = &o * &tanh_c;
        let cache = LstmCache {
            x,
            prev: prev.cloned(),
            i,
            f,
            o,
            g,
            tanh_c,
        };
        (LstmState { h, c }, cache)
    }

    /// Backpropagates `dL/dh'` (and optionally `dL/dc'` from a later step).
    /// Returns parameter gradients, `dL/dx`, and `dL/d(h, c)` of the
    /// previous state when one was given.
    pub(crate) fn backward(
        &self,
        dh: &Array2<f64>,
        dc_next: Option<&Array2<f64>>,
        cache: &LstmCache,
    ) -> (LstmCell, Array2<f64>, Option<LstmState>) {
        let mut dc = Array2::zeros(dh.raw_dim());
        Zip::from(&mut dc)
            .and(dh)
            .and(&cache.o)
            .and(&cache.tanh_c)
            .for_each(|d, &dh, &o, &t| *d = dh * o * (1.0 - t * t));
        if let Some(extra) = dc_next {
            dc += extra;
        }

        let mut dz_i = &dc * &cache.g;
        Zip::from(&mut dz_i).and(&cache.i).for_each(|d, &i| *d *= i * (1.0 - i));
        let mut dz_g = &dc * &cache.i;
        Zip::from(&mut dz_g).and(&cache.g).for_each(|d, &g| *d *= 1.0 - g * g);
        let mut dz_o = dh * &cache.tanh_c;
        Zip::from(&mut dz_o).and(&cache.o).for_each(|d, &o| *d *= o * (1.0 - o));
        let dz_f = match &cache.prev {
            Some(p) => {
                let mut d = &dc * &p.c;
                Zip::from(&mut d).and(&cache.f).for_each(|d, &f| *d *= f * (1.0 - f));
                d
            }
            None => Array2::zeros(dh.raw_dim()),
        };

        let n = self.input_size;
        let mut grads = LstmCell::zeros(self.input_size, self.hidden_size);
        let mut dx = Array2::zeros(cache.x.raw_dim());
        let mut dh_prev = cache.prev.as_ref().map(|_| Array2::zeros(dh.raw_dim()));
        let dzs = [&dz_i, &dz_f, &dz_o, &dz_g];
        for ((gate, grad), dz) in self.gates().into_iter().zip(grads.gates_mut()).zip(dzs) {
            grad.weights
                .slice_mut(s![.., ..n])
                .assign(&dz.t().dot(&cache.x));
            if let Some(p) = &cache.prev {
                grad.weights.slice_mut(s![.., n..]).assign(&dz.t().dot(&p.h));
            }
            grad.bias = dz.sum_axis(Axis(0));
            dx += &dz.dot(&gate.input_part(n));
            if let Some(dhp) = dh_prev.as_mut() {
                *dhp += &dz.dot(&gate.recurrent_part(n));
            }
        }
        let prev_grads = dh_prev.map(|h| LstmState { h, c: &dc * &cache.f });
        (grads, dx, prev_grads)
    }
}
