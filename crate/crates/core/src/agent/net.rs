//! Fully connected network with tanh hidden units and a linear head.
//!
//! All parameters live in one flat vector (per layer: weights in row-major
//! `in × out` order, then biases), so optimizers, target tracking and
//! finite-difference checks operate on plain slices.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseNet {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

/// Activations kept from a forward pass for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    activations: Vec<Array2<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &Array2<f64> {
        self.activations.last().expect("at least the input is cached")
    }
}

impl DenseNet {
    /// Glorot-uniform weights, zero biases.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Self {
        assert!(sizes.len() >= 2, "a network needs input and output sizes");
        let total = sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
        let mut params = Vec::with_capacity(total);
        for w in sizes.windows(2) {
            let limit = (6.0 / (w[0] + w[1]) as f64).sqrt();
            params.extend((0..w[0] * w[1]).map(|_| rng.random_range(-limit..limit)));
            params.extend(std::iter::repeat_n(0.0, w[1]));
        }
        Self { sizes: sizes.to_vec(), params }
    }

    /// Scales the last layer's weights, a common trick for small initial
    /// outputs.
    pub fn scale_output_layer(&mut self, factor: f64) {
        let n = self.sizes.len();
        let (fan_in, fan_out) = (self.sizes[n - 2], self.sizes[n - 1]);
        let start = self.params.len() - fan_out - fan_in * fan_out;
        for w in &mut self.params[start..start + fan_in * fan_out] {
            *w *= factor;
        }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().expect("non-empty sizes")
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    fn layer(&self, l: usize, offset: usize) -> (ArrayView2<'_, f64>, ArrayView1<'_, f64>) {
        let (i, o) = (self.sizes[l], self.sizes[l + 1]);
        let w = ArrayView2::from_shape((i, o), &self.params[offset..offset + i * o]).expect("layout");
        let b = ArrayView1::from(&self.params[offset + i * o..offset + i * o + o]);
        (w, b)
    }

    pub fn forward_cached(&self, x: &Array2<f64>) -> ForwardCache {
        assert_eq!(x.ncols(), self.input_dim(), "input width");
        let layers = self.sizes.len() - 1;
        let mut activations = Vec::with_capacity(layers + 1);
        activations.push(x.clone());
        let mut offset = 0;
        for l in 0..layers {
            let (w, b) = self.layer(l, offset);
            let mut z = activations[l].dot(&w);
            z += &b;
            if l + 1 < layers {
                z.mapv_inplace(f64::tanh);
            }
            activations.push(z);
            offset += w.len() + b.len();
        }
        ForwardCache { activations }
    }

    pub fn forward(&self, x: &Array2<f64>) -> Array2<f64> {
        self.forward_cached(x).activations.pop().expect("output")
    }

    /// Backpropagates `d_out` (gradient of a scalar loss w.r.t. the output).
    /// Parameter gradients are added into `grad`; the input gradient is
    /// returned.
    pub fn backward(&self, cache: &ForwardCache, d_out: &Array2<f64>, grad: &mut [f64]) -> Array2<f64> {
        assert_eq!(grad.len(), self.params.len(), "gradient buffer size");
        self.backprop(cache, d_out, Some(grad))
    }

    /// Input gradient only, skipping parameter gradients.
    pub fn backward_input(&self, cache: &ForwardCache, d_out: &Array2<f64>) -> Array2<f64> {
        self.backprop(cache, d_out, None)
    }

    fn backprop(&self, cache: &ForwardCache, d_out: &Array2<f64>, mut grad: Option<&mut [f64]>) -> Array2<f64> {
        let layers = self.sizes.len() - 1;
        let mut offsets = Vec::with_capacity(layers);
        let mut acc = 0;
        for l in 0..layers {
            offsets.push(acc);
            acc += self.sizes[l] * self.sizes[l + 1] + self.sizes[l + 1];
        }
        let mut delta = d_out.clone();
        for l in (0..layers).rev() {
            let (i, o) = (self.sizes[l], self.sizes[l + 1]);
            let off = offsets[l];
            let a_in = &cache.activations[l];
            if let Some(grad) = grad.as_deref_mut() {
                let dw = a_in.t().dot(&delta);
                let db = delta.sum_axis(Axis(0));
                for (g, d) in grad[off..off + i * o].iter_mut().zip(dw.iter()) {
                    *g += d;
                }
                for (g, d) in grad[off + i * o..off + i * o + o].iter_mut().zip(db.iter()) {
                    *g += d;
                }
            }
            let (w, _) = self.layer(l, off);
            let mut d_in = delta.dot(&w.t());
            if l > 0 {
                d_in.zip_mut_with(a_in, |d, &a| *d *= 1.0 - a * a);
            }
            delta = d_in;
        }
        delta
    }

    /// `self ← τ·source + (1 − τ)·self`.
    pub fn soft_update_from(&mut self, source: &DenseNet, tau: f64) {
        assert_eq!(self.params.len(), source.params.len());
        for (t, s) in self.params.iter_mut().zip(&source.params) {
            *t = tau * s + (1.0 - tau) * *t;
        }
    }
}
