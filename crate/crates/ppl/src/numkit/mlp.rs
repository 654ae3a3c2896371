//! Dense feed-forward networks with hand-rolled reverse-mode gradients.
//!
//! Hidden layers are rectified-linear, the output layer is identity. Weights
//! are row-major `(out, in)`. The forward pass can record activations into an
//! [`MlpCache`]; [`Mlp::backward`] consumes that cache, accumulates parameter
//! gradients, and returns the gradient with respect to the input. A version
//! counter ties caches to the parameter state, so backpropagating through a
//! cache built before a parameter update is a detectable usage error.

use crate::error::{Error, Result};
use crate::numkit::Prng;

#[derive(Debug, Clone)]
pub struct Layer {
    /// Row-major (rows = out, cols = in).
    pub w: Vec<f64>,
    pub b: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone)]
pub struct Mlp {
    sizes: Vec<usize>,
    layers: Vec<Layer>,
    version: u64,
}

/// Activations recorded by [`Mlp::forward_cached`].
#[derive(Debug, Clone, Default)]
pub struct MlpCache {
    version: u64,
    /// acts[0] is the input; acts[i] is the post-activation output of layer i.
    acts: Vec<Vec<f64>>,
}

/// Parameter gradients, shape-for-shape with [`Mlp`].
#[derive(Debug, Clone)]
pub struct MlpGrads {
    pub dw: Vec<Vec<f64>>,
    pub db: Vec<Vec<f64>>,
}

impl MlpGrads {
    pub fn zeros_like(net: &Mlp) -> Self {
        MlpGrads {
            dw: net.layers.iter().map(|l| vec![0.0; l.w.len()]).collect(),
            db: net.layers.iter().map(|l| vec![0.0; l.b.len()]).collect(),
        }
    }

    pub fn reset(&mut self) {
        for g in self.dw.iter_mut().chain(self.db.iter_mut()) {
            g.iter_mut().for_each(|x| *x = 0.0);
        }
    }

    pub fn scale(&mut self, c: f64) {
        for g in self.dw.iter_mut().chain(self.db.iter_mut()) {
            g.iter_mut().for_each(|x| *x *= c);
        }
    }

    /// Flat view in the same order `Mlp::visit_params` walks.
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (dw, db) in self.dw.iter().zip(&self.db) {
            out.extend_from_slice(dw);
            out.extend_from_slice(db);
        }
        out
    }
}

impl Mlp {
    /// He-initialized network. `sizes` lists every layer width, input first.
    pub fn new(sizes: &[usize], rng: &mut Prng) -> Self {
        assert!(sizes.len() >= 2, "network needs at least input and output");
        let mut layers = Vec::with_capacity(sizes.len() - 1);
        for win in sizes.windows(2) {
            let (cols, rows) = (win[0], win[1]);
            let scale = (2.0 / cols as f64).sqrt();
            let w = (0..rows * cols).map(|_| rng.normal() * scale).collect();
            layers.push(Layer {
                w,
                b: vec![0.0; rows],
                rows,
                cols,
            });
        }
        Mlp {
            sizes: sizes.to_vec(),
            layers,
            version: 0,
        }
    }

    /// All-zero parameters (output equals the bias vector, i.e. zero).
    pub fn zeros(sizes: &[usize]) -> Self {
        assert!(sizes.len() >= 2);
        let layers = sizes
            .windows(2)
            .map(|win| Layer {
                w: vec![0.0; win[0] * win[1]],
                b: vec![0.0; win[1]],
                rows: win[1],
                cols: win[0],
            })
            .collect();
        Mlp {
            sizes: sizes.to_vec(),
            layers,
            version: 0,
        }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    /// Mutable walk over every parameter in a fixed order (weights then bias,
    /// layer by layer). Bumps the version: any outstanding cache goes stale.
    pub fn visit_params_mut(&mut self, mut f: impl FnMut(usize, &mut f64)) {
        let mut idx = 0;
        for layer in &mut self.layers {
            for w in &mut layer.w {
                f(idx, w);
                idx += 1;
            }
            for b in &mut layer.b {
                f(idx, b);
                idx += 1;
            }
        }
        self.version += 1;
    }

    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            out.extend_from_slice(&layer.w);
            out.extend_from_slice(&layer.b);
        }
        out
    }

    pub fn set_params_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::shape("set_params_flat", self.param_count(), flat.len()));
        }
        let mut it = flat.iter();
        for layer in &mut self.layers {
            for w in &mut layer.w {
                *w = *it.next().unwrap();
            }
            for b in &mut layer.b {
                *b = *it.next().unwrap();
            }
        }
        self.version += 1;
        Ok(())
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::shape("mlp input", self.input_dim(), x.len()));
        }
        Ok(())
    }

    /// Plain forward pass.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut cur = x.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            cur = layer_forward(layer, &cur, i < last);
        }
        Ok(cur)
    }

    /// Forward pass recording every activation for a later backward pass.
    pub fn forward_cached(&self, x: &[f64], cache: &mut MlpCache) -> Result<&[f64]> {
        self.check_input(x)?;
        cache.version = self.version;
        cache.acts.clear();
        cache.acts.push(x.to_vec());
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let next = layer_forward(layer, cache.acts.last().unwrap(), i < last);
            cache.acts.push(next);
        }
        Ok(cache.acts.last().unwrap())
    }

    /// Reverse pass. Accumulates parameter gradients into `grads` and returns
    /// the gradient of the scalar loss with respect to the network input.
    ///
    /// `upstream` is dLoss/dOutput. Fails if `cache` was built against an
    /// older parameter version.
    pub fn backward(
        &self,
        cache: &MlpCache,
        upstream: &[f64],
        grads: &mut MlpGrads,
    ) -> Result<Vec<f64>> {
        if cache.version != self.version {
            return Err(Error::StaleCache);
        }
        if cache.acts.len() != self.layers.len() + 1 {
            return Err(Error::shape("mlp cache", self.layers.len() + 1, cache.acts.len()));
        }
        if upstream.len() != self.output_dim() {
            return Err(Error::shape("mlp upstream", self.output_dim(), upstream.len()));
        }

        let mut delta = upstream.to_vec();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let input = &cache.acts[i];
            // Hidden layers: gate delta through the rectifier of this layer's output.
            if i < self.layers.len() - 1 {
                let out = &cache.acts[i + 1];
                for (d, &o) in delta.iter_mut().zip(out) {
                    if o <= 0.0 {
                        *d = 0.0;
                    }
                }
            }
            let dw = &mut grads.dw[i];
            let db = &mut grads.db[i];
            for r in 0..layer.rows {
                let d = delta[r];
                db[r] += d;
                let row = r * layer.cols;
                for c in 0..layer.cols {
                    dw[row + c] += d * input[c];
                }
            }
            // dLoss/dInput of this layer
            let mut prev = vec![0.0; layer.cols];
            for r in 0..layer.rows {
                let d = delta[r];
                let row = r * layer.cols;
                for c in 0..layer.cols {
                    prev[c] += d * layer.w[row + c];
                }
            }
            delta = prev;
        }
        Ok(delta)
    }
}

fn layer_forward(layer: &Layer, input: &[f64], relu: bool) -> Vec<f64> {
    let mut out = vec![0.0; layer.rows];
    for r in 0..layer.rows {
        let row = r * layer.cols;
        let mut acc = layer.b[r];
        for c in 0..layer.cols {
            acc += layer.w[row + c] * input[c];
        }
        out[r] = if relu && acc < 0.0 { 0.0 } else { acc };
    }
    out
}
