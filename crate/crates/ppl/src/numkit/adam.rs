//! Bias-corrected adaptive first-order optimizer.

use crate::error::{Error, Result};
use crate::numkit::mlp::{Mlp, MlpGrads};

pub const DEFAULT_LR: f64 = 1e-3;
pub const DEFAULT_BETA1: f64 = 0.9;
pub const DEFAULT_BETA2: f64 = 0.999;
pub const DEFAULT_EPS: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamState {
    pub fn new(param_count: usize) -> Self {
        Self::with_lr(param_count, DEFAULT_LR)
    }

    pub fn with_lr(param_count: usize, lr: f64) -> Self {
        AdamState {
            lr,
            beta1: DEFAULT_BETA1,
            beta2: DEFAULT_BETA2,
            eps: DEFAULT_EPS,
            step: 0,
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// One update of `net` in place. Gradient order must match the network's
    /// parameter walk, which holds whenever `grads` came from the same net.
    pub fn step(&mut self, net: &mut Mlp, grads: &MlpGrads) -> Result<()> {
        let flat = grads.flat();
        if flat.len() != self.m.len() {
            return Err(Error::shape("adam step", self.m.len(), flat.len()));
        }
        self.step += 1;
        let t = self.step as f64;
        let bc1 = 1.0 - self.beta1.powf(t);
        let bc2 = 1.0 - self.beta2.powf(t);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.eps);
        let (m, v) = (&mut self.m, &mut self.v);
        net.visit_params_mut(|i, p| {
            let g = flat[i];
            m[i] = b1 * m[i] + (1.0 - b1) * g;
            v[i] = b2 * v[i] + (1.0 - b2) * g * g;
            let m_hat = m[i] / bc1;
            let v_hat = v[i] / bc2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
        });
        Ok(())
    }
}
