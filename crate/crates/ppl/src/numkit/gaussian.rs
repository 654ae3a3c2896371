//! Diagonal Gaussian densities: the single density type behind the encoder,
//! decoder, transition, and preference heads.

use crate::error::{Error, Result};
use crate::numkit::Prng;

/// Log-variance clamp applied to every network-emitted density. Keeps
/// densities non-degenerate and bounds the epistemic log-ratio.
pub const LOGVAR_MIN: f64 = -6.0;
pub const LOGVAR_MAX: f64 = 4.0;

pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagGaussian {
    pub mean: Vec<f64>,
    pub logvar: Vec<f64>,
}

impl DiagGaussian {
    pub fn new(mean: Vec<f64>, logvar: Vec<f64>) -> Result<Self> {
        if mean.len() != logvar.len() {
            return Err(Error::shape("diag gaussian", mean.len(), logvar.len()));
        }
        if mean.is_empty() {
            return Err(Error::InvalidArg("gaussian dimension must be > 0".into()));
        }
        Ok(DiagGaussian { mean, logvar })
    }

    /// Split a network head output `[mean..., logvar...]` into a density,
    /// clamping the log-variance half. This is the only constructor network
    /// heads go through.
    pub fn from_head_output(out: &[f64]) -> Result<Self> {
        if out.len() % 2 != 0 || out.is_empty() {
            return Err(Error::shape("gaussian head output", out.len() + 1, out.len()));
        }
        let d = out.len() / 2;
        let mean = out[..d].to_vec();
        let logvar = out[d..]
            .iter()
            .map(|&lv| lv.clamp(LOGVAR_MIN, LOGVAR_MAX))
            .collect();
        DiagGaussian::new(mean, logvar)
    }

    /// Hand-built density from mean and per-dimension standard deviations
    /// (used by the hard-coded global preference; no clamp).
    pub fn from_mean_std(mean: Vec<f64>, std: &[f64]) -> Result<Self> {
        if std.iter().any(|&s| s <= 0.0) {
            return Err(Error::InvalidArg("std entries must be > 0".into()));
        }
        let logvar = std.iter().map(|&s| 2.0 * s.ln()).collect();
        DiagGaussian::new(mean, logvar)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Sum over dimensions of the exact Gaussian log density.
    pub fn log_prob(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::shape("gaussian log_prob", self.dim(), x.len()));
        }
        let mut acc = 0.0;
        for i in 0..self.dim() {
            let lv = self.logvar[i];
            let diff = x[i] - self.mean[i];
            acc += -0.5 * LN_2PI - 0.5 * lv - 0.5 * diff * diff * (-lv).exp();
        }
        Ok(acc)
    }

    /// Reparameterized sample mean + exp(logvar/2) * eps.
    pub fn sample(&self, rng: &mut Prng) -> Vec<f64> {
        self.sample_with_noise(rng).0
    }

    /// Sample plus the standard-normal noise that produced it; the noise is
    /// what lets callers chain gradients through the sample,
    /// d sample / d mean = 1 and d sample / d logvar = sample_std * eps / 2.
    pub fn sample_with_noise(&self, rng: &mut Prng) -> (Vec<f64>, Vec<f64>) {
        let eps: Vec<f64> = (0..self.dim()).map(|_| rng.normal()).collect();
        let sample = self
            .mean
            .iter()
            .zip(&self.logvar)
            .zip(&eps)
            .map(|((&m, &lv), &e)| m + (0.5 * lv).exp() * e)
            .collect();
        (sample, eps)
    }

    /// Chain a gradient on a reparameterized sample back to (mean, logvar):
    /// d sample / d mean = 1, d sample / d logvar = 0.5 * std * eps.
    pub fn reparam_grads(&self, eps: &[f64], dsample: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let dmean = dsample.to_vec();
        let dlogvar = dsample
            .iter()
            .zip(&self.logvar)
            .zip(eps)
            .map(|((&ds, &lv), &e)| ds * 0.5 * (0.5 * lv).exp() * e)
            .collect();
        (dmean, dlogvar)
    }

    /// Gradients of `log_prob(x)` with respect to (mean, logvar).
    pub fn log_prob_grads(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut dmean = vec![0.0; self.dim()];
        let mut dlogvar = vec![0.0; self.dim()];
        for i in 0..self.dim() {
            let inv_var = (-self.logvar[i]).exp();
            let diff = x[i] - self.mean[i];
            dmean[i] = diff * inv_var;
            dlogvar[i] = -0.5 + 0.5 * diff * diff * inv_var;
        }
        (dmean, dlogvar)
    }
}

/// Upstream vector for an MLP Gaussian head given loss gradients on
/// (mean, logvar). The logvar half is gated by the clamp: no gradient flows
/// where the raw output sits outside the open clamp interval.
pub fn head_upstream(raw_head_out: &[f64], dmean: &[f64], dlogvar: &[f64]) -> Vec<f64> {
    let d = dmean.len();
    let mut up = Vec::with_capacity(2 * d);
    up.extend_from_slice(dmean);
    up.extend(raw_head_out[d..].iter().zip(dlogvar).map(|(&raw, &g)| {
        if raw > LOGVAR_MIN && raw < LOGVAR_MAX {
            g
        } else {
            0.0
        }
    }));
    up
}
