//! Minimal numeric kernel: feed-forward nets with reverse-mode gradients, an
//! adaptive optimizer, diagonal-Gaussian utilities, stable log-sum-exp, and a
//! seedable deterministic PRNG.

mod adam;
mod gaussian;
mod mlp;
mod prng;

pub use adam::{AdamState, DEFAULT_BETA1, DEFAULT_BETA2, DEFAULT_EPS, DEFAULT_LR};
pub use gaussian::{DiagGaussian, LN_2PI, LOGVAR_MAX, LOGVAR_MIN};
pub use mlp::{Layer, Mlp, MlpCache, MlpGrads};
pub use prng::{
    Prng, STREAM_DATA, STREAM_ENV, STREAM_EXPLORE, STREAM_INIT, STREAM_MODEL,
};

/// Numerically stable log(sum(exp(v))): shift by the max before exponentiating.
pub fn logsumexp(v: &[f64]) -> f64 {
    assert!(!v.is_empty(), "logsumexp of empty slice");
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = v.iter().map(|&x| (x - m).exp()).sum();
    m + sum.ln()
}

/// Shifted softmax over `v`; always sums to 1.
pub fn softmax(v: &[f64]) -> Vec<f64> {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = v.iter().map(|&x| (x - m).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}
