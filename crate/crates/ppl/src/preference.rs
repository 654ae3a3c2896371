//! Prior-preference models exposing the intuitive reward: either a learned
//! expert-conditional density over the next observation, or a hard-coded
//! global density centered on the task goal.
//!
//! The learned model is conditional, predicting o_next from o_t, because a
//! single stationary density cannot capture local preference: on the
//! mountain-car task the expert first drives away from the goal to build
//! momentum, and only a conditional model can prefer that.

use crate::envs::EnvKind;
use crate::error::{Error, Result};
use crate::numkit::{head_upstream, AdamState, DiagGaussian, Mlp, MlpCache, MlpGrads, Prng};
use crate::trajectory::ExpertDataset;

/// Hidden architecture shared with every other head in the artifact.
pub const DEFAULT_HIDDEN: [usize; 2] = [64, 64];

#[derive(Debug, Clone)]
pub enum PreferenceModel {
    /// Expert-conditional density over the next observation.
    Learned { net: Mlp },
    /// One fixed density over observations, identical at every step.
    Global { dist: DiagGaussian },
}

impl PreferenceModel {
    /// The density this model assigns to the next observation given the
    /// current one (the global variant ignores the conditioning).
    pub fn predict(&self, obs: &[f64]) -> Result<DiagGaussian> {
        match self {
            PreferenceModel::Learned { net } => {
                DiagGaussian::from_head_output(&net.forward(obs)?)
            }
            PreferenceModel::Global { dist } => Ok(dist.clone()),
        }
    }

    pub fn obs_dim(&self) -> usize {
        match self {
            PreferenceModel::Learned { net } => net.input_dim(),
            PreferenceModel::Global { dist } => dist.dim(),
        }
    }

    pub fn is_learned(&self) -> bool {
        matches!(self, PreferenceModel::Learned { .. })
    }
}

/// Log-preference of the realized next observation: the intuitive reward.
/// Depends only on observations, never on actions or latents.
pub fn intuitive_reward(pref: &PreferenceModel, obs: &[f64], next_obs: &[f64]) -> Result<f64> {
    pref.predict(obs)?.log_prob(next_obs)
}

/// Consecutive observation pairs drawn from within single episodes.
#[derive(Debug, Clone)]
pub struct PreferencePairSet {
    pub pairs: Vec<(Vec<f64>, Vec<f64>)>,
    /// Set when the request exceeded the available pairs and sampling fell
    /// back to replacement.
    pub with_replacement: bool,
}

impl PreferencePairSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Sample `n` (o_t, o_next) pairs uniformly from the dataset. Pairs never
/// cross episode boundaries: each recorded transition is one candidate pair,
/// and a terminal-to-initial wraparound is never a transition.
pub fn extract_pairs(dataset: &ExpertDataset, n: usize, rng: &mut Prng) -> Result<PreferencePairSet> {
    let all: Vec<(&Vec<f64>, &Vec<f64>)> = dataset
        .episodes
        .iter()
        .flatten()
        .map(|r| (&r.obs, &r.next_obs))
        .collect();
    if all.is_empty() {
        return Err(Error::InvalidArg(
            "dataset has no transitions to extract pairs from".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidArg("pair count must be > 0".into()));
    }
    let with_replacement = n > all.len();
    let mut pairs = Vec::with_capacity(n);
    if with_replacement {
        for _ in 0..n {
            let (o, o2) = all[rng.usize_below(all.len())];
            pairs.push((o.clone(), o2.clone()));
        }
    } else {
        let mut idx: Vec<usize> = (0..all.len()).collect();
        rng.shuffle(&mut idx);
        for &i in idx.iter().take(n) {
            let (o, o2) = all[i];
            pairs.push((o.clone(), o2.clone()));
        }
    }
    Ok(PreferencePairSet {
        pairs,
        with_replacement,
    })
}

/// Mean Gaussian negative log-likelihood of the pairs under the model.
pub fn avg_nll(pref: &PreferenceModel, pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<f64> {
    let mut acc = 0.0;
    for (o, o2) in pairs {
        acc -= intuitive_reward(pref, o, o2)?;
    }
    Ok(acc / pairs.len() as f64)
}

/// Fit the expert-conditional preference by minimizing the Gaussian NLL of
/// o_next under the head's prediction from o_t. Minibatch Adam; deterministic
/// under the seed.
pub fn train_preference(
    pairs: &PreferencePairSet,
    epochs: usize,
    rng: &mut Prng,
) -> Result<PreferenceModel> {
    if pairs.is_empty() {
        return Err(Error::InvalidArg("cannot train preference on empty pairs".into()));
    }
    let obs_dim = pairs.pairs[0].0.len();
    let mut sizes = vec![obs_dim];
    sizes.extend_from_slice(&DEFAULT_HIDDEN);
    sizes.push(2 * obs_dim);
    let mut net = Mlp::new(&sizes, rng);
    let mut adam = AdamState::new(net.param_count());
    let mut grads = MlpGrads::zeros_like(&net);
    let mut cache = MlpCache::default();
    let batch = 64.min(pairs.len());
    let mut order: Vec<usize> = (0..pairs.len()).collect();

    for _ in 0..epochs {
        rng.shuffle(&mut order);
        for chunk in order.chunks(batch) {
            grads.reset();
            for &i in chunk {
                let (o, o2) = &pairs.pairs[i];
                let out = net.forward_cached(o, &mut cache)?.to_vec();
                let g = DiagGaussian::from_head_output(&out)?;
                let (dm, dlv) = g.log_prob_grads(o2);
                // NLL gradients, averaged over the chunk
                let scale = -1.0 / chunk.len() as f64;
                let dm: Vec<f64> = dm.iter().map(|x| x * scale).collect();
                let dlv: Vec<f64> = dlv.iter().map(|x| x * scale).collect();
                let up = head_upstream(&out, &dm, &dlv);
                net.backward(&cache, &up, &mut grads)?;
            }
            adam.step(&mut net, &grads)?;
        }
    }
    Ok(PreferenceModel::Learned { net })
}

/// Hard-coded global preference: tight on the goal dimensions, broad
/// (uninformative) elsewhere. The two-joint pendulum task is excluded; its
/// goal has no unambiguous observation-space density.
pub fn make_global_preference(kind: EnvKind) -> Result<PreferenceModel> {
    let dist = match kind {
        EnvKind::MountainCar => {
            DiagGaussian::from_mean_std(vec![0.5, 0.0], &[0.05, 10.0])?
        }
        EnvKind::CartPole => {
            DiagGaussian::from_mean_std(vec![0.0; 4], &[2.4, 10.0, 0.05, 10.0])?
        }
        EnvKind::Acrobot => {
            return Err(Error::UnsupportedEnv(
                "acrobot: no global preference is defined for this environment".into(),
            ))
        }
    };
    Ok(PreferenceModel::Global { dist })
}
