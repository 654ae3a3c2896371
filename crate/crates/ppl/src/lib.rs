//! Preference-driven reinforcement learning on classic control tasks.
//!
//! The crate learns a prior preference over observations from expert
//! trajectories, turns it into per-step rewards (an intuitive log-preference
//! term plus a clipped epistemic exploration term computed by a latent world
//! model), and trains value-based and policy-gradient agents on those
//! rewards. Inverse-RL baselines (behavioral cloning, tabular maximum-entropy
//! reward recovery) and a seeded experiment runner round out the toolkit.
//!
//! Modules, bottom up:
//!
//! - [`numkit`]: MLPs with reverse-mode gradients, Adam, diagonal Gaussians,
//!   log-sum-exp, and a counter-based deterministic PRNG.
//! - [`envs`]: native cart-pole, mountain-car, and two-link pendulum physics.
//! - [`efemath`]: softmax-optimal action distributions and the expected-free-
//!   energy identities they satisfy, as pure functions.
//! - [`worldmodel`]: encoder / decoder / transition heads, their composed
//!   reconstruction loss, and the epistemic reward.
//! - [`preference`]: learned conditional and hard-coded global preferences.
//! - [`agent`]: the EFE Q-learner with replay and expert-batch mixing, plus
//!   advantage actor-critic and clipped-surrogate variants.
//! - [`baselines`]: behavioral cloning and discretized max-entropy reward
//!   recovery.
//! - [`expcli`]: experiment runner, file formats, checkpoints, SVG plots.
//!
//! See the crate `examples/` directory for one runnable example per
//! capability, and `ppl --help` for the command-line surface.

pub mod agent;
pub mod baselines;
pub mod efemath;
pub mod envs;
pub mod error;
pub mod expcli;
pub mod numkit;
pub mod preference;
pub mod trajectory;
pub mod worldmodel;

pub use error::{Error, Result};
