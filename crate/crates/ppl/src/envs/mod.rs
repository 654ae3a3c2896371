//! Native implementations of the three classic-control tasks.
//!
//! Physics follow the public reference dynamics (constant tables live next to
//! each integrator). Native rewards are kept for evaluation curves only;
//! training uses preference-based rewards. Step-cap truncation is flagged
//! separately from physics termination: bootstrapped targets treat truncation
//! as non-terminal.

pub mod acrobot;
pub mod cartpole;
pub mod mountain_car;

use crate::error::{Error, Result};
use crate::numkit::Prng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnvKind {
    CartPole,
    MountainCar,
    Acrobot,
}

impl EnvKind {
    pub const ALL: [EnvKind; 3] = [EnvKind::CartPole, EnvKind::MountainCar, EnvKind::Acrobot];

    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "cartpole" | "cartpole-v1" => Ok(EnvKind::CartPole),
            "mountaincar" | "mountaincar-v0" => Ok(EnvKind::MountainCar),
            "acrobot" | "acrobot-v1" => Ok(EnvKind::Acrobot),
            other => Err(Error::UnsupportedEnv(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EnvKind::CartPole => "cartpole",
            EnvKind::MountainCar => "mountaincar",
            EnvKind::Acrobot => "acrobot",
        }
    }

    pub fn spec(&self) -> EnvSpec {
        match self {
            EnvKind::CartPole => EnvSpec {
                kind: *self,
                obs_dim: 4,
                n_actions: 2,
                max_steps: 500,
            },
            EnvKind::MountainCar => EnvSpec {
                kind: *self,
                obs_dim: 2,
                n_actions: 3,
                max_steps: 200,
            },
            EnvKind::Acrobot => EnvSpec {
                kind: *self,
                obs_dim: 6,
                n_actions: 3,
                max_steps: 500,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvSpec {
    pub kind: EnvKind,
    pub obs_dim: usize,
    pub n_actions: usize,
    pub max_steps: usize,
}

/// Result of one environment step.
#[derive(Debug, Clone)]
pub struct Step {
    pub obs: Vec<f64>,
    pub reward: f64,
    /// Physics termination (pole fell, goal reached, tip height cleared).
    pub terminated: bool,
    /// Step-cap truncation.
    pub truncated: bool,
}

impl Step {
    pub fn done(&self) -> bool {
        self.terminated || self.truncated
    }
}

enum Physics {
    CartPole([f64; 4]),
    MountainCar([f64; 2]),
    Acrobot([f64; 4]),
}

/// A single-owner environment instance.
pub struct ClassicEnv {
    spec: EnvSpec,
    physics: Physics,
    steps: usize,
    finished: bool,
}

impl ClassicEnv {
    pub fn new(kind: EnvKind) -> Self {
        let physics = match kind {
            EnvKind::CartPole => Physics::CartPole([0.0; 4]),
            EnvKind::MountainCar => Physics::MountainCar([0.0; 2]),
            EnvKind::Acrobot => Physics::Acrobot([0.0; 4]),
        };
        ClassicEnv {
            spec: kind.spec(),
            physics,
            steps: 0,
            finished: true,
        }
    }

    pub fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Draw a fresh initial state from the reference initial distribution.
    pub fn reset(&mut self, rng: &mut Prng) -> Vec<f64> {
        self.steps = 0;
        self.finished = false;
        match &mut self.physics {
            Physics::CartPole(s) => {
                let b = cartpole::consts::RESET_BOUND;
                for x in s.iter_mut() {
                    *x = rng.uniform_in(-b, b);
                }
            }
            Physics::MountainCar(s) => {
                s[0] = rng.uniform_in(mountain_car::consts::RESET_LOW, mountain_car::consts::RESET_HIGH);
                s[1] = 0.0;
            }
            Physics::Acrobot(s) => {
                let b = acrobot::consts::RESET_BOUND;
                for x in s.iter_mut() {
                    *x = rng.uniform_in(-b, b);
                }
            }
        }
        self.observe()
    }

    /// Observation derived deterministically from the physical state.
    pub fn observe(&self) -> Vec<f64> {
        match &self.physics {
            Physics::CartPole(s) => s.to_vec(),
            Physics::MountainCar(s) => s.to_vec(),
            Physics::Acrobot(s) => acrobot::observe(s),
        }
    }

    pub fn step(&mut self, action: usize) -> Result<Step> {
        if self.finished {
            return Err(Error::EpisodeFinished);
        }
        if action >= self.spec.n_actions {
            return Err(Error::ActionOutOfRange {
                action,
                n_actions: self.spec.n_actions,
            });
        }
        self.steps += 1;
        let (reward, terminated) = match &mut self.physics {
            Physics::CartPole(s) => {
                cartpole::step(s, action);
                (1.0, cartpole::terminated(s))
            }
            Physics::MountainCar(s) => {
                mountain_car::step(s, action);
                (-1.0, mountain_car::terminated(s))
            }
            Physics::Acrobot(s) => {
                acrobot::step(s, action);
                let t = acrobot::terminated(s);
                (if t { 0.0 } else { -1.0 }, t)
            }
        };
        let truncated = !terminated && self.steps >= self.spec.max_steps;
        self.finished = terminated || truncated;
        Ok(Step {
            obs: self.observe(),
            reward,
            terminated,
            truncated,
        })
    }
}

/// One environment transition; `action` is optional because expert
/// observation sequences may ship without actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub obs: Vec<f64>,
    pub action: Option<usize>,
    pub next_obs: Vec<f64>,
    pub reward: f64,
    /// Physics termination; truncation is implied by an episode ending
    /// without it.
    pub terminated: bool,
}

/// Reset the environment and run `policy` for up to `horizon` steps (or until
/// done), recording transitions in order. Returns the native episode return.
pub fn rollout(
    env: &mut ClassicEnv,
    policy: &mut dyn FnMut(&[f64], &mut Prng) -> usize,
    rng: &mut Prng,
    horizon: usize,
) -> Result<(Vec<TransitionRecord>, f64)> {
    if horizon > env.spec.max_steps {
        return Err(Error::InvalidArg(format!(
            "horizon {horizon} exceeds episode cap {}",
            env.spec.max_steps
        )));
    }
    let mut records = Vec::new();
    let mut total = 0.0;
    if horizon == 0 {
        return Ok((records, 0.0));
    }
    let mut obs = env.reset(rng);
    for _ in 0..horizon {
        let action = policy(&obs, rng);
        let step = env.step(action)?;
        total += step.reward;
        records.push(TransitionRecord {
            obs: obs.clone(),
            action: Some(action),
            next_obs: step.obs.clone(),
            reward: step.reward,
            terminated: step.terminated,
        });
        obs = step.obs;
        if step.terminated || step.truncated {
            break;
        }
    }
    Ok((records, total))
}
