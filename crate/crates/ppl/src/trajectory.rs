//! Trajectory files: UTF-8 JSON Lines, one header object then one line per
//! transition. Numbers round-trip exactly (shortest-representation float
//! serialization both ways).
//!
//! In-file `done` records physics termination; a truncated episode simply
//! ends without it, so episode boundaries are carried by the `ep` field.

use crate::envs::{EnvKind, TransitionRecord};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub const TRAJ_FORMAT: &str = "ppl-traj/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajMetadata {
    /// What produced the data (e.g. "native-dqn-greedy").
    pub generator: String,
    pub mean_return: f64,
    pub seed: u64,
    /// Set by gen-expert when the evaluation target was met.
    #[serde(default)]
    pub reached_target: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    env: String,
    obs_dim: usize,
    n_actions: usize,
    metadata: TrajMetadata,
}

#[derive(Debug, Serialize, Deserialize)]
struct Line {
    ep: usize,
    t: usize,
    obs: Vec<f64>,
    action: Option<usize>,
    next_obs: Vec<f64>,
    reward: f64,
    done: bool,
}

/// Expert (or agent-generated) episodes for one environment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertDataset {
    pub env: EnvKind,
    pub episodes: Vec<Vec<TransitionRecord>>,
    pub metadata: TrajMetadata,
}

impl ExpertDataset {
    pub fn new(env: EnvKind, episodes: Vec<Vec<TransitionRecord>>, metadata: TrajMetadata) -> Result<Self> {
        let spec = env.spec();
        for ep in &episodes {
            for rec in ep {
                if rec.obs.len() != spec.obs_dim || rec.next_obs.len() != spec.obs_dim {
                    return Err(Error::shape("trajectory obs", spec.obs_dim, rec.obs.len()));
                }
                if let Some(a) = rec.action {
                    if a >= spec.n_actions {
                        return Err(Error::ActionOutOfRange {
                            action: a,
                            n_actions: spec.n_actions,
                        });
                    }
                }
            }
        }
        Ok(ExpertDataset {
            env,
            episodes,
            metadata,
        })
    }

    pub fn transition_count(&self) -> usize {
        self.episodes.iter().map(|e| e.len()).sum()
    }

    /// True when every transition carries an action.
    pub fn has_actions(&self) -> bool {
        self.episodes.iter().flatten().all(|r| r.action.is_some())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        let spec = self.env.spec();
        let header = Header {
            format: TRAJ_FORMAT.to_string(),
            env: self.env.name().to_string(),
            obs_dim: spec.obs_dim,
            n_actions: spec.n_actions,
            metadata: self.metadata.clone(),
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for (ep, records) in self.episodes.iter().enumerate() {
            for (t, rec) in records.iter().enumerate() {
                let line = Line {
                    ep,
                    t,
                    obs: rec.obs.clone(),
                    action: rec.action,
                    next_obs: rec.next_obs.clone(),
                    reward: rec.reward,
                    done: rec.terminated,
                };
                serde_json::to_writer(&mut w, &line)?;
                w.write_all(b"\n")?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let display = path.display().to_string();
        let file = std::fs::File::open(path).map_err(|_| {
            Error::MissingPrerequisite(format!("trajectory file {display} not found"))
        })?;
        let mut lines = BufReader::new(file).lines();
        let header_line = lines
            .next()
            .ok_or_else(|| Error::Format {
                path: display.clone(),
                message: "empty file".into(),
            })??;
        let header: Header = serde_json::from_str(&header_line).map_err(|e| Error::Format {
            path: display.clone(),
            message: format!("bad header: {e}"),
        })?;
        if header.format != TRAJ_FORMAT {
            return Err(Error::Format {
                path: display.clone(),
                message: format!("unknown format {:?}", header.format),
            });
        }
        let env = EnvKind::parse(&header.env)?;
        let mut episodes: Vec<Vec<TransitionRecord>> = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Line = serde_json::from_str(&line).map_err(|e| Error::Format {
                path: display.clone(),
                message: format!("line {}: {e}", lineno + 2),
            })?;
            if parsed.ep >= episodes.len() {
                episodes.resize_with(parsed.ep + 1, Vec::new);
            }
            episodes[parsed.ep].push(TransitionRecord {
                obs: parsed.obs,
                action: parsed.action,
                next_obs: parsed.next_obs,
                reward: parsed.reward,
                terminated: parsed.done,
            });
        }
        ExpertDataset::new(env, episodes, header.metadata)
    }
}
