//! Experiment configuration: named presets plus flat `key = value` overrides.
//!
//! A config file is a TOML document. Top-level keys are `preset`, `topology`,
//! `edges`, `seeds`, `eval_every`, `eval_episodes` and `out_dir`; environment
//! and learner settings use dotted keys such as `env.grid_size = 6` or
//! `learner.lr = 0.001`. Every key is optional and overrides the preset named
//! by `preset` (or `desk-2homo` when absent). Unknown keys are rejected.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dcg::LearnerConfig;
use crate::env::{CaptureMode, EnvConfig};
use crate::error::with_path;
use crate::graph::{Topology, TopologyKind};
use crate::{Error, Result};

pub const DEFAULT_PRESET: &str = "desk-2homo";

pub const PRESETS: &[&str] = &[
    "2homo",
    "2hetero",
    "3homo",
    "3hetero",
    "desk-2homo",
    "desk-2homo-nopenalty",
    "tiny",
    "tiny-nopenalty",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub env: EnvConfig,
    pub learner: LearnerConfig,
    pub topology: TopologyKind,
    /// Edge list for the custom topology; ignored otherwise.
    #[serde(default)]
    pub edges: Vec<(usize, usize)>,
    pub seeds: Vec<u64>,
    pub eval_every: usize,
    pub eval_episodes: usize,
    pub out_dir: PathBuf,
}

fn full_scale(n_predators: usize, subteam: usize, mode: CaptureMode) -> ExperimentConfig {
    let env = EnvConfig {
        n_predators,
        subteam_size: subteam,
        capture_mode: mode,
        ..EnvConfig::default()
    };
    let learner = LearnerConfig {
        max_env_steps: 2_000_000,
        eps_decay_steps: 600_000,
        ..LearnerConfig::default()
    };
    ExperimentConfig {
        env,
        learner,
        topology: TopologyKind::Full,
        edges: Vec::new(),
        seeds: (0..10).collect(),
        eval_every: 20_000,
        eval_episodes: 10,
        out_dir: PathBuf::from("runs"),
    }
}

fn desk(penalty: f64) -> ExperimentConfig {
    ExperimentConfig {
        env: EnvConfig {
            grid_size: 6,
            n_predators: 4,
            n_prey: 2,
            miscapture_penalty: penalty,
            max_steps: 50,
            ..EnvConfig::default()
        },
        learner: LearnerConfig {
            max_env_steps: 60_000,
            eps_decay_steps: 18_000,
            ..LearnerConfig::default()
        },
        eval_every: 6_000,
        ..full_scale(8, 2, CaptureMode::Homogeneous)
    }
}

fn tiny(penalty: f64) -> ExperimentConfig {
    ExperimentConfig {
        env: EnvConfig {
            grid_size: 3,
            n_predators: 2,
            n_prey: 1,
            miscapture_penalty: penalty,
            max_steps: 20,
            obs_window: 3,
            ..EnvConfig::default()
        },
        learner: LearnerConfig {
            max_env_steps: 20_000,
            eps_decay_steps: 6_000,
            ..LearnerConfig::default()
        },
        seeds: vec![0],
        eval_every: 2_000,
        ..full_scale(8, 2, CaptureMode::Homogeneous)
    }
}

impl ExperimentConfig {
    pub fn preset(name: &str) -> Result<ExperimentConfig> {
        let cfg = match name {
            "2homo" => full_scale(8, 2, CaptureMode::Homogeneous),
            "2hetero" => full_scale(8, 2, CaptureMode::Heterogeneous),
            "3homo" => full_scale(9, 3, CaptureMode::Homogeneous),
            "3hetero" => full_scale(9, 3, CaptureMode::Heterogeneous),
            "desk-2homo" => desk(-2.0),
            "desk-2homo-nopenalty" => desk(0.0),
            "tiny" => tiny(-2.0),
            "tiny-nopenalty" => tiny(0.0),
            _ => {
                return Err(Error::Config(format!(
                    "unknown preset {name:?}; available: {}",
                    PRESETS.join(", ")
                )))
            }
        };
        Ok(ExperimentConfig {
            out_dir: PathBuf::from("runs").join(name),
            ..cfg
        })
    }

    /// Parses config text. `preset` overrides the file's own `preset` key.
    pub fn from_toml(text: &str, preset: Option<&str>) -> Result<ExperimentConfig> {
        let mut overrides: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(format!("config syntax: {e}")))?;
        let named = match overrides.remove("preset") {
            Some(toml::Value::String(s)) => Some(s),
            Some(other) => {
                return Err(Error::Config(format!(
                    "preset must be a string, got {other}"
                )))
            }
            None => None,
        };
        let name = preset
            .map(str::to_string)
            .or(named)
            .unwrap_or_else(|| DEFAULT_PRESET.to_string());
        let base = ExperimentConfig::preset(&name)?;
        let mut table = toml::Table::try_from(&base).map_err(|e| Error::Config(e.to_string()))?;
        merge(&mut table, overrides);
        let cfg: ExperimentConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string().trim_end().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, preset: Option<&str>) -> Result<ExperimentConfig> {
        let text = fs::read_to_string(path).map_err(with_path(path))?;
        ExperimentConfig::from_toml(&text, preset)
    }

    /// The fully resolved config, including every default, as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment configs always serialize")
    }

    /// SHA-256 of [`ExperimentConfig::to_toml`], hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn topology(&self) -> Result<Topology> {
        Topology::make(self.topology, self.env.n_predators, Some(&self.edges))
    }

    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        self.learner.validate()?;
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must not be empty".into()));
        }
        if self.seeds.iter().collect::<HashSet<_>>().len() != self.seeds.len() {
            return Err(Error::Config("seeds must be distinct".into()));
        }
        if self.eval_episodes == 0 || self.eval_every == 0 {
            return Err(Error::Config(
                "eval_every and eval_episodes must be at least 1".into(),
            ));
        }
        self.topology().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }
}

fn merge(base: &mut toml::Table, overrides: toml::Table) {
    for (key, value) in overrides {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in PRESETS {
            ExperimentConfig::preset(name).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn full_scale_presets() {
        let c = ExperimentConfig::preset("2homo").unwrap();
        assert_eq!(
            (
                c.env.grid_size,
                c.env.n_predators,
                c.env.n_prey,
                c.env.subteam_size
            ),
            (10, 8, 8, 2)
        );
        assert_eq!(c.env.capture_mode, CaptureMode::Homogeneous);
        assert_eq!(c.env.max_episode_reward(), 40.0);
        let c = ExperimentConfig::preset("3hetero").unwrap();
        assert_eq!(c.env.n_predators, 9);
        assert_eq!(c.env.n_capture_actions(), 3);
        assert_eq!(c.env.max_episode_reward(), 30.0);
    }

    #[test]
    fn overrides_apply_on_top_of_preset() {
        let text =
            "preset = \"tiny\"\nenv.miscapture_penalty = 0.0\nlearner.lr = 0.01\nseeds = [3, 4]\n";
        let c = ExperimentConfig::from_toml(text, None).unwrap();
        assert_eq!(c.env.grid_size, 3);
        assert_eq!(c.env.miscapture_penalty, 0.0);
        assert_eq!(c.learner.lr, 0.01);
        assert_eq!(c.learner.gamma, 0.99);
        assert_eq!(c.seeds, vec![3, 4]);
        let c = ExperimentConfig::from_toml(text, Some("desk-2homo")).unwrap();
        assert_eq!(c.env.grid_size, 6);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "env.grid_sise = 4",
            "bogus = 1",
            "seeds = []",
            "seeds = [1, 1]",
            "eval_episodes = 0",
            "env.miscapture_penalty = 1.0",
            "preset = \"nope\"",
            "topology = \"custom\"\nedges = [[0, 0]]",
            "env.grid_size = ",
        ] {
            let err = ExperimentConfig::from_toml(text, None).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}: {err}");
        }
    }

    #[test]
    fn resolved_config_round_trips() {
        let c = ExperimentConfig::from_toml("topology = \"cycle\"", Some("3homo")).unwrap();
        let back = ExperimentConfig::from_toml(&c.to_toml(), Some("3homo")).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.hash(), back.hash());
        assert_eq!(c.hash().len(), 64);
        assert_ne!(c.hash(), ExperimentConfig::preset("3homo").unwrap().hash());
    }
}
