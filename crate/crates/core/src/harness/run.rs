//! Multi-seed training runs and their output directory.
//!
//! ```text
//! <out>/config.toml                    resolved config
//! <out>/metrics_seed<S>.csv            one row per training episode
//! <out>/aggregate.csv                  mean/std across seeds at eval checkpoints
//! <out>/summary.json
//! <out>/checkpoints/seed<S>/{utility.sgmlp, payoff.sgmlp, manifest.json}
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::csv::{aggregate, aggregate_csv, mean_std, metrics_csv, parse_metrics_csv, MetricsRow};
use crate::dcg::{train, DcgModel, EvalSchedule};
use crate::env::GridEnv;
use crate::error::with_path;
use crate::graph::TopologyKind;
use crate::{Error, Result};

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "SYNCGRID_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub step: usize,
    pub seed: u64,
    pub topology: TopologyKind,
    pub obs_dim: usize,
    pub n_actions: usize,
    pub hidden: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub final_eval_return: f64,
    pub episodes: usize,
    pub env_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config_hash: String,
    pub topology: TopologyKind,
    pub max_episode_reward: f64,
    pub seeds: Vec<SeedSummary>,
    pub final_eval_mean: f64,
    pub final_eval_std: f64,
}

pub fn metrics_path(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("metrics_seed{seed}.csv"))
}

pub fn checkpoint_dir(out: &Path, seed: u64) -> PathBuf {
    out.join("checkpoints").join(format!("seed{seed}"))
}

/// Worker count: the `SYNCGRID_THREADS` cap if set, else the available
/// parallelism, never more than `jobs`.
pub fn worker_count(jobs: usize) -> Result<usize> {
    let cap = match std::env::var(THREADS_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| {
                Error::Config(format!(
                    "{THREADS_VAR} must be a positive integer, got {v:?}"
                ))
            })?,
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    Ok(cap.min(jobs).max(1))
}

fn write(path: &Path, contents: String) -> Result<()> {
    fs::write(path, contents).map_err(with_path(path))
}

pub fn save_checkpoint(dir: &Path, model: &DcgModel, manifest: &Manifest) -> Result<()> {
    fs::create_dir_all(dir).map_err(with_path(dir))?;
    model.save(dir)?;
    let json = serde_json::to_string_pretty(manifest).map_err(|e| Error::Format(e.to_string()))?;
    write(&dir.join("manifest.json"), json + "\n")?;
    Ok(())
}

pub fn load_checkpoint(dir: &Path) -> Result<(DcgModel, Manifest)> {
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path).map_err(with_path(&path))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("checkpoint manifest: {e}")))?;
    Ok((DcgModel::load(dir)?, manifest))
}

fn run_seed(cfg: &ExperimentConfig, seed: u64, hash: &str) -> Result<SeedSummary> {
    let env_cfg = cfg.env.clone();
    let run = train(
        move |s| GridEnv::new(env_cfg.clone(), s),
        cfg.topology,
        &cfg.learner,
        seed,
        EvalSchedule {
            every: cfg.eval_every,
            episodes: cfg.eval_episodes,
        },
    )?;
    let rows: Vec<MetricsRow> = run
        .episodes
        .iter()
        .map(|r| MetricsRow::new(seed, r))
        .collect();
    write(&metrics_path(&cfg.out_dir, seed), metrics_csv(&rows))?;
    let manifest = Manifest {
        config_hash: hash.to_string(),
        step: run.env_steps,
        seed,
        topology: cfg.topology,
        obs_dim: run.model.obs_dim(),
        n_actions: run.model.n_actions(),
        hidden: cfg.learner.hidden.clone(),
    };
    save_checkpoint(&checkpoint_dir(&cfg.out_dir, seed), &run.model, &manifest)?;
    Ok(SeedSummary {
        seed,
        final_eval_return: run.final_eval_return,
        episodes: run.episodes.len(),
        env_steps: run.env_steps,
    })
}

/// Trains every seed of `cfg` (in a worker pool) and writes all outputs
/// under `cfg.out_dir`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    if cfg.topology == TopologyKind::Custom {
        return Err(Error::Config(
            "custom topologies are not supported for training runs".into(),
        ));
    }
    fs::create_dir_all(&cfg.out_dir).map_err(with_path(&cfg.out_dir))?;
    write(&cfg.out_dir.join("config.toml"), cfg.to_toml())?;
    let hash = cfg.hash();

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<SeedSummary>>>> =
        Mutex::new(cfg.seeds.iter().map(|_| None).collect());
    std::thread::scope(|scope| -> Result<()> {
        for _ in 0..worker_count(cfg.seeds.len())? {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= cfg.seeds.len() {
                    break;
                }
                let outcome = run_seed(cfg, cfg.seeds[k], &hash);
                results.lock().unwrap()[k] = Some(outcome);
            });
        }
        Ok(())
    })?;
    let seeds = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every seed is claimed by a worker"))
        .collect::<Result<Vec<_>>>()?;

    let per_seed = cfg
        .seeds
        .iter()
        .map(|&s| {
            let path = metrics_path(&cfg.out_dir, s);
            parse_metrics_csv(&fs::read_to_string(&path).map_err(with_path(&path))?)
        })
        .collect::<Result<Vec<_>>>()?;
    let agg = aggregate(&per_seed, cfg.eval_every, cfg.learner.max_env_steps);
    write(&cfg.out_dir.join("aggregate.csv"), aggregate_csv(&agg))?;

    let finals: Vec<f64> = seeds.iter().map(|s| s.final_eval_return).collect();
    let (final_eval_mean, final_eval_std) = mean_std(&finals);
    let summary = RunSummary {
        config_hash: hash,
        topology: cfg.topology,
        max_episode_reward: cfg.env.max_episode_reward(),
        seeds,
        final_eval_mean,
        final_eval_std,
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Format(e.to_string()))?;
    write(&cfg.out_dir.join("summary.json"), json + "\n")?;
    Ok(summary)
}

/// [`run`] with the seed list replaced.
pub fn sweep(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<RunSummary> {
    run(&ExperimentConfig {
        seeds: seeds.to_vec(),
        ..cfg.clone()
    })
}
