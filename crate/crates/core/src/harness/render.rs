//! Greedy playback of a checkpoint as ASCII frames plus a JSON-lines trace.

use std::io::Write;
use std::path::Path;

use super::config::ExperimentConfig;
use super::run::load_checkpoint;
use crate::dcg::{greedy_action, Maximizer};
use crate::env::{render_ascii, Action, GridEnv, TraceRecord};
use crate::graph::Topology;
use crate::seed;
use crate::{Error, Result};

const RENDER_STREAM: u64 = 7;

/// Plays one greedy episode. Frames go to `frames`, one JSON trace line per
/// step to `trace`. Returns the trace.
pub fn render(
    checkpoint: &Path,
    cfg: &ExperimentConfig,
    seed: u64,
    frames: &mut dyn Write,
    trace: &mut dyn Write,
) -> Result<Vec<TraceRecord>> {
    cfg.validate()?;
    let (model, manifest) = load_checkpoint(checkpoint)?;
    let (obs_dim, n_actions) = (cfg.env.obs_len(), cfg.env.n_actions());
    if model.obs_dim() != obs_dim || model.n_actions() != n_actions {
        return Err(Error::Config(format!(
            "checkpoint expects {} observation features and {} actions, config has {obs_dim} and {n_actions}",
            model.obs_dim(),
            model.n_actions()
        )));
    }
    if manifest.obs_dim != model.obs_dim() || manifest.n_actions != model.n_actions() {
        return Err(Error::Format(
            "checkpoint manifest disagrees with its networks".into(),
        ));
    }
    let topology = Topology::make(manifest.topology, cfg.env.n_predators, Some(&cfg.edges))?;
    let maximizer = Maximizer::new(
        &topology,
        cfg.learner.max_plus_iterations,
        cfg.learner.exact_max_agents,
    );

    let mut env = GridEnv::new(cfg.env.clone(), seed::derive(seed, RENDER_STREAM))?;
    let (state, mut observations, mut masks) = env.reset()?;
    writeln!(
        frames,
        "step 0\n{}\n",
        render_ascii(&state, cfg.env.grid_size)
    )?;
    let mut records = Vec::new();
    loop {
        let joint = greedy_action(&model, &observations, &masks, &topology, &maximizer)?;
        let actions: Vec<Action> = joint.iter().map(|&a| Action::from_index(a)).collect();
        let step = env.step(&actions)?;
        let record = TraceRecord::new(&actions, &step);
        writeln!(
            frames,
            "step {} reward {} actions {}\n{}\n",
            record.step,
            record.reward,
            record.joint_action.join(" "),
            render_ascii(&step.state, cfg.env.grid_size)
        )?;
        let line = serde_json::to_string(&record).map_err(|e| Error::Format(e.to_string()))?;
        writeln!(trace, "{line}")?;
        records.push(record);
        if step.done {
            break;
        }
        observations = step.observations;
        masks = step.masks;
    }
    Ok(records)
}
