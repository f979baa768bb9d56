//! MST certification of a configured environment through the exact oracle.

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::oracle::{classify, is_mst, lift_env, LiftedGrid};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub state_index: usize,
    /// ASCII rendering of the witness state.
    pub state: String,
    pub neutral: Vec<Vec<String>>,
    pub plus: Vec<Vec<String>>,
    pub minus: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub is_mst: bool,
    pub witness_count: usize,
    pub state_count: usize,
    pub gamma: f64,
    pub value_iterations: usize,
    pub example_witness: Option<WitnessReport>,
}

fn names(lifted: &LiftedGrid, joints: &[usize]) -> Vec<Vec<String>> {
    joints.iter().map(|&j| lifted.joint_names(j)).collect()
}

/// Lifts the environment, solves it exactly and checks the MST conditions
/// with capture actions as the synchronization actions. Uses `learner.gamma`.
pub fn verify(cfg: &ExperimentConfig) -> Result<VerifyReport> {
    cfg.env.validate()?;
    let gamma = cfg.learner.gamma;
    let lifted = lift_env(&cfg.env, gamma)?;
    let partitioning = lifted.capture_partitioning();
    let verdict = is_mst(&lifted.model, &partitioning)?;
    let example_witness = match verdict.witnesses.first() {
        Some(&s) => {
            let c = classify(&lifted.model, &verdict.q, s, &partitioning)?;
            Some(WitnessReport {
                state_index: s,
                state: lifted.model.labels[s].clone(),
                neutral: names(&lifted, &c.neutral),
                plus: names(&lifted, &c.plus),
                minus: names(&lifted, &c.minus),
            })
        }
        None => None,
    };
    Ok(VerifyReport {
        is_mst: verdict.is_mst,
        witness_count: verdict.witnesses.len(),
        state_count: lifted.model.n_states(),
        gamma,
        value_iterations: verdict.q.iterations,
        example_witness,
    })
}
