//! Index-based multi-agent environment interface used by the learner, plus
//! the one-shot synchronization matrix game.

use crate::env::{Action, GridEnv};
use crate::oracle::TinyDecPomdp;
use crate::{Error, Result};

/// What the learner sees after a reset or a step.
#[derive(Debug, Clone)]
pub struct TeamStep {
    pub observations: Vec<Vec<f64>>,
    pub masks: Vec<Vec<bool>>,
    pub reward: f64,
    /// Episode over, for any reason.
    pub done: bool,
    /// Episode ended by reaching a terminal state (not by the step limit).
    pub terminal: bool,
    pub captures: usize,
    pub miscaptures: usize,
}

/// Cooperative environment with a shared reward and integer actions.
pub trait TeamEnv {
    fn n_agents(&self) -> usize;
    fn n_actions(&self) -> usize;
    fn obs_dim(&self) -> usize;
    fn reset(&mut self) -> Result<TeamStep>;
    fn step(&mut self, joint: &[usize]) -> Result<TeamStep>;
}

impl TeamEnv for GridEnv {
    fn n_agents(&self) -> usize {
        self.config().n_predators
    }

    fn n_actions(&self) -> usize {
        self.config().n_actions()
    }

    fn obs_dim(&self) -> usize {
        self.config().obs_len()
    }

    fn reset(&mut self) -> Result<TeamStep> {
        let (_, observations, masks) = GridEnv::reset(self)?;
        Ok(TeamStep {
            observations,
            masks,
            reward: 0.0,
            done: false,
            terminal: false,
            captures: 0,
            miscaptures: 0,
        })
    }

    fn step(&mut self, joint: &[usize]) -> Result<TeamStep> {
        let actions: Vec<Action> = joint.iter().map(|&a| Action::from_index(a)).collect();
        let step = GridEnv::step(self, &actions)?;
        let terminal = step.state.captures_done >= self.config().n_subteams();
        Ok(TeamStep {
            observations: step.observations,
            masks: step.masks,
            reward: step.reward,
            done: step.done,
            terminal,
            captures: step.info.captures,
            miscaptures: step.info.miscaptures,
        })
    }
}

/// Two-agent one-shot game. Each agent has `n_neutral` neutral actions
/// followed by one synchronization action; the team earns `sync_reward` when
/// both synchronize, `penalty` when exactly one does and `0` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame {
    pub n_neutral: usize,
    pub sync_reward: f64,
    pub penalty: f64,
}

impl MatrixGame {
    pub fn new(n_neutral: usize, sync_reward: f64, penalty: f64) -> Result<MatrixGame> {
        if n_neutral == 0 {
            return Err(Error::Config(
                "matrix game needs at least one neutral action".into(),
            ));
        }
        Ok(MatrixGame {
            n_neutral,
            sync_reward,
            penalty,
        })
    }

    pub fn sync_action(&self) -> usize {
        self.n_neutral
    }

    pub fn payoff(&self, a: usize, b: usize) -> f64 {
        match (a == self.sync_action(), b == self.sync_action()) {
            (true, true) => self.sync_reward,
            (false, false) => 0.0,
            _ => self.penalty,
        }
    }

    /// The game as a single-state model that ends after one step.
    pub fn to_model(&self) -> TinyDecPomdp {
        let n = self.n_neutral + 1;
        TinyDecPomdp::one_shot(vec![n, n], |joint| self.payoff(joint[0], joint[1]))
    }
}

/// Playable instance of a [`MatrixGame`]; every observation is the constant `[1.0]`.
#[derive(Debug, Clone)]
pub struct MatrixGameEnv {
    game: MatrixGame,
    finished: bool,
}

impl MatrixGameEnv {
    pub fn new(game: MatrixGame) -> MatrixGameEnv {
        MatrixGameEnv {
            game,
            finished: true,
        }
    }

    fn view(&self, reward: f64, done: bool) -> TeamStep {
        TeamStep {
            observations: vec![vec![1.0]; 2],
            masks: vec![vec![true; self.game.n_neutral + 1]; 2],
            reward,
            done,
            terminal: done,
            captures: 0,
            miscaptures: 0,
        }
    }
}

impl TeamEnv for MatrixGameEnv {
    fn n_agents(&self) -> usize {
        2
    }

    fn n_actions(&self) -> usize {
        self.game.n_neutral + 1
    }

    fn obs_dim(&self) -> usize {
        1
    }

    fn reset(&mut self) -> Result<TeamStep> {
        self.finished = false;
        Ok(self.view(0.0, false))
    }

    fn step(&mut self, joint: &[usize]) -> Result<TeamStep> {
        if self.finished {
            return Err(Error::Contract("episode is over; call reset".into()));
        }
        if joint.len() != 2 || joint.iter().any(|&a| a > self.game.n_neutral) {
            return Err(Error::Contract(format!("invalid joint action {joint:?}")));
        }
        self.finished = true;
        let reward = self.game.payoff(joint[0], joint[1]);
        let (a, b) = (
            joint[0] == self.game.sync_action(),
            joint[1] == self.game.sync_action(),
        );
        let mut step = self.view(reward, true);
        step.captures = usize::from(a && b);
        step.miscaptures = usize::from(a != b);
        Ok(step)
    }
}
