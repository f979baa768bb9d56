//! Synchronized Predator-Prey gridworld.
//!
//! Predators move on a square grid and must capture prey by playing capture
//! actions in the same timestep as enough teammates. A capture attempt by too
//! few predators costs the whole team the miscapture penalty.
//!
//! One timestep resolves in a fixed order:
//!
//! 1. captures, using start-of-step positions, prey in ascending index;
//! 2. predator moves in ascending agent index, blocked moves become `Stay`;
//! 3. each live prey moves to a uniformly chosen open 4-adjacent cell, or
//!    stays put when boxed in.
//!
//! The pure functions in this module ([`available_actions`], [`observe`],
//! [`resolve_predators`], [`prey_moves`]) define the dynamics; [`GridEnv`]
//! adds the random stream and episode bookkeeping on top of them.

use std::fmt;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::seed::{self, Rng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaptureMode {
    Homogeneous,
    Heterogeneous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvConfig {
    pub grid_size: usize,
    pub n_predators: usize,
    pub n_prey: usize,
    /// Predators required per capture.
    pub subteam_size: usize,
    pub capture_mode: CaptureMode,
    pub capture_reward: f64,
    pub miscapture_penalty: f64,
    pub max_steps: usize,
    #[serde(default = "default_obs_window")]
    pub obs_window: usize,
}

fn default_obs_window() -> usize {
    5
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            grid_size: 10,
            n_predators: 8,
            n_prey: 8,
            subteam_size: 2,
            capture_mode: CaptureMode::Homogeneous,
            capture_reward: 10.0,
            miscapture_penalty: -2.0,
            max_steps: 200,
            obs_window: 5,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.grid_size == 0 {
            return fail("grid_size must be positive".into());
        }
        if self.n_predators == 0 || self.n_prey == 0 {
            return fail("n_predators and n_prey must be positive".into());
        }
        if self.subteam_size < 2 {
            return fail(format!(
                "subteam_size must be at least 2, got {}",
                self.subteam_size
            ));
        }
        if !self.n_predators.is_multiple_of(self.subteam_size) {
            return fail(format!(
                "n_predators ({}) is not divisible by subteam_size ({})",
                self.n_predators, self.subteam_size
            ));
        }
        if self.n_prey < self.n_subteams() {
            return fail(format!(
                "n_prey ({}) is smaller than the number of sub-teams ({})",
                self.n_prey,
                self.n_subteams()
            ));
        }
        if self.max_steps == 0 {
            return fail("max_steps must be positive".into());
        }
        if self.obs_window == 0 || self.obs_window.is_multiple_of(2) {
            return fail(format!(
                "obs_window must be odd and positive, got {}",
                self.obs_window
            ));
        }
        if self.obs_window > self.grid_size {
            return fail(format!(
                "obs_window ({}) is larger than the grid ({})",
                self.obs_window, self.grid_size
            ));
        }
        if !self.capture_reward.is_finite() || !self.miscapture_penalty.is_finite() {
            return fail("rewards must be finite".into());
        }
        if self.miscapture_penalty > 0.0 {
            return fail("miscapture_penalty must be <= 0".into());
        }
        if self.n_capture_actions() > u8::MAX as usize {
            return fail("too many capture actions".into());
        }
        Ok(())
    }

    pub fn n_subteams(&self) -> usize {
        self.n_predators / self.subteam_size
    }

    pub fn n_capture_actions(&self) -> usize {
        match self.capture_mode {
            CaptureMode::Homogeneous => 1,
            CaptureMode::Heterogeneous => self.subteam_size,
        }
    }

    pub fn n_actions(&self) -> usize {
        Action::N_MOVES + self.n_capture_actions()
    }

    pub fn obs_len(&self) -> usize {
        self.obs_window * self.obs_window * 2 + 2
    }

    /// Upper bound on the undiscounted episode return.
    pub fn max_episode_reward(&self) -> f64 {
        self.n_subteams() as f64 * self.capture_reward
    }

    fn contains(&self, row: isize, col: isize) -> bool {
        let g = self.grid_size as isize;
        (0..g).contains(&row) && (0..g).contains(&col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Stay,
    Up,
    Down,
    Left,
    Right,
    Capture(u8),
}

impl Action {
    /// Number of neutral (movement) actions, including `Stay`.
    pub const N_MOVES: usize = 5;

    pub fn index(self) -> usize {
        match self {
            Action::Stay => 0,
            Action::Up => 1,
            Action::Down => 2,
            Action::Left => 3,
            Action::Right => 4,
            Action::Capture(k) => Self::N_MOVES + k as usize,
        }
    }

    pub fn from_index(index: usize) -> Action {
        match index {
            0 => Action::Stay,
            1 => Action::Up,
            2 => Action::Down,
            3 => Action::Left,
            4 => Action::Right,
            k => Action::Capture((k - Self::N_MOVES) as u8),
        }
    }

    pub fn is_sync(self) -> bool {
        matches!(self, Action::Capture(_))
    }

    fn delta(self) -> Option<(isize, isize)> {
        match self {
            Action::Up => Some((-1, 0)),
            Action::Down => Some((1, 0)),
            Action::Left => Some((0, -1)),
            Action::Right => Some((0, 1)),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Stay => f.write_str("Stay"),
            Action::Up => f.write_str("Up"),
            Action::Down => f.write_str("Down"),
            Action::Left => f.write_str("Left"),
            Action::Right => f.write_str("Right"),
            Action::Capture(k) => write!(f, "Capture{k}"),
        }
    }
}

impl std::str::FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Action> {
        Ok(match s {
            "Stay" => Action::Stay,
            "Up" => Action::Up,
            "Down" => Action::Down,
            "Left" => Action::Left,
            "Right" => Action::Right,
            _ => {
                let k = s
                    .strip_prefix("Capture")
                    .and_then(|k| k.parse::<u8>().ok())
                    .ok_or_else(|| Error::Format(format!("unknown action {s:?}")))?;
                Action::Capture(k)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pos {
    pub row: usize,
    pub col: usize,
}

impl Pos {
    pub const fn new(row: usize, col: usize) -> Pos {
        Pos { row, col }
    }

    fn offset(self, (dr, dc): (isize, isize)) -> (isize, isize) {
        (self.row as isize + dr, self.col as isize + dc)
    }

    fn is_adjacent(self, other: Pos) -> bool {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col) == 1
    }
}

/// Full environment state. `None` marks a removed predator or captured prey.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridState {
    pub predators: Vec<Option<Pos>>,
    pub prey: Vec<Option<Pos>>,
    pub step: usize,
    pub captures_done: usize,
}

impl GridState {
    fn occupancy(&self, grid_size: usize) -> Vec<bool> {
        let mut occ = vec![false; grid_size * grid_size];
        for p in self.predators.iter().chain(&self.prey).flatten() {
            occ[p.row * grid_size + p.col] = true;
        }
        occ
    }

    /// Checks the structural invariants against a configuration.
    pub fn check(&self, config: &EnvConfig) -> Result<()> {
        if self.predators.len() != config.n_predators || self.prey.len() != config.n_prey {
            return Err(Error::Contract(
                "agent counts do not match the configuration".into(),
            ));
        }
        let mut occ = vec![false; config.grid_size * config.grid_size];
        for p in self.predators.iter().chain(&self.prey).flatten() {
            if p.row >= config.grid_size || p.col >= config.grid_size {
                return Err(Error::Contract(format!("position {p:?} is off the grid")));
            }
            let cell = &mut occ[p.row * config.grid_size + p.col];
            if *cell {
                return Err(Error::Contract(format!("two agents share cell {p:?}")));
            }
            *cell = true;
        }
        let removed = self.predators.iter().filter(|p| p.is_none()).count();
        let captured = self.prey.iter().filter(|p| p.is_none()).count();
        if captured != self.captures_done || removed != self.captures_done * config.subteam_size {
            return Err(Error::Contract(
                "removed/captured counts disagree with captures_done".into(),
            ));
        }
        Ok(())
    }

    pub fn is_terminal(&self, config: &EnvConfig) -> bool {
        self.captures_done >= config.n_subteams() || self.step >= config.max_steps
    }
}

pub type Observation = Vec<f64>;
pub type AvailabilityMask = Vec<bool>;

/// Which actions `agent` may take in `state`.
///
/// Moves off the grid or into any occupied cell are masked, captures need a
/// live prey in the 4-neighbourhood, and a removed predator may only `Stay`.
pub fn available_actions(config: &EnvConfig, state: &GridState, agent: usize) -> AvailabilityMask {
    let mut mask = vec![false; config.n_actions()];
    mask[Action::Stay.index()] = true;
    let Some(pos) = state.predators[agent] else {
        return mask;
    };
    let occ = state.occupancy(config.grid_size);
    for a in [Action::Up, Action::Down, Action::Left, Action::Right] {
        let (r, c) = pos.offset(a.delta().unwrap());
        if config.contains(r, c) && !occ[r as usize * config.grid_size + c as usize] {
            mask[a.index()] = true;
        }
    }
    if state.prey.iter().flatten().any(|&p| p.is_adjacent(pos)) {
        for m in &mut mask[Action::N_MOVES..] {
            *m = true;
        }
    }
    mask
}

/// Local view of `agent`: a predator-id channel and a prey channel over the
/// window centred on the agent, followed by its scaled `(row, col)`.
///
/// Predator cells hold `(id + 1) / n_predators`, prey cells `1`, empty cells
/// `0` and off-grid cells `-1`. Removed predators see all zeros.
pub fn observe(config: &EnvConfig, state: &GridState, agent: usize) -> Observation {
    let w = config.obs_window;
    let mut obs = vec![0.0; config.obs_len()];
    let Some(me) = state.predators[agent] else {
        return obs;
    };
    let g = config.grid_size;
    let mut pred_at = vec![0.0; g * g];
    let mut prey_at = vec![0.0; g * g];
    for (j, p) in state.predators.iter().enumerate() {
        if let (Some(p), true) = (p, j != agent) {
            pred_at[p.row * g + p.col] = (j + 1) as f64 / config.n_predators as f64;
        }
    }
    for p in state.prey.iter().flatten() {
        prey_at[p.row * g + p.col] = 1.0;
    }
    let half = (w / 2) as isize;
    let (pred_ch, rest) = obs.split_at_mut(w * w);
    let (prey_ch, pos_ch) = rest.split_at_mut(w * w);
    for dr in -half..=half {
        for dc in -half..=half {
            let k = ((dr + half) as usize) * w + (dc + half) as usize;
            let (r, c) = me.offset((dr, dc));
            if config.contains(r, c) {
                let cell = r as usize * g + c as usize;
                pred_ch[k] = pred_at[cell];
                prey_ch[k] = prey_at[cell];
            } else {
                pred_ch[k] = -1.0;
                prey_ch[k] = -1.0;
            }
        }
    }
    let scale = if g > 1 { (g - 1) as f64 } else { 1.0 };
    pos_ch[0] = me.row as f64 / scale;
    pos_ch[1] = me.col as f64 / scale;
    obs
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepInfo {
    pub captures: usize,
    pub miscaptures: usize,
}

/// Applies the capture and predator-movement phases of one timestep.
///
/// Returns the intermediate state (prey not yet moved, step counter not yet
/// incremented), the team reward and the capture tally.
pub fn resolve_predators(
    config: &EnvConfig,
    state: &GridState,
    joint: &[Action],
) -> Result<(GridState, f64, StepInfo)> {
    if joint.len() != config.n_predators {
        return Err(Error::Contract(format!(
            "expected {} actions, got {}",
            config.n_predators,
            joint.len()
        )));
    }
    for (i, a) in joint.iter().enumerate() {
        let mask = available_actions(config, state, i);
        if a.index() >= mask.len() || !mask[a.index()] {
            return Err(Error::Contract(format!(
                "action {a} is unavailable for predator {i}"
            )));
        }
    }

    let mut next = state.clone();
    let mut reward = 0.0;
    let mut info = StepInfo::default();
    let mut consumed = vec![false; config.n_predators];

    for prey_idx in 0..state.prey.len() {
        let Some(prey_pos) = state.prey[prey_idx] else {
            continue;
        };
        let capturers: Vec<(usize, u8)> = (0..config.n_predators)
            .filter(|&i| !consumed[i])
            .filter_map(|i| match (state.predators[i], joint[i]) {
                (Some(p), Action::Capture(k)) if p.is_adjacent(prey_pos) => Some((i, k)),
                _ => None,
            })
            .collect();
        if capturers.is_empty() {
            continue;
        }
        let team = select_subteam(config, &capturers);
        match team {
            Some(team) => {
                for i in team {
                    consumed[i] = true;
                    next.predators[i] = None;
                }
                next.prey[prey_idx] = None;
                next.captures_done += 1;
                reward += config.capture_reward;
                info.captures += 1;
            }
            None => {
                reward += config.miscapture_penalty;
                info.miscaptures += 1;
            }
        }
    }

    let g = config.grid_size;
    let mut occ = next.occupancy(g);
    for i in 0..config.n_predators {
        let (Some(pos), Some(delta)) = (next.predators[i], joint[i].delta()) else {
            continue;
        };
        let (r, c) = pos.offset(delta);
        if config.contains(r, c) && !occ[r as usize * g + c as usize] {
            occ[pos.row * g + pos.col] = false;
            occ[r as usize * g + c as usize] = true;
            next.predators[i] = Some(Pos::new(r as usize, c as usize));
        }
    }
    Ok((next, reward, info))
}

/// Picks the predators removed by a successful capture, or `None` if the
/// adjacent capturers cannot form a sub-team. `capturers` is sorted by index.
fn select_subteam(config: &EnvConfig, capturers: &[(usize, u8)]) -> Option<Vec<usize>> {
    match config.capture_mode {
        CaptureMode::Homogeneous => (capturers.len() >= config.subteam_size).then(|| {
            capturers[..config.subteam_size]
                .iter()
                .map(|&(i, _)| i)
                .collect()
        }),
        CaptureMode::Heterogeneous => (0..config.subteam_size as u8)
            .map(|k| capturers.iter().find(|&&(_, kk)| kk == k).map(|&(i, _)| i))
            .collect(),
    }
}

/// Open 4-adjacent cells for `prey_idx` given the current positions, in
/// up/down/left/right order. Empty when the prey is captured or boxed in.
pub fn prey_moves(config: &EnvConfig, state: &GridState, prey_idx: usize) -> Vec<Pos> {
    let Some(pos) = state.prey[prey_idx] else {
        return Vec::new();
    };
    let occ = state.occupancy(config.grid_size);
    [Action::Up, Action::Down, Action::Left, Action::Right]
        .into_iter()
        .filter_map(|a| {
            let (r, c) = pos.offset(a.delta().unwrap());
            (config.contains(r, c) && !occ[r as usize * config.grid_size + c as usize])
                .then(|| Pos::new(r as usize, c as usize))
        })
        .collect()
}

/// Result of [`GridEnv::step`].
#[derive(Debug, Clone)]
pub struct Step {
    pub state: GridState,
    pub observations: Vec<Observation>,
    pub masks: Vec<AvailabilityMask>,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

/// A seeded environment instance. Each instance owns an independent random
/// stream, so instances can be moved freely between threads.
#[derive(Debug, Clone)]
pub struct GridEnv {
    config: EnvConfig,
    rng: Rng,
    state: Option<GridState>,
}

impl GridEnv {
    pub fn new(config: EnvConfig, seed: u64) -> Result<GridEnv> {
        config.validate()?;
        Ok(GridEnv {
            config,
            rng: seed::rng(seed, 0),
            state: None,
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn state(&self) -> Option<&GridState> {
        self.state.as_ref()
    }

    /// Places all agents on distinct uniformly random cells.
    pub fn reset(&mut self) -> Result<(GridState, Vec<Observation>, Vec<AvailabilityMask>)> {
        let cfg = &self.config;
        let n_agents = cfg.n_predators + cfg.n_prey;
        let n_cells = cfg.grid_size * cfg.grid_size;
        if n_agents > n_cells {
            return Err(Error::Config(format!(
                "{n_agents} agents do not fit on a {0}x{0} grid",
                cfg.grid_size
            )));
        }
        let mut cells: Vec<usize> = (0..n_cells).collect();
        let (picked, _) = cells.partial_shuffle(&mut self.rng, n_agents);
        let to_pos = |c: usize| Some(Pos::new(c / cfg.grid_size, c % cfg.grid_size));
        let state = GridState {
            predators: picked[..cfg.n_predators]
                .iter()
                .map(|&c| to_pos(c))
                .collect(),
            prey: picked[cfg.n_predators..]
                .iter()
                .map(|&c| to_pos(c))
                .collect(),
            step: 0,
            captures_done: 0,
        };
        self.set_state(state.clone())?;
        Ok((state, self.observations(), self.masks()))
    }

    /// Replaces the current state, e.g. with a handcrafted position.
    pub fn set_state(&mut self, state: GridState) -> Result<()> {
        state.check(&self.config)?;
        self.state = Some(state);
        Ok(())
    }

    fn current(&self) -> Result<&GridState> {
        self.state
            .as_ref()
            .ok_or_else(|| Error::Contract("environment has not been reset".into()))
    }

    pub fn observations(&self) -> Vec<Observation> {
        let state = self.state.as_ref().expect("environment has not been reset");
        (0..self.config.n_predators)
            .map(|i| observe(&self.config, state, i))
            .collect()
    }

    pub fn masks(&self) -> Vec<AvailabilityMask> {
        let state = self.state.as_ref().expect("environment has not been reset");
        (0..self.config.n_predators)
            .map(|i| available_actions(&self.config, state, i))
            .collect()
    }

    pub fn step(&mut self, joint: &[Action]) -> Result<Step> {
        let state = self.current()?;
        if state.is_terminal(&self.config) {
            return Err(Error::Contract("episode is over; call reset".into()));
        }
        let (mut next, reward, info) = resolve_predators(&self.config, state, joint)?;
        for prey_idx in 0..next.prey.len() {
            let options = prey_moves(&self.config, &next, prey_idx);
            if let Some(&to) = options.choose(&mut self.rng) {
                next.prey[prey_idx] = Some(to);
            }
        }
        next.step += 1;
        let done = next.is_terminal(&self.config);
        self.state = Some(next.clone());
        Ok(Step {
            state: next,
            observations: self.observations(),
            masks: self.masks(),
            reward,
            done,
            info,
        })
    }

    /// Uniform random available action for every predator, drawn from `rng`.
    pub fn random_joint_action<R: rand::Rng>(&self, rng: &mut R) -> Vec<Action> {
        self.masks()
            .iter()
            .map(|m| {
                let avail: Vec<usize> = (0..m.len()).filter(|&a| m[a]).collect();
                Action::from_index(avail[rng.gen_range(0..avail.len())])
            })
            .collect()
    }
}

/// One character per cell, row-major: predator id digit (base 36, upper
/// case past 9), `p` for prey, `.` for empty.
pub fn render_ascii(state: &GridState, grid_size: usize) -> String {
    let mut grid = vec![vec!['.'; grid_size]; grid_size];
    for (i, p) in state.predators.iter().enumerate() {
        if let Some(p) = p {
            grid[p.row][p.col] = char::from_digit(i as u32 % 36, 36)
                .unwrap()
                .to_ascii_uppercase();
        }
    }
    for p in state.prey.iter().flatten() {
        grid[p.row][p.col] = 'p';
    }
    let lines: Vec<String> = grid
        .into_iter()
        .map(|row| row.into_iter().collect())
        .collect();
    lines.join("\n")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Positions {
    pub predators: Vec<Option<Pos>>,
    pub prey: Vec<Option<Pos>>,
}

/// One line of an episode trace (line-delimited JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    pub positions: Positions,
    pub joint_action: Vec<String>,
    pub reward: f64,
    pub captures: usize,
    pub miscaptures: usize,
    pub done: bool,
}

impl TraceRecord {
    pub fn new(joint: &[Action], step: &Step) -> TraceRecord {
        TraceRecord {
            step: step.state.step,
            positions: Positions {
                predators: step.state.predators.clone(),
                prey: step.state.prey.clone(),
            },
            joint_action: joint.iter().map(|a| a.to_string()).collect(),
            reward: step.reward,
            captures: step.info.captures,
            miscaptures: step.info.miscaptures,
            done: step.done,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(grid: usize, preds: usize, prey: usize, team: usize, mode: CaptureMode) -> EnvConfig {
        EnvConfig {
            grid_size: grid,
            n_predators: preds,
            n_prey: prey,
            subteam_size: team,
            capture_mode: mode,
            obs_window: if grid >= 5 { 5 } else { 1 },
            ..EnvConfig::default()
        }
    }

    fn state(preds: &[(usize, usize)], prey: &[(usize, usize)]) -> GridState {
        GridState {
            predators: preds.iter().map(|&(r, c)| Some(Pos::new(r, c))).collect(),
            prey: prey.iter().map(|&(r, c)| Some(Pos::new(r, c))).collect(),
            step: 0,
            captures_done: 0,
        }
    }

    /// Inverse of `render_ascii` for positions only.
    fn parse_ascii(text: &str, n_predators: usize) -> (Vec<Option<Pos>>, Vec<Pos>) {
        let mut preds = vec![None; n_predators];
        let mut prey = Vec::new();
        for (r, line) in text.lines().enumerate() {
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '.' => {}
                    'p' => prey.push(Pos::new(r, c)),
                    d => preds[d.to_digit(36).unwrap() as usize] = Some(Pos::new(r, c)),
                }
            }
        }
        (preds, prey)
    }

    #[test]
    fn config_examples() {
        assert!(GridEnv::new(cfg(10, 8, 8, 2, CaptureMode::Homogeneous), 0).is_ok());
        assert!(GridEnv::new(cfg(10, 9, 8, 3, CaptureMode::Homogeneous), 0).is_ok());
        assert!(matches!(
            GridEnv::new(cfg(10, 8, 8, 3, CaptureMode::Homogeneous), 0),
            Err(Error::Config(_))
        ));
        let mut wide = cfg(4, 2, 1, 2, CaptureMode::Homogeneous);
        wide.obs_window = 5;
        assert!(matches!(GridEnv::new(wide, 0), Err(Error::Config(_))));
        let mut even = cfg(10, 2, 1, 2, CaptureMode::Homogeneous);
        even.obs_window = 4;
        assert!(matches!(GridEnv::new(even, 0), Err(Error::Config(_))));
    }

    #[test]
    fn capture_action_counts() {
        assert_eq!(cfg(10, 8, 8, 2, CaptureMode::Homogeneous).n_actions(), 6);
        assert_eq!(cfg(10, 8, 8, 2, CaptureMode::Heterogeneous).n_actions(), 7);
        assert_eq!(cfg(10, 9, 8, 3, CaptureMode::Heterogeneous).n_actions(), 8);
        assert_eq!(
            cfg(10, 8, 8, 2, CaptureMode::Homogeneous).max_episode_reward(),
            40.0
        );
        assert_eq!(
            cfg(10, 9, 8, 3, CaptureMode::Homogeneous).max_episode_reward(),
            30.0
        );
    }

    #[test]
    fn reset_is_deterministic_and_distinct() {
        let c = cfg(10, 8, 8, 2, CaptureMode::Homogeneous);
        let (a, ..) = GridEnv::new(c.clone(), 42).unwrap().reset().unwrap();
        let (b, ..) = GridEnv::new(c.clone(), 42).unwrap().reset().unwrap();
        assert_eq!(a, b);
        let mut cells: Vec<Pos> = a
            .predators
            .iter()
            .chain(&a.prey)
            .map(|p| p.unwrap())
            .collect();
        cells.sort();
        cells.dedup();
        assert_eq!(cells.len(), 16);
        assert_eq!(a.step, 0);
        assert_eq!(a.captures_done, 0);
    }

    #[test]
    fn reset_rejects_overfull_grid() {
        let mut env = GridEnv::new(cfg(2, 4, 4, 2, CaptureMode::Homogeneous), 0).unwrap();
        assert!(matches!(env.reset(), Err(Error::Config(_))));
    }

    #[test]
    fn corner_masking() {
        let c = cfg(5, 2, 1, 2, CaptureMode::Homogeneous);
        let s = state(&[(0, 0), (4, 4)], &[(2, 2)]);
        let mask = available_actions(&c, &s, 0);
        let avail: Vec<Action> = (0..mask.len())
            .filter(|&a| mask[a])
            .map(Action::from_index)
            .collect();
        assert_eq!(avail, vec![Action::Stay, Action::Down, Action::Right]);
    }

    #[test]
    fn capture_available_next_to_prey() {
        let c = cfg(5, 2, 1, 2, CaptureMode::Heterogeneous);
        let s = state(&[(0, 1), (4, 4)], &[(0, 0)]);
        let mask = available_actions(&c, &s, 0);
        assert!(mask[Action::Capture(0).index()] && mask[Action::Capture(1).index()]);
        assert!(!mask[Action::Left.index()]);
        let far = available_actions(&c, &s, 1);
        assert!(!far[Action::Capture(0).index()]);
    }

    #[test]
    fn removed_predator_may_only_stay() {
        let c = cfg(5, 2, 1, 2, CaptureMode::Homogeneous);
        let mut s = state(&[(0, 1), (1, 0)], &[(3, 3)]);
        s.predators[0] = None;
        let mask = available_actions(&c, &s, 0);
        assert_eq!(mask.iter().filter(|&&m| m).count(), 1);
        assert!(mask[Action::Stay.index()]);
        assert!(observe(&c, &s, 0).iter().all(|&x| x == 0.0));
    }

    fn corner_env(mode: CaptureMode) -> GridEnv {
        let mut env = GridEnv::new(cfg(5, 2, 1, 2, mode), 3).unwrap();
        env.set_state(state(&[(0, 1), (1, 0)], &[(0, 0)])).unwrap();
        env
    }

    #[test]
    fn synchronized_capture_pays_and_removes() {
        let mut env = corner_env(CaptureMode::Homogeneous);
        let step = env.step(&[Action::Capture(0), Action::Capture(0)]).unwrap();
        assert_eq!(step.reward, 10.0);
        assert_eq!(step.state.predators, vec![None, None]);
        assert_eq!(step.state.prey, vec![None]);
        assert!(step.done);
        assert_eq!(
            step.info,
            StepInfo {
                captures: 1,
                miscaptures: 0
            }
        );
    }

    #[test]
    fn lone_capture_is_penalized() {
        let mut env = corner_env(CaptureMode::Homogeneous);
        let step = env.step(&[Action::Capture(0), Action::Stay]).unwrap();
        assert_eq!(step.reward, -2.0);
        assert!(step.state.predators.iter().all(Option::is_some));
        assert!(step.state.prey[0].is_some());
        assert_eq!(
            step.info,
            StepInfo {
                captures: 0,
                miscaptures: 1
            }
        );
    }

    #[test]
    fn neutral_joint_action_pays_nothing() {
        let mut env = corner_env(CaptureMode::Homogeneous);
        let step = env.step(&[Action::Stay, Action::Stay]).unwrap();
        assert_eq!(step.reward, 0.0);
    }

    #[test]
    fn heterogeneous_needs_distinct_indices() {
        let mut env = corner_env(CaptureMode::Heterogeneous);
        let step = env.step(&[Action::Capture(0), Action::Capture(0)]).unwrap();
        assert_eq!(step.reward, -2.0);
        let mut env = corner_env(CaptureMode::Heterogeneous);
        let step = env.step(&[Action::Capture(1), Action::Capture(0)]).unwrap();
        assert_eq!(step.reward, 10.0);
    }

    #[test]
    fn oversubscribed_capture_removes_lowest_indices() {
        let c = cfg(5, 4, 2, 2, CaptureMode::Homogeneous);
        let mut env = GridEnv::new(c, 0).unwrap();
        env.set_state(state(&[(1, 2), (2, 1), (2, 3), (4, 4)], &[(2, 2), (0, 0)]))
            .unwrap();
        let cap = Action::Capture(0);
        let step = env.step(&[cap, cap, cap, Action::Stay]).unwrap();
        assert_eq!(step.reward, 10.0);
        assert_eq!(step.state.predators[..2], [None, None]);
        assert!(step.state.predators[2].is_some());
        assert_eq!(step.info.miscaptures, 0);
    }

    #[test]
    fn unavailable_action_is_rejected() {
        let mut env = corner_env(CaptureMode::Homogeneous);
        assert!(matches!(
            env.step(&[Action::Up, Action::Stay]),
            Err(Error::Contract(_))
        ));
        assert!(matches!(env.step(&[Action::Stay]), Err(Error::Contract(_))));
    }

    #[test]
    fn later_conflicting_move_becomes_stay() {
        let c = cfg(5, 2, 1, 2, CaptureMode::Homogeneous);
        let mut env = GridEnv::new(c, 0).unwrap();
        env.set_state(state(&[(2, 1), (2, 3)], &[(4, 4)])).unwrap();
        let step = env.step(&[Action::Right, Action::Left]).unwrap();
        assert_eq!(
            step.state.predators,
            vec![Some(Pos::new(2, 2)), Some(Pos::new(2, 3))]
        );
    }

    #[test]
    fn observation_layout() {
        let c = cfg(10, 2, 1, 2, CaptureMode::Homogeneous);
        let s = state(&[(5, 5), (9, 9)], &[(0, 9)]);
        let obs = observe(&c, &s, 0);
        assert_eq!(obs.len(), 52);
        assert!(obs[..50].iter().all(|&x| x == 0.0));
        assert_eq!(obs[50], 5.0 / 9.0);
        assert_eq!(obs[51], 5.0 / 9.0);

        let s = state(&[(5, 5), (6, 7)], &[(4, 5)]);
        let obs = observe(&c, &s, 0);
        // window cell (dr, dc) = (1, 2) -> index 3 * 5 + 4
        assert_eq!(obs[3 * 5 + 4], 2.0 / 2.0);
        assert_eq!(obs[25 + 5 + 2], 1.0);
        assert_eq!(obs[2 * 5 + 2], 0.0, "self is not in the predator channel");
    }

    #[test]
    fn corner_window_clipping_matches_enumeration() {
        let c = cfg(10, 2, 1, 2, CaptureMode::Homogeneous);
        let s = state(&[(0, 0), (9, 9)], &[(9, 0)]);
        let obs = observe(&c, &s, 0);
        let mut expected = 0;
        for dr in -2i32..=2 {
            for dc in -2i32..=2 {
                if dr < 0 || dc < 0 {
                    expected += 1;
                }
            }
        }
        assert_eq!(expected, 16);
        assert_eq!(obs[..25].iter().filter(|&&x| x == -1.0).count(), expected);
        assert_eq!(obs[25..50].iter().filter(|&&x| x == -1.0).count(), expected);
    }

    #[test]
    fn render_examples() {
        let empty = GridState {
            predators: vec![],
            prey: vec![],
            step: 0,
            captures_done: 0,
        };
        assert_eq!(render_ascii(&empty, 3), "...\n...\n...");
        let s = state(&[(1, 2)], &[(0, 0)]);
        let text = render_ascii(&s, 3);
        assert_eq!(text.lines().next().unwrap().chars().next(), Some('p'));
        assert_eq!(text, "p..\n..0\n...");
    }

    #[test]
    fn render_parse_round_trip() {
        let c = cfg(10, 8, 8, 2, CaptureMode::Homogeneous);
        let mut env = GridEnv::new(c, 11).unwrap();
        let (s, ..) = env.reset().unwrap();
        let (preds, mut prey) = parse_ascii(&render_ascii(&s, 10), 8);
        assert_eq!(preds, s.predators);
        let mut expected: Vec<Pos> = s.prey.iter().flatten().copied().collect();
        expected.sort();
        prey.sort();
        assert_eq!(prey, expected);
    }

    #[test]
    fn action_names_round_trip() {
        for i in 0..8 {
            let a = Action::from_index(i);
            assert_eq!(a.index(), i);
            assert_eq!(a.to_string().parse::<Action>().unwrap(), a);
        }
    }
}
