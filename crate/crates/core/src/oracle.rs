//! Exact Q-values and synchronization-task classification for tiny,
//! fully enumerated models.
//!
//! A model is solved by value iteration from zero. With the optimal values in
//! hand, the joint actions of a state split into three sets:
//!
//! * `neutral`: every agent plays a neutral action;
//! * `plus`: at least two agents play synchronization actions and the joint
//!   action is strictly better than every neutral joint action;
//! * `minus`: at least one agent plays a synchronization action and the joint
//!   action is strictly worse than every neutral joint action.
//!
//! A task is a synchronization task when some state has both `plus` and
//! `minus` non-empty. Ties (within [`TIE_EPS`]) belong to neither.

use std::collections::HashMap;

use serde::Serialize;

use crate::env::{
    available_actions, prey_moves, render_ascii, resolve_predators, Action, EnvConfig, GridState,
    Pos,
};
use crate::{Error, Result};

/// Slack used for the strict comparisons in [`classify`].
pub const TIE_EPS: f64 = 1e-9;
/// Default cap on the number of enumerated states in [`lift_env`].
pub const DEFAULT_STATE_CAP: usize = 2_000_000;
/// Value iteration gives up after this many sweeps.
pub const MAX_ITERATIONS: usize = 1_000_000;
/// Default stopping tolerance (sup-norm change between sweeps).
pub const DEFAULT_TOL: f64 = 1e-12;

/// Explicit model with full observability.
///
/// Transitions are sparse rows `(next_state, probability)` indexed by
/// `[state][joint_action]`. Acting in a terminal state collects its reward
/// and ends the episode. Illegal joint actions keep a placeholder self-loop
/// and are never maximized over.
#[derive(Debug, Clone)]
pub struct TinyDecPomdp {
    pub action_counts: Vec<usize>,
    pub joint_actions: Vec<Vec<usize>>,
    pub labels: Vec<String>,
    pub transitions: Vec<Vec<Vec<(usize, f64)>>>,
    pub rewards: Vec<Vec<f64>>,
    pub legal: Vec<Vec<bool>>,
    pub terminal: Vec<bool>,
    pub initial: Vec<(usize, f64)>,
    pub gamma: f64,
    pub horizon: Option<usize>,
}

/// Lexicographic enumeration of the cartesian product of per-agent actions.
pub fn enumerate_joint_actions(action_counts: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(action_counts.len())];
    for &n in action_counts {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |a| {
                    let mut v = prefix.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out
}

impl TinyDecPomdp {
    /// Single terminal state whose rewards are `payoff(joint)`.
    pub fn one_shot(action_counts: Vec<usize>, payoff: impl Fn(&[usize]) -> f64) -> TinyDecPomdp {
        let joint_actions = enumerate_joint_actions(&action_counts);
        let n = joint_actions.len();
        TinyDecPomdp {
            rewards: vec![joint_actions.iter().map(|j| payoff(j)).collect()],
            transitions: vec![vec![vec![(0, 1.0)]; n]],
            legal: vec![vec![true; n]],
            terminal: vec![true],
            labels: vec!["s0".into()],
            initial: vec![(0, 1.0)],
            gamma: 0.0,
            horizon: None,
            action_counts,
            joint_actions,
        }
    }

    pub fn n_states(&self) -> usize {
        self.labels.len()
    }

    pub fn n_joint(&self) -> usize {
        self.joint_actions.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Contract(m));
        let (ns, nj) = (self.n_states(), self.n_joint());
        if self.joint_actions.len() != self.action_counts.iter().product::<usize>() {
            return bad("joint action list is not the full cartesian product".into());
        }
        if self.transitions.len() != ns
            || self.rewards.len() != ns
            || self.legal.len() != ns
            || self.terminal.len() != ns
        {
            return bad("per-state tables have inconsistent lengths".into());
        }
        if !(0.0..=1.0).contains(&self.gamma) || (self.gamma >= 1.0 && self.horizon.is_none()) {
            return bad(format!(
                "gamma {} needs to be in [0, 1) without a horizon",
                self.gamma
            ));
        }
        for s in 0..ns {
            if self.transitions[s].len() != nj
                || self.rewards[s].len() != nj
                || self.legal[s].len() != nj
            {
                return bad(format!("state {s} has malformed rows"));
            }
            if !self.legal[s].iter().any(|&l| l) {
                return bad(format!("state {s} has no legal joint action"));
            }
            for (a, row) in self.transitions[s].iter().enumerate() {
                let total: f64 = row.iter().map(|&(_, p)| p).sum();
                if (total - 1.0).abs() > 1e-9 || row.iter().any(|&(t, p)| t >= ns || p < 0.0) {
                    return bad(format!("transition row ({s}, {a}) is not a distribution"));
                }
                if !self.rewards[s][a].is_finite() {
                    return bad(format!("reward ({s}, {a}) is not finite"));
                }
            }
        }
        Ok(())
    }

    fn backup(&self, s: usize, a: usize, values: &[f64]) -> f64 {
        if !self.legal[s][a] {
            return f64::NEG_INFINITY;
        }
        let r = self.rewards[s][a];
        if self.terminal[s] {
            return r;
        }
        let future: f64 = self.transitions[s][a]
            .iter()
            .map(|&(t, p)| p * values[t])
            .sum();
        r + self.gamma * future
    }

    /// Expected discounted return of a stochastic joint policy over `horizon`
    /// decisions, starting from the initial distribution. `policy(s)` lists
    /// `(joint_action, probability)` pairs.
    pub fn evaluate_policy(
        &self,
        policy: impl Fn(usize) -> Vec<(usize, f64)>,
        horizon: usize,
    ) -> f64 {
        let pi: Vec<Vec<(usize, f64)>> = (0..self.n_states()).map(policy).collect();
        let mut values = vec![0.0; self.n_states()];
        for _ in 0..horizon {
            values = (0..self.n_states())
                .map(|s| {
                    pi[s]
                        .iter()
                        .map(|&(a, p)| {
                            let r = self.rewards[s][a];
                            if self.terminal[s] {
                                return p * r;
                            }
                            let future: f64 = self.transitions[s][a]
                                .iter()
                                .map(|&(t, q)| q * values[t])
                                .sum();
                            p * (r + self.gamma * future)
                        })
                        .sum()
                })
                .collect();
        }
        self.initial.iter().map(|&(s, p)| p * values[s]).sum()
    }
}

/// Optimal state-action values. Illegal entries hold `-inf`.
#[derive(Debug, Clone)]
pub struct QTable {
    pub values: Vec<Vec<f64>>,
    pub iterations: usize,
    pub residual: f64,
}

impl QTable {
    pub fn state_value(&self, s: usize) -> f64 {
        self.values[s]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Value iteration from zero until the sup-norm change drops below `tol`, or
/// exactly `horizon` backups when the model has a finite horizon.
pub fn exact_q(model: &TinyDecPomdp, tol: f64) -> Result<QTable> {
    model.validate()?;
    let (ns, nj) = (model.n_states(), model.n_joint());
    let mut values = vec![0.0; ns];
    let mut q = vec![vec![0.0; nj]; ns];
    let limit = model.horizon.unwrap_or(MAX_ITERATIONS);
    let mut residual = f64::INFINITY;
    for it in 1..=limit {
        residual = 0.0f64;
        for s in 0..ns {
            for a in 0..nj {
                let new = model.backup(s, a, &values);
                if new.is_finite() {
                    residual = residual.max((new - q[s][a]).abs());
                }
                q[s][a] = new;
            }
        }
        for s in 0..ns {
            values[s] = q[s].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        }
        if model.horizon.is_none() && residual < tol {
            return Ok(QTable {
                values: q,
                iterations: it,
                residual,
            });
        }
    }
    if model.horizon.is_some() {
        return Ok(QTable {
            values: q,
            iterations: limit,
            residual,
        });
    }
    Err(Error::Numeric(format!(
        "value iteration did not reach tolerance {tol} in {MAX_ITERATIONS} sweeps (residual {residual})"
    )))
}

/// Per-agent split of the action set into synchronization and neutral actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partitioning {
    sync: Vec<Vec<bool>>,
}

impl Partitioning {
    pub fn new(sync: Vec<Vec<bool>>) -> Partitioning {
        Partitioning { sync }
    }

    pub fn from_fn(
        action_counts: &[usize],
        is_sync: impl Fn(usize, usize) -> bool,
    ) -> Partitioning {
        Partitioning {
            sync: action_counts
                .iter()
                .enumerate()
                .map(|(i, &n)| (0..n).map(|a| is_sync(i, a)).collect())
                .collect(),
        }
    }

    pub fn is_sync(&self, agent: usize, action: usize) -> bool {
        self.sync[agent][action]
    }

    pub fn sync_count(&self, joint: &[usize]) -> usize {
        joint
            .iter()
            .enumerate()
            .filter(|&(i, &a)| self.sync[i][a])
            .count()
    }

    fn check(&self, model: &TinyDecPomdp) -> Result<()> {
        let shape: Vec<usize> = self.sync.iter().map(Vec::len).collect();
        if shape != model.action_counts {
            return Err(Error::Contract(format!(
                "partitioning shape {shape:?} does not match action counts {:?}",
                model.action_counts
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StateClassification {
    pub neutral: Vec<usize>,
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
}

/// Splits the legal joint actions of `state` into neutral, positive and
/// negative synchronization sets. With no legal all-neutral joint action both
/// synchronization sets are empty.
pub fn classify(
    model: &TinyDecPomdp,
    q: &QTable,
    state: usize,
    partitioning: &Partitioning,
) -> Result<StateClassification> {
    partitioning.check(model)?;
    let mut out = StateClassification::default();
    let legal: Vec<usize> = (0..model.n_joint())
        .filter(|&a| model.legal[state][a])
        .collect();
    out.neutral = legal
        .iter()
        .copied()
        .filter(|&a| partitioning.sync_count(&model.joint_actions[a]) == 0)
        .collect();
    if out.neutral.is_empty() {
        return Ok(out);
    }
    let qs = &q.values[state];
    let best_neutral = out
        .neutral
        .iter()
        .map(|&a| qs[a])
        .fold(f64::NEG_INFINITY, f64::max);
    let worst_neutral = out
        .neutral
        .iter()
        .map(|&a| qs[a])
        .fold(f64::INFINITY, f64::min);
    for &a in &legal {
        let n_sync = partitioning.sync_count(&model.joint_actions[a]);
        if n_sync >= 2 && qs[a] - best_neutral > TIE_EPS {
            out.plus.push(a);
        }
        if n_sync >= 1 && worst_neutral - qs[a] > TIE_EPS {
            out.minus.push(a);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct MstVerdict {
    pub is_mst: bool,
    /// States with both synchronization sets non-empty, ascending.
    pub witnesses: Vec<usize>,
    pub q: QTable,
}

/// Solves the model and checks every state for the synchronization property.
pub fn is_mst(model: &TinyDecPomdp, partitioning: &Partitioning) -> Result<MstVerdict> {
    partitioning.check(model)?;
    let q = exact_q(model, DEFAULT_TOL)?;
    let mut witnesses = Vec::new();
    for s in 0..model.n_states() {
        let c = classify(model, &q, s, partitioning)?;
        if !c.plus.is_empty() && !c.minus.is_empty() {
            witnesses.push(s);
        }
    }
    Ok(MstVerdict {
        is_mst: !witnesses.is_empty(),
        witnesses,
        q,
    })
}

/// A grid task enumerated into an explicit model, with the bookkeeping
/// needed to map environment states back to model indices.
#[derive(Debug, Clone)]
pub struct LiftedGrid {
    pub config: EnvConfig,
    pub model: TinyDecPomdp,
    pub states: Vec<GridState>,
    index: HashMap<GridState, usize>,
}

impl LiftedGrid {
    /// Model index of an environment state (the step counter is ignored).
    pub fn index_of(&self, state: &GridState) -> Option<usize> {
        let mut key = state.clone();
        key.step = 0;
        self.index.get(&key).copied()
    }

    pub fn joint_names(&self, joint: usize) -> Vec<String> {
        self.model.joint_actions[joint]
            .iter()
            .map(|&a| Action::from_index(a).to_string())
            .collect()
    }

    /// Capture actions are the synchronization actions.
    pub fn capture_partitioning(&self) -> Partitioning {
        Partitioning::from_fn(&self.model.action_counts, |_, a| {
            Action::from_index(a).is_sync()
        })
    }
}

fn falling_factorial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n.saturating_sub(i)))
}

/// Enumerates every state reachable from a random reset and turns the prey's
/// random moves into explicit transition probabilities. The step limit is
/// dropped: the lifted model is stationary and discounted by `gamma`.
pub fn lift_env(config: &EnvConfig, gamma: f64) -> Result<LiftedGrid> {
    lift_env_with_cap(config, gamma, DEFAULT_STATE_CAP)
}

pub fn lift_env_with_cap(config: &EnvConfig, gamma: f64, cap: usize) -> Result<LiftedGrid> {
    config.validate()?;
    let cells = config.grid_size * config.grid_size;
    let n_agents = config.n_predators + config.n_prey;
    if n_agents > cells {
        return Err(Error::Config("agents do not fit on the grid".into()));
    }
    let n_initial = falling_factorial(cells as u128, n_agents as u128);
    if n_initial > cap as u128 {
        return Err(Error::Size(format!(
            "{n_initial} initial placements exceed the state cap of {cap}; use a tiny preset"
        )));
    }
    let action_counts = vec![config.n_actions(); config.n_predators];
    let n_joint = config.n_actions().pow(config.n_predators as u32);
    if n_joint.saturating_mul(n_initial as usize) > cap.saturating_mul(64) {
        return Err(Error::Size(format!(
            "{n_joint} joint actions per state is too many to enumerate"
        )));
    }
    let joint_actions = enumerate_joint_actions(&action_counts);

    let mut states: Vec<GridState> = Vec::new();
    let mut index: HashMap<GridState, usize> = HashMap::new();
    let mut intern = |s: GridState, states: &mut Vec<GridState>| -> Result<usize> {
        if let Some(&i) = index.get(&s) {
            return Ok(i);
        }
        if states.len() >= cap {
            return Err(Error::Size(format!("more than {cap} reachable states")));
        }
        index.insert(s.clone(), states.len());
        states.push(s);
        Ok(states.len() - 1)
    };

    let mut initial = Vec::new();
    let mut placement = Vec::with_capacity(n_agents);
    let mut used = vec![false; cells];
    let mut starts = Vec::new();
    enumerate_placements(config, &mut placement, &mut used, &mut starts);
    let p0 = 1.0 / starts.len() as f64;
    for s in starts {
        let i = intern(s, &mut states)?;
        initial.push((i, p0));
    }

    let mut transitions = Vec::new();
    let mut rewards = Vec::new();
    let mut legal = Vec::new();
    let mut terminal = Vec::new();
    let mut cursor = 0;
    while cursor < states.len() {
        let state = states[cursor].clone();
        let is_terminal = state.captures_done >= config.n_subteams();
        let masks: Vec<Vec<bool>> = (0..config.n_predators)
            .map(|i| available_actions(config, &state, i))
            .collect();
        let mut t_row = Vec::with_capacity(n_joint);
        let mut r_row = Vec::with_capacity(n_joint);
        let mut l_row = Vec::with_capacity(n_joint);
        for joint in &joint_actions {
            let ok = joint.iter().enumerate().all(|(i, &a)| masks[i][a]);
            if !ok || is_terminal {
                t_row.push(vec![(cursor, 1.0)]);
                r_row.push(0.0);
                l_row.push(ok);
                continue;
            }
            let actions: Vec<Action> = joint.iter().map(|&a| Action::from_index(a)).collect();
            let (mid, reward, _) = resolve_predators(config, &state, &actions)?;
            let mut outcomes: Vec<(GridState, f64)> = Vec::new();
            expand_prey(config, mid, 0, 1.0, &mut outcomes);
            let mut row: Vec<(usize, f64)> = Vec::new();
            for (next, p) in outcomes {
                let t = intern(next, &mut states)?;
                match row.iter_mut().find(|(s, _)| *s == t) {
                    Some(entry) => entry.1 += p,
                    None => row.push((t, p)),
                }
            }
            t_row.push(row);
            r_row.push(reward);
            l_row.push(true);
        }
        transitions.push(t_row);
        rewards.push(r_row);
        legal.push(l_row);
        terminal.push(is_terminal);
        cursor += 1;
    }

    let labels = states
        .iter()
        .map(|s| render_ascii(s, config.grid_size))
        .collect();
    let model = TinyDecPomdp {
        action_counts,
        joint_actions,
        labels,
        transitions,
        rewards,
        legal,
        terminal,
        initial,
        gamma,
        horizon: None,
    };
    model.validate()?;
    Ok(LiftedGrid {
        config: config.clone(),
        model,
        states,
        index,
    })
}

fn enumerate_placements(
    config: &EnvConfig,
    placement: &mut Vec<Pos>,
    used: &mut [bool],
    out: &mut Vec<GridState>,
) {
    let g = config.grid_size;
    if placement.len() == config.n_predators + config.n_prey {
        let (preds, prey) = placement.split_at(config.n_predators);
        out.push(GridState {
            predators: preds.iter().copied().map(Some).collect(),
            prey: prey.iter().copied().map(Some).collect(),
            step: 0,
            captures_done: 0,
        });
        return;
    }
    for cell in 0..g * g {
        if used[cell] {
            continue;
        }
        used[cell] = true;
        placement.push(Pos::new(cell / g, cell % g));
        enumerate_placements(config, placement, used, out);
        placement.pop();
        used[cell] = false;
    }
}

/// Branches over the sequential prey moves, mirroring `GridEnv::step`.
fn expand_prey(
    config: &EnvConfig,
    state: GridState,
    prey_idx: usize,
    prob: f64,
    out: &mut Vec<(GridState, f64)>,
) {
    if prey_idx == state.prey.len() {
        out.push((state, prob));
        return;
    }
    let options = prey_moves(config, &state, prey_idx);
    if options.is_empty() {
        expand_prey(config, state, prey_idx + 1, prob, out);
        return;
    }
    let p = prob / options.len() as f64;
    for to in options {
        let mut next = state.clone();
        next.prey[prey_idx] = Some(to);
        expand_prey(config, next, prey_idx + 1, p, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::CaptureMode;
    use crate::game::MatrixGame;

    fn tiny(penalty: f64) -> EnvConfig {
        EnvConfig {
            grid_size: 3,
            n_predators: 2,
            n_prey: 1,
            subteam_size: 2,
            capture_mode: CaptureMode::Homogeneous,
            capture_reward: 10.0,
            miscapture_penalty: penalty,
            max_steps: 50,
            obs_window: 3,
        }
    }

    fn two_by_two(penalty: f64) -> (TinyDecPomdp, Partitioning) {
        let game = MatrixGame::new(1, 10.0, penalty).unwrap();
        let model = game.to_model();
        let part = Partitioning::from_fn(&model.action_counts, |_, a| a == 1);
        (model, part)
    }

    #[test]
    fn one_shot_q_is_the_payoff_table() {
        let (model, _) = two_by_two(-2.0);
        let q = exact_q(&model, 1e-12).unwrap();
        assert_eq!(q.values[0], vec![0.0, -2.0, -2.0, 10.0]);
    }

    #[test]
    fn chain_matches_geometric_series() {
        // start --(go)--> goal; acting at goal pays 1 and stays there.
        let mut model = TinyDecPomdp {
            action_counts: vec![2],
            joint_actions: enumerate_joint_actions(&[2]),
            labels: vec!["start".into(), "goal".into()],
            transitions: vec![
                vec![vec![(0, 1.0)], vec![(1, 1.0)]],
                vec![vec![(1, 1.0)]; 2],
            ],
            rewards: vec![vec![0.0, 0.0], vec![1.0, 1.0]],
            legal: vec![vec![true; 2]; 2],
            terminal: vec![false, false],
            initial: vec![(0, 1.0)],
            gamma: 0.9,
            horizon: None,
        };
        let q = exact_q(&model, 1e-12).unwrap();
        // V(goal) = 1 / (1 - 0.9) = 10; Q(start, go) = 0.9 * 10.
        assert!((q.values[1][0] - 10.0).abs() < 1e-9);
        assert!((q.values[0][1] - 9.0).abs() < 1e-9);
        assert!((q.values[0][0] - 8.1).abs() < 1e-9);

        model.horizon = Some(2);
        model.gamma = 1.0;
        let q = exact_q(&model, 0.0).unwrap();
        assert_eq!(q.values[0][1], 1.0);
        assert_eq!(q.values[1][0], 2.0);
    }

    #[test]
    fn zero_rewards_give_zero_q() {
        let model = TinyDecPomdp::one_shot(vec![3, 3], |_| 0.0);
        let q = exact_q(&model, 1e-12).unwrap();
        assert!(q.values[0].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bad_rows_are_rejected() {
        let mut model = TinyDecPomdp::one_shot(vec![2], |_| 0.0);
        model.transitions[0][0] = vec![(0, 0.5)];
        assert!(matches!(exact_q(&model, 1e-9), Err(Error::Contract(_))));
        let mut model = TinyDecPomdp::one_shot(vec![2], |_| 0.0);
        model.gamma = 1.0;
        assert!(model.validate().is_err());
    }

    #[test]
    fn classify_two_by_two() {
        let (model, part) = two_by_two(-2.0);
        let q = exact_q(&model, 1e-12).unwrap();
        let c = classify(&model, &q, 0, &part).unwrap();
        // joint index = 2 * a0 + a1; sync action is 1.
        assert_eq!(c.neutral, vec![0]);
        assert_eq!(c.plus, vec![3]);
        assert_eq!(c.minus, vec![1, 2]);

        let (model, part) = two_by_two(0.0);
        let q = exact_q(&model, 1e-12).unwrap();
        let c = classify(&model, &q, 0, &part).unwrap();
        assert_eq!(c.plus, vec![3]);
        assert!(c.minus.is_empty());
    }

    #[test]
    fn empty_sync_sets_classify_nothing() {
        let (model, _) = two_by_two(-2.0);
        let q = exact_q(&model, 1e-12).unwrap();
        let none = Partitioning::from_fn(&model.action_counts, |_, _| false);
        let c = classify(&model, &q, 0, &none).unwrap();
        assert_eq!(c.neutral.len(), 4);
        assert!(c.plus.is_empty() && c.minus.is_empty());
    }

    #[test]
    fn mismatched_partitioning_is_rejected() {
        let (model, _) = two_by_two(-2.0);
        let q = exact_q(&model, 1e-12).unwrap();
        let wrong = Partitioning::new(vec![vec![false, true, false], vec![false, true]]);
        assert!(matches!(
            classify(&model, &q, 0, &wrong),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn single_agent_is_never_mst() {
        let model = TinyDecPomdp::one_shot(vec![2], |j| if j[0] == 1 { -5.0 } else { 0.0 });
        let part = Partitioning::from_fn(&[2], |_, a| a == 1);
        assert!(!is_mst(&model, &part).unwrap().is_mst);
    }

    #[test]
    fn lifted_tiny_grid_counts() {
        let lifted = lift_env(&tiny(-2.0), 0.99).unwrap();
        assert_eq!(lifted.model.initial.len(), 9 * 8 * 7);
        assert!(lifted.model.n_states() <= 9 * 8 * 7 + 1);
        assert_eq!(lifted.model.terminal.iter().filter(|&&t| t).count(), 1);
        assert_eq!(lifted.model.n_joint(), 36);
    }

    #[test]
    fn full_task_exceeds_cap() {
        let full = EnvConfig::default();
        assert!(matches!(lift_env(&full, 0.99), Err(Error::Size(_))));
    }

    #[test]
    fn tiny_grid_mst_depends_on_penalty() {
        let lifted = lift_env(&tiny(-2.0), 0.99).unwrap();
        let verdict = is_mst(&lifted.model, &lifted.capture_partitioning()).unwrap();
        assert!(verdict.is_mst);
        assert!(!verdict.witnesses.is_empty());

        let lifted = lift_env(&tiny(0.0), 0.99).unwrap();
        let verdict = is_mst(&lifted.model, &lifted.capture_partitioning()).unwrap();
        assert!(!verdict.is_mst);
    }
}
