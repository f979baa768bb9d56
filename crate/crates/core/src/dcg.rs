//! Factorized deep Q-learning on a coordination graph.
//!
//! A shared utility network maps each agent's observation to one value per
//! action; a shared payoff network maps an observation pair to an
//! `|A| x |A|` matrix. Edge payoffs are symmetrized,
//!
//! ```text
//! f_ij(a_i, a_j) = ( P(o_i, o_j)[a_i, a_j] + P(o_j, o_i)[a_j, a_i] ) / 2
//! ```
//!
//! so the direction of an edge does not matter. Greedy joint actions come
//! from Max-Plus over the resulting [`FactorizedQ`]. Training regresses
//! `q_tot(o, a)` onto `r + gamma * q_tot_target(o', a*)` with uniform replay
//! and a periodically synchronized target network. With the empty topology
//! the model reduces to a sum of independent utilities.

use std::collections::VecDeque;
use std::path::Path;

use ndarray::{Array2, ArrayView2};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::game::TeamEnv;
use crate::graph::{
    brute_force_argmax, max_plus, q_tot_unchecked, FactorizedQ, Topology, TopologyKind, UNAVAILABLE,
};
use crate::nn::{mlp_init, opt_step, Gradients, Mlp, OptState};
use crate::seed::{self, Rng};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerConfig {
    pub gamma: f64,
    pub lr: f64,
    pub eps_start: f64,
    pub eps_end: f64,
    pub eps_decay_steps: usize,
    pub replay_capacity: usize,
    pub batch_size: usize,
    pub target_sync_every: usize,
    pub train_start: usize,
    /// Environment steps between gradient steps.
    pub train_every: usize,
    pub max_env_steps: usize,
    pub max_plus_iterations: usize,
    /// Bootstrap maximization is exhaustive up to this many agents.
    pub exact_max_agents: usize,
    pub hidden: Vec<usize>,
    pub grad_clip: f64,
    pub init_scale: f64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            gamma: 0.99,
            lr: 5e-4,
            eps_start: 1.0,
            eps_end: 0.05,
            eps_decay_steps: 60_000,
            replay_capacity: 50_000,
            batch_size: 32,
            target_sync_every: 2_000,
            train_start: 1_000,
            train_every: 1,
            max_env_steps: 200_000,
            max_plus_iterations: 8,
            exact_max_agents: 4,
            hidden: vec![64, 64],
            grad_clip: 10.0,
            init_scale: 1.0,
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if !(0.0..1.0).contains(&self.gamma) {
            return fail("learner.gamma must be in [0, 1)");
        }
        if !(0.0..=1.0).contains(&self.eps_start) || !(0.0..=1.0).contains(&self.eps_end) {
            return fail("epsilon values must be in [0, 1]");
        }
        if !(self.lr > 0.0) || !self.lr.is_finite() {
            return fail("learner.lr must be positive");
        }
        if self.replay_capacity == 0
            || self.batch_size == 0
            || self.target_sync_every == 0
            || self.train_every == 0
            || self.max_env_steps == 0
            || self.max_plus_iterations == 0
        {
            return fail("capacities, periods and step counts must be positive");
        }
        if self.hidden.contains(&0) {
            return fail("hidden layer sizes must be positive");
        }
        if !(self.grad_clip > 0.0) {
            return fail("learner.grad_clip must be positive");
        }
        Ok(())
    }

    /// Linear decay from `eps_start` to `eps_end` over `eps_decay_steps`.
    pub fn epsilon(&self, step: usize) -> f64 {
        if self.eps_decay_steps == 0 || step >= self.eps_decay_steps {
            return self.eps_end;
        }
        let frac = step as f64 / self.eps_decay_steps as f64;
        self.eps_start + frac * (self.eps_end - self.eps_start)
    }
}

/// Utility and payoff networks shared by all agents and edges.
#[derive(Debug, Clone, PartialEq)]
pub struct DcgModel {
    pub utility: Mlp,
    pub payoff: Mlp,
    n_actions: usize,
}

impl DcgModel {
    pub fn new(
        obs_dim: usize,
        n_actions: usize,
        hidden: &[usize],
        seed: u64,
        scale: f64,
    ) -> Result<Self> {
        let sizes = |input: usize, output: usize| {
            let mut s = vec![input];
            s.extend_from_slice(hidden);
            s.push(output);
            s
        };
        Ok(DcgModel {
            utility: mlp_init(&sizes(obs_dim, n_actions), seed::derive(seed, 1), scale)?,
            payoff: mlp_init(
                &sizes(2 * obs_dim, n_actions * n_actions),
                seed::derive(seed, 2),
                scale,
            )?,
            n_actions,
        })
    }

    pub fn from_nets(utility: Mlp, payoff: Mlp) -> Result<Self> {
        let n_actions = utility.output_size();
        if payoff.output_size() != n_actions * n_actions
            || payoff.input_size() != 2 * utility.input_size()
        {
            return Err(Error::Contract(
                "utility and payoff networks have incompatible shapes".into(),
            ));
        }
        Ok(DcgModel {
            utility,
            payoff,
            n_actions,
        })
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn obs_dim(&self) -> usize {
        self.utility.input_size()
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        self.utility.save(&dir.join("utility.sgmlp"))?;
        self.payoff.save(&dir.join("payoff.sgmlp"))
    }

    pub fn load(dir: &Path) -> Result<Self> {
        DcgModel::from_nets(
            Mlp::load(&dir.join("utility.sgmlp"))?,
            Mlp::load(&dir.join("payoff.sgmlp"))?,
        )
    }
}

/// Network outputs for a batch of states, before assembly into factors.
struct BatchOutputs {
    /// `(batch * n) x A`
    utilities: Array2<f64>,
    /// `(batch * 2E) x A^2`; row `2(bE + e)` is `P(o_i, o_j)`, the next row `P(o_j, o_i)`.
    payoffs: Array2<f64>,
}

/// Row pairs of the payoff network for `batch` stacked states.
fn edge_pairs(topology: &Topology, batch: usize) -> Vec<(usize, usize)> {
    let n = topology.n_agents();
    let mut pairs = Vec::with_capacity(batch * 2 * topology.edges().len());
    for b in 0..batch {
        for &(i, j) in topology.edges() {
            pairs.push((b * n + i, b * n + j));
            pairs.push((b * n + j, b * n + i));
        }
    }
    pairs
}

fn stack_obs(obs: &[f64], rows: usize, dim: usize) -> Result<ArrayView2<'_, f64>> {
    ArrayView2::from_shape((rows, dim), obs).map_err(|e| Error::Contract(e.to_string()))
}

fn evaluate_batch(
    model: &DcgModel,
    obs: ArrayView2<f64>,
    topology: &Topology,
) -> Result<BatchOutputs> {
    let batch = obs.nrows() / topology.n_agents();
    let utilities = model.utility.forward_batch(obs)?;
    let payoffs = if topology.edges().is_empty() {
        Array2::zeros((0, model.n_actions * model.n_actions))
    } else {
        let pairs = edge_pairs(topology, batch);
        model
            .payoff
            .forward_pairs_cached(obs, &pairs)?
            .output()
            .clone()
    };
    Ok(BatchOutputs { utilities, payoffs })
}

fn assemble(
    out: &BatchOutputs,
    b: usize,
    topology: &Topology,
    n_actions: usize,
    masks: Option<&[Vec<bool>]>,
) -> FactorizedQ {
    let n = topology.n_agents();
    let n_edges = topology.edges().len();
    let utilities = (0..n)
        .map(|i| {
            let row = out.utilities.row(b * n + i);
            (0..n_actions)
                .map(|a| {
                    if masks.is_none_or(|m| m[i][a]) {
                        row[a]
                    } else {
                        UNAVAILABLE
                    }
                })
                .collect()
        })
        .collect();
    let payoffs = (0..n_edges)
        .map(|e| {
            let fwd = out.payoffs.row(2 * (b * n_edges + e));
            let rev = out.payoffs.row(2 * (b * n_edges + e) + 1);
            let mut m = vec![0.0; n_actions * n_actions];
            for ai in 0..n_actions {
                for aj in 0..n_actions {
                    m[ai * n_actions + aj] =
                        0.5 * (fwd[ai * n_actions + aj] + rev[aj * n_actions + ai]);
                }
            }
            m
        })
        .collect();
    FactorizedQ { utilities, payoffs }
}

/// Factors for one state. Masked actions get [`UNAVAILABLE`] utility.
pub fn factorize(
    model: &DcgModel,
    observations: &[Vec<f64>],
    topology: &Topology,
    masks: &[Vec<bool>],
) -> Result<FactorizedQ> {
    let n = topology.n_agents();
    if observations.len() != n || masks.len() != n {
        return Err(Error::Contract(format!(
            "expected {n} observations and masks"
        )));
    }
    if masks.iter().any(|m| m.len() != model.n_actions) {
        return Err(Error::Contract(
            "mask length does not match the action count".into(),
        ));
    }
    let dim = model.obs_dim();
    let flat: Vec<f64> = observations.iter().flatten().copied().collect();
    if flat.len() != n * dim {
        return Err(Error::Contract(format!(
            "observations must have {dim} features"
        )));
    }
    let out = evaluate_batch(model, stack_obs(&flat, n, dim)?, topology)?;
    Ok(assemble(&out, 0, topology, model.n_actions, Some(masks)))
}

/// Settings for greedy joint-action maximization.
#[derive(Debug, Clone, Copy)]
pub struct Maximizer {
    pub iterations: usize,
    pub damping: f64,
    /// Use exhaustive search when the team has at most this many agents.
    pub exact_max_agents: usize,
}

impl Maximizer {
    pub fn new(topology: &Topology, iterations: usize, exact_max_agents: usize) -> Maximizer {
        Maximizer {
            iterations,
            damping: topology.default_damping(),
            exact_max_agents,
        }
    }

    fn max_plus(
        &self,
        fq: &FactorizedQ,
        topology: &Topology,
        masks: &[Vec<bool>],
    ) -> Result<Vec<usize>> {
        Ok(max_plus(fq, topology, Some(masks), self.iterations, self.damping)?.joint_action)
    }

    fn best(
        &self,
        fq: &FactorizedQ,
        topology: &Topology,
        masks: &[Vec<bool>],
    ) -> Result<Vec<usize>> {
        if topology.n_agents() <= self.exact_max_agents {
            Ok(brute_force_argmax(fq, topology, Some(masks))?.0)
        } else {
            self.max_plus(fq, topology, masks)
        }
    }
}

/// Epsilon-greedy joint action: each agent independently explores uniformly
/// over its available actions with probability `epsilon`, otherwise follows
/// the Max-Plus joint action.
pub fn select_actions(
    fq: &FactorizedQ,
    topology: &Topology,
    masks: &[Vec<bool>],
    epsilon: f64,
    rng: &mut Rng,
    iterations: usize,
) -> Result<Vec<usize>> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Contract(format!(
            "epsilon {epsilon} is outside [0, 1]"
        )));
    }
    let explore: Vec<bool> = masks.iter().map(|_| rng.gen::<f64>() < epsilon).collect();
    let greedy = if explore.iter().all(|&e| e) {
        None
    } else {
        Some(
            max_plus(
                fq,
                topology,
                Some(masks),
                iterations,
                topology.default_damping(),
            )?
            .joint_action,
        )
    };
    Ok(masks
        .iter()
        .enumerate()
        .map(|(i, m)| {
            if explore[i] {
                let avail: Vec<usize> = (0..m.len()).filter(|&a| m[a]).collect();
                avail[rng.gen_range(0..avail.len())]
            } else {
                greedy.as_ref().unwrap()[i]
            }
        })
        .collect())
}

/// One replay record. Observations are stored flat, agent-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub observations: Vec<f64>,
    pub masks: Vec<Vec<bool>>,
    pub actions: Vec<usize>,
    pub reward: f64,
    pub next_observations: Vec<f64>,
    pub next_masks: Vec<Vec<bool>>,
    pub terminal: bool,
}

/// FIFO replay memory with uniform sampling.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    items: VecDeque<Transition>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> ReplayBuffer {
        ReplayBuffer {
            capacity,
            items: VecDeque::with_capacity(capacity.min(1 << 16)),
        }
    }

    pub fn push(&mut self, t: Transition) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(t);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, k: usize) -> Option<&Transition> {
        self.items.get(k)
    }

    /// `size` indices drawn uniformly with replacement.
    pub fn sample<'a>(&'a self, size: usize, rng: &mut Rng) -> Vec<&'a Transition> {
        (0..size)
            .map(|_| &self.items[rng.gen_range(0..self.items.len())])
            .collect()
    }
}

fn flat_obs(batch: &[&Transition], next: bool) -> Vec<f64> {
    batch
        .iter()
        .flat_map(|t| {
            if next {
                t.next_observations.iter()
            } else {
                t.observations.iter()
            }
        })
        .copied()
        .collect()
}

/// Bootstrapped targets `r + gamma * (1 - terminal) * q_tot_target(o', a*)`,
/// where `a*` maximizes the target factorization under the next masks.
pub fn td_targets(
    batch: &[&Transition],
    target: &DcgModel,
    topology: &Topology,
    gamma: f64,
    maximizer: &Maximizer,
) -> Result<Vec<f64>> {
    if batch.is_empty() {
        return Err(Error::Contract("empty batch".into()));
    }
    let n = topology.n_agents();
    let needs_bootstrap = gamma > 0.0 && batch.iter().any(|t| !t.terminal);
    let out = if needs_bootstrap {
        let obs = flat_obs(batch, true);
        Some(evaluate_batch(
            target,
            stack_obs(&obs, batch.len() * n, target.obs_dim())?,
            topology,
        )?)
    } else {
        None
    };
    batch
        .iter()
        .enumerate()
        .map(|(b, t)| {
            if t.terminal || out.is_none() {
                return Ok(t.reward);
            }
            let out = out.as_ref().unwrap();
            let masked = assemble(out, b, topology, target.n_actions, Some(&t.next_masks));
            let best = maximizer.best(&masked, topology, &t.next_masks)?;
            let plain = assemble(out, b, topology, target.n_actions, None);
            Ok(t.reward + gamma * q_tot_unchecked(&plain, topology, &best))
        })
        .collect()
}

/// Mean squared TD error of `q_tot(o, a)` against `targets`, with gradients
/// for both networks.
pub fn loss_and_gradients(
    model: &DcgModel,
    batch: &[&Transition],
    targets: &[f64],
    topology: &Topology,
) -> Result<(f64, Gradients, Gradients)> {
    let n = topology.n_agents();
    let na = model.n_actions;
    let n_edges = topology.edges().len();
    let size = batch.len();
    let obs = flat_obs(batch, false);
    let x = stack_obs(&obs, size * n, model.obs_dim())?;
    let ucache = model.utility.forward_cached(x)?;
    let pcache = if n_edges > 0 {
        Some(
            model
                .payoff
                .forward_pairs_cached(x, &edge_pairs(topology, size))?,
        )
    } else {
        None
    };

    let mut u_up = Array2::<f64>::zeros(ucache.output.raw_dim());
    let mut p_up = pcache
        .as_ref()
        .map(|c| Array2::<f64>::zeros(c.output().raw_dim()));
    let mut loss = 0.0;
    for (b, t) in batch.iter().enumerate() {
        let a = &t.actions;
        let mut q = 0.0;
        for i in 0..n {
            q += ucache.output[[b * n + i, a[i]]];
        }
        if let Some(pc) = &pcache {
            let p = pc.output();
            for (e, &(i, j)) in topology.edges().iter().enumerate() {
                let row = 2 * (b * n_edges + e);
                q += 0.5 * (p[[row, a[i] * na + a[j]]] + p[[row + 1, a[j] * na + a[i]]]);
            }
        }
        let err = q - targets[b];
        loss += err * err;
        let dq = 2.0 * err / size as f64;
        for i in 0..n {
            u_up[[b * n + i, a[i]]] += dq;
        }
        if let Some(up) = p_up.as_mut() {
            for (e, &(i, j)) in topology.edges().iter().enumerate() {
                let row = 2 * (b * n_edges + e);
                up[[row, a[i] * na + a[j]]] += 0.5 * dq;
                up[[row + 1, a[j] * na + a[i]]] += 0.5 * dq;
            }
        }
    }
    let ugrad = model.utility.backward_batch(&ucache, u_up.view())?;
    let pgrad = match (&pcache, &p_up) {
        (Some(c), Some(up)) => model.payoff.backward_pairs(c, up.view())?,
        _ => Gradients::zeros_like(&model.payoff),
    };
    Ok((loss / size as f64, ugrad, pgrad))
}

/// Adam states for both networks plus a joint gradient-norm clip.
#[derive(Debug, Clone)]
pub struct DcgOptimizer {
    pub utility: OptState,
    pub payoff: OptState,
    pub grad_clip: f64,
}

impl DcgOptimizer {
    pub fn new(model: &DcgModel, lr: f64, grad_clip: f64) -> DcgOptimizer {
        DcgOptimizer {
            utility: OptState::new(&model.utility, lr),
            payoff: OptState::new(&model.payoff, lr),
            grad_clip,
        }
    }
}

/// One gradient step on a sampled batch; returns the loss before the step.
pub fn train_step(
    model: &mut DcgModel,
    target: &DcgModel,
    batch: &[&Transition],
    opt: &mut DcgOptimizer,
    topology: &Topology,
    gamma: f64,
    maximizer: &Maximizer,
) -> Result<f64> {
    let targets = td_targets(batch, target, topology, gamma, maximizer)?;
    let (loss, mut ug, mut pg) = loss_and_gradients(model, batch, &targets, topology)?;
    let norm = (ug.norm().powi(2) + pg.norm().powi(2)).sqrt();
    if norm > opt.grad_clip {
        ug.scale(opt.grad_clip / norm);
        pg.scale(opt.grad_clip / norm);
    }
    opt_step(&mut model.utility, &mut opt.utility, &ug);
    if !topology.edges().is_empty() {
        opt_step(&mut model.payoff, &mut opt.payoff, &pg);
    }
    Ok(loss)
}

/// Greedy (epsilon = 0) joint action for one state.
pub fn greedy_action(
    model: &DcgModel,
    observations: &[Vec<f64>],
    masks: &[Vec<bool>],
    topology: &Topology,
    maximizer: &Maximizer,
) -> Result<Vec<usize>> {
    let fq = factorize(model, observations, topology, masks)?;
    maximizer.max_plus(&fq, topology, masks)
}

/// Mean undiscounted return of `episodes` greedy episodes on one env.
pub fn evaluate<E: TeamEnv>(
    model: &DcgModel,
    env: &mut E,
    topology: &Topology,
    maximizer: &Maximizer,
    episodes: usize,
) -> Result<f64> {
    let mut total = 0.0;
    for _ in 0..episodes {
        let mut view = env.reset()?;
        loop {
            let joint = greedy_action(model, &view.observations, &view.masks, topology, maximizer)?;
            view = env.step(&joint)?;
            total += view.reward;
            if view.done {
                break;
            }
        }
    }
    Ok(total / episodes.max(1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalSchedule {
    /// Evaluate every this many environment steps (0 disables periodic evaluation).
    pub every: usize,
    pub episodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    /// Environment steps taken when the episode ended.
    pub env_step: usize,
    pub train_return: f64,
    pub length: usize,
    pub epsilon: f64,
    /// Mean training loss over the episode's gradient steps (0 if none).
    pub loss_mean: f64,
    pub captures: usize,
    pub miscaptures: usize,
    /// Most recent periodic evaluation (the initial one before any training).
    pub eval_return_mean: f64,
}

#[derive(Debug, Clone)]
pub struct TrainRun {
    pub episodes: Vec<EpisodeRecord>,
    pub final_eval_return: f64,
    pub env_steps: usize,
    pub model: DcgModel,
}

const ENV_STREAM: u64 = 1;
const MODEL_STREAM: u64 = 2;
const ACT_STREAM: u64 = 3;
const EVAL_STREAM: u64 = 1 << 32;
const FINAL_EVAL_STREAM: u64 = 1 << 33;

/// Full training loop: act, store, sample, train, periodically sync the
/// target network and evaluate. Deterministic for a given seed.
pub fn train<E, F>(
    mut make_env: F,
    kind: TopologyKind,
    cfg: &LearnerConfig,
    seed: u64,
    eval: EvalSchedule,
) -> Result<TrainRun>
where
    E: TeamEnv,
    F: FnMut(u64) -> Result<E>,
{
    cfg.validate()?;
    let mut env = make_env(seed::derive(seed, ENV_STREAM))?;
    let n = env.n_agents();
    let topology = Topology::make(kind, n, None)?;
    let maximizer = Maximizer::new(&topology, cfg.max_plus_iterations, cfg.exact_max_agents);
    let mut model = DcgModel::new(
        env.obs_dim(),
        env.n_actions(),
        &cfg.hidden,
        seed::derive(seed, MODEL_STREAM),
        cfg.init_scale,
    )?;
    let mut target = model.clone();
    let mut opt = DcgOptimizer::new(&model, cfg.lr, cfg.grad_clip);
    let mut rng = seed::rng(seed, ACT_STREAM);
    let mut replay = ReplayBuffer::new(cfg.replay_capacity);

    let mut eval_round = 0u64;
    let mut run_eval = |model: &DcgModel, make_env: &mut F| -> Result<f64> {
        let mut env = make_env(seed::derive(seed, EVAL_STREAM + eval_round))?;
        eval_round += 1;
        evaluate(model, &mut env, &topology, &maximizer, eval.episodes)
    };
    let mut last_eval = if eval.episodes > 0 {
        run_eval(&model, &mut make_env)?
    } else {
        0.0
    };

    let mut episodes = Vec::new();
    let mut step = 0usize;
    while step < cfg.max_env_steps {
        let mut view = env.reset()?;
        let mut record = EpisodeRecord {
            episode: episodes.len(),
            env_step: 0,
            train_return: 0.0,
            length: 0,
            epsilon: cfg.epsilon(step),
            loss_mean: 0.0,
            captures: 0,
            miscaptures: 0,
            eval_return_mean: 0.0,
        };
        let mut losses = 0.0;
        let mut n_losses = 0usize;
        loop {
            let eps = cfg.epsilon(step);
            let fq = factorize(&model, &view.observations, &topology, &view.masks)?;
            let joint = select_actions(
                &fq,
                &topology,
                &view.masks,
                eps,
                &mut rng,
                cfg.max_plus_iterations,
            )?;
            let next = env.step(&joint)?;
            replay.push(Transition {
                observations: view.observations.iter().flatten().copied().collect(),
                masks: view.masks.clone(),
                actions: joint,
                reward: next.reward,
                next_observations: next.observations.iter().flatten().copied().collect(),
                next_masks: next.masks.clone(),
                terminal: next.terminal,
            });
            step += 1;
            record.length += 1;
            record.train_return += next.reward;
            record.captures += next.captures;
            record.miscaptures += next.miscaptures;

            if replay.len() >= cfg.train_start.max(1) && step.is_multiple_of(cfg.train_every) {
                let batch = replay.sample(cfg.batch_size, &mut rng);
                let loss = train_step(
                    &mut model, &target, &batch, &mut opt, &topology, cfg.gamma, &maximizer,
                )?;
                if !loss.is_finite() {
                    return Err(Error::Numeric(format!(
                        "training loss diverged at step {step}"
                    )));
                }
                losses += loss;
                n_losses += 1;
            }
            if step.is_multiple_of(cfg.target_sync_every) {
                target = model.clone();
            }
            if eval.every > 0 && eval.episodes > 0 && step.is_multiple_of(eval.every) {
                last_eval = run_eval(&model, &mut make_env)?;
            }
            view = next;
            if view.done || step >= cfg.max_env_steps {
                break;
            }
        }
        record.env_step = step;
        record.loss_mean = if n_losses > 0 {
            losses / n_losses as f64
        } else {
            0.0
        };
        record.eval_return_mean = last_eval;
        episodes.push(record);
    }

    let final_eval_return = if eval.episodes > 0 {
        let mut env = make_env(seed::derive(seed, FINAL_EVAL_STREAM))?;
        evaluate(&model, &mut env, &topology, &maximizer, eval.episodes)?
    } else {
        0.0
    };
    Ok(TrainRun {
        episodes,
        final_eval_return,
        env_steps: step,
        model,
    })
}
