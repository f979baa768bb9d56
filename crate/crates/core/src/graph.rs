//! Coordination graphs and Max-Plus joint action selection.
//!
//! A factorized joint value assigns each agent a utility per action and each
//! edge `(i, j)` a payoff matrix; the joint value of an action profile is the
//! plain sum
//!
//! ```text
//! q_tot(a) = sum_i f_i(a_i) + sum_{(i,j) in E} f_ij(a_i, a_j)
//! ```
//!
//! [`max_plus`] approximates `argmax_a q_tot(a)` by passing max-sum messages
//! along the edges. It is exact on trees and anytime on graphs with cycles:
//! every iteration proposes a candidate and the best candidate seen so far is
//! kept. [`brute_force_argmax`] enumerates all joint actions and serves as the
//! reference.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Utility given to unavailable actions so they never win a maximization.
pub const UNAVAILABLE: f64 = -1e9;
/// Largest joint action space [`brute_force_argmax`] will enumerate.
pub const BRUTE_FORCE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Full,
    Empty,
    Line,
    Cycle,
    Custom,
}

impl std::str::FromStr for TopologyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<TopologyKind> {
        Ok(match s {
            "full" => TopologyKind::Full,
            "empty" => TopologyKind::Empty,
            "line" => TopologyKind::Line,
            "cycle" => TopologyKind::Cycle,
            "custom" => TopologyKind::Custom,
            _ => return Err(Error::Config(format!("unknown topology {s:?}"))),
        })
    }
}

/// Undirected simple graph over `n` agents. Edges are stored as `(i, j)`
/// with `i < j`, in insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Topology {
    pub fn full(n: usize) -> Topology {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Topology { n, edges }
    }

    pub fn empty(n: usize) -> Topology {
        Topology {
            n,
            edges: Vec::new(),
        }
    }

    pub fn line(n: usize) -> Topology {
        Topology {
            n,
            edges: (1..n).map(|j| (j - 1, j)).collect(),
        }
    }

    pub fn cycle(n: usize) -> Topology {
        let mut t = Topology::line(n);
        if n >= 3 {
            t.edges.push((0, n - 1));
        }
        t
    }

    pub fn custom(n: usize, edges: &[(usize, usize)]) -> Result<Topology> {
        let mut out: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(Error::Contract(format!(
                    "invalid edge ({a}, {b}) for {n} agents"
                )));
            }
            let e = (a.min(b), a.max(b));
            if out.contains(&e) {
                return Err(Error::Contract(format!("duplicate edge ({a}, {b})")));
            }
            out.push(e);
        }
        Ok(Topology { n, edges: out })
    }

    pub fn make(
        kind: TopologyKind,
        n: usize,
        custom: Option<&[(usize, usize)]>,
    ) -> Result<Topology> {
        if n == 0 {
            return Err(Error::Contract(
                "a topology needs at least one agent".into(),
            ));
        }
        Ok(match kind {
            TopologyKind::Full => Topology::full(n),
            TopologyKind::Empty => Topology::empty(n),
            TopologyKind::Line => Topology::line(n),
            TopologyKind::Cycle => Topology::cycle(n),
            TopologyKind::Custom => Topology::custom(
                n,
                custom.ok_or_else(|| Error::Contract("custom topology needs edges".into()))?,
            )?,
        })
    }

    pub fn n_agents(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// For each agent, the incident `(edge index, other endpoint)` pairs.
    pub fn incidence(&self) -> Vec<Vec<(usize, usize)>> {
        let mut inc = vec![Vec::new(); self.n];
        for (e, &(i, j)) in self.edges.iter().enumerate() {
            inc[i].push((e, j));
            inc[j].push((e, i));
        }
        inc
    }

    /// True when the graph is a forest.
    pub fn is_acyclic(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(i, j) in &self.edges {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }

    /// Message damping used unless a caller overrides it: off on forests,
    /// 0.5 when the graph has cycles.
    pub fn default_damping(&self) -> f64 {
        if self.is_acyclic() {
            0.0
        } else {
            0.5
        }
    }
}

/// Per-agent utilities and per-edge payoff matrices over a [`Topology`].
///
/// `payoffs[e]` is the row-major `|A_i| x |A_j|` matrix of edge `e = (i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizedQ {
    pub utilities: Vec<Vec<f64>>,
    pub payoffs: Vec<Vec<f64>>,
}

impl FactorizedQ {
    pub fn new(
        utilities: Vec<Vec<f64>>,
        payoffs: Vec<Vec<f64>>,
        topology: &Topology,
    ) -> Result<Self> {
        let fq = FactorizedQ { utilities, payoffs };
        fq.check(topology)?;
        Ok(fq)
    }

    /// All-zero factors for the given per-agent action counts.
    pub fn zeros(action_counts: &[usize], topology: &Topology) -> FactorizedQ {
        FactorizedQ {
            utilities: action_counts.iter().map(|&n| vec![0.0; n]).collect(),
            payoffs: topology
                .edges()
                .iter()
                .map(|&(i, j)| vec![0.0; action_counts[i] * action_counts[j]])
                .collect(),
        }
    }

    pub fn action_counts(&self) -> Vec<usize> {
        self.utilities.iter().map(Vec::len).collect()
    }

    pub fn payoff(&self, edge: usize, a_i: usize, a_j: usize, n_j: usize) -> f64 {
        self.payoffs[edge][a_i * n_j + a_j]
    }

    pub fn check(&self, topology: &Topology) -> Result<()> {
        if self.utilities.len() != topology.n_agents() {
            return Err(Error::Contract(format!(
                "{} utility vectors for {} agents",
                self.utilities.len(),
                topology.n_agents()
            )));
        }
        if self.utilities.iter().any(Vec::is_empty) {
            return Err(Error::Contract(
                "every agent needs at least one action".into(),
            ));
        }
        if self.payoffs.len() != topology.edges().len() {
            return Err(Error::Contract(format!(
                "{} payoff matrices for {} edges",
                self.payoffs.len(),
                topology.edges().len()
            )));
        }
        for (e, &(i, j)) in topology.edges().iter().enumerate() {
            if self.payoffs[e].len() != self.utilities[i].len() * self.utilities[j].len() {
                return Err(Error::Contract(format!(
                    "payoff matrix of edge ({i}, {j}) has wrong shape"
                )));
            }
        }
        Ok(())
    }
}

/// Joint value: sum of utilities plus sum of edge payoffs.
pub fn q_tot(fq: &FactorizedQ, topology: &Topology, joint: &[usize]) -> Result<f64> {
    fq.check(topology)?;
    if joint.len() != fq.utilities.len()
        || joint.iter().zip(&fq.utilities).any(|(&a, u)| a >= u.len())
    {
        return Err(Error::Contract(format!(
            "joint action {joint:?} is out of range"
        )));
    }
    Ok(q_tot_unchecked(fq, topology, joint))
}

pub(crate) fn q_tot_unchecked(fq: &FactorizedQ, topology: &Topology, joint: &[usize]) -> f64 {
    let mut total: f64 = joint.iter().zip(&fq.utilities).map(|(&a, u)| u[a]).sum();
    for (e, &(i, j)) in topology.edges().iter().enumerate() {
        total += fq.payoff(e, joint[i], joint[j], fq.utilities[j].len());
    }
    total
}

fn check_masks(fq: &FactorizedQ, masks: Option<&[Vec<bool>]>) -> Result<()> {
    if let Some(masks) = masks {
        let ok = masks.len() == fq.utilities.len()
            && masks
                .iter()
                .zip(&fq.utilities)
                .all(|(m, u)| m.len() == u.len() && m.iter().any(|&b| b));
        if !ok {
            return Err(Error::Contract(
                "masks must match action counts and allow an action".into(),
            ));
        }
    }
    Ok(())
}

/// Exact maximizer over available joint actions. Ties go to the
/// lexicographically smallest joint action.
pub fn brute_force_argmax(
    fq: &FactorizedQ,
    topology: &Topology,
    masks: Option<&[Vec<bool>]>,
) -> Result<(Vec<usize>, f64)> {
    fq.check(topology)?;
    check_masks(fq, masks)?;
    let choices: Vec<Vec<usize>> = fq
        .utilities
        .iter()
        .enumerate()
        .map(|(i, u)| {
            (0..u.len())
                .filter(|&a| masks.is_none_or(|m| m[i][a]))
                .collect()
        })
        .collect();
    let size = choices
        .iter()
        .try_fold(1usize, |acc, c| acc.checked_mul(c.len()));
    if size.is_none_or(|s| s > BRUTE_FORCE_CAP) {
        return Err(Error::Size(format!(
            "joint action space exceeds the brute-force cap of {BRUTE_FORCE_CAP}"
        )));
    }
    let n = choices.len();
    let mut digits = vec![0usize; n];
    let mut joint: Vec<usize> = choices.iter().map(|c| c[0]).collect();
    let mut best = (joint.clone(), q_tot_unchecked(fq, topology, &joint));
    loop {
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(best);
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < choices[k].len() {
                joint[k] = choices[k][digits[k]];
                break;
            }
            digits[k] = 0;
            joint[k] = choices[k][0];
        }
        let v = q_tot_unchecked(fq, topology, &joint);
        if v > best.1 {
            best = (joint.clone(), v);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxPlusResult {
    pub joint_action: Vec<usize>,
    pub value: f64,
    /// Best value found after each iteration; non-decreasing.
    pub trace: Vec<f64>,
}

/// Max-Plus message passing with mean-normalized, optionally damped messages.
///
/// Each iteration updates every directed message synchronously,
///
/// ```text
/// mu_ij(a_j) = max_{a_i} [ f_i(a_i) + f_ij(a_i, a_j) + sum_{k in N(i) \ j} mu_ki(a_i) ] - c_ij
/// ```
///
/// where `c_ij` is the mean of the unnormalized message, then blends with the
/// previous message as `(1 - damping) * new + damping * old`. Each agent then
/// proposes `argmax_a f_i(a) + sum_k mu_ki(a)`; the best proposal so far is
/// returned.
pub fn max_plus(
    fq: &FactorizedQ,
    topology: &Topology,
    masks: Option<&[Vec<bool>]>,
    iterations: usize,
    damping: f64,
) -> Result<MaxPlusResult> {
    fq.check(topology)?;
    check_masks(fq, masks)?;
    if iterations == 0 {
        return Err(Error::Contract(
            "max_plus needs at least one iteration".into(),
        ));
    }
    if !(0.0..1.0).contains(&damping) {
        return Err(Error::Contract(format!(
            "damping {damping} is outside [0, 1)"
        )));
    }
    let n = fq.utilities.len();
    let counts = fq.action_counts();
    let utilities: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            fq.utilities[i]
                .iter()
                .enumerate()
                .map(|(a, &u)| {
                    if masks.is_none_or(|m| m[i][a]) {
                        u
                    } else {
                        u + UNAVAILABLE
                    }
                })
                .collect()
        })
        .collect();
    let edges = topology.edges();
    // messages[e][0]: i -> j (over A_j); messages[e][1]: j -> i (over A_i)
    let mut messages: Vec<[Vec<f64>; 2]> = edges
        .iter()
        .map(|&(i, j)| [vec![0.0; counts[j]], vec![0.0; counts[i]]])
        .collect();
    let incidence = topology.incidence();

    let incoming = |messages: &[[Vec<f64>; 2]], i: usize| -> Vec<f64> {
        let mut sum = vec![0.0; counts[i]];
        for &(e, _) in &incidence[i] {
            let into_i = if edges[e].1 == i {
                &messages[e][0]
            } else {
                &messages[e][1]
            };
            for (s, m) in sum.iter_mut().zip(into_i) {
                *s += m;
            }
        }
        sum
    };

    let mut best_joint = Vec::new();
    let mut best_value = f64::NEG_INFINITY;
    let mut trace = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let inbox: Vec<Vec<f64>> = (0..n).map(|i| incoming(&messages, i)).collect();
        let mut updated = messages.clone();
        for (e, &(i, j)) in edges.iter().enumerate() {
            for dir in 0..2 {
                // sender s, receiver r
                let (s, r) = if dir == 0 { (i, j) } else { (j, i) };
                let back = &messages[e][1 - dir];
                let base: Vec<f64> = (0..counts[s])
                    .map(|a| utilities[s][a] + inbox[s][a] - back[a])
                    .collect();
                let mut msg: Vec<f64> = (0..counts[r])
                    .map(|ar| {
                        (0..counts[s])
                            .map(|as_| {
                                let pay = if dir == 0 {
                                    fq.payoff(e, as_, ar, counts[j])
                                } else {
                                    fq.payoff(e, ar, as_, counts[j])
                                };
                                base[as_] + pay
                            })
                            .fold(f64::NEG_INFINITY, f64::max)
                    })
                    .collect();
                let mean = msg.iter().sum::<f64>() / msg.len() as f64;
                for (m, old) in msg.iter_mut().zip(&messages[e][dir]) {
                    *m = (1.0 - damping) * (*m - mean) + damping * old;
                }
                updated[e][dir] = msg;
            }
        }
        messages = updated;

        let joint: Vec<usize> = (0..n)
            .map(|i| {
                let inbox = incoming(&messages, i);
                argmax((0..counts[i]).map(|a| utilities[i][a] + inbox[a]))
            })
            .collect();
        let value = q_tot_unchecked(fq, topology, &joint);
        if value > best_value {
            best_value = value;
            best_joint = joint;
        }
        trace.push(best_value);
    }
    Ok(MaxPlusResult {
        joint_action: best_joint,
        value: best_value,
        trace,
    })
}

/// Index of the first maximum.
pub(crate) fn argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (k, v) in values.into_iter().enumerate() {
        if v > best.1 {
            best = (k, v);
        }
    }
    best.0
}
