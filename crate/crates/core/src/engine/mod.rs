//! The three gossip state machines: randomized, greedy and sample greedy.
//!
//! Every iteration wakes one source node `s`, chosen uniformly, which then
//! averages its value with one neighbour. The algorithms differ only in how
//! the partner is picked:
//!
//! * randomized: uniformly from the neighbourhood;
//! * greedy: the neighbour with the largest squared discrepancy;
//! * sample greedy: each neighbour activates independently with probability
//!   `p`, the greedy rule is applied to the active neighbours, and an empty
//!   active set falls back to the randomized rule.
//!
//! Ties in the greedy rule go to the lowest node id. Randomness comes from
//! two streams: the node stream draws the source and any uniform partner, the
//! activation stream draws the per-neighbour activations. With this split,
//! sample greedy gossip at `p = 0` consumes the node stream exactly like
//! randomized gossip and at `p = 1` exactly like greedy gossip, so the traces
//! coincide bit for bit.

mod trace;

use std::fmt;
use std::str::FromStr;

use rand::distr::OpenClosed01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::graph::{Graph, NodeId};
use crate::numeric;
use crate::rng::{self, StreamRng, StreamTag};

pub use trace::{run, Trace, TracePoint, DENSE_RECORD_LIMIT, SPARSE_RECORD_STRIDE};

/// Partner-selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Randomized,
    Greedy,
    SampleGreedy,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Randomized, Algorithm::Greedy, Algorithm::SampleGreedy];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Randomized => "randomized",
            Algorithm::Greedy => "greedy",
            Algorithm::SampleGreedy => "sample_greedy",
        }
    }

    /// The activation probability this algorithm is equivalent to:
    /// 0 for randomized, 1 for greedy, `p` for sample greedy.
    pub fn effective_p(self, p: f64) -> f64 {
        match self {
            Algorithm::Randomized => 0.0,
            Algorithm::Greedy => 1.0,
            Algorithm::SampleGreedy => p,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "randomized" | "randomised" => Ok(Algorithm::Randomized),
            "greedy" => Ok(Algorithm::Greedy),
            "sample_greedy" | "sample-greedy" | "sgg" => Ok(Algorithm::SampleGreedy),
            other => Err(Error::UnknownAlgorithm(other.to_string())),
        }
    }
}

/// Node values `a(l)` and the iteration counter `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    values: Vec<f64>,
    iteration: u64,
}

impl StateVector {
    pub fn new(values: Vec<f64>) -> Self {
        StateVector {
            values,
            iteration: 0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Compensated sum of the values.
    pub fn sum(&self) -> f64 {
        numeric::sum(self.values.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.values.len() as f64
    }

    /// True when every entry is identical, i.e. the state already is its average.
    pub fn is_consensus(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    /// `||a - mean * 1||^2`, compensated.
    pub fn squared_error(&self, mean: f64) -> f64 {
        numeric::sum(self.values.iter().map(|v| (v - mean) * (v - mean)))
    }

    /// Replaces `a_s` and `a_t` by their midpoint and advances the iteration.
    pub fn pairwise_average(&mut self, s: NodeId, t: NodeId) -> Result<()> {
        let n = self.values.len();
        for node in [s, t] {
            if node >= n {
                return Err(Error::NodeOutOfRange { node, n });
            }
        }
        if s == t {
            return Err(Error::InvalidParameter(format!(
                "pairwise average needs two distinct nodes, got {s} twice"
            )));
        }
        let mid = 0.5 * (self.values[s] + self.values[t]);
        self.values[s] = mid;
        self.values[t] = mid;
        self.iteration += 1;
        Ok(())
    }
}

/// One gossip event.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// Iteration index `l` of the state produced by this step.
    pub iteration: u64,
    pub source: NodeId,
    /// Activated neighbours (sample greedy), all neighbours (greedy) or empty (randomized).
    pub active_set: Vec<NodeId>,
    pub partner: NodeId,
    /// `(a_s - a_t)^2` evaluated before the update.
    pub discrepancy_sq: f64,
    /// Neighbour values solicited while choosing the partner.
    pub probe_messages: u32,
    /// Always 1: the averaging exchange itself.
    pub exchange_messages: u32,
}

/// The two random streams of one run.
#[derive(Debug, Clone)]
pub struct RunStreams {
    pub node: StreamRng,
    pub activation: StreamRng,
}

impl RunStreams {
    pub fn new(master_seed: u64, run_index: u64) -> Self {
        RunStreams {
            node: rng::stream(master_seed, run_index, StreamTag::NodeSelection),
            activation: rng::stream(master_seed, run_index, StreamTag::Activation),
        }
    }
}

/// Outcome of partner selection for a given source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Choice {
    pub partner: NodeId,
    pub discrepancy_sq: f64,
    pub probes: u32,
}

fn sq(x: f64) -> f64 {
    x * x
}

/// Argmax of `(a_s - a_t)^2` over `candidates` (ascending), lowest id on ties.
fn greedy_pick(values: &[f64], s: NodeId, candidates: &[NodeId]) -> (NodeId, f64) {
    let a_s = values[s];
    let mut best = candidates[0];
    let mut best_d = sq(a_s - values[best]);
    for &t in &candidates[1..] {
        let d = sq(a_s - values[t]);
        if d > best_d {
            best = t;
            best_d = d;
        }
    }
    (best, best_d)
}

fn uniform_neighbor<R: Rng + ?Sized>(g: &Graph, s: NodeId, node_rng: &mut R) -> NodeId {
    let nbrs = g.neighbors(s);
    assert!(!nbrs.is_empty(), "node {s} has no neighbours");
    nbrs[node_rng.random_range(0..nbrs.len())]
}

/// Partner selection for source `s`. `active` receives the active set
/// of sample greedy gossip (cleared first) and stays empty for the other two.
pub(crate) fn choose_partner<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    algorithm: Algorithm,
    g: &Graph,
    values: &[f64],
    s: NodeId,
    p: f64,
    node_rng: &mut R1,
    activation_rng: &mut R2,
    active: &mut Vec<NodeId>,
) -> Choice {
    active.clear();
    match algorithm {
        Algorithm::Randomized => {
            let t = uniform_neighbor(g, s, node_rng);
            Choice {
                partner: t,
                discrepancy_sq: sq(values[s] - values[t]),
                probes: 0,
            }
        }
        Algorithm::Greedy => {
            let nbrs = g.neighbors(s);
            assert!(!nbrs.is_empty(), "node {s} has no neighbours");
            let (t, d) = greedy_pick(values, s, nbrs);
            Choice {
                partner: t,
                discrepancy_sq: d,
                probes: nbrs.len() as u32,
            }
        }
        Algorithm::SampleGreedy => {
            for &t in g.neighbors(s) {
                let q: f64 = activation_rng.sample(OpenClosed01);
                if q <= p {
                    active.push(t);
                }
            }
            if active.is_empty() {
                let t = uniform_neighbor(g, s, node_rng);
                Choice {
                    partner: t,
                    discrepancy_sq: sq(values[s] - values[t]),
                    probes: 1,
                }
            } else {
                let (t, d) = greedy_pick(values, s, active);
                Choice {
                    partner: t,
                    discrepancy_sq: d,
                    probes: active.len() as u32,
                }
            }
        }
    }
}

/// Draws a source uniformly from the node stream.
pub fn draw_source<R: Rng + ?Sized>(g: &Graph, node_rng: &mut R) -> NodeId {
    node_rng.random_range(0..g.node_count())
}

/// Selects a partner for a given source without touching the state.
///
/// Consumes the streams exactly as the corresponding step would after
/// drawing `s`. Panics if `s` has no neighbours.
pub fn select_partner<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    algorithm: Algorithm,
    g: &Graph,
    state: &StateVector,
    s: NodeId,
    p: f64,
    node_rng: &mut R1,
    activation_rng: &mut R2,
) -> Result<StepRecord> {
    check_probability(p)?;
    let mut active = Vec::new();
    let choice = choose_partner(algorithm, g, &state.values, s, p, node_rng, activation_rng, &mut active);
    if algorithm == Algorithm::Greedy {
        active.extend_from_slice(g.neighbors(s));
    }
    Ok(StepRecord {
        iteration: state.iteration + 1,
        source: s,
        active_set: active,
        partner: choice.partner,
        discrepancy_sq: choice.discrepancy_sq,
        probe_messages: choice.probes,
        exchange_messages: 1,
    })
}

/// One iteration of `algorithm`: draw the source, select the partner, average.
///
/// Randomized and greedy gossip never touch `activation_rng`. Panics if the
/// drawn source has no neighbours; [`run`] rejects disconnected graphs upfront.
pub fn step<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    algorithm: Algorithm,
    state: &mut StateVector,
    g: &Graph,
    p: f64,
    node_rng: &mut R1,
    activation_rng: &mut R2,
) -> Result<StepRecord> {
    check_probability(p)?;
    let s = draw_source(g, node_rng);
    let record = select_partner(algorithm, g, state, s, p, node_rng, activation_rng)?;
    state.pairwise_average(record.source, record.partner)?;
    Ok(record)
}

/// Stand-in activation stream for the algorithms that never draw activations.
struct NoActivation;

impl rand::RngCore for NoActivation {
    fn next_u32(&mut self) -> u32 {
        unreachable!("activation stream used outside sample greedy gossip")
    }

    fn next_u64(&mut self) -> u64 {
        unreachable!("activation stream used outside sample greedy gossip")
    }

    fn fill_bytes(&mut self, _dst: &mut [u8]) {
        unreachable!("activation stream used outside sample greedy gossip")
    }
}

/// Randomized gossip: uniform source, uniform neighbour.
pub fn randomized_step<R: Rng + ?Sized>(
    state: &mut StateVector,
    g: &Graph,
    node_rng: &mut R,
) -> StepRecord {
    step(Algorithm::Randomized, state, g, 0.0, node_rng, &mut NoActivation)
        .expect("p = 0 is valid and the partner is a neighbour")
}

/// Greedy gossip: uniform source, neighbour with the largest squared discrepancy.
pub fn greedy_step<R: Rng + ?Sized>(state: &mut StateVector, g: &Graph, node_rng: &mut R) -> StepRecord {
    step(Algorithm::Greedy, state, g, 1.0, node_rng, &mut NoActivation)
        .expect("p = 1 is valid and the partner is a neighbour")
}

/// Sample greedy gossip with activation probability `p`.
pub fn sample_greedy_step<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    state: &mut StateVector,
    g: &Graph,
    p: f64,
    node_rng: &mut R1,
    activation_rng: &mut R2,
) -> Result<StepRecord> {
    step(Algorithm::SampleGreedy, state, g, p, node_rng, activation_rng)
}
