use std::hash::{DefaultHasher, Hash, Hasher};

use crate::error::{check_probability, Error, Result};
use crate::graph::Graph;

use super::{choose_partner, draw_source, Algorithm, RunStreams, StateVector};

/// Every iteration up to this one is recorded.
pub const DENSE_RECORD_LIMIT: u64 = 10_000;

/// Beyond [`DENSE_RECORD_LIMIT`] only multiples of this stride (and the last
/// iteration) are recorded.
pub const SPARSE_RECORD_STRIDE: u64 = 10;

/// Relative error and cumulative message counts after one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iteration: u64,
    /// `||a(l) - avg|| / ||a(0) - avg||`.
    pub rel_error: f64,
    pub probe_messages: u64,
    pub exchange_messages: u64,
    /// Sum of the degrees of the sources woken so far.
    pub source_degree: u64,
}

/// The record of one simulated run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub algorithm: Algorithm,
    /// Activation probability (only meaningful for sample greedy gossip).
    pub p: f64,
    pub master_seed: u64,
    pub run_index: u64,
    /// The initial state already was the average; all errors are reported as 0.
    pub degenerate: bool,
    /// Hash of (algorithm, p, graph, initial state), used to reject mixed trace sets.
    pub config_key: u64,
    pub points: Vec<TracePoint>,
}

impl Trace {
    pub fn iterations(&self) -> u64 {
        self.points.last().map_or(0, |pt| pt.iteration)
    }

    pub fn final_error(&self) -> f64 {
        self.points.last().map_or(1.0, |pt| pt.rel_error)
    }

    pub fn rel_errors(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|pt| pt.rel_error)
    }
}

fn is_recorded(l: u64, last: u64) -> bool {
    l <= DENSE_RECORD_LIMIT || l.is_multiple_of(SPARSE_RECORD_STRIDE) || l == last
}

fn config_key(g: &Graph, a0: &StateVector, algorithm: Algorithm, p: f64) -> u64 {
    let mut h = DefaultHasher::new();
    algorithm.hash(&mut h);
    p.to_bits().hash(&mut h);
    g.node_count().hash(&mut h);
    for s in 0..g.node_count() {
        g.neighbors(s).hash(&mut h);
    }
    for v in a0.values() {
        v.to_bits().hash(&mut h);
    }
    h.finish()
}

/// Runs `iterations` steps of `algorithm` from `a0` on `g`.
///
/// The node and activation streams are derived from `(master_seed, run_index)`,
/// so the same arguments always give the same trace. The relative error is
/// recomputed from the full state after each recorded iteration.
pub fn run(
    g: &Graph,
    a0: &StateVector,
    algorithm: Algorithm,
    p: f64,
    iterations: u64,
    master_seed: u64,
    run_index: u64,
) -> Result<Trace> {
    check_probability(p)?;
    if a0.len() != g.node_count() {
        return Err(Error::InvalidParameter(format!(
            "initial state has {} entries for {} nodes",
            a0.len(),
            g.node_count()
        )));
    }
    if g.node_count() < 2 || !g.is_connected() {
        return Err(Error::NotConnected);
    }

    let mut streams = RunStreams::new(master_seed, run_index);
    let degenerate = a0.is_consensus();
    let mean = a0.mean();
    let initial_sq = a0.squared_error(mean);
    let mut state = a0.clone();
    let mut active = Vec::new();
    let (mut probes, mut exchanges, mut degrees) = (0u64, 0u64, 0u64);

    let mut points = Vec::with_capacity(iterations.min(DENSE_RECORD_LIMIT) as usize + 1);
    points.push(TracePoint {
        iteration: 0,
        rel_error: if degenerate { 0.0 } else { 1.0 },
        probe_messages: 0,
        exchange_messages: 0,
        source_degree: 0,
    });

    for l in 1..=iterations {
        let s = draw_source(g, &mut streams.node);
        let choice = choose_partner(
            algorithm,
            g,
            state.values(),
            s,
            p,
            &mut streams.node,
            &mut streams.activation,
            &mut active,
        );
        state.pairwise_average(s, choice.partner)?;
        probes += u64::from(choice.probes);
        exchanges += 1;
        degrees += g.degree(s) as u64;

        if is_recorded(l, iterations) {
            let rel_error = if degenerate {
                0.0
            } else {
                (state.squared_error(mean) / initial_sq).sqrt()
            };
            points.push(TracePoint {
                iteration: l,
                rel_error,
                probe_messages: probes,
                exchange_messages: exchanges,
                source_degree: degrees,
            });
        }
    }

    Ok(Trace {
        algorithm,
        p,
        master_seed,
        run_index,
        degenerate,
        config_key: config_key(g, a0, algorithm, p),
        points,
    })
}
