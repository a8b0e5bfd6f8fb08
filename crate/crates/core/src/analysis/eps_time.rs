use serde::Serialize;

use crate::engine::Trace;
use crate::error::{Error, Result};

use super::rg_eps_time_bound;

/// Fewest runs accepted by [`empirical_eps_time`].
pub const MIN_RUNS: usize = 100;

/// Empirical epsilon-averaging time of a fixed configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonTimeEstimate {
    pub epsilon: f64,
    /// First recorded iteration at which at most a fraction `epsilon` of the
    /// runs still has relative error `>= epsilon`; `None` if never reached.
    pub empirical_t: Option<u64>,
    /// Randomized-gossip upper bound, when a `lambda2` has been supplied.
    pub rg_upper_bound: Option<f64>,
}

impl EpsilonTimeEstimate {
    /// Attaches the randomized bound for the given second eigenvalue.
    pub fn with_rg_bound(mut self, lambda2: f64) -> Result<Self> {
        self.rg_upper_bound = Some(rg_eps_time_bound(lambda2, self.epsilon)?);
        Ok(self)
    }
}

/// Smallest recorded `l` with `#{runs : rel_error(l) >= eps} <= eps * runs`.
///
/// All traces must come from the same graph, initial state, algorithm and
/// `p`, and share the same recorded iterations.
pub fn empirical_eps_time(traces: &[Trace], epsilon: f64) -> Result<EpsilonTimeEstimate> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if traces.len() < MIN_RUNS {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_RUNS} runs, got {}",
            traces.len()
        )));
    }
    let first = &traces[0];
    for t in &traces[1..] {
        if t.config_key != first.config_key {
            return Err(Error::MixedTraces(format!(
                "run {} differs from run {} in graph, initial state, algorithm or p",
                t.run_index, first.run_index
            )));
        }
        if t.points.len() != first.points.len()
            || t.points.iter().zip(&first.points).any(|(a, b)| a.iteration != b.iteration)
        {
            return Err(Error::MixedTraces(format!(
                "run {} records different iterations than run {}",
                t.run_index, first.run_index
            )));
        }
    }

    let runs = traces.len() as f64;
    let empirical_t = (0..first.points.len())
        .find(|&j| {
            let above = traces.iter().filter(|t| t.points[j].rel_error >= epsilon).count();
            above as f64 <= epsilon * runs
        })
        .map(|j| first.points[j].iteration);

    Ok(EpsilonTimeEstimate {
        epsilon,
        empirical_t,
        rg_upper_bound: None,
    })
}
