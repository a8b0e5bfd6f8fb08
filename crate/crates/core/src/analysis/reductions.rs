//! One-step expected reductions of `||a - avg||^2`.
//!
//! Each iteration lowers the squared error by exactly half the squared
//! discrepancy of the averaged pair, so the expected one-step reduction is
//! `1/(2N) * sum_s f_s` where `f_s` is the expected squared discrepancy once
//! `s` has woken up:
//!
//! * randomized: `f_s = mean_t d_st`;
//! * greedy: `f_s = max_t d_st`;
//! * sample greedy: with the discrepancies of `s` sorted descending
//!   `d_(1) >= ... >= d_(K)`, the partner is the `k`-th largest exactly when
//!   the `k - 1` larger ones stay inactive and the `k`-th activates, so
//!   `f_s = sum_k p (1-p)^(k-1) d_(k) + (1-p)^K mean_t d_st`.
//!
//! The sample greedy closed form is cross-checked against
//! [`sgg_expected_reduction_bruteforce`], a literal sum over every activation
//! pattern.

use serde::{Deserialize, Serialize};

use crate::engine::StateVector;
use crate::error::{check_probability, Error, Result};
use crate::graph::{Graph, NodeId};
use crate::numeric::{self, CompensatedSum};

/// Largest degree accepted by [`sgg_expected_reduction_bruteforce`].
pub const BRUTEFORCE_DEGREE_CAP: usize = 20;

fn discrepancies(a: &[f64], g: &Graph, s: NodeId) -> Vec<f64> {
    g.neighbors(s).iter().map(|&t| (a[s] - a[t]) * (a[s] - a[t])).collect()
}

fn mean(d: &[f64]) -> f64 {
    numeric::sum(d.iter().copied()) / d.len() as f64
}

fn max(d: &[f64]) -> f64 {
    d.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Per-node contribution of sample greedy gossip from the order-statistic
/// closed form. `d` must be sorted in descending order and non-empty.
///
/// Centred on the mean for `p <= 1/2` and on the maximum above, which makes
/// `p = 0` return the randomized value and `p = 1` the greedy value exactly.
fn sgg_node_term(d: &[f64], p: f64) -> f64 {
    let mean = mean(d);
    let max = d[0];
    let mut acc = CompensatedSum::new();
    let mut weight = p;
    if p <= 0.5 {
        for &dk in d {
            acc.add(weight * (dk - mean));
            weight *= 1.0 - p;
        }
        mean + acc.value()
    } else {
        for &dk in d {
            acc.add(weight * (max - dk));
            weight *= 1.0 - p;
        }
        // `weight` is now p (1-p)^K; the empty-set probability is (1-p)^K.
        let none_active = (1.0 - p).powi(d.len() as i32);
        acc.add(none_active * (max - mean));
        max - acc.value()
    }
}

fn reduce<F>(a: &StateVector, g: &Graph, mut node_term: F) -> f64
where
    F: FnMut(&mut Vec<f64>) -> f64,
{
    let values = a.values();
    assert_eq!(values.len(), g.node_count(), "state and graph sizes differ");
    let mut total = CompensatedSum::new();
    for s in 0..g.node_count() {
        if g.degree(s) == 0 {
            continue;
        }
        let mut d = discrepancies(values, g, s);
        total.add(node_term(&mut d));
    }
    total.value() / (2.0 * g.node_count() as f64)
}

/// Expected one-step reduction under randomized gossip,
/// `1/(2N) sum_s 1/|N_s| sum_t (a_s - a_t)^2`.
pub fn rg_expected_reduction(a: &StateVector, g: &Graph) -> f64 {
    reduce(a, g, |d| mean(d))
}

/// Expected one-step reduction under greedy gossip,
/// `1/(2N) sum_s max_t (a_s - a_t)^2`.
pub fn gg_expected_reduction(a: &StateVector, g: &Graph) -> f64 {
    reduce(a, g, |d| max(d))
}

/// Exact expected one-step reduction under sample greedy gossip with
/// activation probability `p`, via the order-statistic closed form.
pub fn sgg_expected_reduction(a: &StateVector, g: &Graph, p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(reduce(a, g, |d| {
        // Stable, so equal discrepancies keep neighbour order.
        d.sort_by(|x, y| y.total_cmp(x));
        sgg_node_term(d, p)
    }))
}

/// The same quantity by exhaustive enumeration: for every `m = 1..=K` and
/// every `m`-subset of the neighbourhood, weight the subset maximum by
/// `p^m (1-p)^(K-m)`; add `(1-p)^K` times the neighbourhood mean for the empty
/// set. Cost is `2^K` per node, so degrees above [`BRUTEFORCE_DEGREE_CAP`]
/// are refused.
pub fn sgg_expected_reduction_bruteforce(a: &StateVector, g: &Graph, p: f64) -> Result<f64> {
    check_probability(p)?;
    if let Some(s) = (0..g.node_count()).find(|&s| g.degree(s) > BRUTEFORCE_DEGREE_CAP) {
        return Err(Error::DegreeCapExceeded {
            node: s,
            degree: g.degree(s),
            cap: BRUTEFORCE_DEGREE_CAP,
        });
    }
    Ok(reduce(a, g, |d| {
        let k = d.len();
        let mut acc = CompensatedSum::new();
        for m in 1..=k {
            let weight = p.powi(m as i32) * (1.0 - p).powi((k - m) as i32);
            let mut subset_sum = CompensatedSum::new();
            for mask in subsets_of_size(k, m) {
                let best = (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| d[i])
                    .fold(f64::NEG_INFINITY, f64::max);
                subset_sum.add(best);
            }
            acc.add(weight * subset_sum.value());
        }
        acc.add((1.0 - p).powi(k as i32) * mean(d));
        acc.value()
    }))
}

/// All `m`-element subsets of `{0..k}` as bit masks (Gosper's hack).
fn subsets_of_size(k: usize, m: usize) -> impl Iterator<Item = u32> {
    let limit = 1u64 << k;
    let first = (1u64 << m) - 1;
    std::iter::successors(Some(first), move |&x| {
        let c = x & x.wrapping_neg();
        let r = x + c;
        let next = (((r ^ x) >> 2) / c) | r;
        (next < limit).then_some(next)
    })
    .take_while(move |&x| x < limit)
    .map(|x| x as u32)
}

/// Improvement of sample greedy over randomized gossip,
/// `sgg_expected_reduction - rg_expected_reduction`.
pub fn eta(a: &StateVector, g: &Graph, p: f64) -> Result<f64> {
    Ok(sgg_expected_reduction(a, g, p)? - rg_expected_reduction(a, g))
}

/// Shortfall of sample greedy against greedy gossip,
/// `gg_expected_reduction - sgg_expected_reduction`.
pub fn gamma(a: &StateVector, g: &Graph, p: f64) -> Result<f64> {
    Ok(gg_expected_reduction(a, g) - sgg_expected_reduction(a, g, p)?)
}

/// Checks that the sample greedy reduction does not decrease along an
/// ascending grid of activation probabilities.
///
/// The increase is required to be strict whenever some node sees at least two
/// different squared discrepancies; otherwise every `f_s` is flat in `p` and
/// only non-decrease is asked for. Decreases within a relative `1e-12` are
/// tolerated.
pub fn monotonicity_check(a: &StateVector, g: &Graph, p_grid: &[f64]) -> Result<bool> {
    if p_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("probability grid must be strictly ascending".into()));
    }
    let values = p_grid
        .iter()
        .map(|&p| sgg_expected_reduction(a, g, p))
        .collect::<Result<Vec<_>>>()?;
    let strict = (0..g.node_count()).any(|s| {
        let d = discrepancies(a.values(), g, s);
        d.iter().any(|&x| x != d[0])
    });
    Ok(values.windows(2).all(|w| {
        let slack = 1e-12 * w[0].abs().max(w[1].abs());
        if strict {
            w[1] > w[0]
        } else {
            w[1] >= w[0] - slack
        }
    }))
}

/// The analytic quantities for one state and activation probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub p: f64,
    #[serde(rename = "rg")]
    pub rg_reduction: f64,
    #[serde(rename = "sgg")]
    pub sgg_reduction: f64,
    #[serde(rename = "gg")]
    pub gg_reduction: f64,
    pub eta: f64,
    pub gamma: f64,
    /// Second largest eigenvalue of the mean randomized update matrix.
    pub lambda2: f64,
    /// Upper bound on the randomized epsilon-averaging time.
    pub rg_bound_eps: f64,
}

impl BoundReport {
    /// Evaluates every quantity. `epsilon` only affects `rg_bound_eps`.
    pub fn compute(a: &StateVector, g: &Graph, p: f64, epsilon: f64) -> Result<Self> {
        let rg = rg_expected_reduction(a, g);
        let sgg = sgg_expected_reduction(a, g, p)?;
        let gg = gg_expected_reduction(a, g);
        let lambda2 = super::lambda2(&super::rg_mean_update_matrix(g))?;
        Ok(BoundReport {
            p,
            rg_reduction: rg,
            sgg_reduction: sgg,
            gg_reduction: gg,
            eta: sgg - rg,
            gamma: gg - sgg,
            lambda2,
            rg_bound_eps: super::rg_eps_time_bound(lambda2, epsilon)?,
        })
    }

    /// `0 <= rg <= sgg <= gg`.
    pub fn is_ordered(&self) -> bool {
        0.0 <= self.rg_reduction
            && self.rg_reduction <= self.sgg_reduction
            && self.sgg_reduction <= self.gg_reduction
    }
}
