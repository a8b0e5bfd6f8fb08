use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{self, Algorithm, Trace, DENSE_RECORD_LIMIT, SPARSE_RECORD_STRIDE};
use crate::error::{Error, Result};
use crate::graph::{self, Graph, MAX_CONNECTIVITY_ATTEMPTS};
use crate::rng::{self, StreamTag};

use super::ExperimentConfig;

/// Runs are simulated in parallel batches of this size and folded into the
/// statistics in run order, which keeps results independent of thread count.
const BATCH: usize = 64;

/// Aggregated statistics of one `(algorithm, p, d)` cell at one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub algorithm: Algorithm,
    pub p: f64,
    pub d: f64,
    pub iteration: u64,
    pub mean_rel_error: f64,
    /// Sample standard deviation over runs (0 for a single run).
    pub std_rel_error: f64,
    /// Mean cumulative probe messages.
    pub mean_probe_msgs: f64,
    /// Mean cumulative exchange messages.
    pub mean_exchange_msgs: f64,
    /// Mean cumulative degree of the woken sources. Not written to CSV.
    pub mean_source_degree: f64,
    pub runs: usize,
}

impl ResultRow {
    /// Standard error of `mean_rel_error`.
    pub fn std_error(&self) -> f64 {
        self.std_rel_error / (self.runs as f64).sqrt()
    }
}

/// Provenance written next to the CSV output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub config: ExperimentConfig,
    pub d_values: Vec<f64>,
    pub graph_sampling: &'static str,
    pub max_connectivity_attempts: usize,
    /// Disconnected draws discarded across all generated graphs.
    pub rejected_graph_draws: usize,
    /// Runs whose initial state already was the average (errors reported as 0).
    pub degenerate_runs: usize,
    pub dense_record_limit: u64,
    pub sparse_record_stride: u64,
    pub seed_derivation: &'static str,
}

/// Result of an experiment or sweep: rows sorted by (algorithm, p, d, iteration).
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
    pub metadata: RunMetadata,
}

impl ResultTable {
    /// Rows of one cell, in iteration order.
    pub fn cell(&self, algorithm: Algorithm, p: f64, d: f64) -> Vec<&ResultRow> {
        self.rows
            .iter()
            .filter(|r| r.algorithm == algorithm && r.p == p && r.d == d)
            .collect()
    }

    /// Last row of one cell.
    pub fn final_row(&self, algorithm: Algorithm, p: f64, d: f64) -> Option<&ResultRow> {
        self.cell(algorithm, p, d).into_iter().last()
    }
}

/// Welford accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn std(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).sqrt()
        }
    }
}

#[derive(Debug, Clone, Default)]
struct PointStats {
    iteration: u64,
    rel_error: Moments,
    probes: Moments,
    exchanges: Moments,
    degrees: Moments,
}

struct RunOutput {
    traces: Vec<Trace>,
    rejected: usize,
}

fn simulate_run(
    cfg: &ExperimentConfig,
    d: f64,
    cells: &[(Algorithm, f64)],
    run_index: u64,
    shared_graph: Option<&Graph>,
) -> Result<RunOutput> {
    let (owned, rejected) = match shared_graph {
        Some(_) => (None, 0),
        None => {
            let mut grng = rng::stream(cfg.master_seed, run_index, StreamTag::Graph);
            let (g, rejected) = graph::generate_random_geometric_counted(cfg.n, d, &mut grng)?;
            (Some(g), rejected)
        }
    };
    let g = shared_graph.or(owned.as_ref()).expect("one of the two graphs is set");
    let field_seed = rng::stream_seed(cfg.master_seed, run_index, StreamTag::Field);
    let a0 = cfg.field.build(g, field_seed)?;
    let traces = cells
        .iter()
        .map(|&(alg, p)| engine::run(g, &a0, alg, p, cfg.iterations, cfg.master_seed, run_index))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunOutput { traces, rejected })
}

fn run_grid(cfg: &ExperimentConfig, d_values: &[f64]) -> Result<ResultTable> {
    cfg.validate()?;
    let cells = cfg.cells();
    let mut rows = Vec::new();
    let mut rejected_total = 0;
    let mut degenerate_runs = 0;

    for &d in d_values {
        let shared = if cfg.fresh_graph_per_run {
            None
        } else {
            let mut grng = rng::stream(cfg.master_seed, 0, StreamTag::Graph);
            let (g, rejected) = graph::generate_random_geometric_counted(cfg.n, d, &mut grng)?;
            rejected_total += rejected;
            Some(g)
        };

        let mut stats: Vec<Vec<PointStats>> = vec![Vec::new(); cells.len()];
        let run_ids: Vec<u64> = (0..cfg.runs as u64).collect();
        for batch in run_ids.chunks(BATCH) {
            let outputs = batch
                .par_iter()
                .map(|&r| simulate_run(cfg, d, &cells, r, shared.as_ref()))
                .collect::<Vec<_>>();
            for out in outputs {
                let out = out?;
                rejected_total += out.rejected;
                degenerate_runs += usize::from(out.traces.first().is_some_and(|t| t.degenerate));
                for (cell_stats, trace) in stats.iter_mut().zip(&out.traces) {
                    if cell_stats.is_empty() {
                        cell_stats.resize(trace.points.len(), PointStats::default());
                    }
                    for (acc, pt) in cell_stats.iter_mut().zip(&trace.points) {
                        acc.iteration = pt.iteration;
                        acc.rel_error.push(pt.rel_error);
                        acc.probes.push(pt.probe_messages as f64);
                        acc.exchanges.push(pt.exchange_messages as f64);
                        acc.degrees.push(pt.source_degree as f64);
                    }
                }
            }
        }

        for (&(algorithm, p), cell_stats) in cells.iter().zip(stats) {
            rows.extend(cell_stats.into_iter().map(|s| ResultRow {
                algorithm,
                p,
                d,
                iteration: s.iteration,
                mean_rel_error: s.rel_error.mean,
                std_rel_error: s.rel_error.std(),
                mean_probe_msgs: s.probes.mean,
                mean_exchange_msgs: s.exchanges.mean,
                mean_source_degree: s.degrees.mean,
                runs: s.rel_error.count,
            }));
        }
    }

    rows.sort_by(|a, b| {
        a.algorithm
            .as_str()
            .cmp(b.algorithm.as_str())
            .then(a.p.total_cmp(&b.p))
            .then(a.d.total_cmp(&b.d))
            .then(a.iteration.cmp(&b.iteration))
    });

    Ok(ResultTable {
        rows,
        metadata: RunMetadata {
            config: cfg.clone(),
            d_values: d_values.to_vec(),
            graph_sampling: if cfg.fresh_graph_per_run {
                "fresh connected random geometric graph per run (disconnected draws rejected)"
            } else {
                "one connected random geometric graph shared by all runs (disconnected draws rejected)"
            },
            max_connectivity_attempts: MAX_CONNECTIVITY_ATTEMPTS,
            rejected_graph_draws: rejected_total,
            degenerate_runs,
            dense_record_limit: DENSE_RECORD_LIMIT,
            sparse_record_stride: SPARSE_RECORD_STRIDE,
            seed_derivation: "ChaCha8 seeded with mix(mix(mix(master_seed) + run_index) + tag), \
                              mix = SplitMix64 finalizer; tags: node=1 activation=2 graph=3 field=4",
        },
    })
}

/// Runs every `(algorithm, p)` cell of `cfg` at the single scaling factor `cfg.d`.
///
/// Run `r` of every cell sees the same graph, initial field and random
/// streams, so cells differ only through the partner-selection rule.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    run_grid(cfg, &[cfg.d])
}

/// Sweeps the activation probability over `cfg.p_values`.
pub fn sweep_p(cfg: &ExperimentConfig) -> Result<ResultTable> {
    if cfg.p_values.is_empty() {
        return Err(Error::Config("p sweep needs a non-empty p_values grid".into()));
    }
    if !cfg.algorithms.contains(&Algorithm::SampleGreedy) {
        return Err(Error::Config("p sweep needs sample_greedy among the algorithms".into()));
    }
    run_grid(cfg, &[cfg.d])
}

/// Sweeps the scaling factor over `cfg.d_values`.
pub fn sweep_d(cfg: &ExperimentConfig) -> Result<ResultTable> {
    if cfg.d_values.is_empty() {
        return Err(Error::Config("d sweep needs a non-empty d_values grid".into()));
    }
    run_grid(cfg, &cfg.d_values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FieldSpec;

    fn cfg(runs: usize, iterations: u64) -> ExperimentConfig {
        ExperimentConfig {
            n: 20,
            d: 2.0,
            d_values: vec![],
            algorithms: Algorithm::ALL.to_vec(),
            p_values: vec![0.0, 0.5, 1.0],
            iterations,
            runs,
            field: FieldSpec::RandomNormal { seed: None },
            master_seed: 11,
            fresh_graph_per_run: true,
            output_path: None,
        }
    }

    #[test]
    fn single_run_zero_iterations() {
        let mut c = cfg(1, 0);
        c.algorithms = vec![Algorithm::Greedy];
        let table = run_experiment(&c).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0].mean_rel_error, 1.0);
        assert_eq!(table.rows[0].std_rel_error, 0.0);
        assert_eq!(table.rows[0].runs, 1);
    }

    #[test]
    fn endpoint_cells_match_baselines_exactly() {
        let table = run_experiment(&cfg(30, 200)).unwrap();
        let rg = table.cell(Algorithm::Randomized, 0.0, 2.0);
        let sgg0 = table.cell(Algorithm::SampleGreedy, 0.0, 2.0);
        let gg = table.cell(Algorithm::Greedy, 1.0, 2.0);
        let sgg1 = table.cell(Algorithm::SampleGreedy, 1.0, 2.0);
        assert_eq!(rg.len(), 201);
        for (a, b) in rg.iter().zip(&sgg0) {
            assert_eq!(a.mean_rel_error, b.mean_rel_error);
            assert_eq!(a.std_rel_error, b.std_rel_error);
        }
        for (a, b) in gg.iter().zip(&sgg1) {
            assert_eq!(a.mean_rel_error, b.mean_rel_error);
            assert_eq!(a.mean_probe_msgs, b.mean_probe_msgs);
        }
    }

    #[test]
    fn rows_are_sorted_and_monotone() {
        let table = run_experiment(&cfg(10, 100)).unwrap();
        for w in table.rows.windows(2) {
            let key = |r: &ResultRow| (r.algorithm.as_str(), r.p.to_bits(), r.d.to_bits(), r.iteration);
            assert!(key(&w[0]) < key(&w[1]));
            if key(&w[0]).0 == key(&w[1]).0 && w[0].p == w[1].p {
                assert!(w[1].mean_rel_error <= w[0].mean_rel_error);
            }
        }
        assert!(table.rows.iter().all(|r| (0.0..=1.0).contains(&r.mean_rel_error)));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let c = cfg(70, 50);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_experiment(&c)).unwrap();
        let b = four.install(|| run_experiment(&c)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shared_graph_mode() {
        let mut c = cfg(5, 20);
        c.fresh_graph_per_run = false;
        let table = run_experiment(&c).unwrap();
        assert!(table.metadata.graph_sampling.starts_with("one connected"));
    }

    #[test]
    fn sweeps_validate_their_grids() {
        let mut c = cfg(2, 5);
        c.p_values.clear();
        c.algorithms = vec![Algorithm::Greedy];
        assert!(matches!(sweep_p(&c), Err(Error::Config(_))));
        assert!(matches!(sweep_d(&cfg(2, 5)), Err(Error::Config(_))));
        let mut c = cfg(2, 5);
        c.d_values = vec![2.0];
        let swept = sweep_d(&c).unwrap();
        let mut plain = run_experiment(&cfg(2, 5)).unwrap();
        plain.metadata = swept.metadata.clone();
        assert_eq!(swept.rows, plain.rows);
    }

    #[test]
    fn connectivity_failure_surfaces() {
        let mut c = cfg(2, 5);
        c.n = 50;
        c.d_values = vec![0.1];
        let err = sweep_d(&c).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
