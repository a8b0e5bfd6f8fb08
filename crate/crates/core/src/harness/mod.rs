//! Monte-Carlo experiment driver and the front door used by the `sgg` binary.

mod config;
mod experiment;
mod output;

use std::path::PathBuf;
use std::str::FromStr;

pub use config::ExperimentConfig;
pub use experiment::{run_experiment, sweep_d, sweep_p, ResultRow, ResultTable, RunMetadata};
pub use output::{format_float, metadata_path, save, write_csv, write_trace_csv, CSV_HEADER};

use crate::analysis::BoundReport;
use crate::error::{Error, Result};
use crate::fields::FieldSpec;
use crate::graph::{self, Graph, GraphDump};
use crate::rng::{self, StreamTag};

/// Where `analyze` gets its graph: a JSON dump or `gen:n,d`.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    Generate { n: usize, d: f64 },
}

impl FromStr for GraphSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let Some(params) = s.strip_prefix("gen:") else {
            return Ok(GraphSource::File(PathBuf::from(s)));
        };
        let bad = || Error::Config(format!("expected gen:<n>,<d>, got `{s}`"));
        let (n, d) = params.split_once(',').ok_or_else(bad)?;
        Ok(GraphSource::Generate {
            n: n.trim().parse().map_err(|_| bad())?,
            d: d.trim().parse().map_err(|_| bad())?,
        })
    }
}

impl GraphSource {
    /// Loads or generates the graph. Generated graphs use the graph stream of
    /// `(seed, 0)`.
    pub fn resolve(&self, seed: u64) -> Result<Graph> {
        match self {
            GraphSource::File(path) => GraphDump::load(path)?.to_graph(),
            GraphSource::Generate { n, d } => {
                graph::generate_random_geometric(*n, *d, &mut rng::stream(seed, 0, StreamTag::Graph))
            }
        }
    }
}

/// Builds the graph and field and evaluates every analytic quantity.
///
/// A random field without its own seed uses the field stream of `(seed, 0)`.
pub fn analyze(source: &GraphSource, field: &FieldSpec, p: f64, epsilon: f64, seed: u64) -> Result<BoundReport> {
    let g = source.resolve(seed)?;
    if !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let a = field.build(&g, rng::stream_seed(seed, 0, StreamTag::Field))?;
    BoundReport::compute(&a, &g, p, epsilon)
}
