use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sgg::fields::FieldSpec;
use sgg::graph::{self, GraphDump};
use sgg::harness::{self, ExperimentConfig, GraphSource, ResultTable};
use sgg::rng::{self, StreamTag};
use sgg::{Error, Result};

/// Sample greedy gossip simulator and analysis tool.
#[derive(Debug, Parser)]
#[command(name = "sgg", version)]
struct Cli {
    /// Override the master seed of the config (and seed graph generation for analyze).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads. Results do not depend on this value.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every (algorithm, p) cell of an experiment config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sweep the activation probability over `p_values`.
    SweepP {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sweep the graph scaling factor over `d_values`.
    SweepD {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate expected reductions, eta, gamma, lambda2 and the averaging-time bound.
    Analyze {
        /// Graph dump path, or gen:<n>,<d>.
        #[arg(long)]
        graph: String,
        /// linear | spike[:node] | gaussian_bumps | random_normal[:seed] | JSON object.
        #[arg(long)]
        field: String,
        #[arg(long)]
        p: f64,
        /// Epsilon used for rg_bound_eps.
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a connected random geometric graph and dump it as JSON.
    DumpGraph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_output(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
    }
}

fn emit_table(table: &ResultTable, cfg: &ExperimentConfig) -> Result<()> {
    match &cfg.output_path {
        Some(path) => harness::save(table, path),
        None => harness::write_csv(table, io::stdout().lock()).map_err(|e| Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
    }
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = seed {
        cfg.master_seed = seed;
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Simulate { config } => {
            let cfg = load_config(&config, seed)?;
            emit_table(&harness::run_experiment(&cfg)?, &cfg)
        }
        Command::SweepP { config } => {
            let cfg = load_config(&config, seed)?;
            emit_table(&harness::sweep_p(&cfg)?, &cfg)
        }
        Command::SweepD { config } => {
            let cfg = load_config(&config, seed)?;
            emit_table(&harness::sweep_d(&cfg)?, &cfg)
        }
        Command::Analyze {
            graph,
            field,
            p,
            eps,
            out,
        } => {
            let source: GraphSource = graph.parse()?;
            let field = FieldSpec::parse(&field)?;
            let report = harness::analyze(&source, &field, p, eps, seed.unwrap_or(0))?;
            let json = serde_json::to_string_pretty(&report).expect("report serialises");
            write_output(&(json + "\n"), out.as_deref())
        }
        Command::DumpGraph { n, d, out } => {
            let seed = seed.unwrap_or(0);
            let g = graph::generate_random_geometric(n, d, &mut rng::stream(seed, 0, StreamTag::Graph))?;
            let dump = GraphDump::new(&g, d, seed);
            let json = serde_json::to_string_pretty(&dump).expect("dump serialises");
            write_output(&(json + "\n"), out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build_global()
    {
        eprintln!("sgg: cannot start thread pool: {e}");
        return ExitCode::from(2);
    }
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sgg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
