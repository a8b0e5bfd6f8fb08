//! Sample greedy gossip for distributed averaging.
//!
//! A network of nodes on a [`graph::Graph`] repeatedly averages values in
//! pairs until every node holds the initial mean. This crate simulates three
//! partner-selection rules ([`engine::Algorithm`]): randomized, greedy and
//! sample greedy gossip, where each neighbour activates with probability `p`
//! and the greedy rule runs only over the active ones. Alongside the
//! simulator it evaluates the exact expected one-step error reduction of each
//! rule ([`analysis`]), the spectral bound on the randomized averaging time,
//! and drives Monte-Carlo sweeps that write CSV results ([`harness`]).
//!
//! ```
//! use sgg::engine::{run, Algorithm};
//! use sgg::{analysis, fields, graph, rng};
//!
//! let g = graph::generate_random_geometric(50, 2.0, &mut rng::from_seed(1))?;
//! let a0 = fields::linear_field(&g);
//!
//! let rg = analysis::rg_expected_reduction(&a0, &g);
//! let sgg = analysis::sgg_expected_reduction(&a0, &g, 0.5)?;
//! let gg = analysis::gg_expected_reduction(&a0, &g);
//! assert!(rg <= sgg && sgg <= gg);
//!
//! let trace = run(&g, &a0, Algorithm::SampleGreedy, 0.5, 500, 7, 0)?;
//! assert!(trace.final_error() < 1.0);
//! # Ok::<(), sgg::Error>(())
//! ```
//!
//! The guide under `book/` walks through the model and the analysis; its
//! code listings are compiled as doctests of this crate.

pub mod analysis;
pub mod engine;
mod error;
pub mod fields;
pub mod graph;
pub mod harness;
pub mod numeric;
pub mod rng;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/engine.md")]
    mod engine {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    mod reductions {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
