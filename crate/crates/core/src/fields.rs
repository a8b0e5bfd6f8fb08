//! Initial value assignments `a(0)`.
//!
//! Four fields are provided: a sum of Gaussian bumps, a linear ramp
//! `x + y`, a single spike, and i.i.d. standard normal values. The normal
//! draws use the Box–Muller transform (cosine branch only, one pair of
//! uniforms per node) so a seed reproduces the same field on every build.

use rand::distr::OpenClosed01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::StateVector;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// One isotropic Gaussian bump `amplitude * exp(-r^2 / (2 width^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Bump {
    pub center: [f64; 2],
    pub amplitude: f64,
    pub width: f64,
}

impl Bump {
    pub fn new(cx: f64, cy: f64, amplitude: f64, width: f64) -> Self {
        Bump {
            center: [cx, cy],
            amplitude,
            width,
        }
    }

    fn eval(&self, [x, y]: [f64; 2]) -> f64 {
        let dx = x - self.center[0];
        let dy = y - self.center[1];
        self.amplitude * (-(dx * dx + dy * dy) / (2.0 * self.width * self.width)).exp()
    }
}

impl From<[f64; 4]> for Bump {
    fn from([cx, cy, amplitude, width]: [f64; 4]) -> Self {
        Bump::new(cx, cy, amplitude, width)
    }
}

impl From<Bump> for [f64; 4] {
    fn from(b: Bump) -> Self {
        [b.center[0], b.center[1], b.amplitude, b.width]
    }
}

/// The default two-bump configuration.
pub fn default_bumps() -> Vec<Bump> {
    vec![Bump::new(0.3, 0.3, 1.0, 0.15), Bump::new(0.7, 0.7, 0.5, 0.15)]
}

/// Which initial field to build, with its parameters.
///
/// In JSON this is an object tagged by `kind`, e.g.
/// `{"kind": "spike", "node": 0}` or
/// `{"kind": "gaussian_bumps", "bumps": [[0.3, 0.3, 1.0, 0.15]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    GaussianBumps {
        #[serde(default = "default_bumps")]
        bumps: Vec<Bump>,
    },
    Linear,
    Spike {
        #[serde(default)]
        node: NodeId,
    },
    /// i.i.d. standard normal values. `uniform_random` is accepted as an alias.
    /// Without a seed the harness derives one per run.
    #[serde(alias = "uniform_random")]
    RandomNormal {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

impl FieldSpec {
    /// The four fields of the experiment suite with default parameters.
    pub fn standard_set() -> [FieldSpec; 4] {
        [
            FieldSpec::GaussianBumps {
                bumps: default_bumps(),
            },
            FieldSpec::Linear,
            FieldSpec::Spike { node: 0 },
            FieldSpec::RandomNormal { seed: None },
        ]
    }

    /// Short name used in logs and file names.
    pub fn name(&self) -> &'static str {
        match self {
            FieldSpec::GaussianBumps { .. } => "gaussian_bumps",
            FieldSpec::Linear => "linear",
            FieldSpec::Spike { .. } => "spike",
            FieldSpec::RandomNormal { .. } => "random_normal",
        }
    }

    /// Checks the parameters that do not depend on a particular graph.
    pub fn validate(&self) -> Result<()> {
        if let FieldSpec::GaussianBumps { bumps } = self {
            check_bumps(bumps)?;
        }
        Ok(())
    }

    /// Builds the field on `g`. `fallback_seed` seeds the normal draws when the
    /// spec carries no seed of its own.
    pub fn build(&self, g: &Graph, fallback_seed: u64) -> Result<StateVector> {
        match self {
            FieldSpec::GaussianBumps { bumps } => gaussian_bumps(g, bumps),
            FieldSpec::Linear => Ok(linear_field(g)),
            FieldSpec::Spike { node } => spike_field(g, *node),
            FieldSpec::RandomNormal { seed } => {
                let mut rng = crate::rng::from_seed(seed.unwrap_or(fallback_seed));
                Ok(random_normal_field(g, &mut rng))
            }
        }
    }

    /// Parses the compact command-line syntax: `linear`, `spike[:node]`,
    /// `random_normal[:seed]` (alias `uniform_random`), `gaussian_bumps`, or a
    /// JSON object.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.starts_with('{') {
            return serde_json::from_str(text)
                .map_err(|e| Error::Config(format!("field spec `{text}`: {e}")));
        }
        let (kind, arg) = match text.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (text, None),
        };
        let number = |a: &str| {
            a.parse::<u64>()
                .map_err(|_| Error::Config(format!("field spec `{text}`: `{a}` is not an integer")))
        };
        let spec = match (kind, arg) {
            ("linear", None) => FieldSpec::Linear,
            ("gaussian_bumps", None) => FieldSpec::GaussianBumps {
                bumps: default_bumps(),
            },
            ("spike", None) => FieldSpec::Spike { node: 0 },
            ("spike", Some(a)) => FieldSpec::Spike {
                node: number(a)? as NodeId,
            },
            ("random_normal" | "uniform_random", None) => FieldSpec::RandomNormal { seed: None },
            ("random_normal" | "uniform_random", Some(a)) => FieldSpec::RandomNormal {
                seed: Some(number(a)?),
            },
            _ => return Err(Error::Config(format!("unrecognised field spec `{text}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn check_bumps(bumps: &[Bump]) -> Result<()> {
    if bumps.is_empty() {
        return Err(Error::InvalidParameter("at least one Gaussian bump is required".into()));
    }
    if let Some(b) = bumps.iter().find(|b| !(b.width > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "bump width must be positive, got {}",
            b.width
        )));
    }
    Ok(())
}

/// Sum of Gaussian bumps evaluated at each node position.
pub fn gaussian_bumps(g: &Graph, bumps: &[Bump]) -> Result<StateVector> {
    check_bumps(bumps)?;
    let values = g
        .positions()
        .iter()
        .map(|&pos| bumps.iter().map(|b| b.eval(pos)).sum())
        .collect();
    Ok(StateVector::new(values))
}

/// `a_s = x_s + y_s`.
pub fn linear_field(g: &Graph) -> StateVector {
    StateVector::new(g.positions().iter().map(|[x, y]| x + y).collect())
}

/// One at `spike`, zero elsewhere.
pub fn spike_field(g: &Graph, spike: NodeId) -> Result<StateVector> {
    let n = g.node_count();
    if spike >= n {
        return Err(Error::NodeOutOfRange { node: spike, n });
    }
    let mut values = vec![0.0; n];
    values[spike] = 1.0;
    Ok(StateVector::new(values))
}

/// i.i.d. standard normal values, one Box–Muller pair of uniforms per node.
pub fn random_normal_field<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> StateVector {
    StateVector::new((0..g.node_count()).map(|_| standard_normal(rng)).collect())
}

/// Box–Muller: `sqrt(-2 ln u1) * cos(2 pi u2)` with `u1` in (0, 1].
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.sample(OpenClosed01);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
