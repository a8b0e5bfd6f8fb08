use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::Algorithm;
use crate::error::{Error, Result};
use crate::fields::FieldSpec;

fn default_true() -> bool {
    true
}

/// One Monte-Carlo experiment, as read from a JSON config file.
///
/// ```json
/// {
///   "n": 50, "d": 2.0,
///   "algorithms": ["randomized", "greedy", "sample_greedy"],
///   "p_values": [0.5],
///   "iterations": 500, "runs": 200,
///   "field": {"kind": "spike", "node": 0},
///   "master_seed": 1,
///   "output_path": "fig3_spike.csv"
/// }
/// ```
///
/// `iterations` may also be spelled `L`. `d_values` is the grid used by the
/// `d` sweep; `fresh_graph_per_run` defaults to true.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub d: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub d_values: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub p_values: Vec<f64>,
    #[serde(alias = "L", alias = "l")]
    pub iterations: u64,
    pub runs: usize,
    pub field: FieldSpec,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_true")]
    pub fresh_graph_per_run: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything that can be checked before simulating.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        for &d in std::iter::once(&self.d).chain(&self.d_values) {
            if !(d > 0.0 && d.is_finite()) {
                return bad(format!("scaling factors must be positive, got {d}"));
            }
        }
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms selected".into());
        }
        if let Some(p) = self.p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return bad(format!("activation probabilities must lie in [0, 1], got {p}"));
        }
        if self.algorithms.contains(&Algorithm::SampleGreedy) && self.p_values.is_empty() {
            return bad("sample_greedy needs at least one entry in p_values".into());
        }
        self.field.validate().map_err(|e| Error::Config(e.to_string()))?;
        if let FieldSpec::Spike { node } = self.field {
            if node >= self.n {
                return bad(format!("spike node {node} out of range for n = {}", self.n));
            }
        }
        Ok(())
    }

    /// The `(algorithm, p)` cells, one per baseline and one per `p` for
    /// sample greedy gossip. Baselines carry their equivalent `p` (0 or 1).
    pub fn cells(&self) -> Vec<(Algorithm, f64)> {
        let mut cells = Vec::new();
        for &alg in &self.algorithms {
            match alg {
                Algorithm::SampleGreedy => cells.extend(self.p_values.iter().map(|&p| (alg, p))),
                _ => cells.push((alg, alg.effective_p(0.0))),
            }
        }
        cells.sort_by(|a, b| a.0.as_str().cmp(b.0.as_str()).then(a.1.total_cmp(&b.1)));
        cells.dedup();
        cells
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        serde_json::from_str(
            r#"{"n": 30, "d": 2, "algorithms": ["randomized", "sample_greedy", "greedy"],
                "p_values": [0.5, 0.25], "L": 10, "runs": 2, "field": {"kind": "linear"}}"#,
        )
        .unwrap()
    }

    #[test]
    fn parses_with_defaults() {
        let cfg = base();
        assert_eq!(cfg.iterations, 10);
        assert!(cfg.fresh_graph_per_run);
        assert_eq!(cfg.master_seed, 0);
        cfg.validate().unwrap();
        assert_eq!(
            cfg.cells(),
            vec![
                (Algorithm::Greedy, 1.0),
                (Algorithm::Randomized, 0.0),
                (Algorithm::SampleGreedy, 0.25),
                (Algorithm::SampleGreedy, 0.5)
            ]
        );
    }

    #[test]
    fn rejects_invalid_configs() {
        let mut cfg = base();
        cfg.runs = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = base();
        cfg.p_values = vec![1.5];
        assert!(cfg.validate().is_err());
        let mut cfg = base();
        cfg.p_values.clear();
        assert!(cfg.validate().is_err());
        let mut cfg = base();
        cfg.field = FieldSpec::Spike { node: 30 };
        assert!(cfg.validate().is_err());
        let mut cfg = base();
        cfg.d = -1.0;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        assert!(serde_json::from_str::<ExperimentConfig>(
            r#"{"n": 30, "d": 2, "algorithms": ["gossip"], "L": 10, "runs": 2, "field": {"kind": "linear"}}"#
        )
        .is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(
            r#"{"n": 30, "d": 2, "algorithms": [], "L": 10, "runs": 2, "field": {"kind": "linear"}, "typo": 1}"#
        )
        .is_err());
    }
}
