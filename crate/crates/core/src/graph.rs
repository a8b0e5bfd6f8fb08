//! Undirected network topologies and the random geometric graph generator.

use std::collections::VecDeque;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of consecutive disconnected draws tolerated by
/// [`generate_random_geometric`] before giving up.
pub const MAX_CONNECTIVITY_ATTEMPTS: usize = 1000;

/// Node identifier: a dense 0-based index.
pub type NodeId = usize;

/// An undirected simple graph with optional node positions in the unit square.
///
/// Adjacency lists are strictly increasing and never contain the node itself;
/// adjacency is symmetric. Connectivity is not enforced here: generated
/// graphs are always connected, hand-built ones may not be, and the engine
/// checks before simulating.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    positions: Vec<[f64; 2]>,
    adjacency: Vec<Vec<NodeId>>,
}

impl Graph {
    /// Builds a graph from an undirected edge list. Duplicate edges are merged;
    /// self-loops and out-of-range endpoints are rejected. Positions default to
    /// the origin.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(s, t) in edges {
            for node in [s, t] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if s == t {
                return Err(Error::InvalidParameter(format!("self-loop on node {s}")));
            }
            adjacency[s].push(t);
            adjacency[t].push(s);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph {
            positions: vec![[0.0, 0.0]; n],
            adjacency,
        })
    }

    /// Attaches node positions. The slice length must equal the node count.
    pub fn with_positions(mut self, positions: Vec<[f64; 2]>) -> Result<Self> {
        if positions.len() != self.node_count() {
            return Err(Error::InvalidParameter(format!(
                "{} positions for {} nodes",
                positions.len(),
                self.node_count()
            )));
        }
        self.positions = positions;
        Ok(self)
    }

    /// Complete graph on `n` nodes.
    pub fn complete(n: usize) -> Self {
        let adjacency = (0..n)
            .map(|s| (0..n).filter(|&t| t != s).collect())
            .collect();
        Graph {
            positions: vec![[0.0, 0.0]; n],
            adjacency,
        }
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|t| (t - 1, t)).collect();
        Self::from_edges(n, &edges).expect("path edges are in range")
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|t| (0, t)).collect();
        Self::from_edges(leaves + 1, &edges).expect("star edges are in range")
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn position(&self, s: NodeId) -> [f64; 2] {
        self.positions[s]
    }

    /// Neighbours of `s` in ascending order.
    ///
    /// Panics if `s` is out of range.
    pub fn neighbors(&self, s: NodeId) -> &[NodeId] {
        &self.adjacency[s]
    }

    /// Number of neighbours of `s`.
    pub fn degree(&self, s: NodeId) -> usize {
        self.adjacency[s].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges `(s, t)` with `s < t`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(s, list)| list.iter().filter(move |&&t| t > s).map(move |&t| (s, t)))
    }

    /// True iff a breadth-first search from node 0 reaches every node.
    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(s) = queue.pop_front() {
            for &t in &self.adjacency[s] {
                if !seen[t] {
                    seen[t] = true;
                    reached += 1;
                    queue.push_back(t);
                }
            }
        }
        reached == n
    }
}

/// Connection radius `sqrt(d ln n / n)` of the random geometric graph.
pub fn connection_radius(n: usize, d: f64) -> f64 {
    let n = n as f64;
    (d * n.ln() / n).sqrt()
}

/// Draws a connected random geometric graph.
///
/// Nodes are placed independently and uniformly in the unit square and `s`, `t`
/// are joined iff their Euclidean distance is strictly below
/// [`connection_radius`]. Disconnected draws are discarded and redrawn from
/// the same stream, up to [`MAX_CONNECTIVITY_ATTEMPTS`] times.
pub fn generate_random_geometric<R: Rng + ?Sized>(n: usize, d: f64, rng: &mut R) -> Result<Graph> {
    generate_random_geometric_counted(n, d, rng).map(|(g, _)| g)
}

/// As [`generate_random_geometric`], also returning how many disconnected
/// draws were rejected before the accepted one.
pub fn generate_random_geometric_counted<R: Rng + ?Sized>(
    n: usize,
    d: f64,
    rng: &mut R,
) -> Result<(Graph, usize)> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 nodes, got {n}")));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "scaling factor must be positive, got {d}"
        )));
    }
    let radius = connection_radius(n, d);
    let r2 = radius * radius;
    for rejected in 0..MAX_CONNECTIVITY_ATTEMPTS {
        let positions: Vec<[f64; 2]> = (0..n).map(|_| [rng.random(), rng.random()]).collect();
        let g = geometric_graph(positions, r2);
        if g.is_connected() {
            return Ok((g, rejected));
        }
    }
    Err(Error::Disconnected {
        n,
        d,
        attempts: MAX_CONNECTIVITY_ATTEMPTS,
    })
}

fn geometric_graph(positions: Vec<[f64; 2]>, r2: f64) -> Graph {
    let n = positions.len();
    let mut adjacency = vec![Vec::new(); n];
    for s in 0..n {
        for t in (s + 1)..n {
            let dx = positions[s][0] - positions[t][0];
            let dy = positions[s][1] - positions[t][1];
            if dx * dx + dy * dy < r2 {
                adjacency[s].push(t);
                adjacency[t].push(s);
            }
        }
    }
    // Pushes happen in increasing order of the other endpoint, so lists are sorted.
    Graph {
        positions,
        adjacency,
    }
}

/// JSON dump of a generated graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDump {
    pub n: usize,
    pub d: f64,
    pub seed: u64,
    pub positions: Vec<[f64; 2]>,
    pub edges: Vec<[NodeId; 2]>,
}

impl GraphDump {
    pub fn new(g: &Graph, d: f64, seed: u64) -> Self {
        GraphDump {
            n: g.node_count(),
            d,
            seed,
            positions: g.positions().to_vec(),
            edges: g.edges().map(|(s, t)| [s, t]).collect(),
        }
    }

    pub fn to_graph(&self) -> Result<Graph> {
        let edges: Vec<_> = self.edges.iter().map(|&[s, t]| (s, t)).collect();
        Graph::from_edges(self.n, &edges)?.with_positions(self.positions.clone())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::json(path, e))?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}
