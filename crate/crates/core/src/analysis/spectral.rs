//! The mean randomized update matrix, its second eigenvalue and the
//! epsilon-averaging time bound it implies.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Dense symmetric update matrix: a single pairwise-averaging step, or the
/// expectation of one.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateMatrix(DMatrix<f64>);

impl UpdateMatrix {
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidParameter(format!(
                "update matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(UpdateMatrix(m))
    }

    /// `W_st = I - (e_s - e_t)(e_s - e_t)^T / 2`: the matrix of averaging `s` and `t`.
    pub fn pairwise(n: usize, s: NodeId, t: NodeId) -> Self {
        let mut m = DMatrix::identity(n, n);
        m[(s, s)] = 0.5;
        m[(t, t)] = 0.5;
        m[(s, t)] = 0.5;
        m[(t, s)] = 0.5;
        UpdateMatrix(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.0.row_iter().map(|r| r.sum()).collect()
    }

    /// Largest `|w_ij - w_ji|` and where it occurs.
    fn asymmetry(&self) -> (usize, usize, f64) {
        let n = self.dim();
        let mut worst = (0, 0, 0.0);
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = (self.0[(i, j)] - self.0[(j, i)]).abs();
                if gap > worst.2 {
                    worst = (i, j, gap);
                }
            }
        }
        worst
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.asymmetry().2 <= tol
    }

    /// Non-negative entries with unit row and column sums.
    pub fn is_doubly_stochastic(&self, tol: f64) -> bool {
        self.0.iter().all(|&w| w >= -tol)
            && self.0.row_iter().all(|r| (r.sum() - 1.0).abs() <= tol)
            && self.0.column_iter().all(|c| (c.sum() - 1.0).abs() <= tol)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (&self.0 * DVector::from_column_slice(x)).as_slice().to_vec()
    }
}

/// Expected one-step update matrix of randomized gossip,
/// `1/N sum_s 1/|N_s| sum_{t in N_s} W_st`.
///
/// A node without neighbours contributes the identity.
pub fn rg_mean_update_matrix(g: &Graph) -> UpdateMatrix {
    let n = g.node_count();
    let mut m = DMatrix::identity(n, n);
    for s in 0..n {
        let deg = g.degree(s);
        if deg == 0 {
            continue;
        }
        // Each W_st subtracts (e_s - e_t)(e_s - e_t)^T / 2, weighted by 1/(N |N_s|).
        let c = 0.5 / (n as f64 * deg as f64);
        for &t in g.neighbors(s) {
            m[(s, s)] -= c;
            m[(t, t)] -= c;
            m[(s, t)] += c;
            m[(t, s)] += c;
        }
    }
    UpdateMatrix(m)
}

/// Second largest eigenvalue of a symmetric matrix, from a dense symmetric
/// eigendecomposition.
pub fn lambda2(w: &UpdateMatrix) -> Result<f64> {
    let n = w.dim();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least a 2x2 matrix".into()));
    }
    let scale = w.0.amax().max(1.0);
    let (row, col, gap) = w.asymmetry();
    if gap > 1e-12 * scale {
        return Err(Error::NotSymmetric { row, col, gap });
    }
    let mut eig: Vec<f64> = SymmetricEigen::new(w.0.clone()).eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    Ok(eig[1])
}

/// Upper bound `3 ln(1/eps) / ln(1/lambda2)` on the epsilon-averaging time of
/// randomized gossip.
///
/// `lambda2 >= 1` means the graph is disconnected and is reported as such;
/// `lambda2 = 0` (e.g. two nodes) gives the limiting value 0.
pub fn rg_eps_time_bound(lambda2: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if lambda2 >= 1.0 {
        return Err(Error::NotConnected);
    }
    if !(lambda2 >= 0.0) {
        return Err(Error::InvalidParameter(format!("lambda2 must lie in [0, 1), got {lambda2}")));
    }
    if lambda2 == 0.0 {
        return Ok(0.0);
    }
    Ok(3.0 * (1.0 / epsilon).ln() / (1.0 / lambda2).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k2_mean_matrix() {
        let w = rg_mean_update_matrix(&Graph::complete(2));
        assert_eq!(w.matrix(), &DMatrix::from_element(2, 2, 0.5));
        assert!(lambda2(&w).unwrap().abs() < 1e-15);
    }

    #[test]
    fn complete_graph_closed_form() {
        for n in 2..=12 {
            let l2 = lambda2(&rg_mean_update_matrix(&Graph::complete(n))).unwrap();
            let expected = 1.0 - 1.0 / (n as f64 - 1.0);
            assert!((l2 - expected).abs() < 1e-12, "K{n}: {l2} vs {expected}");
        }
    }

    #[test]
    fn mean_matrix_is_symmetric_doubly_stochastic() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (1, 3), (3, 4), (2, 4)]).unwrap();
        let w = rg_mean_update_matrix(&g);
        assert!(w.is_symmetric(0.0));
        assert!(w.is_doubly_stochastic(1e-15));
        let ones = vec![1.0; 5];
        for v in w.apply(&ones) {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn pairwise_matrix_is_doubly_stochastic() {
        let w = UpdateMatrix::pairwise(4, 1, 3);
        assert!(w.is_symmetric(0.0));
        assert!(w.is_doubly_stochastic(0.0));
        assert_eq!(w.apply(&[1.0, 2.0, 3.0, 6.0]), vec![1.0, 4.0, 3.0, 4.0]);
    }

    #[test]
    fn disconnected_graph_has_unit_lambda2() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let l2 = lambda2(&rg_mean_update_matrix(&g)).unwrap();
        assert!((l2 - 1.0).abs() < 1e-12);
        assert!(matches!(rg_eps_time_bound(l2.max(1.0), 0.1), Err(Error::NotConnected)));
    }

    #[test]
    fn connected_graphs_have_lambda2_below_one() {
        let l2 = lambda2(&rg_mean_update_matrix(&Graph::path(10))).unwrap();
        assert!((0.0..1.0).contains(&l2), "{l2}");
    }

    #[test]
    fn asymmetric_input_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[0.5, 0.4, 0.5, 0.6]);
        let w = UpdateMatrix::from_matrix(m).unwrap();
        assert!(matches!(lambda2(&w), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn eps_time_bound_values() {
        assert!((rg_eps_time_bound(0.5, 0.5).unwrap() - 3.0).abs() < 1e-15);
        let e = (-1.0f64).exp();
        assert!((rg_eps_time_bound(e, e).unwrap() - 3.0).abs() < 1e-14);
        let lo = rg_eps_time_bound(0.9, 0.01).unwrap();
        let hi = rg_eps_time_bound(0.99, 0.01).unwrap();
        assert!(hi > lo);
        assert!(rg_eps_time_bound(0.5, 0.0).is_err());
        assert!(rg_eps_time_bound(0.5, 1.0).is_err());
        assert_eq!(rg_eps_time_bound(0.0, 0.1).unwrap(), 0.0);
    }
}
