//! Graph, feature, label and split data structures, dataset I/O, synthetic
//! generation, and the symmetric-normalized propagation operator.

mod dataset;
mod sbm;
mod splits;

pub use dataset::{load_dataset, save_dataset, Dataset};
pub use sbm::generate_sbm;
pub use splits::{edge_split, node_split, EdgeSplit, NodeSplit, SplitPolicy};

use crate::error::{Error, Result};

/// Immutable undirected graph in compressed-row (CSR) form.
///
/// No self-loops, no duplicate neighbors, columns sorted within each row,
/// and every edge stored in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_nodes: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    num_undirected_edges: usize,
}

impl Graph {
    /// Build from undirected edge pairs. Pairs are symmetrized and
    /// deduplicated (both `(u,v)` and `(v,u)` count as the same edge).
    /// Self-loops and out-of-range endpoints are rejected.
    pub fn from_undirected_edges(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at node {u}")));
            }
            if u >= num_nodes || v >= num_nodes {
                return Err(Error::InvalidInput(format!(
                    "edge ({u},{v}) out of range for {num_nodes} nodes"
                )));
            }
            pairs.push((u.min(v), u.max(v)));
        }
        pairs.sort_unstable();
        pairs.dedup();
        let num_undirected_edges = pairs.len();

        let mut degrees = vec![0usize; num_nodes];
        for &(u, v) in &pairs {
            degrees[u] += 1;
            degrees[v] += 1;
        }
        let mut row_offsets = vec![0usize; num_nodes + 1];
        for i in 0..num_nodes {
            row_offsets[i + 1] = row_offsets[i] + degrees[i];
        }
        let mut cursor = row_offsets.clone();
        let mut col_indices = vec![0usize; 2 * num_undirected_edges];
        for &(u, v) in &pairs {
            col_indices[cursor[u]] = v;
            cursor[u] += 1;
            col_indices[cursor[v]] = u;
            cursor[v] += 1;
        }
        for i in 0..num_nodes {
            col_indices[row_offsets[i]..row_offsets[i + 1]].sort_unstable();
        }
        Ok(Graph {
            num_nodes,
            row_offsets,
            col_indices,
            num_undirected_edges,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_undirected_edges(&self) -> usize {
        self.num_undirected_edges
    }

    pub fn degree(&self, node: usize) -> usize {
        self.row_offsets[node + 1] - self.row_offsets[node]
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.col_indices[self.row_offsets[node]..self.row_offsets[node + 1]]
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        u < self.num_nodes && v < self.num_nodes && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// All undirected edges as `(u, v)` with `u < v`, sorted.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_undirected_edges);
        for u in 0..self.num_nodes {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Â = D̃^{-1/2}(A+I)D̃^{-1/2} with D̃ the degree matrix of A+I.
    /// Isolated nodes get d̃ = 1 and a diagonal entry of 1.
    pub fn normalized_adjacency(&self) -> NormAdj {
        let n = self.num_nodes;
        let inv_sqrt: Vec<f64> = (0..n).map(|i| 1.0 / ((self.degree(i) + 1) as f64).sqrt()).collect();
        let mut row_offsets = vec![0usize; n + 1];
        for i in 0..n {
            row_offsets[i + 1] = row_offsets[i] + self.degree(i) + 1;
        }
        let mut col_indices = Vec::with_capacity(row_offsets[n]);
        let mut values = Vec::with_capacity(row_offsets[n]);
        for i in 0..n {
            let mut pushed_diag = false;
            for &j in self.neighbors(i) {
                if !pushed_diag && j > i {
                    col_indices.push(i);
                    values.push(inv_sqrt[i] * inv_sqrt[i]);
                    pushed_diag = true;
                }
                col_indices.push(j);
                values.push(inv_sqrt[i] * inv_sqrt[j]);
            }
            if !pushed_diag {
                col_indices.push(i);
                values.push(inv_sqrt[i] * inv_sqrt[i]);
            }
        }
        NormAdj {
            num_nodes: n,
            row_offsets,
            col_indices,
            values,
        }
    }
}

/// Sparse symmetric-normalized adjacency Â, same CSR layout as [`Graph`]
/// but with real-valued entries and an explicit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct NormAdj {
    num_nodes: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl NormAdj {
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Nonzeros of row `i` as `(column, value)`, ascending column order.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_offsets[i];
        let hi = self.row_offsets[i + 1];
        self.col_indices[lo..hi]
            .iter()
            .zip(&self.values[lo..hi])
            .map(|(&c, &v)| (c, v))
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrizes_and_dedups() {
        let g = Graph::from_undirected_edges(3, &[(0, 1), (1, 0), (2, 1)]).unwrap();
        assert_eq!(g.num_undirected_edges(), 2);
        assert!(g.contains_edge(0, 1) && g.contains_edge(1, 0));
        assert!(g.contains_edge(1, 2) && g.contains_edge(2, 1));
        assert!(!g.contains_edge(0, 2));
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn rejects_self_loops_and_range() {
        assert!(Graph::from_undirected_edges(3, &[(1, 1)]).is_err());
        assert!(Graph::from_undirected_edges(3, &[(0, 3)]).is_err());
    }

    #[test]
    fn csr_invariants() {
        let g = Graph::from_undirected_edges(5, &[(0, 4), (2, 3), (0, 1)]).unwrap();
        assert_eq!(*g.row_offsets.last().unwrap(), 2 * g.num_undirected_edges());
        for w in g.row_offsets.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn norm_adj_isolated_node() {
        let g = Graph::from_undirected_edges(1, &[]).unwrap();
        let adj = g.normalized_adjacency();
        assert_eq!(adj.entry(0, 0), 1.0);
    }

    #[test]
    fn norm_adj_two_connected_nodes() {
        let g = Graph::from_undirected_edges(2, &[(0, 1)]).unwrap();
        let adj = g.normalized_adjacency();
        for i in 0..2 {
            for j in 0..2 {
                assert!((adj.entry(i, j) - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn norm_adj_diagonal_present_and_symmetric() {
        let g = Graph::from_undirected_edges(6, &[(0, 1), (0, 2), (3, 4), (1, 5), (2, 5)]).unwrap();
        let adj = g.normalized_adjacency();
        for i in 0..6 {
            assert!(adj.entry(i, i) > 0.0);
            for j in 0..6 {
                assert!((adj.entry(i, j) - adj.entry(j, i)).abs() < 1e-15);
            }
        }
        // columns sorted within each row
        for i in 0..6 {
            let cols: Vec<usize> = adj.row(i).map(|(c, _)| c).collect();
            let mut sorted = cols.clone();
            sorted.sort_unstable();
            assert_eq!(cols, sorted);
        }
    }
}
