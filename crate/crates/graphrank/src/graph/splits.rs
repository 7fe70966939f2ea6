use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Dataset;

/// Train/val/test node index sets. Serialized as `splits.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeSplit {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// How to draw a [`NodeSplit`].
#[derive(Debug, Clone, Copy)]
pub enum SplitPolicy {
    /// `k` random train nodes from every class, then `n_val`/`n_test`
    /// disjoint random nodes.
    PerClass { k: usize, n_val: usize, n_test: usize },
    /// ⌊f_train·n⌋ train, ⌊f_val·n⌋ val, remainder test.
    Fractional { f_train: f64, f_val: f64 },
}

/// Train/val/test edge partition plus sampled non-edges, serialized as
/// `edge_splits.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSplit {
    pub train_edges: Vec<(usize, usize)>,
    pub val_edges: Vec<(usize, usize)>,
    pub test_edges: Vec<(usize, usize)>,
    pub val_negatives: Vec<(usize, usize)>,
    pub test_negatives: Vec<(usize, usize)>,
}

/// Deterministic node split for the given policy and seed.
pub fn node_split(dataset: &Dataset, policy: SplitPolicy, seed: u64) -> Result<NodeSplit> {
    let n = dataset.num_nodes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match policy {
        SplitPolicy::PerClass { k, n_val, n_test } => {
            let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); dataset.num_classes];
            for (i, &l) in dataset.labels.iter().enumerate() {
                by_class[l].push(i);
            }
            let mut train = Vec::with_capacity(k * dataset.num_classes);
            let mut in_train = vec![false; n];
            for (c, members) in by_class.iter().enumerate() {
                if members.len() < k {
                    return Err(Error::InvalidInput(format!(
                        "class {c} has {} nodes, fewer than k = {k}",
                        members.len()
                    )));
                }
                let mut pool = members.clone();
                pool.shuffle(&mut rng);
                for &node in &pool[..k] {
                    train.push(node);
                    in_train[node] = true;
                }
            }
            let mut rest: Vec<usize> = (0..n).filter(|&i| !in_train[i]).collect();
            if rest.len() < n_val + n_test {
                return Err(Error::InvalidInput(format!(
                    "cannot draw {n_val} val + {n_test} test from {} remaining nodes",
                    rest.len()
                )));
            }
            rest.shuffle(&mut rng);
            let val = rest[..n_val].to_vec();
            let test = rest[n_val..n_val + n_test].to_vec();
            Ok(NodeSplit { train, val, test })
        }
        SplitPolicy::Fractional { f_train, f_val } => {
            if f_train <= 0.0 || f_val < 0.0 || f_train + f_val > 1.0 {
                return Err(Error::InvalidInput(format!(
                    "bad fractions: f_train = {f_train}, f_val = {f_val}"
                )));
            }
            let n_train = (f_train * n as f64).floor() as usize;
            let n_val = (f_val * n as f64).floor() as usize;
            if n_train == 0 {
                return Err(Error::InvalidInput("empty train set".into()));
            }
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(&mut rng);
            Ok(NodeSplit {
                train: all[..n_train].to_vec(),
                val: all[n_train..n_train + n_val].to_vec(),
                test: all[n_train + n_val..].to_vec(),
            })
        }
    }
}

/// Deterministic random partition of the edge set with negatives matched in
/// count to the val/test positives. Negatives are rejection-sampled from
/// non-edges (capped at 100× the required count before giving up).
pub fn edge_split(
    dataset: &Dataset,
    f_train: f64,
    f_val: f64,
    f_test: f64,
    seed: u64,
) -> Result<EdgeSplit> {
    if f_train <= 0.0 || f_val <= 0.0 || f_test <= 0.0 {
        return Err(Error::InvalidInput("edge split fractions must be positive".into()));
    }
    if (f_train + f_val + f_test - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "edge split fractions must sum to 1, got {}",
            f_train + f_val + f_test
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = dataset.graph.undirected_edges();
    let m = edges.len();
    edges.shuffle(&mut rng);
    let n_val = (f_val * m as f64).floor() as usize;
    let n_test = (f_test * m as f64).floor() as usize;
    let n_train = m - n_val - n_test;
    let train_edges = edges[..n_train].to_vec();
    let val_edges = edges[n_train..n_train + n_val].to_vec();
    let test_edges = edges[n_train + n_val..].to_vec();

    let n = dataset.num_nodes();
    let needed = n_val + n_test;
    let mut negatives: Vec<(usize, usize)> = Vec::with_capacity(needed);
    let mut seen = std::collections::HashSet::new();
    let mut attempts = 0usize;
    let cap = needed.saturating_mul(100).max(100);
    while negatives.len() < needed {
        attempts += 1;
        if attempts > cap {
            return Err(Error::InvalidInput(format!(
                "graph too dense to sample {needed} negative edges"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidInput("graph too small for negative sampling".into()));
        }
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let pair = (u.min(v), u.max(v));
        if dataset.graph.contains_edge(pair.0, pair.1) || !seen.insert(pair) {
            continue;
        }
        negatives.push(pair);
    }
    let val_negatives = negatives[..n_val].to_vec();
    let test_negatives = negatives[n_val..].to_vec();
    Ok(EdgeSplit {
        train_edges,
        val_edges,
        test_edges,
        val_negatives,
        test_negatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_sbm;

    fn dataset() -> Dataset {
        generate_sbm(100, 4, 0.3, 0.05, 8, 0.1, 11).unwrap()
    }

    fn disjoint(split: &NodeSplit) -> bool {
        let mut seen = std::collections::HashSet::new();
        split
            .train
            .iter()
            .chain(&split.val)
            .chain(&split.test)
            .all(|&i| seen.insert(i))
    }

    #[test]
    fn per_class_sizes() {
        let d = dataset();
        let s = node_split(&d, SplitPolicy::PerClass { k: 5, n_val: 20, n_test: 30 }, 0).unwrap();
        assert_eq!(s.train.len(), 20);
        assert_eq!(s.val.len(), 20);
        assert_eq!(s.test.len(), 30);
        assert!(disjoint(&s));
        for c in 0..4 {
            assert_eq!(s.train.iter().filter(|&&i| d.labels[i] == c).count(), 5);
        }
    }

    #[test]
    fn fractional_sizes() {
        let d = dataset();
        let s = node_split(&d, SplitPolicy::Fractional { f_train: 0.1, f_val: 0.1 }, 0).unwrap();
        assert_eq!((s.train.len(), s.val.len(), s.test.len()), (10, 10, 80));
        assert!(disjoint(&s));
    }

    #[test]
    fn split_determinism_and_seed_sensitivity() {
        let d = dataset();
        let policy = SplitPolicy::Fractional { f_train: 0.2, f_val: 0.1 };
        assert_eq!(node_split(&d, policy, 5).unwrap(), node_split(&d, policy, 5).unwrap());
        let distinct = (0..20)
            .filter(|&s| node_split(&d, policy, s).unwrap() != node_split(&d, policy, s + 1000).unwrap())
            .count();
        assert!(distinct >= 19, "only {distinct}/20 seed pairs differed");
    }

    #[test]
    fn per_class_infeasible_k_errors() {
        let d = dataset();
        assert!(node_split(&d, SplitPolicy::PerClass { k: 26, n_val: 0, n_test: 0 }, 0).is_err());
    }

    #[test]
    fn fractions_above_one_error() {
        let d = dataset();
        assert!(node_split(&d, SplitPolicy::Fractional { f_train: 0.8, f_val: 0.3 }, 0).is_err());
    }

    #[test]
    fn edge_split_sizes_and_partition() {
        let d = dataset();
        let m = d.graph.num_undirected_edges();
        let s = edge_split(&d, 0.7, 0.2, 0.1, 3).unwrap();
        assert_eq!(s.val_edges.len(), (0.2 * m as f64).floor() as usize);
        assert_eq!(s.test_edges.len(), (0.1 * m as f64).floor() as usize);
        assert_eq!(s.train_edges.len() + s.val_edges.len() + s.test_edges.len(), m);
        assert_eq!(s.val_negatives.len(), s.val_edges.len());
        assert_eq!(s.test_negatives.len(), s.test_edges.len());
        for &(u, v) in s.val_negatives.iter().chain(&s.test_negatives) {
            assert!(!d.graph.contains_edge(u, v));
        }
        // positives partition E
        let mut all: Vec<_> = s
            .train_edges
            .iter()
            .chain(&s.val_edges)
            .chain(&s.test_edges)
            .cloned()
            .collect();
        all.sort_unstable();
        assert_eq!(all, d.graph.undirected_edges());
    }

    #[test]
    fn edge_split_ten_edges_is_7_2_1() {
        let mut d = dataset();
        // shrink to exactly 10 edges by rebuilding a small graph
        let edges: Vec<_> = d.graph.undirected_edges().into_iter().take(10).collect();
        d = Dataset::new(
            crate::graph::Graph::from_undirected_edges(d.num_nodes(), &edges).unwrap(),
            d.features.clone(),
            d.labels.clone(),
            d.num_classes,
            d.name.clone(),
        )
        .unwrap();
        let s = edge_split(&d, 0.7, 0.2, 0.1, 0).unwrap();
        assert_eq!(
            (s.train_edges.len(), s.val_edges.len(), s.test_edges.len()),
            (7, 2, 1)
        );
    }

    #[test]
    fn dense_graph_negative_sampling_fails_cleanly() {
        // complete graph on 5 nodes has no non-edges
        let mut edges = Vec::new();
        for u in 0..5usize {
            for v in (u + 1)..5 {
                edges.push((u, v));
            }
        }
        let g = crate::graph::Graph::from_undirected_edges(5, &edges).unwrap();
        let d = Dataset::new(g, crate::numkit::Matrix::zeros(5, 2), vec![0, 1, 0, 1, 0], 2, "k5".into())
            .unwrap();
        assert!(edge_split(&d, 0.5, 0.25, 0.25, 0).is_err());
    }
}
