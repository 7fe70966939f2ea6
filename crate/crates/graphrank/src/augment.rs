//! Stochastic view generation: Bernoulli edge dropping (undirected edges
//! dropped as units) and Bernoulli feature-column masking (one mask vector
//! of length F shared by all nodes).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Dataset, Graph};
use crate::numkit::Matrix;

/// Per-view corruption probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    pub p_e1: f64,
    pub p_f1: f64,
    pub p_e2: f64,
    pub p_f2: f64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            p_e1: 0.2,
            p_f1: 0.2,
            p_e2: 0.2,
            p_f2: 0.2,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> crate::Result<()> {
        for (name, p) in [
            ("p_e1", self.p_e1),
            ("p_f1", self.p_f1),
            ("p_e2", self.p_e2),
            ("p_f2", self.p_f2),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(crate::Error::Config(format!("{name} = {p} not in [0,1]")));
            }
        }
        Ok(())
    }
}

/// One corrupted copy of the dataset. Node identity is preserved: row i still
/// describes node i.
#[derive(Debug, Clone, PartialEq)]
pub struct View {
    pub graph: Graph,
    pub features: Matrix,
}

/// Keep each undirected edge independently with probability `1 - p_e`.
pub fn drop_edges(graph: &Graph, p_e: f64, rng: &mut impl Rng) -> Graph {
    let kept: Vec<(usize, usize)> = graph
        .undirected_edges()
        .into_iter()
        .filter(|_| rng.gen::<f64>() >= p_e)
        .collect();
    Graph::from_undirected_edges(graph.num_nodes(), &kept)
        .expect("kept edges are a subset of a valid graph")
}

/// Sample one {0,1}^F mask with keep probability `1 - p_f` and zero the
/// masked columns for every node.
pub fn mask_features(features: &Matrix, p_f: f64, rng: &mut impl Rng) -> Matrix {
    let f = features.cols();
    let keep: Vec<bool> = (0..f).map(|_| rng.gen::<f64>() >= p_f).collect();
    let mut out = features.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        for (v, &k) in row.iter_mut().zip(&keep) {
            if !k {
                *v = 0.0;
            }
        }
    }
    out
}

/// Build the two views for one epoch; view k uses `(p_ek, p_fk)` and the
/// draws for the two views are independent.
pub fn make_views(dataset: &Dataset, cfg: &AugmentConfig, rng: &mut impl Rng) -> (View, View) {
    let v1 = View {
        graph: drop_edges(&dataset.graph, cfg.p_e1, rng),
        features: mask_features(&dataset.features, cfg.p_f1, rng),
    };
    let v2 = View {
        graph: drop_edges(&dataset.graph, cfg.p_e2, rng),
        features: mask_features(&dataset.features, cfg.p_f2, rng),
    };
    (v1, v2)
}
