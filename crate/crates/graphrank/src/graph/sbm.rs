use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::{Dataset, Graph};
use crate::numkit::Matrix;

/// Generate a stochastic block model dataset.
///
/// Nodes are assigned round-robin to classes (node i gets class i mod k).
/// Each unordered intra-class pair is connected with probability `p_in`,
/// inter-class pairs with `p_out`. Features are the one-hot class centroid
/// (unit norm) plus zero-mean Gaussian noise with standard deviation
/// `feat_noise` per dimension. Deterministic given `seed`.
pub fn generate_sbm(
    n: usize,
    num_classes: usize,
    p_in: f64,
    p_out: f64,
    feat_dim: usize,
    feat_noise: f64,
    seed: u64,
) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) {
        return Err(Error::InvalidInput("edge probabilities must be in [0,1]".into()));
    }
    if p_in < p_out {
        return Err(Error::InvalidInput(format!(
            "p_in ({p_in}) must be >= p_out ({p_out})"
        )));
    }
    if num_classes == 0 || n < num_classes {
        return Err(Error::InvalidInput(format!(
            "need n >= num_classes >= 1 (n = {n}, num_classes = {num_classes})"
        )));
    }
    if feat_dim < num_classes {
        return Err(Error::InvalidInput(format!(
            "feat_dim ({feat_dim}) must be >= num_classes ({num_classes})"
        )));
    }
    if feat_noise < 0.0 {
        return Err(Error::InvalidInput("feat_noise must be nonnegative".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<usize> = (0..n).map(|i| i % num_classes).collect();

    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if labels[u] == labels[v] { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let graph = Graph::from_undirected_edges(n, &edges)?;

    let mut features = Matrix::zeros(n, feat_dim);
    for i in 0..n {
        let row = features.row_mut(i);
        row[labels[i]] = 1.0;
        for v in row.iter_mut() {
            let noise: f64 = StandardNormal.sample(&mut rng);
            *v += feat_noise * noise;
        }
    }

    Dataset::new(
        graph,
        features,
        labels,
        num_classes,
        format!("sbm-n{n}-k{num_classes}-s{seed}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_cliques() {
        let d = generate_sbm(4, 2, 1.0, 0.0, 2, 0.0, 0).unwrap();
        // classes are {0,2} and {1,3}: two disjoint 2-cliques
        assert_eq!(d.graph.num_undirected_edges(), 2);
        assert!(d.graph.contains_edge(0, 2));
        assert!(d.graph.contains_edge(1, 3));
    }

    #[test]
    fn zero_probabilities_give_no_edges() {
        let d = generate_sbm(10, 2, 0.0, 0.0, 4, 0.1, 1).unwrap();
        assert_eq!(d.graph.num_undirected_edges(), 0);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = generate_sbm(50, 3, 0.2, 0.02, 8, 0.3, 42).unwrap();
        let b = generate_sbm(50, 3, 0.2, 0.02, 8, 0.3, 42).unwrap();
        assert_eq!(a, b);
        let c = generate_sbm(50, 3, 0.2, 0.02, 8, 0.3, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn noiseless_features_are_one_hot() {
        let d = generate_sbm(6, 3, 0.5, 0.1, 5, 0.0, 7).unwrap();
        for i in 0..6 {
            let row = d.features.row(i);
            assert_eq!(row[d.labels[i]], 1.0);
            assert_eq!(row.iter().filter(|&&v| v != 0.0).count(), 1);
        }
    }

    #[test]
    fn intra_class_edge_fraction_matches_binomial() {
        // n=400, 4 classes, p_in=0.1, p_out=0.01: count intra-class edges and
        // check a 3-sigma binomial bound over the intra-class pair count.
        let (n, k, p_in) = (400usize, 4usize, 0.1f64);
        let d = generate_sbm(n, k, p_in, 0.01, 8, 0.0, 9).unwrap();
        let per_class = n / k;
        let intra_pairs = k * per_class * (per_class - 1) / 2;
        let intra_edges = d
            .graph
            .undirected_edges()
            .iter()
            .filter(|&&(u, v)| d.labels[u] == d.labels[v])
            .count() as f64;
        let mean = intra_pairs as f64 * p_in;
        let sd = (intra_pairs as f64 * p_in * (1.0 - p_in)).sqrt();
        assert!(
            (intra_edges - mean).abs() <= 3.0 * sd,
            "intra edges {intra_edges} outside {mean} ± 3·{sd}"
        );
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(generate_sbm(10, 2, 0.1, 0.5, 4, 0.1, 0).is_err());
        assert!(generate_sbm(10, 2, 1.5, 0.1, 4, 0.1, 0).is_err());
        assert!(generate_sbm(10, 4, 0.5, 0.1, 2, 0.1, 0).is_err());
        assert!(generate_sbm(3, 4, 0.5, 0.1, 8, 0.1, 0).is_err());
    }
}
