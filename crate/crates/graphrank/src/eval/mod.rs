//! Downstream measurements on frozen embeddings: linear-probe
//! classification, link-prediction AUC/AP, k-means clustering with NMI/ARI,
//! and representation-geometry statistics (intra-class variance and
//! inter-class distance).

mod clustering;
mod geometry;
mod metrics;
mod probe;

pub use clustering::{ari, kmeans, nmi};
pub use geometry::{class_stats, inter_class_distance, intra_class_variance, ClassStats};
pub use metrics::{auc, average_precision};
pub use probe::linear_probe;

use serde::{Deserialize, Serialize};

use crate::numkit::Matrix;

/// Metric values for one embedding set; fields are present per task.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub auc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nmi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ari: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intra_class_variance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inter_class_distance: Option<f64>,
}

/// σ(Zᵢᵀ Zⱼ) for each pair; scores are in (0,1) and monotone in the dot
/// product.
pub fn link_scores(z: &Matrix, pairs: &[(usize, usize)]) -> Vec<f64> {
    pairs
        .iter()
        .map(|&(i, j)| {
            let dot: f64 = z.row(i).iter().zip(z.row(j)).map(|(a, b)| a * b).sum();
            sigmoid(dot)
        })
        .collect()
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::Matrix;

    #[test]
    fn orthogonal_rows_score_half() {
        let z = Matrix::from_vec(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let s = link_scores(&z, &[(0, 1)]);
        assert_eq!(s, vec![0.5]);
    }

    #[test]
    fn identical_rows_with_norm_ten() {
        let v = (10.0f64).sqrt();
        let z = Matrix::from_vec(2, 1, vec![v, v]).unwrap();
        let s = link_scores(&z, &[(0, 1)]);
        assert!((s[0] - 0.9999546).abs() < 1e-7);
    }

    #[test]
    fn scores_monotone_in_dot_product() {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let z = crate::numkit::xavier_init_from(50, 4, &mut rng);
        let pairs: Vec<(usize, usize)> = (0..100)
            .map(|_| (rng.gen_range(0..50), rng.gen_range(0..50)))
            .collect();
        let scores = link_scores(&z, &pairs);
        let dots: Vec<f64> = pairs
            .iter()
            .map(|&(i, j)| z.row(i).iter().zip(z.row(j)).map(|(a, b)| a * b).sum())
            .collect();
        for a in 0..pairs.len() {
            for b in 0..pairs.len() {
                if dots[a] < dots[b] {
                    assert!(scores[a] < scores[b]);
                }
            }
        }
    }
}
