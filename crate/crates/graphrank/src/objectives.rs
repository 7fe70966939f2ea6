//! Training objectives: similarity functions, negative sampling (uniform and
//! the label-filtered oracle used by the false-negative ablation), the margin
//! rank loss, and the InfoNCE baseline. Each loss returns its value together
//! with gradients with respect to both embedding matrices.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::Matrix;

/// Similarity between two embedding vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityKind {
    Dot,
    Cosine,
}

/// Similarity of two equal-length vectors. Cosine with a zero vector is
/// defined as 0.
pub fn similarity(a: &[f64], b: &[f64], kind: SimilarityKind) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    match kind {
        SimilarityKind::Dot => dot,
        SimilarityKind::Cosine => {
            let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            if na == 0.0 || nb == 0.0 {
                0.0
            } else {
                dot / (na * nb)
            }
        }
    }
}

/// Similarity plus its gradients with respect to both inputs.
/// For cosine with a zero input the value and both gradients are 0.
fn similarity_with_grad(a: &[f64], b: &[f64], kind: SimilarityKind) -> (f64, Vec<f64>, Vec<f64>) {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    match kind {
        SimilarityKind::Dot => (dot, b.to_vec(), a.to_vec()),
        SimilarityKind::Cosine => {
            let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            if na == 0.0 || nb == 0.0 {
                return (0.0, vec![0.0; a.len()], vec![0.0; b.len()]);
            }
            let s = dot / (na * nb);
            let ga: Vec<f64> = a
                .iter()
                .zip(b)
                .map(|(&x, &y)| y / (na * nb) - s * x / (na * na))
                .collect();
            let gb: Vec<f64> = a
                .iter()
                .zip(b)
                .map(|(&x, &y)| x / (na * nb) - s * y / (nb * nb))
                .collect();
            (s, ga, gb)
        }
    }
}

/// k negative node indices per anchor, drawn from view 2.
/// A negative never equals its own anchor index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeAssignment {
    num_anchors: usize,
    k: usize,
    /// Flat, `k` entries per anchor.
    indices: Vec<usize>,
}

impl NegativeAssignment {
    pub fn num_anchors(&self) -> usize {
        self.num_anchors
    }

    pub fn negatives_per_anchor(&self) -> usize {
        self.k
    }

    pub fn negatives(&self, anchor: usize) -> &[usize] {
        &self.indices[anchor * self.k..(anchor + 1) * self.k]
    }
}

/// Uniform negatives over `{0..n-1} \ {anchor}`; without replacement within
/// an anchor, independent across anchors.
pub fn sample_negatives(n: usize, k: usize, rng: &mut impl Rng) -> Result<NegativeAssignment> {
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 nodes to sample negatives".into()));
    }
    if k >= n {
        return Err(Error::InvalidInput(format!(
            "k = {k} negatives per anchor requires k < n = {n}"
        )));
    }
    let mut indices = Vec::with_capacity(n * k);
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for anchor in 0..n {
        chosen.clear();
        while chosen.len() < k {
            let cand = rng.gen_range(0..n);
            if cand != anchor && !chosen.contains(&cand) {
                chosen.push(cand);
            }
        }
        indices.extend_from_slice(&chosen);
    }
    Ok(NegativeAssignment {
        num_anchors: n,
        k,
        indices,
    })
}

/// Negatives drawn uniformly from nodes whose label differs from the
/// anchor's (the label oracle that excludes false negatives).
pub fn sample_negatives_label_filtered(
    labels: &[usize],
    k: usize,
    rng: &mut impl Rng,
) -> Result<NegativeAssignment> {
    let n = labels.len();
    let num_classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut class_counts = vec![0usize; num_classes];
    for &l in labels {
        class_counts[l] += 1;
    }
    // per class: every node NOT of that class, ascending
    let mut complements: Vec<Vec<usize>> = vec![Vec::new(); num_classes];
    for c in 0..num_classes {
        complements[c] = (0..n).filter(|&i| labels[i] != c).collect();
        if class_counts[c] > 0 && complements[c].len() < k.max(1) {
            return Err(Error::InvalidInput(format!(
                "class {c} anchors have only {} differently-labeled candidates, need {}",
                complements[c].len(),
                k.max(1)
            )));
        }
    }
    let mut indices = Vec::with_capacity(n * k);
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for anchor in 0..n {
        let pool = &complements[labels[anchor]];
        chosen.clear();
        while chosen.len() < k {
            let cand = pool[rng.gen_range(0..pool.len())];
            if !chosen.contains(&cand) {
                chosen.push(cand);
            }
        }
        indices.extend_from_slice(&chosen);
    }
    Ok(NegativeAssignment {
        num_anchors: n,
        k,
        indices,
    })
}

/// Loss value (mean per-(anchor, negative) term) and gradients for both
/// embedding matrices.
#[derive(Debug, Clone)]
pub struct LossOutput {
    pub value: f64,
    pub d_z1: Matrix,
    pub d_z2: Matrix,
}

/// Negative set for [`infonce_loss`].
pub enum InfonceNegatives<'a> {
    Sampled(&'a NegativeAssignment),
    /// Every node j ≠ i in view 2 (GRACE-style; quadratic in n).
    AllNodes,
}

/// Margin rank loss, anchors in view 1, positives/negatives in view 2:
/// mean over (anchor, negative) pairs of
/// max{0, margin − (sim(Z1ᵢ, Z2ᵢ) − sim(Z1ᵢ, Z2ⱼ))}.
///
/// At the hinge kink (gap exactly equal to margin) the subgradient of the
/// active side is used, so a pair at the boundary still produces gradients.
pub fn rank_loss(
    z1: &Matrix,
    z2: &Matrix,
    negs: &NegativeAssignment,
    margin: f64,
    sim_kind: SimilarityKind,
) -> Result<LossOutput> {
    check_embeddings(z1, z2, Some(negs))?;
    if margin < 0.0 {
        return Err(Error::InvalidInput("margin must be nonnegative".into()));
    }
    let n = z1.rows();
    let k = negs.negatives_per_anchor();
    let weight = 1.0 / (n * k) as f64;
    let mut total = 0.0;
    let mut d_z1 = Matrix::zeros(n, z1.cols());
    let mut d_z2 = Matrix::zeros(n, z2.cols());
    for i in 0..n {
        let (s_pos, gp_a, gp_b) = similarity_with_grad(z1.row(i), z2.row(i), sim_kind);
        let mut active = 0usize;
        for &j in negs.negatives(i) {
            let (s_neg, gn_a, gn_b) = similarity_with_grad(z1.row(i), z2.row(j), sim_kind);
            let diff = margin - (s_pos - s_neg);
            if diff > 0.0 {
                total += diff;
            }
            if diff >= 0.0 {
                active += 1;
                // dL/ds_neg = +weight
                axpy(d_z1.row_mut(i), weight, &gn_a);
                axpy(d_z2.row_mut(j), weight, &gn_b);
            }
        }
        if active > 0 {
            // dL/ds_pos = -weight per active pair
            let c = -(active as f64) * weight;
            axpy(d_z1.row_mut(i), c, &gp_a);
            axpy(d_z2.row_mut(i), c, &gp_b);
        }
    }
    Ok(LossOutput {
        value: total * weight,
        d_z1,
        d_z2,
    })
}

/// InfoNCE with the positive term included in the denominator:
/// per anchor i, −log( exp(s⁺/τ) / (exp(s⁺/τ) + Σⱼ exp(s⁻ⱼ/τ)) ),
/// averaged over anchors. Logits are max-shifted before exponentiation.
pub fn infonce_loss(
    z1: &Matrix,
    z2: &Matrix,
    negs: InfonceNegatives<'_>,
    tau: f64,
    sim_kind: SimilarityKind,
) -> Result<LossOutput> {
    let sampled = match &negs {
        InfonceNegatives::Sampled(a) => Some(*a),
        InfonceNegatives::AllNodes => None,
    };
    check_embeddings(z1, z2, sampled)?;
    if tau <= 0.0 {
        return Err(Error::InvalidInput("tau must be positive".into()));
    }
    let n = z1.rows();
    let mut total = 0.0;
    let mut d_z1 = Matrix::zeros(n, z1.cols());
    let mut d_z2 = Matrix::zeros(n, z2.cols());
    let mut neg_buf: Vec<usize> = Vec::new();
    for i in 0..n {
        let neg_ids: &[usize] = match &negs {
            InfonceNegatives::Sampled(a) => a.negatives(i),
            InfonceNegatives::AllNodes => {
                neg_buf.clear();
                neg_buf.extend((0..n).filter(|&j| j != i));
                &neg_buf
            }
        };
        let (s_pos, gp_a, gp_b) = similarity_with_grad(z1.row(i), z2.row(i), sim_kind);
        let l_pos = s_pos / tau;
        let mut sims = Vec::with_capacity(neg_ids.len());
        let mut max_logit = l_pos;
        for &j in neg_ids {
            let s = similarity(z1.row(i), z2.row(j), sim_kind);
            max_logit = max_logit.max(s / tau);
            sims.push(s);
        }
        let exp_pos = (l_pos - max_logit).exp();
        let mut denom = exp_pos;
        for &s in &sims {
            denom += (s / tau - max_logit).exp();
        }
        total += -(l_pos - max_logit - denom.ln());

        let scale = 1.0 / n as f64;
        let p_pos = exp_pos / denom;
        // dL/ds_pos = (p_pos - 1)/tau
        let c_pos = scale * (p_pos - 1.0) / tau;
        axpy(d_z1.row_mut(i), c_pos, &gp_a);
        axpy(d_z2.row_mut(i), c_pos, &gp_b);
        for (&j, &s) in neg_ids.iter().zip(&sims) {
            let p = (s / tau - max_logit).exp() / denom;
            let c = scale * p / tau;
            let (_, gn_a, gn_b) = similarity_with_grad(z1.row(i), z2.row(j), sim_kind);
            axpy(d_z1.row_mut(i), c, &gn_a);
            axpy(d_z2.row_mut(j), c, &gn_b);
        }
    }
    Ok(LossOutput {
        value: total / n as f64,
        d_z1,
        d_z2,
    })
}

#[inline]
fn axpy(dst: &mut [f64], c: f64, src: &[f64]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d += c * s;
    }
}

fn check_embeddings(z1: &Matrix, z2: &Matrix, negs: Option<&NegativeAssignment>) -> Result<()> {
    if z1.rows() != z2.rows() || z1.cols() != z2.cols() {
        return Err(Error::DimensionMismatch(format!(
            "embedding shapes differ: {}x{} vs {}x{}",
            z1.rows(),
            z1.cols(),
            z2.rows(),
            z2.cols()
        )));
    }
    if !z1.is_finite() || !z2.is_finite() {
        return Err(Error::NonFinite("embeddings".into()));
    }
    if let Some(a) = negs {
        if a.num_anchors() != z1.rows() {
            return Err(Error::DimensionMismatch(
                "negative assignment does not match embedding rows".into(),
            ));
        }
        if a.indices.iter().any(|&j| j >= z1.rows()) {
            return Err(Error::InvalidInput("negative index out of range".into()));
        }
    }
    Ok(())
}
