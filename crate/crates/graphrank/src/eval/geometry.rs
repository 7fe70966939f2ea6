use crate::error::{Error, Result};
use crate::numkit::Matrix;

/// Per-class count, mean vector, and squared scatter about the mean.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    pub count: usize,
    pub mean: Vec<f64>,
    pub scatter: f64,
}

/// Count, mean, and Σ‖x−x̄‖² for every class present in `labels`.
pub fn class_stats(z: &Matrix, labels: &[usize]) -> Result<Vec<ClassStats>> {
    if z.rows() != labels.len() {
        return Err(Error::DimensionMismatch("class_stats: labels vs rows".into()));
    }
    let num_classes = labels.iter().max().map_or(0, |&m| m + 1);
    let d = z.cols();
    let mut counts = vec![0usize; num_classes];
    let mut means = vec![vec![0.0f64; d]; num_classes];
    for (i, &c) in labels.iter().enumerate() {
        counts[c] += 1;
        for (m, &v) in means[c].iter_mut().zip(z.row(i)) {
            *m += v;
        }
    }
    for c in 0..num_classes {
        if counts[c] == 0 {
            return Err(Error::InvalidInput(format!("class {c} has no members")));
        }
        for m in &mut means[c] {
            *m /= counts[c] as f64;
        }
    }
    let mut scatter = vec![0.0f64; num_classes];
    for (i, &c) in labels.iter().enumerate() {
        scatter[c] += z
            .row(i)
            .iter()
            .zip(&means[c])
            .map(|(&v, &m)| (v - m) * (v - m))
            .sum::<f64>();
    }
    Ok((0..num_classes)
        .map(|c| ClassStats {
            count: counts[c],
            mean: std::mem::take(&mut means[c]),
            scatter: scatter[c],
        })
        .collect())
}

/// Mean over classes of the corrected within-class variance
/// Σ‖x − x̄_c‖² / (N_c − δ·N_c), squared Euclidean scatter about the class
/// mean.
pub fn intra_class_variance(z: &Matrix, labels: &[usize], delta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidInput(format!("delta = {delta} must be in [0,1)")));
    }
    let stats = class_stats(z, labels)?;
    let per_class: Vec<f64> = stats
        .iter()
        .map(|s| s.scatter / (s.count as f64 - delta * s.count as f64))
        .collect();
    Ok(per_class.iter().sum::<f64>() / per_class.len() as f64)
}

/// Mean Euclidean distance between class-mean vectors over ordered pairs
/// i ≠ j (equal to the unordered-pair mean because the summand is
/// symmetric).
pub fn inter_class_distance(z: &Matrix, labels: &[usize]) -> Result<f64> {
    let stats = class_stats(z, labels)?;
    let k = stats.len();
    if k < 2 {
        return Err(Error::InvalidInput("inter_class_distance needs >= 2 classes".into()));
    }
    let mut sum = 0.0;
    for i in 0..k {
        for j in (i + 1)..k {
            let d: f64 = stats[i]
                .mean
                .iter()
                .zip(&stats[j].mean)
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            sum += 2.0 * d;
        }
    }
    Ok(sum / (k * (k - 1)) as f64)
}
