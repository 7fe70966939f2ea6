use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numkit::Matrix;

/// Lloyd's algorithm with k-means++ seeding; returns the assignment of the
/// best-inertia run over `restarts`. Deterministic given `seed`. An empty
/// cluster is reseeded to the point farthest from its current centroid.
pub fn kmeans(z: &Matrix, k: usize, restarts: usize, seed: u64) -> Result<Vec<usize>> {
    let n = z.rows();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("kmeans: k = {k} with n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..restarts.max(1) {
        let (inertia, assignment) = lloyd_run(z, k, &mut rng);
        if best.as_ref().map_or(true, |(bi, _)| inertia < *bi) {
            best = Some((inertia, assignment));
        }
    }
    Ok(best.expect("at least one restart").1)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn lloyd_run(z: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> (f64, Vec<usize>) {
    let n = z.rows();
    let d = z.cols();

    // k-means++ seeding
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(z.row(rng.gen_range(0..n)).to_vec());
    let mut dist2: Vec<f64> = (0..n).map(|i| sq_dist(z.row(i), &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = dist2.iter().sum();
        let next = if total <= 0.0 {
            rng.gen_range(0..n)
        } else {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in dist2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        };
        centroids.push(z.row(next).to_vec());
        for i in 0..n {
            let nd = sq_dist(z.row(i), centroids.last().unwrap());
            if nd < dist2[i] {
                dist2[i] = nd;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    let mut prev_inertia = f64::INFINITY;
    for _ in 0..300 {
        // assignment step
        let mut inertia = 0.0;
        for i in 0..n {
            let mut best_c = 0;
            let mut best_d = f64::INFINITY;
            for (c, cen) in centroids.iter().enumerate() {
                let dd = sq_dist(z.row(i), cen);
                if dd < best_d {
                    best_d = dd;
                    best_c = c;
                }
            }
            assignment[i] = best_c;
            inertia += best_d;
        }
        debug_assert!(inertia <= prev_inertia + 1e-9, "Lloyd inertia increased");
        if (prev_inertia - inertia).abs() < 1e-12 {
            prev_inertia = inertia;
            break;
        }
        prev_inertia = inertia;

        // update step
        let mut sums = vec![vec![0.0f64; d]; k];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[assignment[i]] += 1;
            for (s, &v) in sums[assignment[i]].iter_mut().zip(z.row(i)) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // reseed to the point farthest from its assigned centroid
                let far = (0..n)
                    .max_by(|&a, &b| {
                        sq_dist(z.row(a), &centroids[assignment[a]])
                            .partial_cmp(&sq_dist(z.row(b), &centroids[assignment[b]]))
                            .unwrap()
                    })
                    .unwrap();
                centroids[c] = z.row(far).to_vec();
                prev_inertia = f64::INFINITY;
            } else {
                for (cv, &s) in centroids[c].iter_mut().zip(&sums[c]) {
                    *cv = s / counts[c] as f64;
                }
            }
        }
    }
    (prev_inertia, assignment)
}

fn contingency(a: &[usize], b: &[usize]) -> (Vec<Vec<usize>>, Vec<usize>, Vec<usize>) {
    let ka = a.iter().max().map_or(0, |&m| m + 1);
    let kb = b.iter().max().map_or(0, |&m| m + 1);
    let mut table = vec![vec![0usize; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let rows: Vec<usize> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<usize> = (0..kb).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    (table, rows, cols)
}

/// Normalized mutual information with arithmetic-mean normalization.
/// Defined as 0 when either partition is a single cluster.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch("nmi: unequal lengths".into()));
    }
    if a.is_empty() {
        return Err(Error::InvalidInput("nmi: empty input".into()));
    }
    let n = a.len() as f64;
    let (table, rows, cols) = contingency(a, b);
    let entropy = |counts: &[usize]| -> f64 {
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let ha = entropy(&rows);
    let hb = entropy(&cols);
    if ha == 0.0 || hb == 0.0 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let pij = c as f64 / n;
            mi += pij * (pij * n * n / (rows[i] as f64 * cols[j] as f64)).ln();
        }
    }
    Ok(mi / ((ha + hb) / 2.0))
}

/// Adjusted Rand index.
pub fn ari(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch("ari: unequal lengths".into()));
    }
    if a.is_empty() {
        return Err(Error::InvalidInput("ari: empty input".into()));
    }
    let (table, rows, cols) = contingency(a, b);
    let comb2 = |x: usize| -> f64 { (x as f64) * (x as f64 - 1.0) / 2.0 };
    let sum_ij: f64 = table.iter().flatten().map(|&c| comb2(c)).sum();
    let sum_a: f64 = rows.iter().map(|&c| comb2(c)).sum();
    let sum_b: f64 = cols.iter().map(|&c| comb2(c)).sum();
    let total = comb2(a.len());
    let expected = sum_a * sum_b / total;
    let max = (sum_a + sum_b) / 2.0;
    if (max - expected).abs() < 1e-15 {
        // both partitions trivial; identical trivial partitions agree fully
        return Ok(if sum_ij == max { 1.0 } else { 0.0 });
    }
    Ok((sum_ij - expected) / (max - expected))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_partitions_score_one() {
        let a = vec![0, 0, 1, 1, 2, 2];
        let relabeled = vec![2, 2, 0, 0, 1, 1];
        assert!((nmi(&a, &relabeled).unwrap() - 1.0).abs() < 1e-12);
        assert!((ari(&a, &relabeled).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_cluster_nmi_is_zero() {
        let a = vec![0, 0, 0, 0];
        let b = vec![0, 1, 0, 1];
        assert_eq!(nmi(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn metrics_are_symmetric() {
        let a = vec![0, 1, 0, 2, 1, 2, 0];
        let b = vec![1, 1, 0, 0, 2, 2, 1];
        assert!((nmi(&a, &b).unwrap() - nmi(&b, &a).unwrap()).abs() < 1e-12);
        assert!((ari(&a, &b).unwrap() - ari(&b, &a).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn random_partitions_have_near_zero_ari() {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let n = 10_000;
        let a: Vec<usize> = (0..n).map(|_| rng.gen_range(0..4)).collect();
        let b: Vec<usize> = (0..n).map(|_| rng.gen_range(0..4)).collect();
        let v = ari(&a, &b).unwrap();
        assert!(v.abs() < 0.02, "ari = {v}");
    }

    #[test]
    fn separated_clouds_recovered() {
        let mut rows = Vec::new();
        for i in 0..20 {
            let offset = if i < 10 { 0.0 } else { 100.0 };
            rows.push(vec![offset + (i % 10) as f64 * 0.01, offset]);
        }
        let z = Matrix::from_rows(&rows).unwrap();
        let assignment = kmeans(&z, 2, 5, 0).unwrap();
        let truth: Vec<usize> = (0..20).map(|i| usize::from(i >= 10)).collect();
        assert!((ari(&assignment, &truth).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn k_equals_n_gives_zero_inertia() {
        let z = Matrix::from_vec(4, 1, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let assignment = kmeans(&z, 4, 3, 1).unwrap();
        let mut uniq = assignment.clone();
        uniq.sort_unstable();
        uniq.dedup();
        assert_eq!(uniq.len(), 4);
    }

    #[test]
    fn kmeans_deterministic_given_seed() {
        let z = crate::numkit::xavier_init(40, 3, 5);
        assert_eq!(kmeans(&z, 3, 10, 7).unwrap(), kmeans(&z, 3, 10, 7).unwrap());
    }
}
