use crate::error::{Error, Result};
use crate::graph::NodeSplit;
use crate::numkit::Matrix;

/// Train a multinomial logistic-regression probe on the frozen embeddings of
/// the train split and return test accuracy.
///
/// Full-batch gradient descent with a halving line search; stops when the
/// objective improves by less than 1e-6 or after `max_iters` steps.
/// Prediction ties break toward the lowest class index.
pub fn linear_probe(
    z: &Matrix,
    labels: &[usize],
    split: &NodeSplit,
    l2: f64,
    max_iters: usize,
) -> Result<f64> {
    let n = z.rows();
    if labels.len() != n {
        return Err(Error::DimensionMismatch("labels vs embedding rows".into()));
    }
    for &i in split.train.iter().chain(&split.val).chain(&split.test) {
        if i >= n {
            return Err(Error::InvalidInput(format!("split index {i} out of range")));
        }
    }
    if split.train.is_empty() {
        return Err(Error::InvalidInput("empty train split".into()));
    }
    let num_classes = labels.iter().max().map_or(0, |&m| m + 1);
    let train_classes: std::collections::HashSet<usize> =
        split.train.iter().map(|&i| labels[i]).collect();
    if train_classes.len() < 2 {
        return Err(Error::InvalidInput("probe training set has a single class".into()));
    }

    let d = z.cols();
    let mut weights = Matrix::zeros(d, num_classes);
    let mut bias = vec![0.0f64; num_classes];

    let objective_and_grad = |w: &Matrix, b: &[f64], want_grad: bool| {
        let m = split.train.len() as f64;
        let mut loss = 0.0;
        let mut gw = Matrix::zeros(d, num_classes);
        let mut gb = vec![0.0f64; num_classes];
        let mut logits = vec![0.0f64; num_classes];
        for &i in &split.train {
            let x = z.row(i);
            for c in 0..num_classes {
                let mut s = b[c];
                for (j, &xj) in x.iter().enumerate() {
                    s += xj * w.get(j, c);
                }
                logits[c] = s;
            }
            let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let denom: f64 = logits.iter().map(|&l| (l - max).exp()).sum();
            loss += -(logits[labels[i]] - max - denom.ln());
            if want_grad {
                for c in 0..num_classes {
                    let p = (logits[c] - max).exp() / denom;
                    let g = (p - if c == labels[i] { 1.0 } else { 0.0 }) / m;
                    gb[c] += g;
                    for (j, &xj) in x.iter().enumerate() {
                        *gw.values_mut().get_mut(j * num_classes + c).unwrap() += g * xj;
                    }
                }
            }
        }
        loss /= m;
        let penalty: f64 = w.values().iter().map(|v| v * v).sum::<f64>() * l2 / 2.0;
        loss += penalty;
        if want_grad {
            for (g, &wv) in gw.values_mut().iter_mut().zip(w.values()) {
                *g += l2 * wv;
            }
        }
        (loss, gw, gb)
    };

    let (mut loss, mut gw, mut gb) = objective_and_grad(&weights, &bias, true);
    let mut lr = 1.0f64;
    for _ in 0..max_iters {
        let mut stepped = false;
        for _ in 0..40 {
            let mut trial_w = weights.clone();
            for (t, &g) in trial_w.values_mut().iter_mut().zip(gw.values()) {
                *t -= lr * g;
            }
            let trial_b: Vec<f64> = bias.iter().zip(&gb).map(|(&b, &g)| b - lr * g).collect();
            let (trial_loss, _, _) = objective_and_grad(&trial_w, &trial_b, false);
            if trial_loss <= loss {
                let improved = loss - trial_loss;
                weights = trial_w;
                bias = trial_b;
                let (new_loss, new_gw, new_gb) = objective_and_grad(&weights, &bias, true);
                loss = new_loss;
                gw = new_gw;
                gb = new_gb;
                lr *= 1.1;
                stepped = true;
                if improved < 1e-6 {
                    return Ok(test_accuracy(z, labels, split, &weights, &bias, num_classes));
                }
                break;
            }
            lr *= 0.5;
        }
        if !stepped {
            break;
        }
    }
    Ok(test_accuracy(z, labels, split, &weights, &bias, num_classes))
}

fn test_accuracy(
    z: &Matrix,
    labels: &[usize],
    split: &NodeSplit,
    w: &Matrix,
    b: &[f64],
    num_classes: usize,
) -> f64 {
    if split.test.is_empty() {
        return 0.0;
    }
    let mut correct = 0usize;
    for &i in &split.test {
        let x = z.row(i);
        let mut best = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for c in 0..num_classes {
            let mut s = b[c];
            for (j, &xj) in x.iter().enumerate() {
                s += xj * w.get(j, c);
            }
            if s > best_score {
                best_score = s;
                best = c;
            }
        }
        if best == labels[i] {
            correct += 1;
        }
    }
    correct as f64 / split.test.len() as f64
}
