use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::matrix::Matrix;

/// Adam optimizer state for a fixed list of parameter tensors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdamState {
    pub step: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    first_moments: Vec<Matrix>,
    second_moments: Vec<Matrix>,
}

impl AdamState {
    /// Moment accumulators mirror the shapes in `params`.
    pub fn new(params: &[&Matrix], lr: f64, beta1: f64, beta2: f64, eps: f64) -> Self {
        let first = params
            .iter()
            .map(|p| Matrix::zeros(p.rows(), p.cols()))
            .collect();
        let second = params
            .iter()
            .map(|p| Matrix::zeros(p.rows(), p.cols()))
            .collect();
        AdamState {
            step: 0,
            lr,
            beta1,
            beta2,
            eps,
            first_moments: first,
            second_moments: second,
        }
    }
}

/// One Adam update with bias correction; increments the step counter.
pub fn adam_step(params: &mut [&mut Matrix], grads: &[&Matrix], state: &mut AdamState) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.first_moments.len() {
        return Err(Error::DimensionMismatch(
            "adam_step: parameter/gradient/state count mismatch".into(),
        ));
    }
    state.step += 1;
    let t = state.step as f64;
    let bc1 = 1.0 - state.beta1.powf(t);
    let bc2 = 1.0 - state.beta2.powf(t);
    for ((param, grad), (m, v)) in params.iter_mut().zip(grads).zip(
        state
            .first_moments
            .iter_mut()
            .zip(state.second_moments.iter_mut()),
    ) {
        if param.rows() != grad.rows() || param.cols() != grad.cols() {
            return Err(Error::DimensionMismatch(
                "adam_step: gradient shape does not match parameter".into(),
            ));
        }
        let (b1, b2, lr, eps) = (state.beta1, state.beta2, state.lr, state.eps);
        for ((p, &g), (mi, vi)) in param
            .values_mut()
            .iter_mut()
            .zip(grad.values())
            .zip(m.values_mut().iter_mut().zip(v.values_mut().iter_mut()))
        {
            *mi = b1 * *mi + (1.0 - b1) * g;
            *vi = b2 * *vi + (1.0 - b2) * g * g;
            let m_hat = *mi / bc1;
            let v_hat = *vi / bc2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params_unchanged() {
        let mut w = Matrix::from_vec(1, 2, vec![0.5, -0.5]).unwrap();
        let g = Matrix::zeros(1, 2);
        let mut state = AdamState::new(&[&w], 0.1, 0.9, 0.999, 1e-8);
        let before = w.clone();
        adam_step(&mut [&mut w], &[&g], &mut state).unwrap();
        assert_eq!(w, before);
        assert_eq!(state.step, 1);
    }

    #[test]
    fn first_step_moves_by_lr() {
        // bias-corrected m̂/sqrt(v̂) = 1 on the first step for any constant g
        let mut w = Matrix::from_vec(1, 1, vec![0.0]).unwrap();
        let g = Matrix::from_vec(1, 1, vec![1.0]).unwrap();
        let mut state = AdamState::new(&[&w], 0.1, 0.9, 0.999, 1e-12);
        adam_step(&mut [&mut w], &[&g], &mut state).unwrap();
        assert!((w.get(0, 0) + 0.1).abs() < 1e-9);
    }

    #[test]
    fn converges_on_quadratic() {
        // f(w) = w^2, gradient 2w, from w=1 with lr=0.05
        let mut w = Matrix::from_vec(1, 1, vec![1.0]).unwrap();
        let mut state = AdamState::new(&[&w], 0.05, 0.9, 0.999, 1e-8);
        for _ in 0..100 {
            let g = Matrix::from_vec(1, 1, vec![2.0 * w.get(0, 0)]).unwrap();
            adam_step(&mut [&mut w], &[&g], &mut state).unwrap();
        }
        assert!(w.get(0, 0).abs() < 0.2, "w = {}", w.get(0, 0));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let mut w = Matrix::zeros(2, 2);
        let g = Matrix::zeros(2, 3);
        let mut state = AdamState::new(&[&w], 0.1, 0.9, 0.999, 1e-8);
        assert!(adam_step(&mut [&mut w], &[&g], &mut state).is_err());
    }
}
