use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NormAdj;
use crate::numkit::matrix::{spmm, Matrix};

/// Hidden-layer nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    /// PReLU with a fixed (non-learned) negative slope.
    Prelu { slope: f64 },
}

impl Activation {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            Activation::Prelu { slope } => {
                if x > 0.0 {
                    x
                } else {
                    slope * x
                }
            }
        }
    }

    /// Subgradient at 0 is taken from the negative side (0 for ReLU).
    #[inline]
    fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Prelu { slope } => {
                if x > 0.0 {
                    1.0
                } else {
                    slope
                }
            }
        }
    }
}

/// Weights of the two-layer GCN encoder: Z = Â·act(Â·X·W1)·W2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderParams {
    pub w1: Matrix,
    pub w2: Matrix,
    pub activation: Activation,
}

impl EncoderParams {
    pub fn new(w1: Matrix, w2: Matrix, activation: Activation) -> Result<Self> {
        if w1.cols() != w2.rows() {
            return Err(Error::DimensionMismatch(format!(
                "encoder dims do not chain: W1 is {}x{}, W2 is {}x{}",
                w1.rows(),
                w1.cols(),
                w2.rows(),
                w2.cols()
            )));
        }
        Ok(EncoderParams { w1, w2, activation })
    }

    pub fn in_dim(&self) -> usize {
        self.w1.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.w2.cols()
    }
}

/// Node representation matrix Z (one row per node).
#[derive(Debug, Clone, PartialEq)]
pub struct Embeddings {
    pub z: Matrix,
}

/// Intermediates kept for the backward pass.
pub struct ForwardCache {
    /// Â·X, n×F
    ax: Matrix,
    /// pre-activation Â·X·W1, n×H
    pre: Matrix,
    /// Â·act(pre), n×H
    hidden_agg: Matrix,
    activation: Activation,
}

/// Gradients of a scalar loss with respect to the encoder weights.
#[derive(Debug, Clone)]
pub struct EncoderGrads {
    pub dw1: Matrix,
    pub dw2: Matrix,
}

/// Forward pass of the two-layer GCN. The cache holds what backward needs;
/// callers that only want Z can drop it.
pub fn gcn_forward(
    params: &EncoderParams,
    adj: &NormAdj,
    x: &Matrix,
) -> Result<(Embeddings, ForwardCache)> {
    if x.cols() != params.w1.rows() {
        return Err(Error::DimensionMismatch(format!(
            "features have {} columns but W1 expects {}",
            x.cols(),
            params.w1.rows()
        )));
    }
    let ax = spmm(adj, x)?;
    let pre = ax.matmul(&params.w1)?;
    let act = params.activation;
    let hidden = pre.map(|v| act.apply(v));
    let hidden_agg = spmm(adj, &hidden)?;
    let z = hidden_agg.matmul(&params.w2)?;
    if !z.is_finite() {
        return Err(Error::NonFinite("gcn_forward produced non-finite output".into()));
    }
    Ok((
        Embeddings { z },
        ForwardCache {
            ax,
            pre,
            hidden_agg,
            activation: act,
        },
    ))
}

/// Backward pass: given dL/dZ, return exact dL/dW1 and dL/dW2.
///
/// With U = Â·act(P), P = Â·X·W1 and Z = U·W2:
/// dW2 = Uᵀ·dZ, dH = Â·(dZ·W2ᵀ) (Â symmetric), dP = dH ⊙ act'(P),
/// dW1 = (Â·X)ᵀ·dP.
pub fn gcn_backward(
    cache: &ForwardCache,
    params: &EncoderParams,
    adj: &NormAdj,
    dz: &Matrix,
) -> Result<EncoderGrads> {
    if dz.rows() != cache.hidden_agg.rows() || dz.cols() != params.w2.cols() {
        return Err(Error::DimensionMismatch(format!(
            "dZ is {}x{} but Z is {}x{}",
            dz.rows(),
            dz.cols(),
            cache.hidden_agg.rows(),
            params.w2.cols()
        )));
    }
    let dw2 = cache.hidden_agg.transpose().matmul(dz)?;
    let du = dz.matmul(&params.w2.transpose())?;
    let dh = spmm(adj, &du)?;
    let act = cache.activation;
    let dp = dh.hadamard(&cache.pre.map(|v| act.derivative(v)))?;
    let dw1 = cache.ax.transpose().matmul(&dp)?;
    Ok(EncoderGrads { dw1, dw2 })
}

/// Xavier-uniform initialization, entries in ±sqrt(6/(rows+cols)).
pub fn xavier_init(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    xavier_init_from(rows, cols, &mut rng)
}

/// Xavier-uniform initialization drawing from a caller-owned generator.
pub fn xavier_init_from(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    let values = (0..rows * cols)
        .map(|_| rng.gen_range(-bound..=bound))
        .collect();
    Matrix::from_vec(rows, cols, values).expect("sized by construction")
}
