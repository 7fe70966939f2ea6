//! Numeric kernels: dense matrices, sparse-dense products, the two-layer GCN
//! encoder with hand-written backward pass, Xavier init, Adam, and a central
//! finite-difference gradient checker.

mod adam;
mod gcn;
mod gradcheck;
mod matrix;

pub use adam::{adam_step, AdamState};
pub use gcn::{
    gcn_backward, gcn_forward, xavier_init, xavier_init_from, Activation, Embeddings,
    EncoderGrads, EncoderParams, ForwardCache,
};
pub use gradcheck::finite_diff_check;
pub use matrix::{spmm, Matrix};
