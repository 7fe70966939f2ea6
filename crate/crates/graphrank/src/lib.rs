//! Self-supervised node embeddings trained with a margin rank loss over two
//! randomly corrupted graph views, plus an InfoNCE baseline and a full
//! downstream evaluation harness (linear probe, link prediction, clustering,
//! representation geometry).
//!
//! The crate is organized around the training pipeline:
//!
//! - [`graph`]: CSR graphs, datasets, synthetic generators, splits
//! - [`augment`]: edge dropping and feature-column masking
//! - [`numkit`]: dense/sparse kernels, the 2-layer GCN encoder, Adam
//! - [`objectives`]: similarity, negative sampling, rank and InfoNCE losses
//! - [`trainer`]: the epoch loop
//! - [`eval`]: downstream metrics
//! - [`cli`]: the `graphrank` command-line front end

pub mod augment;
pub mod cli;
pub mod error;
pub mod eval;
pub mod graph;
pub mod numkit;
pub mod objectives;
pub mod trainer;

pub use error::{Error, Result};
