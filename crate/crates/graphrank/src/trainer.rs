//! The training loop: per epoch, corrupt the graph into two views, encode
//! both, sample fresh negatives, compute the loss, and update the encoder
//! with Adam. After the last epoch the embeddings of the original
//! (unaugmented) graph are produced with the final parameters.

use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::augment::{make_views, AugmentConfig};
use crate::error::{Error, Result};
use crate::graph::{Dataset, EdgeSplit, Graph};
use crate::numkit::{
    adam_step, gcn_backward, gcn_forward, xavier_init_from, Activation, AdamState, Embeddings,
    EncoderParams, Matrix,
};
use crate::objectives::{
    infonce_loss, rank_loss, sample_negatives, sample_negatives_label_filtered, InfonceNegatives,
    LossOutput, NegativeAssignment, SimilarityKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Rank,
    Infonce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeStrategy {
    Uniform,
    LabelFiltered,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    Single,
    Double,
}

/// Full training configuration. Flat so it maps one-to-one onto the
/// key=value config file and CLI flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub hidden_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
    pub p_e1: f64,
    pub p_f1: f64,
    pub p_e2: f64,
    pub p_f2: f64,
    pub loss: LossKind,
    pub margin: f64,
    pub tau: f64,
    pub num_negatives: usize,
    pub negatives: NegativeStrategy,
    pub similarity: SimilarityKind,
    pub symmetric: bool,
    pub seed: u64,
    /// 0 = snapshot embeddings only at the end.
    pub eval_every: usize,
    pub precision: Precision,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 500,
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            hidden_dim: 256,
            out_dim: 256,
            activation: Activation::Relu,
            p_e1: 0.2,
            p_f1: 0.2,
            p_e2: 0.2,
            p_f2: 0.2,
            loss: LossKind::Rank,
            margin: 0.0,
            tau: 0.5,
            num_negatives: 1,
            negatives: NegativeStrategy::Uniform,
            similarity: SimilarityKind::Dot,
            symmetric: false,
            seed: 0,
            eval_every: 0,
            precision: Precision::Double,
        }
    }
}

impl TrainConfig {
    pub fn augment(&self) -> AugmentConfig {
        AugmentConfig {
            p_e1: self.p_e1,
            p_f1: self.p_f1,
            p_e2: self.p_e2,
            p_f2: self.p_f2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be >= 1".into()));
        }
        if self.lr < 0.0 {
            return Err(Error::Config("lr must be nonnegative".into()));
        }
        if self.hidden_dim == 0 || self.out_dim == 0 {
            return Err(Error::Config("dims must be >= 1".into()));
        }
        if self.margin < 0.0 {
            return Err(Error::Config("margin must be nonnegative".into()));
        }
        if self.tau <= 0.0 {
            return Err(Error::Config("tau must be positive".into()));
        }
        if self.negatives != NegativeStrategy::All && self.num_negatives == 0 {
            return Err(Error::Config("num_negatives must be >= 1".into()));
        }
        if self.negatives == NegativeStrategy::All && self.loss == LossKind::Rank {
            return Err(Error::Config(
                "negatives = all is only supported with loss = infonce".into(),
            ));
        }
        self.augment().validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub seconds: f64,
}

/// Per-epoch losses and timings plus an echo of the configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub records: Vec<EpochRecord>,
    pub total_seconds: f64,
    pub config: TrainConfig,
    pub seed: u64,
}

/// Run the training loop and return embeddings of the original graph, the
/// final encoder weights, and the report. Fully deterministic given the
/// config seed (timings aside).
pub fn train(dataset: &Dataset, cfg: &TrainConfig) -> Result<(Embeddings, EncoderParams, TrainReport)> {
    train_with_snapshots(dataset, cfg, &mut |_, _| {})
}

/// Like [`train`], invoking `on_snapshot(epoch, embeddings)` with embeddings
/// of the original graph every `cfg.eval_every` epochs (when nonzero).
pub fn train_with_snapshots(
    dataset: &Dataset,
    cfg: &TrainConfig,
    on_snapshot: &mut dyn FnMut(usize, &Embeddings),
) -> Result<(Embeddings, EncoderParams, TrainReport)> {
    cfg.validate()?;
    let n = dataset.num_nodes();
    if n < 2 && cfg.negatives != NegativeStrategy::All {
        return Err(Error::InvalidInput("need at least 2 nodes to train".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let feat_dim = dataset.feat_dim();
    let mut w1 = xavier_init_from(feat_dim, cfg.hidden_dim, &mut rng);
    let mut w2 = xavier_init_from(cfg.hidden_dim, cfg.out_dim, &mut rng);
    let mut state = AdamState::new(&[&w1, &w2], cfg.lr, cfg.beta1, cfg.beta2, cfg.eps);
    let full_adj = dataset.graph.normalized_adjacency();
    let aug = cfg.augment();

    let mut records = Vec::with_capacity(cfg.epochs);
    let mut total_seconds = 0.0;
    for epoch in 1..=cfg.epochs {
        let start = Instant::now();
        let (v1, v2) = make_views(dataset, &aug, &mut rng);
        let params = EncoderParams::new(w1.clone(), w2.clone(), cfg.activation)?;
        let adj1 = v1.graph.normalized_adjacency();
        let adj2 = v2.graph.normalized_adjacency();
        let (z1, cache1) = gcn_forward(&params, &adj1, &v1.features)?;
        let (z2, cache2) = gcn_forward(&params, &adj2, &v2.features)?;

        let forward = compute_loss(dataset, cfg, &z1.z, &z2.z, &mut rng)?;
        let (value, d_z1, d_z2) = if cfg.symmetric {
            let backward = compute_loss(dataset, cfg, &z2.z, &z1.z, &mut rng)?;
            let mut d1 = forward.d_z1;
            d1.add_assign(&backward.d_z2)?;
            d1.scale(0.5);
            let mut d2 = forward.d_z2;
            d2.add_assign(&backward.d_z1)?;
            d2.scale(0.5);
            (0.5 * (forward.value + backward.value), d1, d2)
        } else {
            (forward.value, forward.d_z1, forward.d_z2)
        };
        if !value.is_finite() {
            return Err(Error::Diverged { epoch });
        }

        let g1 = gcn_backward(&cache1, &params, &adj1, &d_z1)?;
        let g2 = gcn_backward(&cache2, &params, &adj2, &d_z2)?;
        let mut dw1 = g1.dw1;
        dw1.add_assign(&g2.dw1)?;
        let mut dw2 = g1.dw2;
        dw2.add_assign(&g2.dw2)?;
        adam_step(&mut [&mut w1, &mut w2], &[&dw1, &dw2], &mut state)?;
        if cfg.precision == Precision::Single {
            round_to_f32(&mut w1);
            round_to_f32(&mut w2);
        }

        let seconds = start.elapsed().as_secs_f64();
        total_seconds += seconds;
        records.push(EpochRecord { epoch, loss: value, seconds });

        if cfg.eval_every > 0 && epoch % cfg.eval_every == 0 {
            let params = EncoderParams::new(w1.clone(), w2.clone(), cfg.activation)?;
            let (emb, _) = gcn_forward(&params, &full_adj, &dataset.features)?;
            on_snapshot(epoch, &emb);
        }
    }

    let params = EncoderParams::new(w1, w2, cfg.activation)?;
    let (embeddings, _) = gcn_forward(&params, &full_adj, &dataset.features)?;
    let report = TrainReport {
        records,
        total_seconds,
        config: cfg.clone(),
        seed: cfg.seed,
    };
    Ok((embeddings, params, report))
}

/// Training for link prediction: message passing sees only `train_edges`;
/// val/test edges are hidden from the encoder, including the final forward.
pub fn train_for_link_prediction(
    dataset: &Dataset,
    split: &EdgeSplit,
    cfg: &TrainConfig,
) -> Result<(Embeddings, TrainReport)> {
    for &(u, v) in split
        .train_edges
        .iter()
        .chain(&split.val_edges)
        .chain(&split.test_edges)
    {
        if !dataset.graph.contains_edge(u, v) {
            return Err(Error::InvalidInput(format!(
                "edge split contains ({u},{v}) which is not in the dataset graph"
            )));
        }
    }
    let train_graph = Graph::from_undirected_edges(dataset.num_nodes(), &split.train_edges)?;
    let train_dataset = Dataset::new(
        train_graph,
        dataset.features.clone(),
        dataset.labels.clone(),
        dataset.num_classes,
        dataset.name.clone(),
    )?;
    let (embeddings, _, report) = train(&train_dataset, cfg)?;
    Ok((embeddings, report))
}

fn compute_loss(
    dataset: &Dataset,
    cfg: &TrainConfig,
    z1: &Matrix,
    z2: &Matrix,
    rng: &mut ChaCha8Rng,
) -> Result<LossOutput> {
    let assignment: Option<NegativeAssignment> = match cfg.negatives {
        NegativeStrategy::Uniform => Some(sample_negatives(z1.rows(), cfg.num_negatives, rng)?),
        NegativeStrategy::LabelFiltered => Some(sample_negatives_label_filtered(
            &dataset.labels,
            cfg.num_negatives,
            rng,
        )?),
        NegativeStrategy::All => None,
    };
    match cfg.loss {
        LossKind::Rank => {
            let negs = assignment.expect("validated: rank requires sampled negatives");
            rank_loss(z1, z2, &negs, cfg.margin, cfg.similarity)
        }
        LossKind::Infonce => {
            let negs = match &assignment {
                Some(a) => InfonceNegatives::Sampled(a),
                None => InfonceNegatives::AllNodes,
            };
            infonce_loss(z1, z2, negs, cfg.tau, cfg.similarity)
        }
    }
}

fn round_to_f32(m: &mut Matrix) {
    for v in m.values_mut() {
        *v = *v as f32 as f64;
    }
}
