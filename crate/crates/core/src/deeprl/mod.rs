//! The learned placement policy: a value network ranks corner candidates by
//! the state they would produce.
//!
//! Training plays whole episodes ε-greedily, scores every step with a
//! discounted copy of the episode's terminal reward, stores the episode in a
//! replay buffer and then fits one sampled batch against targets produced by
//! a periodically synced copy of the network.

pub mod net;
pub mod replay;
pub mod reward;

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::candidates::{candidates_or_new_bin, Candidate};
use crate::datagen::BoxStream;
use crate::encoder::{encode_border, EncodedInput, FieldPartition, StateEncoder};
use crate::error::{PackError, Result};
use crate::grid::{BoxDims, MultiBinState};
use crate::policy::{Decision, Policy};

pub use net::{CandidateScorer, Dense, ValueNet, ARCHITECTURE};
pub use replay::{ReplayBuffer, Transition};
pub use reward::{episode_rewards, packing_fraction, RunningBaseline};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainerConfig {
    pub gamma: f64,
    pub rho: f64,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    /// Minibatches drawn from replay after each episode.
    pub batches_per_episode: usize,
    /// Target network refresh period, in training steps.
    pub target_sync_every: usize,
    pub episodes: usize,
    /// ε falls linearly from 1 to 0 over this many episodes.
    pub epsilon_decay_episodes: usize,
    pub replay_capacity: usize,
    /// Bin capacity `T` per episode.
    pub max_bins: usize,
    pub seed: u64,
    /// Use `r + γQ'` instead of `(1 − γ)r + γQ'`.
    pub standard_target: bool,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            gamma: 0.75,
            rho: 0.99,
            learning_rate: 0.001,
            momentum: 0.5,
            batch_size: 256,
            batches_per_episode: 1,
            target_sync_every: 10,
            episodes: 2000,
            epsilon_decay_episodes: 1000,
            replay_capacity: 200_000,
            max_bins: 16,
            seed: 0,
            standard_target: false,
        }
    }
}

impl TrainerConfig {
    /// Exploration rate for the zero-based episode index.
    pub fn epsilon(&self, episode: usize) -> f64 {
        if episode >= self.epsilon_decay_episodes {
            0.0
        } else {
            1.0 - episode as f64 / self.epsilon_decay_episodes as f64
        }
    }
}

/// Regression target for one stored transition.
pub fn q_target(t: &Transition<'_>, target_net: &ValueNet, cfg: &TrainerConfig) -> Result<f64> {
    let next_q = match t.next {
        Some(next) => target_net.forward(next)?,
        None => 0.0,
    };
    let reward_weight = if cfg.standard_target { 1.0 } else { 1.0 - cfg.gamma };
    Ok(reward_weight * t.reward + cfg.gamma * next_q)
}

fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = k;
        }
    }
    best
}

/// ε-greedy index choice. The q-values are only computed when exploiting.
fn select_index<R: Rng, F: FnOnce() -> Vec<f64>>(n: usize, epsilon: f64, rng: &mut R, q: F) -> usize {
    if n == 1 {
        return 0;
    }
    if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
        return rng.gen_range(0..n);
    }
    argmax_first(&q())
}

/// ε-greedy choice among encoded candidates; ties go to the first.
pub fn select_action<R: Rng>(net: &ValueNet, inputs: &[EncodedInput], epsilon: f64, rng: &mut R) -> Result<Option<usize>> {
    if inputs.is_empty() {
        return Ok(None);
    }
    let mut err = None;
    let pick = select_index(inputs.len(), epsilon, rng, || {
        inputs
            .iter()
            .map(|i| net.forward(i).unwrap_or_else(|e| {
                err.get_or_insert(e);
                f64::NEG_INFINITY
            }))
            .collect()
    });
    match err {
        Some(e) => Err(e),
        None => Ok(Some(pick)),
    }
}

/// One decision of the learned policy.
#[derive(Debug, Clone)]
pub struct Step {
    pub decision: Decision,
    pub candidate: Candidate,
    pub input: EncodedInput,
    pub candidate_count: usize,
}

/// q-values of every candidate of `ms`, using the incremental scorer.
pub fn score_candidates(net: &ValueNet, encoder: &StateEncoder, ms: &MultiBinState, candidates: &[Candidate]) -> Vec<f64> {
    let base = encoder.pool(ms);
    let scorer = CandidateScorer::new(net, &base.x);
    let empty = crate::grid::ContainerState::new(ms.bin_dims()).expect("valid bin");
    candidates
        .iter()
        .map(|c| {
            let (x, touched) = encoder.project(ms, &base, c);
            let bin = ms.bins().get(c.placement.bin).unwrap_or(&empty);
            let y = encode_border(bin, c.dims, c.placement.anchor);
            let field = encoder.field_index(c.placement.anchor, c.placement.bin);
            scorer.score(&x, &touched, &y, field)
        })
        .collect()
}

/// Chooses a placement for `next` ε-greedily among its corner candidates.
pub fn choose<R: Rng>(
    net: &ValueNet,
    encoder: &StateEncoder,
    ms: &MultiBinState,
    next: BoxDims,
    epsilon: f64,
    rng: &mut R,
) -> Result<Step> {
    let (candidates, opened) = candidates_or_new_bin(ms, next)?;
    let opened_state;
    let view = if opened {
        let mut s = ms.clone();
        s.open_next_bin()?;
        opened_state = s;
        &opened_state
    } else {
        ms
    };
    let pick = select_index(candidates.len(), epsilon, rng, || score_candidates(net, encoder, view, &candidates));
    let candidate = candidates[pick];
    let base = encoder.pool(view);
    let input = encoder.encode_candidate(view, &base, &candidate);
    Ok(Step {
        decision: Decision { placement: candidate.placement, opened_new_bin: opened },
        candidate,
        input,
        candidate_count: candidates.len(),
    })
}

/// Greedy learned policy for evaluation runs.
#[derive(Debug, Clone)]
pub struct PackMan {
    net: ValueNet,
    rows: usize,
    cols: usize,
    encoder: Option<StateEncoder>,
}

impl PackMan {
    pub fn new(net: ValueNet, partition: PartitionShape) -> Self {
        Self { net, rows: partition.rows, cols: partition.cols, encoder: None }
    }

    pub fn from_model(model: LoadedModel) -> Self {
        Self::new(model.net, model.partition)
    }

    pub fn net(&self) -> &ValueNet {
        &self.net
    }

    /// Encoder matching the layout of `ms`, built on first use.
    pub fn encoder_for(&mut self, ms: &MultiBinState) -> Result<&StateEncoder> {
        let stale = self
            .encoder
            .as_ref()
            .is_none_or(|e| e.bin_dims() != ms.bin_dims() || e.capacity() != ms.capacity());
        if stale {
            self.encoder = Some(StateEncoder::with_partition(ms.bin_dims(), ms.capacity(), self.rows, self.cols)?);
        }
        Ok(self.encoder.as_ref().expect("encoder set above"))
    }
}

impl Policy for PackMan {
    fn name(&self) -> &str {
        "packman"
    }

    fn decide(&mut self, ms: &MultiBinState, next: BoxDims, _lookahead: &[BoxDims]) -> Result<Decision> {
        self.encoder_for(ms)?;
        let encoder = self.encoder.as_ref().expect("encoder set above");
        // ε = 0 never draws from the generator
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        Ok(choose(&self.net, encoder, ms, next, 0.0, &mut rng)?.decision)
    }
}

/// Per-episode training statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub episode: usize,
    pub epsilon: f64,
    pub bins_used: usize,
    pub fill_first_opt: f64,
    pub packing_fraction: f64,
    pub zeta: f64,
    pub loss: f64,
    pub steps: usize,
    pub failed: bool,
}

pub struct TrainingOutcome {
    pub net: ValueNet,
    pub curve: Vec<CurvePoint>,
    pub baseline: RunningBaseline,
    pub train_steps: usize,
    pub target_syncs: usize,
}

struct EpisodePlay {
    inputs: Vec<EncodedInput>,
    bins_used: usize,
    fill_first_opt: f64,
    packing_fraction: f64,
    failed: bool,
}

fn play_episode<R: Rng>(
    net: &ValueNet,
    encoder: &StateEncoder,
    stream: &BoxStream,
    max_bins: usize,
    epsilon: f64,
    rng: &mut R,
) -> Result<EpisodePlay> {
    let bin = stream.spec.bin_dims;
    let mut ms = MultiBinState::new(bin, max_bins)?;
    ms.open_next_bin()?;
    let mut inputs = Vec::with_capacity(stream.boxes.len());
    let mut failed = false;
    for &next in &stream.boxes {
        let step = match choose(net, encoder, &ms, next, epsilon, rng) {
            Ok(s) => s,
            Err(PackError::CapacityExhausted { .. }) => {
                failed = true;
                break;
            }
            Err(e) => return Err(e),
        };
        crate::policy::apply(&mut ms, next, step.decision)?;
        inputs.push(step.input);
    }
    let bins_used = if failed { max_bins + 1 } else { ms.open_count() };
    Ok(EpisodePlay {
        inputs,
        bins_used,
        fill_first_opt: ms.fill_first(stream.spec.opt_bins),
        packing_fraction: packing_fraction(ms.total_volume(), bins_used, bin.volume()),
        failed,
    })
}

/// Trains a fresh network, cycling through `datasets` once per episode.
/// `on_episode` sees each curve point as it is produced.
pub fn run_training_with(
    datasets: &[BoxStream],
    cfg: &TrainerConfig,
    mut on_episode: impl FnMut(&CurvePoint),
) -> Result<TrainingOutcome> {
    let first = datasets.first().ok_or_else(|| PackError::InvalidArgument("no training datasets".into()))?;
    let bin = first.spec.bin_dims;
    if datasets.iter().any(|d| d.spec.bin_dims != bin) {
        return Err(PackError::InvalidArgument("training datasets mix bin sizes".into()));
    }
    if cfg.batch_size == 0 || cfg.batches_per_episode == 0 || cfg.target_sync_every == 0 || cfg.max_bins == 0 {
        return Err(PackError::InvalidArgument("batch size, batch count, sync period and bin capacity must be positive".into()));
    }
    let encoder = StateEncoder::new(bin, cfg.max_bins);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut net = ValueNet::random(&mut rng);
    let mut target = net.clone();
    let mut replay = ReplayBuffer::new(cfg.replay_capacity);
    let mut baseline = RunningBaseline::default();
    let mut curve = Vec::with_capacity(cfg.episodes);
    let (mut train_steps, mut target_syncs) = (0, 0);

    for episode in 0..cfg.episodes {
        let stream = &datasets[episode % datasets.len()];
        let epsilon = cfg.epsilon(episode);
        let play = play_episode(&net, &encoder, stream, cfg.max_bins, epsilon, &mut rng)?;
        let steps = play.inputs.len();
        let (zeta, rewards) = episode_rewards(play.packing_fraction, steps, &mut baseline, cfg.rho);
        if steps > 0 {
            replay.push_episode(play.inputs, &rewards);
        }

        let mut loss = f64::NAN;
        let batches = if replay.is_empty() { 0 } else { cfg.batches_per_episode };
        for _ in 0..batches {
            let sample = replay.sample(cfg.batch_size, &mut rng);
            let targets = sample.iter().map(|t| q_target(t, &target, cfg)).collect::<Result<Vec<_>>>()?;
            let batch: Vec<_> = sample.iter().zip(targets).map(|(t, y)| (t.input, y)).collect();
            loss = net.train_step(&batch, cfg.learning_rate, cfg.momentum)?;
            train_steps += 1;
            if train_steps % cfg.target_sync_every == 0 {
                target.sync_from(&net);
                target_syncs += 1;
            }
        }

        let point = CurvePoint {
            episode,
            epsilon,
            bins_used: play.bins_used,
            fill_first_opt: play.fill_first_opt,
            packing_fraction: play.packing_fraction,
            zeta,
            loss,
            steps,
            failed: play.failed,
        };
        on_episode(&point);
        curve.push(point);
    }
    Ok(TrainingOutcome { net, curve, baseline, train_steps, target_syncs })
}

pub fn run_training(datasets: &[BoxStream], cfg: &TrainerConfig) -> Result<TrainingOutcome> {
    run_training_with(datasets, cfg, |_| {})
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionShape {
    pub rows: usize,
    pub cols: usize,
}

impl Default for PartitionShape {
    fn default() -> Self {
        Self { rows: FieldPartition::DEFAULT_ROWS, cols: FieldPartition::DEFAULT_COLS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    partition: PartitionShape,
    config: TrainerConfig,
    layers: Vec<Dense>,
}

#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub net: ValueNet,
    pub partition: PartitionShape,
    pub config: TrainerConfig,
}

pub fn model_to_json(net: &ValueNet, partition: PartitionShape, cfg: &TrainerConfig) -> Result<String> {
    let file = ModelFile { format_version: MODEL_FORMAT_VERSION, partition, config: cfg.clone(), layers: net.layers.clone() };
    Ok(serde_json::to_string(&file)?)
}

pub fn model_from_json(text: &str) -> Result<LoadedModel> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| PackError::CorruptModel(e.to_string()))?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(PackError::CorruptModel(format!("unsupported model format version {}", file.format_version)));
    }
    if file.partition.rows * file.partition.cols != crate::encoder::TILES {
        return Err(PackError::CorruptModel(format!("partition {}x{} is not 144 tiles", file.partition.rows, file.partition.cols)));
    }
    Ok(LoadedModel { net: ValueNet::from_layers(file.layers)?, partition: file.partition, config: file.config })
}

pub fn save_model(path: &Path, net: &ValueNet, partition: PartitionShape, cfg: &TrainerConfig) -> Result<()> {
    fs::write(path, model_to_json(net, partition, cfg)?)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<LoadedModel> {
    model_from_json(&fs::read_to_string(path)?)
}
