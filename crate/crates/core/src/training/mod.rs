//! Joint optimization with Adam, early stopping on the summed validation
//! losses, and resumable run directories.

mod adam;
mod stopper;

pub use adam::Adam;
pub use stopper::{EarlyStopper, StopDecision};

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::FactIndex;
use crate::data::Dialog;
use crate::eval::{evaluate_model, MetricRecord};
use crate::model::tape::Grads;
use crate::model::{CharmModel, MultiTaskLosses, PreparedDialog, TaskCounts};
use crate::{Error, Result};

pub const BEST_CHECKPOINT: &str = "best.ckpt";
pub const LAST_CHECKPOINT: &str = "last.ckpt";
pub const TRAIN_STATE: &str = "train_state.json";
pub const METRICS_LOG: &str = "metrics.jsonl";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    /// Dialogs per update.
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    /// Global gradient-norm cap; zero disables clipping.
    pub clip_norm: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_eps: f64,
    pub seed: u64,
    pub checkpoint_dir: Option<PathBuf>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.001,
            batch_size: 64,
            max_epochs: 40,
            patience: 3,
            clip_norm: 5.0,
            beta1: 0.9,
            beta2: 0.999,
            adam_eps: 1e-8,
            seed: 0,
            checkpoint_dir: None,
        }
    }
}

impl TrainConfig {
    /// Settings for the small synthetic corpora: smaller batches and a larger
    /// step so that a thousand dialogs give enough updates.
    pub fn small() -> Self {
        TrainConfig { learning_rate: 0.003, batch_size: 16, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        if self.batch_size == 0 || self.max_epochs == 0 || self.patience == 0 {
            return Err(Error::Config("batch_size, max_epochs and patience must be positive".into()));
        }
        if self.clip_norm.is_nan() || self.clip_norm < 0.0 {
            return Err(Error::Config("clip_norm must be non-negative".into()));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || self.adam_eps.is_nan() || self.adam_eps <= 0.0 {
            return Err(Error::Config("invalid Adam hyperparameters".into()));
        }
        Ok(())
    }
}

/// One line of the metric log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train: MultiTaskLosses,
    pub validation: MultiTaskLosses,
    /// `L_f + L_p + L_u + L_l` on the validation split.
    pub validation_sum: f64,
    pub max_grad_norm: f64,
    pub improved: bool,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainStatus {
    EarlyStopped,
    MaxEpochs,
    /// A non-finite loss appeared; the best finite model is kept.
    Diverged { epoch: usize },
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub best: CharmModel,
    pub best_epoch: usize,
    pub log: Vec<EpochRecord>,
    pub status: TrainStatus,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TrainState {
    next_epoch: usize,
    adam: Adam,
    stopper: EarlyStopper,
    log: Vec<EpochRecord>,
}

fn epoch_rng(seed: u64, epoch: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (epoch as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Validation objective used for model selection.
pub fn selection_loss(l: &MultiTaskLosses) -> f64 {
    ((l.fact + l.policy) + l.utterance) + l.like
}

fn append_log(dir: &Path, rec: &EpochRecord) -> Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(dir.join(METRICS_LOG))?;
    writeln!(f, "{}", serde_json::to_string(rec)?)?;
    Ok(())
}

/// Trains from scratch. With a checkpoint directory, writes the metric log,
/// best and last checkpoints and the optimizer state after every epoch.
pub fn train(
    model: CharmModel,
    train_set: &[PreparedDialog],
    validation: &[PreparedDialog],
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    if let Some(dir) = &config.checkpoint_dir {
        fs::create_dir_all(dir)?;
        let log = dir.join(METRICS_LOG);
        if log.exists() {
            fs::remove_file(log)?;
        }
    }
    let state = TrainState {
        next_epoch: 1,
        adam: Adam::new(&model.charm.params.params),
        stopper: EarlyStopper::new(config.patience),
        log: Vec::new(),
    };
    run(model.clone(), model, state, train_set, validation, config)
}

/// Continues a run from the last checkpoint in `config.checkpoint_dir`.
pub fn resume(train_set: &[PreparedDialog], validation: &[PreparedDialog], config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    let dir = config
        .checkpoint_dir
        .as_ref()
        .ok_or_else(|| Error::Config("resume needs a checkpoint directory".into()))?;
    let last = CharmModel::load(&dir.join(LAST_CHECKPOINT))?;
    let best = CharmModel::load(&dir.join(BEST_CHECKPOINT))?;
    let state: TrainState = serde_json::from_slice(&fs::read(dir.join(TRAIN_STATE))?)?;
    if !state.adam.matches(&last.charm.params.params) {
        return Err(Error::CheckpointMismatch("optimizer state does not match the checkpoint".into()));
    }
    run(last, best, state, train_set, validation, config)
}

fn run(
    mut model: CharmModel,
    mut best: CharmModel,
    mut state: TrainState,
    train_set: &[PreparedDialog],
    validation: &[PreparedDialog],
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    if train_set.is_empty() {
        return Err(Error::EmptyInput("training split"));
    }
    if validation.is_empty() {
        return Err(Error::EmptyInput("validation split"));
    }
    let dir = config.checkpoint_dir.as_deref();
    let mut grads = Grads::zeros_like(&model.charm.params.params);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut status = TrainStatus::MaxEpochs;
    let mut stopped = state.stopper.should_stop();
    if stopped {
        status = TrainStatus::EarlyStopped;
    }

    while !stopped && state.next_epoch <= config.max_epochs {
        let epoch = state.next_epoch;
        let started = Instant::now();
        order.sort_unstable();
        order.shuffle(&mut epoch_rng(config.seed, epoch));
        let mut sums = [0.0; 4];
        let mut counts = TaskCounts::default();
        let mut max_norm: f64 = 0.0;
        let mut finite = true;
        for batch in order.chunks(config.batch_size) {
            let mut bc = TaskCounts::default();
            for &i in batch {
                bc.add(TaskCounts::of(&train_set[i]));
            }
            grads.zero();
            for &i in batch {
                let s = model.charm.accumulate_gradients(&train_set[i], bc, [true; 4], &mut grads);
                for k in 0..4 {
                    sums[k] += s[k];
                }
            }
            counts.add(bc);
            let norm = grads.norm();
            if !norm.is_finite() || sums.iter().any(|s| !s.is_finite()) {
                finite = false;
                break;
            }
            max_norm = max_norm.max(norm);
            if config.clip_norm > 0.0 && norm > config.clip_norm {
                grads.scale(config.clip_norm / norm);
            }
            state.adam.step(&mut model.charm.params.params, &grads, config);
        }
        let mean = |s: f64, n: usize| if n == 0 { 0.0 } else { s / n as f64 };
        let train_losses = MultiTaskLosses::from_parts(
            mean(sums[0], counts.fact),
            mean(sums[1], counts.policy),
            mean(sums[2], counts.utterance),
            mean(sums[3], counts.like),
        );
        let val = if finite && model.charm.params.params.all_finite() {
            model.charm.losses(validation)
        } else {
            MultiTaskLosses::from_parts(f64::NAN, f64::NAN, f64::NAN, f64::NAN)
        };
        let val_sum = selection_loss(&val);
        if !val_sum.is_finite() {
            status = TrainStatus::Diverged { epoch };
            break;
        }
        let decision = state.stopper.observe(epoch, val_sum);
        let rec = EpochRecord {
            epoch,
            train: train_losses,
            validation: val,
            validation_sum: val_sum,
            max_grad_norm: max_norm,
            improved: decision.improved,
            seconds: started.elapsed().as_secs_f64(),
        };
        if decision.improved {
            best = model.clone();
        }
        state.log.push(rec.clone());
        state.next_epoch += 1;
        if let Some(dir) = dir {
            append_log(dir, &rec)?;
            if decision.improved {
                best.save(&dir.join(BEST_CHECKPOINT))?;
            }
            model.save(&dir.join(LAST_CHECKPOINT))?;
            fs::write(dir.join(TRAIN_STATE), serde_json::to_vec(&state)?)?;
        }
        if decision.stop {
            status = TrainStatus::EarlyStopped;
            stopped = true;
        }
    }
    Ok(TrainOutcome { best, best_epoch: state.stopper.best_epoch(), log: state.log, status })
}

/// Loads a checkpoint and scores it on a split of dialogs.
pub fn evaluate_checkpoint(
    path: &Path,
    dialogs: &[&Dialog],
    index: &FactIndex,
    model_name: &str,
    split: &str,
) -> Result<MetricRecord> {
    let model = CharmModel::load(path)?;
    let prepared = model.prepare(dialogs.iter().copied(), index)?;
    Ok(evaluate_model(&model.charm, &prepared, model_name, split))
}
