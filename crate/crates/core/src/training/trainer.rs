use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::adam::{adam_step, AdamState};
use super::loss::{add_weight_decay, loss};
use super::schedule::LrSchedule;
use super::TrainConfig;
use crate::data::{batches, SamplePair};
use crate::error::{Error, Result};
use crate::model::{backward, forward, forward_train, init_params, ModelConfig, ModelParams};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Optimizer steps taken so far.
    pub steps: u64,
    /// Mean regularized batch loss over the epoch.
    pub train_loss: f64,
    /// Mean batch MSE over the epoch (training mode, dropout on).
    pub train_mse: f64,
    pub val_loss: f64,
    /// Rate in force for the next epoch.
    pub lr: f64,
}

impl EpochRecord {
    /// `epoch=.. steps=.. train_loss=.. val_loss=.. lr=..`
    pub fn to_line(&self) -> String {
        format!(
            "epoch={} steps={} train_loss={:.8e} train_mse={:.8e} val_loss={:.8e} lr={:e}",
            self.epoch, self.steps, self.train_loss, self.train_mse, self.val_loss, self.lr
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    LearningRateFloor,
    MaxEpochs,
    MaxSteps,
    TimeBudget,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::LearningRateFloor => "lr_floor",
            StopReason::MaxEpochs => "max_epochs",
            StopReason::MaxSteps => "max_steps",
            StopReason::TimeBudget => "time_budget",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub epochs: Vec<EpochRecord>,
    /// 1-based epochs after which the learning rate was divided.
    pub decay_epochs: Vec<usize>,
    pub stop_reason: StopReason,
    pub best_epoch: usize,
    pub best_val_loss: f64,
    pub steps: u64,
    pub wall_clock: Duration,
}

impl TrainReport {
    /// Learning rate in force during each epoch, starting with the initial rate.
    pub fn lr_history(&self, lr_initial: f64) -> Vec<f64> {
        std::iter::once(lr_initial).chain(self.epochs.iter().map(|e| e.lr)).take(self.epochs.len()).collect()
    }
}

/// Mean per-pair MSE in inference mode.
pub fn validation_loss<T: Scalar>(params: &ModelParams<T>, pairs: &[SamplePair<T>]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::invalid("empty validation set"));
    }
    let mut total = 0.0;
    for p in pairs {
        let pred = forward(params, &Tensor::from_planes(&[&p.lr])?)?;
        let target = Tensor::from_planes(&[&p.hr])?;
        pred.expect_shape(target.shape())?;
        let sse: f64 = pred.data().iter().zip(target.data()).map(|(&a, &b)| (a.as_f64() - b.as_f64()).powi(2)).sum();
        total += sse / pred.len() as f64;
    }
    Ok(total / pairs.len() as f64)
}

pub fn train<T: Scalar>(
    model_config: &ModelConfig,
    train_config: &TrainConfig,
    train_set: &[SamplePair<T>],
    validation_set: &[SamplePair<T>],
) -> Result<(ModelParams<T>, TrainReport)> {
    train_with(model_config, train_config, train_set, validation_set, |_| {})
}

/// As [`train`], calling `on_epoch` after each epoch's validation.
pub fn train_with<T: Scalar>(
    model_config: &ModelConfig,
    train_config: &TrainConfig,
    train_set: &[SamplePair<T>],
    validation_set: &[SamplePair<T>],
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<(ModelParams<T>, TrainReport)> {
    train_config.validate()?;
    if train_set.is_empty() {
        return Err(Error::invalid("empty training set"));
    }
    if validation_set.is_empty() {
        return Err(Error::invalid("empty validation set"));
    }
    let mut config = model_config.clone();
    config.dropout_keep = train_config.dropout_keep;
    config.validate()?;

    let start = Instant::now();
    let mut params = init_params::<T>(&config, train_config.seed)?;
    let mut adam = AdamState::new(&params);
    let mut schedule = LrSchedule::from_config(train_config);
    let mut rng = ChaCha8Rng::seed_from_u64(train_config.seed.wrapping_add(1));

    let mut best = (params.clone(), f64::INFINITY, 0usize);
    let mut records = Vec::new();
    let mut decay_epochs = Vec::new();
    let mut steps = 0u64;
    let stop_reason;

    'epochs: loop {
        let epoch = records.len() + 1;
        let lr = schedule.lr();
        let (mut sum_loss, mut sum_mse, mut n_batches) = (0.0, 0.0, 0usize);
        let mut limit_hit = None;
        for batch in batches(train_set, train_config.batch_size, &mut rng)? {
            let batch = batch?;
            let (pred, trace) = forward_train(&params, &batch.lr, &mut rng)?;
            let l = loss(&pred, &batch.hr, &params, train_config.l2_coeff)?;
            if !l.total.is_finite() {
                return Err(Error::NonFiniteLoss { step: steps, epoch, lr });
            }
            let mut grads = backward(&params, &trace, &l.output_grad)?;
            add_weight_decay(&mut grads, &params, train_config.l2_coeff);
            adam_step(&mut params, &grads, &mut adam, lr, &train_config.adam);
            steps += 1;
            sum_loss += l.total;
            sum_mse += l.mse;
            n_batches += 1;
            if train_config.max_steps.is_some_and(|m| steps >= m) {
                limit_hit = Some(StopReason::MaxSteps);
                break;
            }
            if train_config.time_budget.is_some_and(|b| start.elapsed() >= b) {
                limit_hit = Some(StopReason::TimeBudget);
                break;
            }
        }

        let val_loss = validation_loss(&params, validation_set)?;
        if !val_loss.is_finite() {
            return Err(Error::NonFiniteLoss { step: steps, epoch, lr });
        }
        if val_loss < best.1 {
            best = (params.clone(), val_loss, epoch);
        }
        let step = schedule.observe(val_loss);
        if step.decayed {
            decay_epochs.push(epoch);
        }
        let record = EpochRecord {
            epoch,
            steps,
            train_loss: sum_loss / n_batches.max(1) as f64,
            train_mse: sum_mse / n_batches.max(1) as f64,
            val_loss,
            lr: step.lr,
        };
        on_epoch(&record);
        records.push(record);

        if step.stop {
            stop_reason = StopReason::LearningRateFloor;
            break 'epochs;
        }
        if let Some(r) = limit_hit {
            stop_reason = r;
            break 'epochs;
        }
        if train_config.max_epochs.is_some_and(|m| epoch >= m) {
            stop_reason = StopReason::MaxEpochs;
            break 'epochs;
        }
    }

    let (best_params, best_val_loss, best_epoch) = best;
    let report = TrainReport {
        epochs: records,
        decay_epochs,
        stop_reason,
        best_epoch,
        best_val_loss,
        steps,
        wall_clock: start.elapsed(),
    };
    Ok((best_params, report))
}
