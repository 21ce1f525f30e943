//! Loss, Adam, learning-rate schedule and the epoch loop.

mod adam;
mod loss;
mod schedule;
mod trainer;

use std::time::Duration;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use loss::{add_weight_decay, loss, LossValue};
pub use schedule::{replay_schedule, LrSchedule, ScheduleReplay, ScheduleStep};
pub use trainer::{train, train_with, validation_loss, EpochRecord, StopReason, TrainReport};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub lr_initial: f64,
    pub lr_floor: f64,
    pub lr_decay_factor: f64,
    pub patience_epochs: usize,
    pub batch_size: usize,
    pub l2_coeff: f64,
    pub dropout_keep: f64,
    pub adam: AdamConfig,
    pub seed: u64,
    /// Optional hard limits; `None` means run until the schedule stops.
    pub max_epochs: Option<usize>,
    pub max_steps: Option<u64>,
    pub time_budget: Option<Duration>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr_initial: 0.002,
            lr_floor: 0.000_02,
            lr_decay_factor: 2.0,
            patience_epochs: 5,
            batch_size: 64,
            l2_coeff: 0.0001,
            dropout_keep: 0.8,
            adam: AdamConfig::default(),
            seed: 0,
            max_epochs: None,
            max_steps: None,
            time_budget: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lr_initial", self.lr_initial),
            ("lr_floor", self.lr_floor),
            ("lr_decay_factor", self.lr_decay_factor),
            ("adam_epsilon", self.adam.epsilon),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.l2_coeff < 0.0 {
            return Err(Error::invalid("l2_coeff must be non-negative"));
        }
        if self.lr_decay_factor <= 1.0 {
            return Err(Error::invalid("lr_decay_factor must exceed 1"));
        }
        if self.lr_floor >= self.lr_initial {
            return Err(Error::invalid("lr_floor must be below lr_initial"));
        }
        if self.patience_epochs == 0 || self.batch_size == 0 {
            return Err(Error::invalid("patience_epochs and batch_size must be positive"));
        }
        if !(self.dropout_keep > 0.0 && self.dropout_keep <= 1.0) {
            return Err(Error::invalid(format!("dropout_keep {} outside (0, 1]", self.dropout_keep)));
        }
        if !(0.0..1.0).contains(&self.adam.beta1) || !(0.0..1.0).contains(&self.adam.beta2) {
            return Err(Error::invalid("adam betas must lie in [0, 1)"));
        }
        Ok(())
    }
}
