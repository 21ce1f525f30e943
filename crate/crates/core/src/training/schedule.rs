/// Learning-rate decay on stagnation of a monitored loss.
///
/// The best loss is kept across decays; the stagnation counter restarts at
/// every new minimum and at every decay.
#[derive(Debug, Clone, PartialEq)]
pub struct LrSchedule {
    lr: f64,
    floor: f64,
    factor: f64,
    patience: usize,
    best: f64,
    epoch: usize,
    mark: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleStep {
    pub lr: f64,
    pub improved: bool,
    pub decayed: bool,
    /// The learning rate has dropped below the floor.
    pub stop: bool,
}

impl LrSchedule {
    pub fn new(lr_initial: f64, lr_floor: f64, factor: f64, patience: usize) -> Self {
        LrSchedule { lr: lr_initial, floor: lr_floor, factor, patience, best: f64::INFINITY, epoch: 0, mark: 0 }
    }

    pub fn from_config(cfg: &super::TrainConfig) -> Self {
        Self::new(cfg.lr_initial, cfg.lr_floor, cfg.lr_decay_factor, cfg.patience_epochs)
    }

    pub fn lr(&self) -> f64 {
        self.lr
    }

    /// Feeds one epoch's monitored loss.
    pub fn observe(&mut self, loss: f64) -> ScheduleStep {
        self.epoch += 1;
        let improved = loss < self.best;
        let mut decayed = false;
        if improved {
            self.best = loss;
            self.mark = self.epoch;
        } else if self.epoch - self.mark >= self.patience {
            self.lr /= self.factor;
            self.mark = self.epoch;
            decayed = true;
        }
        ScheduleStep { lr: self.lr, improved, decayed, stop: self.lr < self.floor }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleReplay {
    pub lr: f64,
    pub stop: bool,
    /// 1-based epochs at which the rate was divided.
    pub decay_epochs: Vec<usize>,
    /// Learning rate in force after each epoch.
    pub lr_history: Vec<f64>,
}

/// Runs a fresh schedule over a whole loss history, halting at the first stop.
pub fn replay_schedule(history: &[f64], cfg: &super::TrainConfig) -> ScheduleReplay {
    let mut s = LrSchedule::from_config(cfg);
    let mut out = ScheduleReplay { lr: s.lr(), stop: false, decay_epochs: Vec::new(), lr_history: Vec::new() };
    for (i, &loss) in history.iter().enumerate() {
        let step = s.observe(loss);
        out.lr = step.lr;
        out.lr_history.push(step.lr);
        if step.decayed {
            out.decay_epochs.push(i + 1);
        }
        if step.stop {
            out.stop = true;
            break;
        }
    }
    out
}
