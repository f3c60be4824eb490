use serde::{Deserialize, Serialize};

/// Patience-based early stopping on a loss to minimize.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EarlyStopper {
    patience: usize,
    best: Option<f64>,
    best_epoch: usize,
    bad_epochs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopDecision {
    pub improved: bool,
    pub stop: bool,
}

impl EarlyStopper {
    pub fn new(patience: usize) -> Self {
        EarlyStopper { patience, best: None, best_epoch: 0, bad_epochs: 0 }
    }

    /// Only a strict decrease counts as an improvement.
    pub fn observe(&mut self, epoch: usize, loss: f64) -> StopDecision {
        let improved = self.best.is_none_or(|b| loss < b);
        if improved {
            self.best = Some(loss);
            self.best_epoch = epoch;
            self.bad_epochs = 0;
        } else {
            self.bad_epochs += 1;
        }
        StopDecision { improved, stop: self.should_stop() }
    }

    pub fn should_stop(&self) -> bool {
        self.bad_epochs >= self.patience
    }

    pub fn best(&self) -> Option<f64> {
        self.best
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stops_after_patience_runs_out() {
        let mut s = EarlyStopper::new(3);
        let seq = [5.0, 4.0, 4.5, 4.6, 4.7];
        let mut stopped_at = None;
        for (i, &l) in seq.iter().enumerate() {
            if s.observe(i + 1, l).stop {
                stopped_at = Some(i + 1);
                break;
            }
        }
        assert_eq!(stopped_at, Some(5));
        assert_eq!(s.best_epoch(), 2);
        assert_eq!(s.best(), Some(4.0));
    }

    #[test]
    fn ties_are_not_improvements() {
        let mut s = EarlyStopper::new(1);
        assert!(s.observe(1, 2.0).improved);
        let d = s.observe(2, 2.0);
        assert!(!d.improved && d.stop);
    }
}
