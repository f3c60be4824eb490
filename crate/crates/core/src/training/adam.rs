use serde::{Deserialize, Serialize};

use super::TrainConfig;
use crate::model::params::Params;
use crate::model::tape::Grads;

/// Adam moment estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    step: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(params: &Params) -> Self {
        let zeros: Vec<Vec<f64>> = params.tensors().iter().map(|t| vec![0.0; t.data.len()]).collect();
        Adam { step: 0, m: zeros.clone(), v: zeros }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn matches(&self, params: &Params) -> bool {
        self.m.len() == params.tensors().len()
            && self.m.iter().zip(params.tensors()).all(|(m, t)| m.len() == t.data.len())
    }

    pub fn step(&mut self, params: &mut Params, grads: &Grads, cfg: &TrainConfig) {
        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - cfg.beta1.powi(t);
        let bc2 = 1.0 - cfg.beta2.powi(t);
        for (k, tensor) in params.tensors_mut().iter_mut().enumerate() {
            let g = &grads.data[k];
            let (m, v) = (&mut self.m[k], &mut self.v[k]);
            for j in 0..tensor.data.len() {
                m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
                v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
                let mh = m[j] / bc1;
                let vh = v[j] / bc2;
                tensor.data[j] -= cfg.learning_rate * mh / (vh.sqrt() + cfg.adam_eps);
            }
        }
    }
}
