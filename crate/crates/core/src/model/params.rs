//! Named dense parameter tensors.

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamId(pub usize);

/// Row-major matrix; vectors are stored with `cols == 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    tensors: Vec<Tensor>,
}

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    /// Uniform init in `±scale`; a zero scale gives a zero tensor.
    pub fn add(&mut self, name: &str, rows: usize, cols: usize, scale: f64, rng: &mut impl Rng) -> ParamId {
        let data = (0..rows * cols)
            .map(|_| if scale == 0.0 { 0.0 } else { rng.gen_range(-scale..scale) })
            .collect();
        self.tensors.push(Tensor { name: name.to_string(), rows, cols, data });
        ParamId(self.tensors.len() - 1)
    }

    /// Glorot-uniform weight matrix.
    pub fn add_matrix(&mut self, name: &str, rows: usize, cols: usize, rng: &mut impl Rng) -> ParamId {
        let scale = (6.0 / (rows + cols) as f64).sqrt();
        self.add(name, rows, cols, scale, rng)
    }

    pub fn add_bias(&mut self, name: &str, rows: usize) -> ParamId {
        self.tensors.push(Tensor { name: name.to_string(), rows, cols: 1, data: vec![0.0; rows] });
        ParamId(self.tensors.len() - 1)
    }

    pub fn get(&self, id: ParamId) -> &Tensor {
        &self.tensors[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Tensor {
        &mut self.tensors[id.0]
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn tensors_mut(&mut self) -> &mut [Tensor] {
        &mut self.tensors
    }

    pub fn find(&self, name: &str) -> Option<ParamId> {
        self.tensors.iter().position(|t| t.name == name).map(ParamId)
    }

    pub fn num_scalars(&self) -> usize {
        self.tensors.iter().map(|t| t.data.len()).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.tensors.iter().all(|t| t.data.iter().all(|x| x.is_finite()))
    }

    /// True when both sets have the same names and shapes, in order.
    pub fn same_layout(&self, other: &Params) -> bool {
        self.tensors.len() == other.tensors.len()
            && self
                .tensors
                .iter()
                .zip(&other.tensors)
                .all(|(a, b)| a.name == b.name && a.rows == b.rows && a.cols == b.cols && a.data.len() == b.data.len())
    }
}
