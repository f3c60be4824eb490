//! Reverse-mode automatic differentiation over dense `f64` vectors.
//!
//! Every node holds a vector. Matrices only appear as parameters, consumed by
//! [`Tape::affine`] and [`Tape::lookup`]. Nodes are appended in evaluation
//! order, so a reverse sweep over the arena is a valid backward pass.

use super::params::{ParamId, Params, Tensor};

pub const LOG_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(u32);

#[derive(Debug, Clone)]
enum Op {
    Input,
    Lookup { table: ParamId, row: u32 },
    Affine { w: ParamId, b: Option<ParamId>, x: Var },
    Concat { first: u32, count: u32 },
    Slice { x: Var, start: u32 },
    Add(Var, Var),
    Dot(Var, Var),
    Mean { first: u32, count: u32 },
    Gelu(Var),
    Tanh(Var),
    LstmCell { gates: Var, cell: Var },
    /// `sum_j coef_j * -ln(max(softmax(x)_j, eps))`
    SoftmaxXent { x: Var, coef: u32 },
    /// `sum_k -[y ln p + (1-y) ln(1-p)]`, `p = clamp(sigmoid(x), eps, 1-eps)`
    SigmoidBce { x: Var, labels: u32 },
    Scale(Var, f64),
    Sum { first: u32, count: u32 },
}

#[derive(Debug, Clone)]
struct Node {
    off: u32,
    len: u32,
    op: Op,
}

/// Gradient buffers matching a [`Params`] layout.
#[derive(Debug, Clone)]
pub struct Grads {
    pub(crate) data: Vec<Vec<f64>>,
}

impl Grads {
    pub fn zeros_like(params: &Params) -> Self {
        Grads { data: params.tensors().iter().map(|t| vec![0.0; t.data.len()]).collect() }
    }

    pub fn get(&self, id: ParamId) -> &[f64] {
        &self.data[id.0]
    }

    /// Gradient of the `k`-th tensor in layout order.
    pub fn data_of(&self, k: usize) -> &[f64] {
        &self.data[k]
    }

    pub fn scale(&mut self, f: f64) {
        for g in &mut self.data {
            for x in g {
                *x *= f;
            }
        }
    }

    pub fn add_assign(&mut self, other: &Grads) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn zero(&mut self) {
        for g in &mut self.data {
            g.iter_mut().for_each(|x| *x = 0.0);
        }
    }
}

pub struct Tape<'p> {
    params: &'p Params,
    vals: Vec<f64>,
    nodes: Vec<Node>,
    links: Vec<Var>,
    consts: Vec<f64>,
}

pub fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + statrs::function::erf::erf(x / std::f64::consts::SQRT_2))
}

fn gelu_grad(x: f64) -> f64 {
    let cdf = 0.5 * (1.0 + statrs::function::erf::erf(x / std::f64::consts::SQRT_2));
    let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    cdf + x * pdf
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable softmax.
pub fn softmax(x: &[f64]) -> Vec<f64> {
    let max = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = x.iter().map(|v| (v - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / z).collect()
}

fn matvec(w: &Tensor, x: &[f64], out: &mut [f64]) {
    debug_assert_eq!(w.cols, x.len());
    for (r, o) in out.iter_mut().enumerate() {
        let row = &w.data[r * w.cols..(r + 1) * w.cols];
        *o += row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    }
}

impl<'p> Tape<'p> {
    pub fn new(params: &'p Params) -> Self {
        Tape { params, vals: Vec::with_capacity(1 << 14), nodes: Vec::with_capacity(1 << 10), links: Vec::new(), consts: Vec::new() }
    }

    pub fn params(&self) -> &'p Params {
        self.params
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &[f64] {
        let n = &self.nodes[v.0 as usize];
        &self.vals[n.off as usize..(n.off + n.len) as usize]
    }

    pub fn scalar(&self, v: Var) -> f64 {
        self.value(v)[0]
    }

    pub fn dim(&self, v: Var) -> usize {
        self.nodes[v.0 as usize].len as usize
    }

    fn push(&mut self, value: impl IntoIterator<Item = f64>, op: Op) -> Var {
        let off = self.vals.len();
        self.vals.extend(value);
        let len = self.vals.len() - off;
        self.nodes.push(Node { off: off as u32, len: len as u32, op });
        Var(self.nodes.len() as u32 - 1)
    }

    fn push_links(&mut self, vars: &[Var]) -> (u32, u32) {
        let first = self.links.len() as u32;
        self.links.extend_from_slice(vars);
        (first, vars.len() as u32)
    }

    pub fn input(&mut self, value: &[f64]) -> Var {
        self.push(value.iter().copied(), Op::Input)
    }

    pub fn zeros(&mut self, n: usize) -> Var {
        self.push(std::iter::repeat_n(0.0, n), Op::Input)
    }

    pub fn lookup(&mut self, table: ParamId, row: usize) -> Var {
        let t = self.params.get(table);
        assert!(row < t.rows, "embedding row {row} out of range for {}", t.name);
        let data = &t.data[row * t.cols..(row + 1) * t.cols];
        self.push(data.iter().copied(), Op::Lookup { table, row: row as u32 })
    }

    /// `w · x + b`
    pub fn affine(&mut self, w: ParamId, b: Option<ParamId>, x: Var) -> Var {
        let wt = self.params.get(w);
        assert_eq!(wt.cols, self.dim(x), "affine {}: input dim mismatch", wt.name);
        let mut out = match b {
            Some(b) => self.params.get(b).data.clone(),
            None => vec![0.0; wt.rows],
        };
        matvec(wt, self.value(x), &mut out);
        self.push(out, Op::Affine { w, b, x })
    }

    pub fn concat(&mut self, parts: &[Var]) -> Var {
        let mut out = Vec::new();
        for &p in parts {
            out.extend_from_slice(self.value(p));
        }
        let (first, count) = self.push_links(parts);
        self.push(out, Op::Concat { first, count })
    }

    pub fn slice(&mut self, x: Var, start: usize, len: usize) -> Var {
        let v = self.value(x)[start..start + len].to_vec();
        self.push(v, Op::Slice { x, start: start as u32 })
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let v: Vec<f64> = self.value(a).iter().zip(self.value(b)).map(|(x, y)| x + y).collect();
        self.push(v, Op::Add(a, b))
    }

    /// Inner product, as a length-1 vector.
    pub fn dot(&mut self, a: Var, b: Var) -> Var {
        assert_eq!(self.dim(a), self.dim(b), "dot: dim mismatch");
        let v: f64 = self.value(a).iter().zip(self.value(b)).map(|(x, y)| x * y).sum();
        self.push([v], Op::Dot(a, b))
    }

    /// Elementwise mean; `parts` must be non-empty.
    pub fn mean(&mut self, parts: &[Var]) -> Var {
        assert!(!parts.is_empty(), "mean of an empty set");
        let n = self.dim(parts[0]);
        let mut out = vec![0.0; n];
        for &p in parts {
            for (o, x) in out.iter_mut().zip(self.value(p)) {
                *o += x;
            }
        }
        let k = parts.len() as f64;
        out.iter_mut().for_each(|o| *o /= k);
        let (first, count) = self.push_links(parts);
        self.push(out, Op::Mean { first, count })
    }

    pub fn sum(&mut self, parts: &[Var]) -> Var {
        assert!(!parts.is_empty(), "sum of an empty set");
        let n = self.dim(parts[0]);
        let mut out = vec![0.0; n];
        for &p in parts {
            for (o, x) in out.iter_mut().zip(self.value(p)) {
                *o += x;
            }
        }
        let (first, count) = self.push_links(parts);
        self.push(out, Op::Sum { first, count })
    }

    pub fn gelu(&mut self, x: Var) -> Var {
        let v: Vec<f64> = self.value(x).iter().map(|&z| gelu(z)).collect();
        self.push(v, Op::Gelu(x))
    }

    pub fn tanh(&mut self, x: Var) -> Var {
        let v: Vec<f64> = self.value(x).iter().map(|z| z.tanh()).collect();
        self.push(v, Op::Tanh(x))
    }

    pub fn scale(&mut self, x: Var, f: f64) -> Var {
        let v: Vec<f64> = self.value(x).iter().map(|z| z * f).collect();
        self.push(v, Op::Scale(x, f))
    }

    /// LSTM pointwise update. `gates` holds the input, forget, candidate and
    /// output pre-activations (4H); returns `[h'; c']` (2H).
    pub fn lstm_cell(&mut self, gates: Var, cell: Var) -> Var {
        let h = self.dim(cell);
        assert_eq!(self.dim(gates), 4 * h);
        let z = self.value(gates);
        let c = self.value(cell);
        let mut out = vec![0.0; 2 * h];
        for k in 0..h {
            let i = sigmoid(z[k]);
            let f = sigmoid(z[h + k]);
            let g = z[2 * h + k].tanh();
            let o = sigmoid(z[3 * h + k]);
            let c_new = f * c[k] + i * g;
            out[h + k] = c_new;
            out[k] = o * c_new.tanh();
        }
        self.push(out, Op::LstmCell { gates, cell })
    }

    /// Weighted softmax cross-entropy `sum_j coef_j * -ln softmax(x)_j`.
    pub fn softmax_xent(&mut self, x: Var, coef: &[f64]) -> Var {
        assert_eq!(coef.len(), self.dim(x));
        let p = softmax(self.value(x));
        let loss: f64 = p.iter().zip(coef).map(|(p, c)| if *c == 0.0 { 0.0 } else { -c * p.max(LOG_EPS).ln() }).sum();
        let off = self.consts.len() as u32;
        self.consts.extend_from_slice(coef);
        self.push([loss], Op::SoftmaxXent { x, coef: off })
    }

    /// Multi-label binary cross-entropy over logistic probabilities.
    pub fn sigmoid_bce(&mut self, x: Var, labels: &[f64]) -> Var {
        assert_eq!(labels.len(), self.dim(x));
        let loss: f64 = self
            .value(x)
            .iter()
            .zip(labels)
            .map(|(&z, &y)| {
                let p = sigmoid(z).clamp(LOG_EPS, 1.0 - LOG_EPS);
                -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
            })
            .sum();
        let off = self.consts.len() as u32;
        self.consts.extend_from_slice(labels);
        self.push([loss], Op::SigmoidBce { x, labels: off })
    }

    /// Back-propagates from scalar `root`, adding parameter gradients to `grads`.
    pub fn backward(&self, root: Var, grads: &mut Grads) {
        assert_eq!(self.dim(root), 1, "backward needs a scalar root");
        let mut g = vec![0.0; self.vals.len()];
        let mut live = vec![false; self.nodes.len()];
        g[self.nodes[root.0 as usize].off as usize] = 1.0;
        live[root.0 as usize] = true;

        for idx in (0..=root.0 as usize).rev() {
            if !live[idx] {
                continue;
            }
            let node = &self.nodes[idx];
            let (off, len) = (node.off as usize, node.len as usize);
            let gout: Vec<f64> = g[off..off + len].to_vec();
            let mut send = |v: Var, contrib: &mut dyn FnMut(&mut [f64])| {
                let n = &self.nodes[v.0 as usize];
                live[v.0 as usize] = true;
                contrib(&mut g[n.off as usize..(n.off + n.len) as usize]);
            };
            match &node.op {
                Op::Input => {}
                Op::Lookup { table, row } => {
                    let t = self.params.get(*table);
                    let dst = &mut grads.data[table.0][*row as usize * t.cols..(*row as usize + 1) * t.cols];
                    for (d, x) in dst.iter_mut().zip(&gout) {
                        *d += x;
                    }
                }
                Op::Affine { w, b, x } => {
                    let wt = self.params.get(*w);
                    let xv = self.value(*x);
                    let gw = &mut grads.data[w.0];
                    for r in 0..wt.rows {
                        let gr = gout[r];
                        if gr != 0.0 {
                            let row = &mut gw[r * wt.cols..(r + 1) * wt.cols];
                            for (d, xc) in row.iter_mut().zip(xv) {
                                *d += gr * xc;
                            }
                        }
                    }
                    if let Some(b) = b {
                        for (d, x) in grads.data[b.0].iter_mut().zip(&gout) {
                            *d += x;
                        }
                    }
                    send(*x, &mut |gx| {
                        for (&gr, row) in gout.iter().zip(wt.data.chunks_exact(wt.cols)) {
                            if gr != 0.0 {
                                for (d, wv) in gx.iter_mut().zip(row) {
                                    *d += gr * wv;
                                }
                            }
                        }
                    });
                }
                Op::Concat { first, count } => {
                    let mut pos = 0;
                    for &p in &self.links[*first as usize..(*first + *count) as usize] {
                        let n = self.dim(p);
                        let part = &gout[pos..pos + n];
                        send(p, &mut |gx| gx.iter_mut().zip(part).for_each(|(d, s)| *d += s));
                        pos += n;
                    }
                }
                Op::Slice { x, start } => {
                    let s = *start as usize;
                    send(*x, &mut |gx| gx[s..s + len].iter_mut().zip(&gout).for_each(|(d, v)| *d += v));
                }
                Op::Add(a, b) => {
                    send(*a, &mut |gx| gx.iter_mut().zip(&gout).for_each(|(d, v)| *d += v));
                    send(*b, &mut |gx| gx.iter_mut().zip(&gout).for_each(|(d, v)| *d += v));
                }
                Op::Dot(a, b) => {
                    let (av, bv) = (self.value(*a), self.value(*b));
                    let go = gout[0];
                    send(*a, &mut |gx| gx.iter_mut().zip(bv).for_each(|(d, v)| *d += go * v));
                    send(*b, &mut |gx| gx.iter_mut().zip(av).for_each(|(d, v)| *d += go * v));
                }
                Op::Mean { first, count } | Op::Sum { first, count } => {
                    let f = if matches!(node.op, Op::Mean { .. }) { 1.0 / *count as f64 } else { 1.0 };
                    for &p in &self.links[*first as usize..(*first + *count) as usize] {
                        send(p, &mut |gx| gx.iter_mut().zip(&gout).for_each(|(d, v)| *d += f * v));
                    }
                }
                Op::Gelu(x) => {
                    let xv = self.value(*x);
                    send(*x, &mut |gx| {
                        for ((d, v), z) in gx.iter_mut().zip(&gout).zip(xv) {
                            *d += v * gelu_grad(*z);
                        }
                    });
                }
                Op::Tanh(x) => {
                    let yv = &self.vals[off..off + len];
                    send(*x, &mut |gx| {
                        for ((d, v), y) in gx.iter_mut().zip(&gout).zip(yv) {
                            *d += v * (1.0 - y * y);
                        }
                    });
                }
                Op::Scale(x, f) => {
                    send(*x, &mut |gx| gx.iter_mut().zip(&gout).for_each(|(d, v)| *d += f * v));
                }
                Op::LstmCell { gates, cell } => {
                    let h = len / 2;
                    let z = self.value(*gates);
                    let c = self.value(*cell);
                    let out = &self.vals[off..off + len];
                    let mut dz = vec![0.0; 4 * h];
                    let mut dc = vec![0.0; h];
                    for k in 0..h {
                        let i = sigmoid(z[k]);
                        let f = sigmoid(z[h + k]);
                        let gg = z[2 * h + k].tanh();
                        let o = sigmoid(z[3 * h + k]);
                        let tc = out[h + k].tanh();
                        let gh = gout[k];
                        let dcn = gout[h + k] + gh * o * (1.0 - tc * tc);
                        dz[k] = dcn * gg * i * (1.0 - i);
                        dz[h + k] = dcn * c[k] * f * (1.0 - f);
                        dz[2 * h + k] = dcn * i * (1.0 - gg * gg);
                        dz[3 * h + k] = gh * tc * o * (1.0 - o);
                        dc[k] = dcn * f;
                    }
                    send(*gates, &mut |gx| gx.iter_mut().zip(&dz).for_each(|(d, v)| *d += v));
                    send(*cell, &mut |gx| gx.iter_mut().zip(&dc).for_each(|(d, v)| *d += v));
                }
                Op::SoftmaxXent { x, coef } => {
                    let n = self.dim(*x);
                    let coef = &self.consts[*coef as usize..*coef as usize + n];
                    let p = softmax(self.value(*x));
                    // d/dx_m of -ln p_j is p_m - [m == j]; clamped terms are flat
                    let active: Vec<f64> =
                        coef.iter().zip(&p).map(|(c, pj)| if *pj < LOG_EPS { 0.0 } else { *c }).collect();
                    let total: f64 = active.iter().sum();
                    let go = gout[0];
                    send(*x, &mut |gx| {
                        for m in 0..n {
                            gx[m] += go * (total * p[m] - active[m]);
                        }
                    });
                }
                Op::SigmoidBce { x, labels } => {
                    let n = self.dim(*x);
                    let ys = &self.consts[*labels as usize..*labels as usize + n];
                    let xv = self.value(*x);
                    let go = gout[0];
                    send(*x, &mut |gx| {
                        for k in 0..n {
                            let p = sigmoid(xv[k]);
                            if (LOG_EPS..=1.0 - LOG_EPS).contains(&p) {
                                gx[k] += go * (p - ys[k]);
                            }
                        }
                    });
                }
            }
        }
    }
}
