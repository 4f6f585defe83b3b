//! Small dense-network core: ReLU MLP trunks with a linear, sigmoid or dueling head,
//! reverse-mode gradients, Adam, and target-network updates.
//!
//! Parameters live in one flat `Vec<f64>`; each layer owns a weight block
//! (`fan_out x fan_in`, row-major) followed by its bias. Gradients use the same
//! layout, which keeps Adam, soft updates and checkpoints trivial.

mod checkpoint;

pub use checkpoint::{Checkpoint, NamedArray, CHECKPOINT_VERSION};

use std::hash::{Hash, Hasher};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Stack equally sized rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Dimension {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }
}

/// `c = a * b^T` where `a` is `m x k` row-major and `w` is `n x k` row-major.
fn matmul_abt(a: &[f64], w: &[f64], m: usize, k: usize, n: usize, c: &mut [f64]) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(w.len(), n * k);
    debug_assert_eq!(c.len(), m * n);
    // SAFETY: slice lengths checked above; strides describe the same buffers.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            k as isize,
            1,
            w.as_ptr(),
            1,
            k as isize,
            0.0,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// `c = a^T * b` where `a` is `m x n` and `b` is `m x k`; `c` is `n x k`.
fn matmul_atb(a: &[f64], b: &[f64], m: usize, n: usize, k: usize, c: &mut [f64]) {
    debug_assert_eq!(a.len(), m * n);
    debug_assert_eq!(b.len(), m * k);
    debug_assert_eq!(c.len(), n * k);
    // SAFETY: as above.
    unsafe {
        matrixmultiply::dgemm(
            n,
            m,
            k,
            1.0,
            a.as_ptr(),
            1,
            n as isize,
            b.as_ptr(),
            k as isize,
            1,
            0.0,
            c.as_mut_ptr(),
            k as isize,
            1,
        );
    }
}

/// `c += a * b` where `a` is `m x n` and `b` is `n x k`.
fn matmul_ab_acc(a: &[f64], b: &[f64], m: usize, n: usize, k: usize, c: &mut [f64], beta: f64) {
    debug_assert_eq!(a.len(), m * n);
    debug_assert_eq!(b.len(), n * k);
    debug_assert_eq!(c.len(), m * k);
    // SAFETY: as above.
    unsafe {
        matrixmultiply::dgemm(
            m,
            n,
            k,
            1.0,
            a.as_ptr(),
            n as isize,
            1,
            b.as_ptr(),
            k as isize,
            1,
            beta,
            c.as_mut_ptr(),
            k as isize,
            1,
        );
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Head {
    Linear { outputs: usize },
    /// Each output squashed into (0, 1).
    Sigmoid { outputs: usize },
    /// One-unit value stream plus an advantage stream, combined into Q-values.
    Dueling { actions: usize },
}

impl Head {
    pub fn outputs(&self) -> usize {
        match *self {
            Head::Linear { outputs } | Head::Sigmoid { outputs } => outputs,
            Head::Dueling { actions } => actions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub inputs: usize,
    pub hidden: Vec<usize>,
    pub head: Head,
}

impl Architecture {
    /// `depth` hidden layers of `width` ReLU units.
    pub fn mlp(inputs: usize, depth: usize, width: usize, head: Head) -> Self {
        Self {
            inputs,
            hidden: vec![width; depth],
            head,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Layer {
    fan_in: usize,
    fan_out: usize,
    w: usize,
    b: usize,
}

impl Layer {
    fn weights<'a>(&self, p: &'a [f64]) -> &'a [f64] {
        &p[self.w..self.w + self.fan_in * self.fan_out]
    }

    fn bias<'a>(&self, p: &'a [f64]) -> &'a [f64] {
        &p[self.b..self.b + self.fan_out]
    }

    /// `out = input * W^T + b`
    fn apply(&self, params: &[f64], input: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(input.rows, self.fan_out);
        matmul_abt(
            &input.data,
            self.weights(params),
            input.rows,
            self.fan_in,
            self.fan_out,
            &mut out.data,
        );
        let bias = self.bias(params);
        for r in 0..out.rows {
            for (o, b) in out.row_mut(r).iter_mut().zip(bias) {
                *o += b;
            }
        }
        out
    }

    /// Accumulate parameter gradients into `grads` and return the gradient at the
    /// layer input.
    fn backprop(&self, params: &[f64], input: &Matrix, dz: &Matrix, grads: &mut [f64]) -> Matrix {
        let b = dz.rows;
        matmul_atb(
            &dz.data,
            &input.data,
            b,
            self.fan_out,
            self.fan_in,
            &mut grads[self.w..self.w + self.fan_in * self.fan_out],
        );
        let gb = &mut grads[self.b..self.b + self.fan_out];
        gb.iter_mut().for_each(|g| *g = 0.0);
        for r in 0..b {
            for (g, d) in gb.iter_mut().zip(dz.row(r)) {
                *g += d;
            }
        }
        let mut dx = Matrix::zeros(b, self.fan_in);
        matmul_ab_acc(
            &dz.data,
            self.weights(params),
            b,
            self.fan_out,
            self.fan_in,
            &mut dx.data,
            0.0,
        );
        dx
    }
}

#[derive(Debug, Clone)]
struct Cache {
    /// `activations[0]` is the input, `activations[l + 1]` the ReLU output of
    /// hidden layer `l`.
    activations: Vec<Matrix>,
    /// Network output (sigmoid head needs it for the derivative).
    output: Matrix,
}

/// Parameter gradients plus the gradient with respect to the network input.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub params: Vec<f64>,
    pub input: Matrix,
}

#[derive(Debug, Clone)]
pub struct DenseNet {
    arch: Architecture,
    params: Vec<f64>,
    hidden: Vec<Layer>,
    /// One layer for linear/sigmoid heads; value then advantage for dueling.
    head: Vec<Layer>,
    cache: Option<Cache>,
}

impl PartialEq for DenseNet {
    fn eq(&self, other: &Self) -> bool {
        self.arch == other.arch && self.params == other.params
    }
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// `Q_i = V + A_i - mean(A)`.
pub fn dueling_combine(value: f64, advantages: &[f64]) -> Vec<f64> {
    let mean = advantages.iter().sum::<f64>() / advantages.len() as f64;
    advantages.iter().map(|a| value + (a - mean)).collect()
}

impl DenseNet {
    /// All parameters zero.
    pub fn zeros(arch: Architecture) -> Self {
        let mut offset = 0;
        let mut layer = |fan_in, fan_out| {
            let l = Layer {
                fan_in,
                fan_out,
                w: offset,
                b: offset + fan_in * fan_out,
            };
            offset += fan_in * fan_out + fan_out;
            l
        };
        let mut hidden = Vec::with_capacity(arch.hidden.len());
        let mut width = arch.inputs;
        for &h in &arch.hidden {
            hidden.push(layer(width, h));
            width = h;
        }
        let head = match arch.head {
            Head::Linear { outputs } | Head::Sigmoid { outputs } => vec![layer(width, outputs)],
            Head::Dueling { actions } => vec![layer(width, 1), layer(width, actions)],
        };
        Self {
            params: vec![0.0; offset],
            arch,
            hidden,
            head,
            cache: None,
        }
    }

    /// Weights and biases uniform in `±1/sqrt(fan_in)`.
    pub fn new<R: Rng + ?Sized>(arch: Architecture, rng: &mut R) -> Self {
        let mut net = Self::zeros(arch);
        let layers: Vec<Layer> = net.hidden.iter().chain(&net.head).copied().collect();
        for l in layers {
            let bound = 1.0 / (l.fan_in as f64).sqrt();
            for p in &mut net.params[l.w..l.b + l.fan_out] {
                *p = rng.random_range(-bound..=bound);
            }
        }
        net
    }

    pub fn architecture(&self) -> &Architecture {
        &self.arch
    }

    pub fn inputs(&self) -> usize {
        self.arch.inputs
    }

    pub fn outputs(&self) -> usize {
        self.arch.head.outputs()
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Hash of the exact parameter bits; changes whenever any parameter changes.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for p in &self.params {
            p.to_bits().hash(&mut h);
        }
        h.finish()
    }

    fn run(&self, input: &Matrix, keep: bool) -> Result<(Matrix, Vec<Matrix>)> {
        if input.cols != self.arch.inputs {
            return Err(Error::Dimension {
                expected: self.arch.inputs,
                got: input.cols,
            });
        }
        let mut activations = Vec::new();
        let mut h = input.clone();
        for l in &self.hidden {
            let mut z = l.apply(&self.params, &h);
            z.data.iter_mut().for_each(|v| *v = v.max(0.0));
            if keep {
                activations.push(std::mem::replace(&mut h, z));
            } else {
                h = z;
            }
        }
        let out = match self.arch.head {
            Head::Linear { .. } => self.head[0].apply(&self.params, &h),
            Head::Sigmoid { .. } => {
                let mut z = self.head[0].apply(&self.params, &h);
                z.data.iter_mut().for_each(|v| *v = sigmoid(*v));
                z
            }
            Head::Dueling { actions } => {
                let v = self.head[0].apply(&self.params, &h);
                let a = self.head[1].apply(&self.params, &h);
                let mut q = Matrix::zeros(h.rows, actions);
                for r in 0..h.rows {
                    q.row_mut(r)
                        .copy_from_slice(&dueling_combine(v.data[r], a.row(r)));
                }
                q
            }
        };
        if keep {
            activations.push(h);
        }
        Ok((out, activations))
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        let m = Matrix::from_vec(1, input.len(), input.to_vec())?;
        Ok(self.forward_batch(&m)?.data)
    }

    pub fn forward_batch(&self, input: &Matrix) -> Result<Matrix> {
        Ok(self.run(input, false)?.0)
    }

    /// Forward pass that keeps activations for a following [`backward`](Self::backward).
    pub fn forward_cached(&mut self, input: &Matrix) -> Result<Matrix> {
        let (out, activations) = self.run(input, true)?;
        self.cache = Some(Cache {
            activations,
            output: out.clone(),
        });
        Ok(out)
    }

    /// Gradients of a loss given `dL/d(output)` for the cached batch. Consumes the
    /// cache.
    pub fn backward(&mut self, grad_out: &Matrix) -> Result<Gradients> {
        let cache = self
            .cache
            .take()
            .ok_or_else(|| Error::usage("backward called without a cached forward pass"))?;
        let batch = cache.output.rows;
        if grad_out.rows != batch || grad_out.cols != self.outputs() {
            return Err(Error::Dimension {
                expected: batch * self.outputs(),
                got: grad_out.rows * grad_out.cols,
            });
        }
        let mut grads = vec![0.0; self.params.len()];
        let top = cache.activations.last().expect("input is always cached");
        let mut dh = match self.arch.head {
            Head::Linear { .. } => self.head[0].backprop(&self.params, top, grad_out, &mut grads),
            Head::Sigmoid { .. } => {
                let mut dz = grad_out.clone();
                for (d, s) in dz.data.iter_mut().zip(&cache.output.data) {
                    *d *= s * (1.0 - s);
                }
                self.head[0].backprop(&self.params, top, &dz, &mut grads)
            }
            Head::Dueling { actions } => {
                let mut dv = Matrix::zeros(batch, 1);
                let mut da = Matrix::zeros(batch, actions);
                for r in 0..batch {
                    let g = grad_out.row(r);
                    let total: f64 = g.iter().sum();
                    dv.data[r] = total;
                    let mean = total / actions as f64;
                    for (d, gi) in da.row_mut(r).iter_mut().zip(g) {
                        *d = gi - mean;
                    }
                }
                let mut dh = self.head[0].backprop(&self.params, top, &dv, &mut grads);
                let dha = self.head[1].backprop(&self.params, top, &da, &mut grads);
                dh.data.iter_mut().zip(&dha.data).for_each(|(a, b)| *a += b);
                dh
            }
        };
        for (l, layer) in self.hidden.iter().enumerate().rev() {
            let out = &cache.activations[l + 1];
            for (d, h) in dh.data.iter_mut().zip(&out.data) {
                if *h <= 0.0 {
                    *d = 0.0;
                }
            }
            dh = layer.backprop(&self.params, &cache.activations[l], &dh, &mut grads);
        }
        Ok(Gradients {
            params: grads,
            input: dh,
        })
    }

    fn check_same_arch(&self, other: &DenseNet) -> Result<()> {
        if self.arch != other.arch {
            return Err(Error::usage("network architectures differ"));
        }
        Ok(())
    }

    /// `self <- tau * source + (1 - tau) * self`.
    pub fn soft_update(&mut self, source: &DenseNet, tau: f64) -> Result<()> {
        self.check_same_arch(source)?;
        if tau == 1.0 {
            self.params.copy_from_slice(&source.params);
            return Ok(());
        }
        for (t, s) in self.params.iter_mut().zip(&source.params) {
            *t = tau * s + (1.0 - tau) * *t;
        }
        Ok(())
    }

    pub fn copy_from(&mut self, source: &DenseNet) -> Result<()> {
        self.soft_update(source, 1.0)
    }

    /// `(name, shape, values)` for every weight and bias block.
    pub fn named_arrays(&self) -> Vec<(String, Vec<usize>, &[f64])> {
        let mut out = Vec::new();
        let mut push = |name: String, l: &Layer| {
            out.push((
                format!("{name}.weight"),
                vec![l.fan_out, l.fan_in],
                l.weights(&self.params),
            ));
            out.push((format!("{name}.bias"), vec![l.fan_out], l.bias(&self.params)));
        };
        for (i, l) in self.hidden.iter().enumerate() {
            push(format!("hidden{i}"), l);
        }
        match self.arch.head {
            Head::Linear { .. } | Head::Sigmoid { .. } => push("head".into(), &self.head[0]),
            Head::Dueling { .. } => {
                push("value".into(), &self.head[0]);
                push("advantage".into(), &self.head[1]);
            }
        }
        out
    }

    pub fn export(&self, prefix: &str, ckpt: &mut Checkpoint) {
        for (name, shape, values) in self.named_arrays() {
            ckpt.arrays.push(NamedArray {
                name: format!("{prefix}.{name}"),
                shape,
                values: values.to_vec(),
            });
        }
    }

    /// Load parameters written by [`export`](Self::export) under the same prefix.
    pub fn import(&mut self, prefix: &str, ckpt: &Checkpoint) -> Result<()> {
        let mut loaded = self.params.clone();
        let layers: Vec<Layer> = self.hidden.iter().chain(&self.head).copied().collect();
        for ((name, shape, _), l) in self.named_arrays().into_iter().step_by(2).zip(layers) {
            let base = name.trim_end_matches(".weight");
            let w = ckpt.get(&format!("{prefix}.{base}.weight"))?;
            let b = ckpt.get(&format!("{prefix}.{base}.bias"))?;
            if w.shape != shape || b.shape != vec![l.fan_out] {
                return Err(Error::Checkpoint(format!(
                    "{prefix}.{base}: shape {:?}/{:?} does not match network {:?}",
                    w.shape, b.shape, shape
                )));
            }
            loaded[l.w..l.b].copy_from_slice(&w.values);
            loaded[l.b..l.b + l.fan_out].copy_from_slice(&b.values);
        }
        self.params = loaded;
        self.cache = None;
        Ok(())
    }
}

/// Adam moments for one network.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamState {
    pub fn new(param_count: usize, learning_rate: f64) -> Self {
        Self {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
        }
    }

    pub fn for_net(net: &DenseNet, learning_rate: f64) -> Self {
        Self::new(net.param_count(), learning_rate)
    }

    pub fn apply(&mut self, net: &mut DenseNet, grads: &[f64]) -> Result<()> {
        if grads.len() != self.m.len() || net.params.len() != self.m.len() {
            return Err(Error::Dimension {
                expected: self.m.len(),
                got: grads.len(),
            });
        }
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        for (((p, g), m), v) in net
            .params
            .iter_mut()
            .zip(grads)
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
        }
        Ok(())
    }
}

/// Backpropagate `grad_out` through the cached forward pass and take one Adam step.
pub fn backward_and_step(net: &mut DenseNet, opt: &mut AdamState, grad_out: &Matrix) -> Result<Gradients> {
    let grads = net.backward(grad_out)?;
    opt.apply(net, &grads.params)?;
    Ok(grads)
}
