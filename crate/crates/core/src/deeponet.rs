//! Branch/trunk operator network with a learnable per-node bias.
//!
//! The branch MLP consumes the m sensor values of a potential and the trunk
//! MLP consumes a single time value; both emit 2l outputs reshaped to l x 2.
//! Prediction at node j is the column-wise inner product of the two reshaped
//! outputs plus bias[j]. The trunk is evaluated per time value; on the fixed
//! sensor grid its outputs are shared across a batch.
//!
//! Training is plain reverse-mode differentiation written out by hand, with
//! decoupled-weight-decay adaptive-moment updates and a log-linear learning
//! rate decay between the initial and infimum rates.

use crate::rng::{uniform, Prng};
use std::io::{Read, Write};
use std::path::Path;
use thiserror::Error;

pub const DEFAULT_HIDDEN_WIDTH: usize = 128;
pub const DEFAULT_HIDDEN_LAYERS: usize = 3;
pub const DEFAULT_BRANCH_WIDTH: usize = 10;
pub const DEFAULT_INIT_LR: f64 = 7.3256e-3;
pub const DEFAULT_INF_LR: f64 = 1.7369e-3;
pub const DEFAULT_UPPER_BOUND: f64 = 300.0;

const CHECKPOINT_MAGIC: [u8; 4] = *b"NHDO";
const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("training diverged at epoch {epoch}: loss = {loss}")]
    DivergenceDetected { epoch: usize, loss: f64 },
    #[error("checkpoint i/o failed: {0}")]
    IoFailure(#[from] std::io::Error),
    #[error("checkpoint format error: {0}")]
    FormatError(String),
}

fn gelu(x: f64) -> f64 {
    const C: f64 = 0.7978845608028654; // sqrt(2/pi)
    0.5 * x * (1.0 + (C * (x + 0.044715 * x * x * x)).tanh())
}

fn gelu_deriv(x: f64) -> f64 {
    const C: f64 = 0.7978845608028654;
    let u = C * (x + 0.044715 * x * x * x);
    let t = u.tanh();
    0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * C * (1.0 + 3.0 * 0.044715 * x * x)
}

/// Fully connected network with GELU hidden activations and a linear output.
#[derive(Debug, Clone)]
pub struct Mlp {
    pub widths: Vec<usize>,
    /// weights[k] is widths[k+1] x widths[k], row-major.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

/// Per-layer pre-activations and activations from a cached forward pass.
struct MlpCache {
    /// pre[k] = W_k a_k + b_k
    pre: Vec<Vec<f64>>,
    /// act[0] is the input; act[k+1] the activation after layer k.
    act: Vec<Vec<f64>>,
}

impl Mlp {
    /// Uniform init in +-sqrt(6 / (fan_in + fan_out)) per layer.
    pub fn new(widths: Vec<usize>, rng: &mut Prng) -> Self {
        assert!(widths.len() >= 2);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for k in 0..widths.len() - 1 {
            let (fan_in, fan_out) = (widths[k], widths[k + 1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            weights.push(
                (0..fan_in * fan_out)
                    .map(|_| uniform(rng, -bound, bound))
                    .collect(),
            );
            biases.push(vec![0.0; fan_out]);
        }
        Self {
            widths,
            weights,
            biases,
        }
    }

    pub fn input_width(&self) -> usize {
        self.widths[0]
    }

    pub fn output_width(&self) -> usize {
        *self.widths.last().unwrap()
    }

    fn forward_cached(&self, input: &[f64]) -> MlpCache {
        debug_assert_eq!(input.len(), self.input_width());
        let n_layers = self.weights.len();
        let mut pre = Vec::with_capacity(n_layers);
        let mut act = Vec::with_capacity(n_layers + 1);
        act.push(input.to_vec());
        for k in 0..n_layers {
            let (n_in, n_out) = (self.widths[k], self.widths[k + 1]);
            let a = &act[k];
            let mut z = self.biases[k].clone();
            for (row, z_r) in z.iter_mut().enumerate() {
                let w_row = &self.weights[k][row * n_in..(row + 1) * n_in];
                *z_r += w_row.iter().zip(a).map(|(w, x)| w * x).sum::<f64>();
            }
            let out = if k + 1 < n_layers {
                z.iter().map(|&x| gelu(x)).collect()
            } else {
                z.clone()
            };
            debug_assert_eq!(out.len(), n_out);
            pre.push(z);
            act.push(out);
        }
        MlpCache { pre, act }
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        self.forward_cached(input).act.pop().unwrap()
    }

    /// Accumulate parameter gradients for one cached pass, given
    /// dL/d(output). Returns dL/d(input).
    fn backward(&self, cache: &MlpCache, d_out: &[f64], grads: &mut MlpGrads) -> Vec<f64> {
        let n_layers = self.weights.len();
        let mut delta = d_out.to_vec();
        for k in (0..n_layers).rev() {
            let n_in = self.widths[k];
            if k + 1 < n_layers {
                for (d, z) in delta.iter_mut().zip(&cache.pre[k]) {
                    *d *= gelu_deriv(*z);
                }
            }
            let a = &cache.act[k];
            for (row, d) in delta.iter().enumerate() {
                grads.biases[k][row] += d;
                let g_row = &mut grads.weights[k][row * n_in..(row + 1) * n_in];
                for (g, x) in g_row.iter_mut().zip(a) {
                    *g += d * x;
                }
            }
            if k > 0 {
                let mut prev = vec![0.0; n_in];
                for (row, d) in delta.iter().enumerate() {
                    let w_row = &self.weights[k][row * n_in..(row + 1) * n_in];
                    for (p, w) in prev.iter_mut().zip(w_row) {
                        *p += d * w;
                    }
                }
                delta = prev;
            }
        }
        delta
    }
}

#[derive(Debug, Clone)]
pub struct MlpGrads {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl MlpGrads {
    fn zeros_like(mlp: &Mlp) -> Self {
        Self {
            weights: mlp.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: mlp.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }
}

/// The operator model: branch + trunk MLPs and an m x 2 bias.
#[derive(Debug, Clone)]
pub struct DeepONetModel {
    pub branch: Mlp,
    pub trunk: Mlp,
    /// Per-node bias, layout `[node * 2 + channel]` with channel 0 = q, 1 = p.
    pub bias: Vec<f64>,
    pub l: usize,
    pub m: usize,
}

#[derive(Debug, Clone)]
pub struct ModelGrads {
    pub branch: MlpGrads,
    pub trunk: MlpGrads,
    pub bias: Vec<f64>,
}

impl ModelGrads {
    fn zeros_like(model: &DeepONetModel) -> Self {
        Self {
            branch: MlpGrads::zeros_like(&model.branch),
            trunk: MlpGrads::zeros_like(&model.trunk),
            bias: vec![0.0; model.bias.len()],
        }
    }
}

impl DeepONetModel {
    pub fn new(m: usize, l: usize, hidden_width: usize, hidden_layers: usize, rng: &mut Prng) -> Self {
        let mut branch_widths = vec![m];
        let mut trunk_widths = vec![1];
        for _ in 0..hidden_layers {
            branch_widths.push(hidden_width);
            trunk_widths.push(hidden_width);
        }
        branch_widths.push(2 * l);
        trunk_widths.push(2 * l);
        Self {
            branch: Mlp::new(branch_widths, rng),
            trunk: Mlp::new(trunk_widths, rng),
            bias: vec![0.0; 2 * m],
            l,
            m,
        }
    }

    /// Reference architecture: width 128, 3 hidden layers, l = 10.
    pub fn standard(m: usize, rng: &mut Prng) -> Self {
        Self::new(
            m,
            DEFAULT_BRANCH_WIDTH,
            DEFAULT_HIDDEN_WIDTH,
            DEFAULT_HIDDEN_LAYERS,
            rng,
        )
    }

    fn trunk_outputs(&self, t_grid: &[f64]) -> Vec<Vec<f64>> {
        t_grid.iter().map(|&t| self.trunk.forward(&[t])).collect()
    }

    /// Predict `(q, p)` at the grid nodes for one potential sample.
    pub fn forward(&self, v: &[f64], t_grid: &[f64]) -> Result<(Vec<f64>, Vec<f64>), ModelError> {
        if v.len() != self.m || t_grid.len() != self.m {
            return Err(ModelError::ShapeMismatch(format!(
                "expected m = {}, got v: {}, t: {}",
                self.m,
                v.len(),
                t_grid.len()
            )));
        }
        let b = self.branch.forward(v);
        let u = self.trunk_outputs(t_grid);
        let mut q = Vec::with_capacity(self.m);
        let mut p = Vec::with_capacity(self.m);
        for (j, uj) in u.iter().enumerate() {
            let mut out = [self.bias[2 * j], self.bias[2 * j + 1]];
            for i in 0..self.l {
                out[0] += b[2 * i] * uj[2 * i];
                out[1] += b[2 * i + 1] * uj[2 * i + 1];
            }
            q.push(out[0]);
            p.push(out[1]);
        }
        Ok((q, p))
    }

    /// Mutable views of every parameter tensor, in checkpoint declaration
    /// order.
    pub fn param_tensors_mut(&mut self) -> Vec<&mut Vec<f64>> {
        let mut out: Vec<&mut Vec<f64>> = Vec::new();
        for w in &mut self.branch.weights {
            out.push(w);
        }
        for b in &mut self.branch.biases {
            out.push(b);
        }
        for w in &mut self.trunk.weights {
            out.push(w);
        }
        for b in &mut self.trunk.biases {
            out.push(b);
        }
        out.push(&mut self.bias);
        out
    }

    fn param_tensors(&self) -> Vec<&Vec<f64>> {
        let mut out: Vec<&Vec<f64>> = Vec::new();
        for w in &self.branch.weights {
            out.push(w);
        }
        for b in &self.branch.biases {
            out.push(b);
        }
        for w in &self.trunk.weights {
            out.push(w);
        }
        for b in &self.trunk.biases {
            out.push(b);
        }
        out.push(&self.bias);
        out
    }
}

fn grad_tensors(grads: &ModelGrads) -> Vec<&Vec<f64>> {
    let mut out: Vec<&Vec<f64>> = Vec::new();
    for w in &grads.branch.weights {
        out.push(w);
    }
    for b in &grads.branch.biases {
        out.push(b);
    }
    for w in &grads.trunk.weights {
        out.push(w);
    }
    for b in &grads.trunk.biases {
        out.push(b);
    }
    out.push(&grads.bias);
    out
}

/// One training sample: sensor values plus label trajectories, all length m.
#[derive(Debug, Clone)]
pub struct TrainSample<'a> {
    pub v: &'a [f64],
    pub q: &'a [f64],
    pub p: &'a [f64],
}

/// Mean over the batch of the per-sample squared error averaged over the 2m
/// output entries. Matches `metrics::sample_loss` l_tot on a single sample.
pub fn batch_loss(
    model: &DeepONetModel,
    batch: &[TrainSample<'_>],
    t_grid: &[f64],
) -> Result<f64, ModelError> {
    let mut total = 0.0;
    for s in batch {
        let (q, p) = model.forward(s.v, t_grid)?;
        let mut sq = 0.0;
        for j in 0..model.m {
            let eq = q[j] - s.q[j];
            let ep = p[j] - s.p[j];
            sq += eq * eq + ep * ep;
        }
        total += sq / (2.0 * model.m as f64);
    }
    Ok(total / batch.len() as f64)
}

/// Loss and exact parameter gradients for one batch.
pub fn backward(
    model: &DeepONetModel,
    batch: &[TrainSample<'_>],
    t_grid: &[f64],
) -> Result<(f64, ModelGrads), ModelError> {
    if batch.is_empty() {
        return Err(ModelError::ShapeMismatch("empty batch".into()));
    }
    let m = model.m;
    let l = model.l;
    let trunk_caches: Vec<MlpCache> = t_grid
        .iter()
        .map(|&t| model.trunk.forward_cached(&[t]))
        .collect();
    let mut grads = ModelGrads::zeros_like(model);
    // shared trunk outputs accumulate their gradient over the whole batch
    let mut d_trunk_out = vec![vec![0.0; 2 * l]; m];
    let scale = 1.0 / (2.0 * m as f64 * batch.len() as f64);
    let mut loss = 0.0;

    for s in batch {
        if s.v.len() != m || s.q.len() != m || s.p.len() != m {
            return Err(ModelError::ShapeMismatch(format!(
                "sample lengths ({}, {}, {}) != m = {m}",
                s.v.len(),
                s.q.len(),
                s.p.len()
            )));
        }
        let branch_cache = model.branch.forward_cached(s.v);
        let b = branch_cache.act.last().unwrap();
        let mut d_branch_out = vec![0.0; 2 * l];
        for (j, cache) in trunk_caches.iter().enumerate() {
            let uj = cache.act.last().unwrap();
            for c in 0..2 {
                let label = if c == 0 { s.q[j] } else { s.p[j] };
                let mut pred = model.bias[2 * j + c];
                for i in 0..l {
                    pred += b[2 * i + c] * uj[2 * i + c];
                }
                let err = pred - label;
                loss += err * err * scale;
                let d = 2.0 * err * scale;
                grads.bias[2 * j + c] += d;
                for i in 0..l {
                    d_branch_out[2 * i + c] += d * uj[2 * i + c];
                    d_trunk_out[j][2 * i + c] += d * b[2 * i + c];
                }
            }
        }
        model
            .branch
            .backward(&branch_cache, &d_branch_out, &mut grads.branch);
    }
    for (cache, d_out) in trunk_caches.iter().zip(&d_trunk_out) {
        model.trunk.backward(cache, d_out, &mut grads.trunk);
    }
    Ok((loss, grads))
}

/// Log-linear learning rate schedule between `init_lr` and `inf_lr`.
#[derive(Debug, Clone, Copy)]
pub struct SchedulerConfig {
    pub init_lr: f64,
    pub inf_lr: f64,
    pub upper_bound: f64,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self {
            init_lr: DEFAULT_INIT_LR,
            inf_lr: DEFAULT_INF_LR,
            upper_bound: DEFAULT_UPPER_BOUND,
        }
    }
}

/// Learning rate at epoch `n`:
/// `exp(log eta0 - (log eta0 - log eta_inf) * n / U)`.
pub fn lr_at(cfg: &SchedulerConfig, epoch: usize) -> f64 {
    let n = epoch as f64;
    (cfg.init_lr.ln() - (cfg.init_lr.ln() - cfg.inf_lr.ln()) * n / cfg.upper_bound).exp()
}

/// Infimum learning rate adjusted for a longer run:
/// `log eta~ = 1/2 [log eta0 + log eta_inf + (U/N1)(log eta_end - log eta0)]`.
pub fn adjusted_inf_lr(init_lr: f64, inf_lr: f64, upper_bound: f64, n1: f64, lr_end: f64) -> f64 {
    (0.5 * (init_lr.ln() + inf_lr.ln() + upper_bound / n1 * (lr_end.ln() - init_lr.ln()))).exp()
}

#[derive(Debug, Clone, Copy)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub betas: (f64, f64),
    pub weight_decay: f64,
    pub epochs: usize,
    pub scheduler: SchedulerConfig,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 100,
            betas: (0.85, 0.98),
            weight_decay: 1e-2,
            epochs: 250,
            scheduler: SchedulerConfig::default(),
            seed: 89,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub lr: f64,
}

/// Adaptive-moment optimizer state with decoupled weight decay.
struct AdamW {
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    step: u64,
}

impl AdamW {
    fn new(model: &DeepONetModel) -> Self {
        let shapes: Vec<usize> = {
            let mut model = model.clone();
            model.param_tensors_mut().iter().map(|t| t.len()).collect()
        };
        Self {
            m: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            v: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            step: 0,
        }
    }

    fn update(&mut self, model: &mut DeepONetModel, grads: &ModelGrads, lr: f64, cfg: &TrainConfig) {
        const EPS: f64 = 1e-8;
        self.step += 1;
        let (b1, b2) = cfg.betas;
        let bc1 = 1.0 - b1.powi(self.step as i32);
        let bc2 = 1.0 - b2.powi(self.step as i32);
        let g_tensors: Vec<Vec<f64>> = grad_tensors(grads).into_iter().cloned().collect();
        for (t_idx, tensor) in model.param_tensors_mut().into_iter().enumerate() {
            let g = &g_tensors[t_idx];
            let m = &mut self.m[t_idx];
            let v = &mut self.v[t_idx];
            for i in 0..tensor.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                tensor[i] -= lr * (m_hat / (v_hat.sqrt() + EPS) + cfg.weight_decay * tensor[i]);
            }
        }
    }
}

fn full_loss(
    model: &DeepONetModel,
    samples: &[TrainSample<'_>],
    t_grid: &[f64],
    batch_size: usize,
) -> Result<f64, ModelError> {
    let mut total = 0.0;
    let mut count = 0.0;
    for chunk in samples.chunks(batch_size) {
        total += batch_loss(model, chunk, t_grid)? * chunk.len() as f64;
        count += chunk.len() as f64;
    }
    Ok(total / count)
}

/// Train in place, recording per-epoch train/validation loss and learning
/// rate. Deterministic for a fixed config.
pub fn train(
    model: &mut DeepONetModel,
    train_set: &[TrainSample<'_>],
    val_set: &[TrainSample<'_>],
    t_grid: &[f64],
    cfg: &TrainConfig,
) -> Result<Vec<EpochRecord>, ModelError> {
    use rand::seq::SliceRandom;
    let mut rng = crate::rng::root_rng(cfg.seed);
    let mut opt = AdamW::new(model);
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    for epoch in 0..cfg.epochs {
        let lr = lr_at(&cfg.scheduler, epoch);
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut seen = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<TrainSample<'_>> = chunk.iter().map(|&i| train_set[i].clone()).collect();
            let (loss, grads) = backward(model, &batch, t_grid)?;
            if !loss.is_finite() {
                return Err(ModelError::DivergenceDetected { epoch, loss });
            }
            opt.update(model, &grads, lr, cfg);
            epoch_loss += loss * batch.len() as f64;
            seen += batch.len() as f64;
        }
        let train_loss = epoch_loss / seen;
        let val_loss = if val_set.is_empty() {
            f64::NAN
        } else {
            full_loss(model, val_set, t_grid, cfg.batch_size)?
        };
        history.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
            lr,
        });
    }
    Ok(history)
}

fn write_u64(w: &mut impl Write, x: u64) -> std::io::Result<()> {
    w.write_all(&x.to_le_bytes())
}

fn read_u64(r: &mut impl Read) -> std::io::Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

/// Write the checkpoint: magic "NHDO", version, architecture header, then
/// every parameter tensor as little-endian f64 in declaration order.
pub fn save_checkpoint(model: &DeepONetModel, path: &Path) -> Result<(), ModelError> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    w.write_all(&CHECKPOINT_MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    write_u64(&mut w, model.m as u64)?;
    write_u64(&mut w, model.l as u64)?;
    for widths in [&model.branch.widths, &model.trunk.widths] {
        write_u64(&mut w, widths.len() as u64)?;
        for &width in widths {
            write_u64(&mut w, width as u64)?;
        }
    }
    for tensor in model.param_tensors() {
        for &x in tensor {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<DeepONetModel, ModelError> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != CHECKPOINT_MAGIC {
        return Err(ModelError::FormatError(format!(
            "bad magic {magic:?}, expected {CHECKPOINT_MAGIC:?}"
        )));
    }
    let mut vbuf = [0u8; 4];
    r.read_exact(&mut vbuf)?;
    let version = u32::from_le_bytes(vbuf);
    if version != CHECKPOINT_VERSION {
        return Err(ModelError::FormatError(format!(
            "unsupported checkpoint version {version}"
        )));
    }
    let m = read_u64(&mut r)? as usize;
    let l = read_u64(&mut r)? as usize;
    if m == 0 || l == 0 || m > 1 << 20 || l > 1 << 20 {
        return Err(ModelError::FormatError(format!(
            "implausible header: m = {m}, l = {l}"
        )));
    }
    let read_widths = |r: &mut std::io::BufReader<std::fs::File>| -> Result<Vec<usize>, ModelError> {
        let n = read_u64(r)? as usize;
        if n < 2 || n > 64 {
            return Err(ModelError::FormatError(format!("bad layer count {n}")));
        }
        let mut widths = Vec::with_capacity(n);
        for _ in 0..n {
            let w = read_u64(r)? as usize;
            if w == 0 || w > 1 << 20 {
                return Err(ModelError::FormatError(format!("bad layer width {w}")));
            }
            widths.push(w);
        }
        Ok(widths)
    };
    let branch_widths = read_widths(&mut r)?;
    let trunk_widths = read_widths(&mut r)?;
    if branch_widths[0] != m
        || trunk_widths[0] != 1
        || *branch_widths.last().unwrap() != 2 * l
        || *trunk_widths.last().unwrap() != 2 * l
    {
        return Err(ModelError::FormatError(
            "architecture header inconsistent with m and l".into(),
        ));
    }
    let build = |widths: &[usize]| -> Mlp {
        Mlp {
            widths: widths.to_vec(),
            weights: (0..widths.len() - 1)
                .map(|k| vec![0.0; widths[k] * widths[k + 1]])
                .collect(),
            biases: (0..widths.len() - 1).map(|k| vec![0.0; widths[k + 1]]).collect(),
        }
    };
    let mut model = DeepONetModel {
        branch: build(&branch_widths),
        trunk: build(&trunk_widths),
        bias: vec![0.0; 2 * m],
        l,
        m,
    };
    for tensor in model.param_tensors_mut() {
        for x in tensor.iter_mut() {
            let mut buf = [0u8; 8];
            r.read_exact(&mut buf).map_err(|e| {
                ModelError::FormatError(format!("truncated parameter payload: {e}"))
            })?;
            *x = f64::from_le_bytes(buf);
        }
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(ModelError::FormatError("trailing bytes after parameters".into()));
    }
    Ok(model)
}
