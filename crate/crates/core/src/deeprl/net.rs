//! Dense tanh value network with hand-written backpropagation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encoder::{EncodedInput, BORDER_LEN, STATE_LEN, TILES};
use crate::error::{PackError, Result};

/// Channel and layer widths. The second layer consumes the first layer's
/// output concatenated with the border channel and the one-hot field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetShape {
    pub state: usize,
    pub border: usize,
    pub fields: usize,
    /// Widths of the four tanh layers.
    pub hidden: [usize; 4],
}

impl NetShape {
    pub const STANDARD: NetShape = NetShape { state: STATE_LEN, border: BORDER_LEN, fields: TILES, hidden: [144, 144, 24, 4] };

    /// Layer sizes as `(inputs, outputs)`.
    pub const fn layers(&self) -> [(usize, usize); 5] {
        let h = self.hidden;
        [(self.state, h[0]), (h[0] + self.border + self.fields, h[1]), (h[1], h[2]), (h[2], h[3]), (h[3], 1)]
    }

    fn check(&self, input: &EncodedInput) -> Result<()> {
        if input.x.len() != self.state || input.y.len() != self.border || input.field >= self.fields {
            return Err(PackError::InvalidArgument(format!(
                "input shape ({}, {}, field {}) does not match network ({}, {}, {} fields)",
                input.x.len(),
                input.y.len(),
                input.field,
                self.state,
                self.border,
                self.fields
            )));
        }
        Ok(())
    }
}

impl Default for NetShape {
    fn default() -> Self {
        NetShape::STANDARD
    }
}

/// Layer sizes of the standard network.
pub const ARCHITECTURE: [(usize, usize); 5] = NetShape::STANDARD.layers();

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    /// Output count.
    pub rows: usize,
    /// Input count.
    pub cols: usize,
    /// Row-major `rows × cols`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    fn zeros(cols: usize, rows: usize) -> Self {
        Self { rows, cols, weights: vec![0.0; rows * cols], bias: vec![0.0; rows] }
    }

    fn uniform<R: Rng>(cols: usize, rows: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (cols as f64).sqrt();
        let weights = (0..rows * cols).map(|_| rng.gen_range(-bound..bound)).collect();
        Self { rows, cols, weights, bias: vec![0.0; rows] }
    }

    fn affine(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for (r, b) in self.bias.iter().enumerate() {
            let row = &self.weights[r * self.cols..(r + 1) * self.cols];
            out.push(b + row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>());
        }
    }

    fn scale_into(&mut self, other: &Dense, k: f64) {
        self.weights.iter_mut().zip(&other.weights).for_each(|(a, b)| *a += k * b);
        self.bias.iter_mut().zip(&other.bias).for_each(|(a, b)| *a += k * b);
    }
}

/// Gradients or momentum buffers, shaped like the network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetBuffers {
    pub layers: Vec<Dense>,
}

impl NetBuffers {
    fn zeros(shape: &NetShape) -> Self {
        Self { layers: shape.layers().iter().map(|&(i, o)| Dense::zeros(i, o)).collect() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueNet {
    pub layers: Vec<Dense>,
    shape: NetShape,
    velocity: NetBuffers,
}

/// Activations of one forward pass, kept for backpropagation.
struct Trace {
    /// Input of each layer.
    inputs: Vec<Vec<f64>>,
    /// tanh outputs of the hidden layers.
    hidden: Vec<Vec<f64>>,
    q: f64,
}

fn tanh_all(v: &mut [f64]) {
    v.iter_mut().for_each(|x| *x = x.tanh());
}

impl ValueNet {
    pub fn zeros() -> Self {
        let shape = NetShape::STANDARD;
        Self { layers: NetBuffers::zeros(&shape).layers, shape, velocity: NetBuffers::zeros(&shape) }
    }

    /// Standard network with uniform weights in `±1/sqrt(fan_in)` and zero
    /// biases.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        Self::random_with_shape(NetShape::STANDARD, rng)
    }

    pub fn random_with_shape<R: Rng>(shape: NetShape, rng: &mut R) -> Self {
        let layers = shape.layers().iter().map(|&(i, o)| Dense::uniform(i, o, rng)).collect();
        Self { layers, shape, velocity: NetBuffers::zeros(&shape) }
    }

    pub fn shape(&self) -> NetShape {
        self.shape
    }

    /// Builds a standard network from stored layers, checking the
    /// architecture.
    pub fn from_layers(layers: Vec<Dense>) -> Result<Self> {
        let shape = NetShape::STANDARD;
        let arch = shape.layers();
        if layers.len() != arch.len() {
            return Err(PackError::CorruptModel(format!("expected {} layers, found {}", arch.len(), layers.len())));
        }
        for (k, (layer, &(i, o))) in layers.iter().zip(&arch).enumerate() {
            if layer.cols != i || layer.rows != o || layer.weights.len() != i * o || layer.bias.len() != o {
                return Err(PackError::CorruptModel(format!("layer {k} has shape {}x{}, expected {o}x{i}", layer.rows, layer.cols)));
            }
            if layer.weights.iter().chain(&layer.bias).any(|w| !w.is_finite()) {
                return Err(PackError::CorruptModel(format!("layer {k} has non-finite weights")));
            }
        }
        Ok(Self { layers, shape, velocity: NetBuffers::zeros(&shape) })
    }

    pub fn velocity(&self) -> &NetBuffers {
        &self.velocity
    }

    /// Number of trainable parameters.
    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    fn second_input(&self, hidden: &[f64], input: &EncodedInput) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.layers[1].cols);
        v.extend_from_slice(hidden);
        v.extend(input.y.iter().map(|&y| y as f64));
        v.extend((0..self.shape.fields).map(|t| if t == input.field { 1.0 } else { 0.0 }));
        v
    }

    fn trace(&self, input: &EncodedInput) -> Trace {
        let x: Vec<f64> = input.x.iter().map(|&v| v as f64).collect();
        let mut h0 = Vec::new();
        self.layers[0].affine(&x, &mut h0);
        tanh_all(&mut h0);
        self.tail_trace(x, h0, input)
    }

    fn tail_trace(&self, x: Vec<f64>, h0: Vec<f64>, input: &EncodedInput) -> Trace {
        let in1 = self.second_input(&h0, input);
        let mut inputs = vec![x, in1];
        let mut hidden = vec![h0];
        for k in 1..4 {
            let mut h = Vec::new();
            self.layers[k].affine(&inputs[k], &mut h);
            tanh_all(&mut h);
            hidden.push(h.clone());
            inputs.push(h);
        }
        let mut out = Vec::new();
        self.layers[4].affine(&inputs[4], &mut out);
        Trace { inputs, hidden, q: out[0] }
    }

    /// Scalar q-value of one encoded candidate.
    pub fn forward(&self, input: &EncodedInput) -> Result<f64> {
        self.shape.check(input)?;
        Ok(self.trace(input).q)
    }

    /// Forward from a precomputed first-layer pre-activation.
    pub(crate) fn forward_from_pre(&self, mut pre0: Vec<f64>, input_y: &[f32], field: usize) -> f64 {
        tanh_all(&mut pre0);
        // second layer: dense over hidden, sparse over border, one column for the field
        let l1 = &self.layers[1];
        let h0 = pre0.len();
        let mut h1 = Vec::with_capacity(l1.rows);
        let y_nz: Vec<(usize, f64)> = input_y
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(k, &v)| (h0 + k, v as f64))
            .collect();
        for r in 0..l1.rows {
            let row = &l1.weights[r * l1.cols..(r + 1) * l1.cols];
            let mut s = l1.bias[r] + row[..h0].iter().zip(&pre0).map(|(w, x)| w * x).sum::<f64>();
            s += y_nz.iter().map(|&(k, v)| row[k] * v).sum::<f64>();
            s += row[h0 + self.shape.border + field];
            h1.push(s.tanh());
        }
        let mut cur = h1;
        let mut next = Vec::new();
        for k in 2..4 {
            self.layers[k].affine(&cur, &mut next);
            tanh_all(&mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        self.layers[4].affine(&cur, &mut next);
        next[0]
    }

    fn backprop(&self, trace: &Trace, dq: f64, grads: &mut NetBuffers) {
        let mut delta = vec![dq];
        for k in (0..5).rev() {
            let layer = &self.layers[k];
            let input = &trace.inputs[k];
            let g = &mut grads.layers[k];
            for (r, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                g.bias[r] += d;
                let row = &mut g.weights[r * layer.cols..(r + 1) * layer.cols];
                row.iter_mut().zip(input).for_each(|(gw, x)| *gw += d * x);
            }
            if k == 0 {
                break;
            }
            // gradient w.r.t. this layer's input, restricted to the part that
            // came from the previous layer
            let prev = &trace.hidden[k - 1];
            let mut next_delta = vec![0.0; prev.len()];
            for (r, &d) in delta.iter().enumerate() {
                let row = &layer.weights[r * layer.cols..r * layer.cols + prev.len()];
                next_delta.iter_mut().zip(row).for_each(|(nd, w)| *nd += d * w);
            }
            next_delta.iter_mut().zip(prev).for_each(|(nd, h)| *nd *= 1.0 - h * h);
            delta = next_delta;
        }
    }

    /// Mean squared error over a batch and its gradient.
    pub fn loss_and_gradient(&self, batch: &[(&EncodedInput, f64)]) -> Result<(f64, NetBuffers)> {
        if batch.is_empty() {
            return Err(PackError::InvalidArgument("empty training batch".into()));
        }
        let n = batch.len() as f64;
        let mut grads = NetBuffers::zeros(&self.shape);
        let mut loss = 0.0;
        for (input, target) in batch {
            self.shape.check(input)?;
            let trace = self.trace(input);
            let err = trace.q - target;
            loss += err * err;
            self.backprop(&trace, 2.0 * err / n, &mut grads);
        }
        Ok((loss / n, grads))
    }

    /// Batch mean squared error without gradients.
    pub fn loss(&self, batch: &[(&EncodedInput, f64)]) -> Result<f64> {
        let mut loss = 0.0;
        for (input, target) in batch {
            let e = self.forward(input)? - target;
            loss += e * e;
        }
        Ok(loss / batch.len() as f64)
    }

    /// One SGD-with-momentum step. Returns the loss before the update.
    pub fn train_step(&mut self, batch: &[(&EncodedInput, f64)], lr: f64, momentum: f64) -> Result<f64> {
        let (loss, grads) = self.loss_and_gradient(batch)?;
        if !loss.is_finite() {
            return Err(PackError::TrainingDiverged { loss });
        }
        for ((layer, vel), g) in self.layers.iter_mut().zip(&mut self.velocity.layers).zip(&grads.layers) {
            vel.weights.iter_mut().zip(&g.weights).for_each(|(v, g)| *v = momentum * *v - lr * g);
            vel.bias.iter_mut().zip(&g.bias).for_each(|(v, g)| *v = momentum * *v - lr * g);
            layer.scale_into(vel, 1.0);
        }
        Ok(loss)
    }

    /// Copies weights from `other`, leaving this network's momentum alone.
    pub fn sync_from(&mut self, other: &ValueNet) {
        self.layers.clone_from(&other.layers);
    }
}

/// Scores many candidates of one state. Their pooled state vectors differ
/// from the base state only in a few tiles, so the first layer is updated
/// incrementally.
pub struct CandidateScorer<'a> {
    net: &'a ValueNet,
    base_x: &'a [f32],
    base_pre: Vec<f64>,
}

impl<'a> CandidateScorer<'a> {
    pub fn new(net: &'a ValueNet, base_x: &'a [f32]) -> Self {
        let x: Vec<f64> = base_x.iter().map(|&v| v as f64).collect();
        let mut base_pre = Vec::new();
        net.layers[0].affine(&x, &mut base_pre);
        Self { net, base_x, base_pre }
    }

    /// q-value for a candidate whose pooled vector `x` differs from the base
    /// only in `touched` tiles.
    pub fn score(&self, x: &[f32], touched: &[usize], y: &[f32], field: usize) -> f64 {
        let l0 = &self.net.layers[0];
        let mut pre = self.base_pre.clone();
        for &t in touched {
            for k in [t, TILES + t, 2 * TILES + t] {
                let d = x[k] as f64 - self.base_x[k] as f64;
                if d != 0.0 {
                    pre.iter_mut().enumerate().for_each(|(r, p)| *p += l0.weights[r * l0.cols + k] * d);
                }
            }
        }
        self.net.forward_from_pre(pre, y, field)
    }
}
