use ndarray::linalg::general_mat_mul;
use ndarray::{Array2, ArrayViewMut2};

use super::config::{Activation, MAX_INPUTS};
use super::jet::Jet;
use super::params::ParameterSet;
use crate::exec::{map_chunks, ExecMode};
use crate::{Error, Result};

/// Points per batch in loss and gradient evaluation. Fixed so the reduction
/// order, and therefore every result bit, is independent of thread count.
pub const CHUNK_SIZE: usize = 64;

/// Which input derivatives to carry through the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JetPlan {
    first: bool,
    second: [bool; MAX_INPUTS],
}

impl JetPlan {
    /// Values only.
    pub const fn values() -> Self {
        Self {
            first: false,
            second: [false; MAX_INPUTS],
        }
    }

    /// Values and all first derivatives.
    pub const fn first_order() -> Self {
        Self {
            first: true,
            second: [false; MAX_INPUTS],
        }
    }

    /// Values, first derivatives and every diagonal second derivative.
    pub const fn full() -> Self {
        Self {
            first: true,
            second: [true; MAX_INPUTS],
        }
    }

    /// First derivatives plus second derivatives along `axes`.
    pub fn with_second(axes: &[usize]) -> Self {
        let mut second = [false; MAX_INPUTS];
        for &a in axes {
            second[a] = true;
        }
        Self {
            first: true,
            second,
        }
    }

    pub fn has_first(&self) -> bool {
        self.first
    }

    pub fn has_second(&self, axis: usize) -> bool {
        self.second[axis]
    }

    fn channels(&self, n_in: usize) -> Channels {
        let mut second_axes = Vec::new();
        if self.first {
            second_axes.extend((0..n_in).filter(|&a| self.second[a]));
        }
        Channels {
            n_in,
            first: self.first,
            second_axes,
        }
    }
}

/// Column layout of the stacked jet matrices: channel `c` of point `b`
/// lives in column `c * batch + b`. Channel 0 is the value, channels
/// `1..=n_in` the first derivatives (when present) and the remaining ones the
/// requested second derivatives.
struct Channels {
    n_in: usize,
    first: bool,
    second_axes: Vec<usize>,
}

impl Channels {
    fn count(&self) -> usize {
        1 + if self.first { self.n_in } else { 0 } + self.second_axes.len()
    }

    fn d1(&self, axis: usize) -> usize {
        1 + axis
    }

    fn d2_base(&self) -> usize {
        1 + self.n_in
    }
}

struct Tape {
    batch: usize,
    channels: Channels,
    /// Inputs to each layer: `h_0` (input jets) through `h_{L-1}`.
    inputs: Vec<Array2<f64>>,
    /// Hidden pre-activations `z_1..z_{L-1}`.
    pre: Vec<Array2<f64>>,
    /// Activation derivatives `[σ' | σ'' | σ''']` at the value channel.
    derivs: Vec<Array2<f64>>,
    out: Array2<f64>,
}

fn check_points(params: &ParameterSet, points: &[f64]) -> Result<usize> {
    let n_in = params.config().input_dim;
    if points.len() % n_in != 0 {
        return Err(Error::Dimension {
            expected: n_in,
            actual: points.len() % n_in,
        });
    }
    Ok(points.len() / n_in)
}

fn run_forward(
    params: &ParameterSet,
    plan: &JetPlan,
    points: &[f64],
    keep: bool,
) -> Tape {
    let cfg = params.config();
    let n_in = cfg.input_dim;
    let batch = points.len() / n_in;
    let channels = plan.channels(n_in);
    let nc = channels.count();
    let act = cfg.activation;

    let mut h = Array2::<f64>::zeros((n_in, nc * batch));
    for (b, x) in points.chunks_exact(n_in).enumerate() {
        for j in 0..n_in {
            h[[j, b]] = x[j];
        }
    }
    if channels.first {
        for a in 0..n_in {
            let c = channels.d1(a);
            for b in 0..batch {
                h[[a, c * batch + b]] = 1.0;
            }
        }
    }

    let layers = params.layers();
    let n_layers = layers.len();
    let mut inputs = Vec::with_capacity(n_layers);
    let mut pre = Vec::new();
    let mut derivs = Vec::new();

    for layer in &layers[..n_layers - 1] {
        let n = layer.n_out();
        let mut z = Array2::<f64>::zeros((n, nc * batch));
        general_mat_mul(1.0, &layer.weights, &h, 0.0, &mut z);
        let mut next = Array2::<f64>::zeros((n, nc * batch));
        let mut d = Array2::<f64>::zeros((n, 3 * batch));
        for i in 0..n {
            let bias = layer.bias[i];
            let zr = z.row_mut(i).into_slice().unwrap();
            let hr = next.row_mut(i).into_slice().unwrap();
            let dr = d.row_mut(i).into_slice().unwrap();
            for b in 0..batch {
                zr[b] += bias;
                let [s, a1, a2, a3] = act.eval(zr[b]);
                hr[b] = s;
                dr[b] = a1;
                dr[batch + b] = a2;
                dr[2 * batch + b] = a3;
                if channels.first {
                    for a in 0..n_in {
                        let k = channels.d1(a) * batch + b;
                        hr[k] = a1 * zr[k];
                    }
                    for (s_idx, &a) in channels.second_axes.iter().enumerate() {
                        let k = (channels.d2_base() + s_idx) * batch + b;
                        let z1 = zr[channels.d1(a) * batch + b];
                        hr[k] = a1 * zr[k] + a2 * z1 * z1;
                    }
                }
            }
        }
        let prev = std::mem::replace(&mut h, next);
        if keep {
            inputs.push(prev);
            pre.push(z);
            derivs.push(d);
        }
    }

    let last = &layers[n_layers - 1];
    let mut out = Array2::<f64>::zeros((last.n_out(), nc * batch));
    general_mat_mul(1.0, &last.weights, &h, 0.0, &mut out);
    for k in 0..last.n_out() {
        let bias = last.bias[k];
        out.row_mut(k)
            .iter_mut()
            .take(batch)
            .for_each(|v| *v += bias);
    }
    if keep {
        inputs.push(h);
    }
    Tape {
        batch,
        channels,
        inputs,
        pre,
        derivs,
        out,
    }
}

fn read_jet(tape: &Tape, n_out: usize, b: usize) -> Jet {
    let ch = &tape.channels;
    let batch = tape.batch;
    let mut jet = Jet::zeros(ch.n_in, n_out);
    for k in 0..n_out {
        let row = tape.out.row(k);
        let f = jet.field_mut(k);
        f.value = row[b];
        if ch.first {
            for a in 0..ch.n_in {
                f.d1[a] = row[ch.d1(a) * batch + b];
            }
        }
        for (s, &a) in ch.second_axes.iter().enumerate() {
            f.d2[a] = row[(ch.d2_base() + s) * batch + b];
        }
    }
    jet
}

fn write_jet_grad(g_out: &mut Array2<f64>, ch: &Channels, batch: usize, b: usize, grad: &Jet) {
    for k in 0..g_out.nrows() {
        let f = grad.field(k);
        let mut row = g_out.row_mut(k);
        row[b] = f.value;
        if ch.first {
            for a in 0..ch.n_in {
                row[ch.d1(a) * batch + b] = f.d1[a];
            }
        }
        for (s, &a) in ch.second_axes.iter().enumerate() {
            row[(ch.d2_base() + s) * batch + b] = f.d2[a];
        }
    }
}

/// Maps the gradient with respect to a hidden layer's output jets onto its
/// pre-activation jets, in place.
fn activation_backward(g: &mut Array2<f64>, z: &Array2<f64>, d: &Array2<f64>, ch: &Channels, batch: usize) {
    let n_in = ch.n_in;
    for i in 0..g.nrows() {
        let gr = g.row_mut(i).into_slice().unwrap();
        let zr = z.row(i).to_slice().unwrap();
        let dr = d.row(i).to_slice().unwrap();
        for b in 0..batch {
            let (a1, a2, a3) = (dr[b], dr[batch + b], dr[2 * batch + b]);
            let mut gz0 = gr[b] * a1;
            if ch.first {
                for a in 0..n_in {
                    let k = ch.d1(a) * batch + b;
                    gz0 += gr[k] * zr[k] * a2;
                    gr[k] *= a1;
                }
                for (s, &a) in ch.second_axes.iter().enumerate() {
                    let k = (ch.d2_base() + s) * batch + b;
                    let k1 = ch.d1(a) * batch + b;
                    let g2 = gr[k];
                    let z1 = zr[k1];
                    gz0 += g2 * (zr[k] * a2 + z1 * z1 * a3);
                    gr[k1] += 2.0 * g2 * a2 * z1;
                    gr[k] = g2 * a1;
                }
            }
            gr[b] = gz0;
        }
    }
}

fn run_backward(params: &ParameterSet, tape: &Tape, mut g: Array2<f64>, grad: &mut [f64]) {
    let layers = params.layers();
    let offsets = params.offsets();
    let batch = tape.batch;
    for l in (0..layers.len()).rev() {
        let layer = &layers[l];
        let (n_out, n_in) = layer.weights.dim();
        if l + 1 < layers.len() {
            activation_backward(&mut g, &tape.pre[l], &tape.derivs[l], &tape.channels, batch);
        }
        let off = offsets[l];
        let (w_grad, rest) = grad[off..].split_at_mut(n_out * n_in);
        let mut w_view = ArrayViewMut2::from_shape((n_out, n_in), w_grad).unwrap();
        general_mat_mul(1.0, &g, &tape.inputs[l].t(), 1.0, &mut w_view);
        for (k, gb) in rest[..n_out].iter_mut().enumerate() {
            *gb += g.row(k).iter().take(batch).sum::<f64>();
        }
        if l > 0 {
            let mut next = Array2::<f64>::zeros((n_in, g.ncols()));
            general_mat_mul(1.0, &layer.weights.t(), &g, 0.0, &mut next);
            g = next;
        }
    }
}

/// Evaluates the network at one normalised point.
///
/// Straight per-point recursion, independent of the batched jet engine.
pub fn forward(params: &ParameterSet, x: &[f64]) -> Result<Vec<f64>> {
    let cfg = params.config();
    if x.len() != cfg.input_dim {
        return Err(Error::Dimension {
            expected: cfg.input_dim,
            actual: x.len(),
        });
    }
    let layers = params.layers();
    let mut h = x.to_vec();
    for (l, layer) in layers.iter().enumerate() {
        let mut z: Vec<f64> = layer
            .weights
            .outer_iter()
            .zip(layer.bias.iter())
            .map(|(row, b)| row.iter().zip(&h).map(|(w, v)| w * v).sum::<f64>() + b)
            .collect();
        if l + 1 < layers.len() {
            z.iter_mut().for_each(|v| *v = activate(cfg.activation, *v));
        }
        h = z;
    }
    Ok(h)
}

#[inline]
fn activate(act: Activation, z: f64) -> f64 {
    match act {
        Activation::Sine => z.sin(),
        Activation::Tanh => z.tanh(),
    }
}

/// Value, gradient and diagonal Hessian of every output at one point.
pub fn forward_jet(params: &ParameterSet, x: &[f64]) -> Result<Jet> {
    if x.len() != params.config().input_dim {
        return Err(Error::Dimension {
            expected: params.config().input_dim,
            actual: x.len(),
        });
    }
    let tape = run_forward(params, &JetPlan::full(), x, false);
    Ok(read_jet(&tape, params.config().output_dim, 0))
}

/// Jets at many points; `points` holds `input_dim` coordinates per point.
pub fn eval_jets(
    params: &ParameterSet,
    points: &[f64],
    plan: JetPlan,
    mode: ExecMode,
) -> Result<Vec<Jet>> {
    let n = check_points(params, points)?;
    let n_in = params.config().input_dim;
    let n_out = params.config().output_dim;
    let parts = map_chunks(mode, n, CHUNK_SIZE, |r| {
        let tape = run_forward(params, &plan, &points[r.start * n_in..r.end * n_in], false);
        (0..tape.batch).map(|b| read_jet(&tape, n_out, b)).collect::<Vec<_>>()
    });
    Ok(parts.into_iter().flatten().collect())
}

/// Network outputs at many points, `output_dim` values per point.
pub fn predict(params: &ParameterSet, points: &[f64], mode: ExecMode) -> Result<Vec<f64>> {
    let n = check_points(params, points)?;
    let n_in = params.config().input_dim;
    let n_out = params.config().output_dim;
    let chunk = 256;
    let parts = map_chunks(mode, n, chunk, |r| {
        let tape = run_forward(
            params,
            &JetPlan::values(),
            &points[r.start * n_in..r.end * n_in],
            false,
        );
        let mut vals = Vec::with_capacity(tape.batch * n_out);
        for b in 0..tape.batch {
            for k in 0..n_out {
                vals.push(tape.out[[k, b]]);
            }
        }
        vals
    });
    Ok(parts.into_iter().flatten().collect())
}

/// A loss that is a sum of per-point contributions, each a smooth function of
/// the output jets at that point.
///
/// Points are grouped in blocks; every block is evaluated with one
/// [`JetPlan`].
pub trait JetLoss: Sync {
    fn n_blocks(&self) -> usize;

    /// Normalised coordinates of the block's points, flattened.
    fn block_points(&self, block: usize) -> &[f64];

    fn block_plan(&self, block: usize) -> JetPlan;

    /// Name reported when the block's contribution is not finite.
    fn block_label(&self, block: usize) -> &str;

    /// Contribution of point `index` of `block`. Writes the derivative of the
    /// contribution with respect to every jet component into `grad`, which
    /// arrives zeroed.
    fn point_loss(&self, block: usize, index: usize, jet: &Jet, grad: &mut Jet) -> f64;
}

#[derive(Debug, Clone)]
pub struct LossEval {
    pub total: f64,
    /// Summed contribution of each block.
    pub blocks: Vec<f64>,
    pub gradient: Vec<f64>,
}

/// Loss value and its gradient with respect to the flattened parameters.
pub fn loss_gradient(params: &ParameterSet, loss: &dyn JetLoss, mode: ExecMode) -> Result<LossEval> {
    let n_in = params.config().input_dim;
    let n_out = params.config().output_dim;
    let n_params = params.len();

    let mut jobs = Vec::new();
    for block in 0..loss.n_blocks() {
        let n = check_points(params, loss.block_points(block))?;
        let mut start = 0;
        while start < n {
            let end = (start + CHUNK_SIZE).min(n);
            jobs.push((block, start, end));
            start = end;
        }
    }

    let parts = map_chunks(mode, jobs.len(), 1, |r| {
        let (block, start, end) = jobs[r.start];
        let plan = loss.block_plan(block);
        let pts = &loss.block_points(block)[start * n_in..end * n_in];
        let tape = run_forward(params, &plan, pts, true);
        let mut g_out = Array2::<f64>::zeros(tape.out.raw_dim());
        let mut sum = 0.0;
        let mut jet_grad = Jet::zeros(n_in, n_out);
        for b in 0..tape.batch {
            let jet = read_jet(&tape, n_out, b);
            jet_grad.clear();
            sum += loss.point_loss(block, start + b, &jet, &mut jet_grad);
            write_jet_grad(&mut g_out, &tape.channels, tape.batch, b, &jet_grad);
        }
        let mut grad = vec![0.0; n_params];
        run_backward(params, &tape, g_out, &mut grad);
        (block, sum, grad)
    });

    let mut blocks = vec![0.0; loss.n_blocks()];
    let mut gradient = vec![0.0; n_params];
    for (block, sum, grad) in parts {
        blocks[block] += sum;
        gradient.iter_mut().zip(&grad).for_each(|(a, b)| *a += b);
    }
    for (block, &v) in blocks.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Divergence {
                term: loss.block_label(block).to_string(),
            });
        }
    }
    let total = blocks.iter().sum();
    if gradient.iter().any(|g| !g.is_finite()) {
        return Err(Error::Divergence {
            term: "gradient".into(),
        });
    }
    Ok(LossEval {
        total,
        blocks,
        gradient,
    })
}
