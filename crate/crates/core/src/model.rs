//! Fully connected network mapping `(x, t)` to the real and imaginary field
//! components, with derivative propagation and checkpointing.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;

use crate::autodiff::{
    jet_affine_adjoint, jet_affine_into, jet_tanh_adjoint, jet_tanh_into, seed_input_jets,
    GradientBuffer, Jet,
};
use crate::error::{Error, Result};
use crate::io::fmt_g17;
use crate::mat::Mat;

/// Layer sizes used for the full-scale runs: two inputs, four hidden layers
/// of 50 tanh units, two linear outputs.
pub const DEFAULT_TOPOLOGY: [usize; 6] = [2, 50, 50, 50, 50, 2];

/// One affine layer.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weights: Mat,
    pub biases: Vec<f64>,
}

/// Trainable state: the network layers plus the governing-equation
/// coefficient, which is learned jointly with the weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    pub layers: Vec<DenseLayer>,
    pub beta: f64,
}

/// Network output at a point together with the derivative channels entering
/// the governing-equation residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkJet {
    pub u: f64,
    pub v: f64,
    pub u_x: f64,
    pub v_x: f64,
    pub u_t: f64,
    pub v_t: f64,
    pub u_xx: f64,
    pub v_xx: f64,
}

impl NetworkJet {
    pub fn from_output_jets(u: &Jet, v: &Jet) -> Self {
        Self {
            u: u.value,
            v: v.value,
            u_x: u.d_dx,
            v_x: v.d_dx,
            u_t: u.d_dt,
            v_t: v.d_dt,
            u_xx: u.d2_dx2,
            v_xx: v.d2_dx2,
        }
    }

    pub fn is_finite(&self) -> bool {
        [
            self.u, self.v, self.u_x, self.v_x, self.u_t, self.v_t, self.u_xx, self.v_xx,
        ]
        .iter()
        .all(|c| c.is_finite())
    }
}

fn validate_topology(topology: &[usize]) -> Result<()> {
    if topology.len() < 2 {
        return Err(Error::InvalidConfig(
            "topology needs at least an input and an output size".into(),
        ));
    }
    if topology.contains(&0) {
        return Err(Error::InvalidConfig("topology has a zero-width layer".into()));
    }
    if topology[0] != 2 || *topology.last().unwrap() != 2 {
        return Err(Error::InvalidConfig(format!(
            "network must map 2 inputs to 2 outputs, topology is {topology:?}"
        )));
    }
    Ok(())
}

/// Layer parameters drawn from the Xavier uniform distribution,
/// `U(-r, r)` with `r = sqrt(6 / (fan_in + fan_out))`, biases zero.
/// The coefficient starts at zero; set it explicitly before training.
pub fn xavier_init(topology: &[usize], rng: &mut impl Rng) -> Result<MlpParams> {
    validate_topology(topology)?;
    let mut layers = Vec::with_capacity(topology.len() - 1);
    for pair in topology.windows(2) {
        let (fan_in, fan_out) = (pair[0], pair[1]);
        let r = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let weights = Mat::from_fn(fan_out, fan_in, |_, _| rng.random_range(-r..r));
        layers.push(DenseLayer {
            weights,
            biases: vec![0.0; fan_out],
        });
    }
    Ok(MlpParams { layers, beta: 0.0 })
}

impl MlpParams {
    /// All-zero parameters for the given layer sizes.
    pub fn zeros(topology: &[usize]) -> Result<Self> {
        validate_topology(topology)?;
        let layers = topology
            .windows(2)
            .map(|pair| DenseLayer {
                weights: Mat::zeros(pair[1], pair[0]),
                biases: vec![0.0; pair[1]],
            })
            .collect();
        Ok(Self { layers, beta: 0.0 })
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn set_beta(&mut self, beta: f64) {
        self.beta = beta;
    }

    /// Layer sizes from input to output.
    pub fn topology(&self) -> Vec<usize> {
        let mut t = vec![self.layers[0].weights.cols()];
        t.extend(self.layers.iter().map(|l| l.weights.rows()));
        t
    }

    /// `(outputs, inputs)` shape of each weight matrix.
    pub fn weight_shapes(&self) -> Vec<(usize, usize)> {
        self.layers
            .iter()
            .map(|l| (l.weights.rows(), l.weights.cols()))
            .collect()
    }

    /// Number of weights and biases, excluding the coefficient.
    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.data().len() + l.biases.len())
            .sum()
    }

    /// Length of the flat view: all weights and biases plus the coefficient.
    pub fn flat_len(&self) -> usize {
        self.param_count() + 1
    }

    /// Zeroed gradient buffer matching this parameter set.
    pub fn grad_buffer(&self) -> GradientBuffer {
        GradientBuffer::zeros(&self.weight_shapes())
    }

    /// Entry at `idx` of the flat view used by [`GradientBuffer::to_flat`]:
    /// per layer the weights row-major then the biases, coefficient last.
    pub fn get_flat(&self, idx: usize) -> f64 {
        let mut k = idx;
        for layer in &self.layers {
            let nw = layer.weights.data().len();
            if k < nw {
                return layer.weights.data()[k];
            }
            k -= nw;
            if k < layer.biases.len() {
                return layer.biases[k];
            }
            k -= layer.biases.len();
        }
        assert_eq!(k, 0, "flat index out of range");
        self.beta
    }

    pub fn set_flat(&mut self, idx: usize, v: f64) {
        let mut k = idx;
        for layer in &mut self.layers {
            let nw = layer.weights.data().len();
            if k < nw {
                layer.weights.data_mut()[k] = v;
                return;
            }
            k -= nw;
            if k < layer.biases.len() {
                layer.biases[k] = v;
                return;
            }
            k -= layer.biases.len();
        }
        assert_eq!(k, 0, "flat index out of range");
        self.beta = v;
    }

    /// Field components `(u, v)` at `(x, t)`.
    ///
    /// Accumulates each affine output as bias plus weighted inputs in input
    /// order, exactly the value-channel arithmetic of the jet pass, so the
    /// result is bit-identical to [`Self::forward_with_derivatives`].
    pub fn forward(&self, x: f64, t: f64) -> (f64, f64) {
        let last = self.layers.len() - 1;
        let mut act = vec![x, t];
        let mut next = Vec::new();
        for (k, layer) in self.layers.iter().enumerate() {
            next.clear();
            for i in 0..layer.weights.rows() {
                let mut acc = layer.biases[i];
                for (w, a) in layer.weights.row(i).iter().zip(&act) {
                    acc += w * a;
                }
                next.push(if k < last { acc.tanh() } else { acc });
            }
            std::mem::swap(&mut act, &mut next);
        }
        (act[0], act[1])
    }

    /// Field components and their residual derivative channels at `(x, t)`.
    pub fn forward_with_derivatives(&self, x: f64, t: f64) -> NetworkJet {
        let mut trace = EvalTrace::new(self);
        let (u, v) = trace.forward(self, x, t);
        NetworkJet::from_output_jets(&u, &v)
    }
}

/// Per-point forward storage reused by the reverse pass.
///
/// `pre[k]` holds the affine outputs of layer `k`, `act[k]` the inputs to
/// layer `k` (`act[0]` is the seeded input pair), and `cot[k]` the cotangent
/// scratch of the same width. Buffers are allocated once and reused across
/// points.
pub(crate) struct EvalTrace {
    pre: Vec<Vec<Jet>>,
    act: Vec<Vec<Jet>>,
    cot: Vec<Vec<Jet>>,
}

impl EvalTrace {
    pub fn new(params: &MlpParams) -> Self {
        let topology = params.topology();
        let pre = topology[1..].iter().map(|&n| vec![Jet::ZERO; n]).collect();
        let act = topology.iter().map(|&n| vec![Jet::ZERO; n]).collect();
        let cot = topology.iter().map(|&n| vec![Jet::ZERO; n]).collect();
        Self { pre, act, cot }
    }

    /// Jet pass through all layers; returns the output jets `(U, V)`.
    pub fn forward(&mut self, params: &MlpParams, x: f64, t: f64) -> (Jet, Jet) {
        let last = params.layers.len() - 1;
        let (jx, jt) = seed_input_jets(x, t);
        self.act[0][0] = jx;
        self.act[0][1] = jt;
        for (k, layer) in params.layers.iter().enumerate() {
            let (head, tail) = self.act.split_at_mut(k + 1);
            jet_affine_into(&layer.weights, &layer.biases, &head[k], &mut self.pre[k]);
            if k < last {
                jet_tanh_into(&self.pre[k], &mut tail[0]);
            } else {
                tail[0].copy_from_slice(&self.pre[k]);
            }
        }
        let out = self.act.last().unwrap();
        (out[0], out[1])
    }

    /// Reverse pass for the point most recently run through [`Self::forward`].
    ///
    /// Seeds the output cotangents `(cot_u, cot_v)` over all four channels
    /// and accumulates parameter gradients into `grads`. The coefficient
    /// gradient is not touched here; residual terms add it separately.
    pub fn backward(
        &mut self,
        params: &MlpParams,
        cot_u: Jet,
        cot_v: Jet,
        grads: &mut GradientBuffer,
    ) {
        let n_layers = params.layers.len();
        let out_cot = &mut self.cot[n_layers];
        out_cot[0] = cot_u;
        out_cot[1] = cot_v;
        for k in (0..n_layers).rev() {
            if k < n_layers - 1 {
                for i in 0..self.cot[k + 1].len() {
                    self.cot[k + 1][i] = jet_tanh_adjoint(
                        &self.pre[k][i],
                        self.act[k + 1][i].value,
                        &self.cot[k + 1][i],
                    );
                }
            }
            let (cot_head, cot_tail) = self.cot.split_at_mut(k + 1);
            let layer_grad = &mut grads.layers[k];
            jet_affine_adjoint(
                &params.layers[k].weights,
                &self.act[k],
                &cot_tail[0],
                &mut layer_grad.weights,
                &mut layer_grad.biases,
                &mut cot_head[k],
            );
        }
    }
}

/// Writes parameters and the originating seed as a line-oriented text file:
/// a `topology` line, a `seed` line, then one value per line in flat order
/// (per layer the weights row-major then the biases, coefficient last), each
/// printed with 17 significant digits so reloading is bit-exact.
pub fn save_checkpoint(path: &Path, params: &MlpParams, seed: u64) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    let sizes: Vec<String> = params.topology().iter().map(|n| n.to_string()).collect();
    writeln!(w, "topology {}", sizes.join(" "))?;
    writeln!(w, "seed {seed}")?;
    for idx in 0..params.flat_len() {
        writeln!(w, "{}", fmt_g17(params.get_flat(idx)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<(MlpParams, u64)> {
    let malformed = |detail: String| Error::MalformedFile {
        what: "checkpoint",
        path: path.display().to_string(),
        detail,
    };
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();

    let topo_line = lines
        .next()
        .ok_or_else(|| malformed("missing topology line".into()))??;
    let topology: Vec<usize> = topo_line
        .strip_prefix("topology ")
        .ok_or_else(|| malformed(format!("expected topology line, got {topo_line:?}")))?
        .split_whitespace()
        .map(|s| s.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| malformed(format!("bad topology entry: {e}")))?;

    let seed_line = lines
        .next()
        .ok_or_else(|| malformed("missing seed line".into()))??;
    let seed: u64 = seed_line
        .strip_prefix("seed ")
        .ok_or_else(|| malformed(format!("expected seed line, got {seed_line:?}")))?
        .trim()
        .parse()
        .map_err(|e| malformed(format!("bad seed: {e}")))?;

    let mut params = MlpParams::zeros(&topology)?;
    let expected = params.flat_len();
    let mut idx = 0;
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if idx >= expected {
            return Err(malformed(format!("more than {expected} values")));
        }
        let v: f64 = line
            .trim()
            .parse()
            .map_err(|e| malformed(format!("bad value at entry {idx}: {e}")))?;
        params.set_flat(idx, v);
        idx += 1;
    }
    if idx != expected {
        return Err(malformed(format!("expected {expected} values, got {idx}")));
    }
    Ok((params, seed))
}
