//! Forward propagation of first and second derivative channels through
//! network layers, and the matching reverse-mode adjoints.
//!
//! A [`Jet`] carries the value of a quantity together with its first
//! derivatives in space and time and its second derivative in space, the
//! exact channels needed by the governing-equation residual. Layer maps act
//! on jets channel-wise: an affine layer applies the same linear map to every
//! channel (adding the bias only to the value), and `tanh` applies the scalar
//! chain rule per neuron. Reverse-mode adjoints of both maps propagate
//! cotangents of all four channels back to layer inputs while accumulating
//! parameter gradients, so any scalar loss built from jet channels can be
//! differentiated with respect to every weight and bias.

use crate::error::{Error, Result};
use crate::mat::Mat;

/// Value of a scalar quantity together with d/dx, d/dt, and d2/dx2.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub value: f64,
    pub d_dx: f64,
    pub d_dt: f64,
    pub d2_dx2: f64,
}

impl Jet {
    pub const ZERO: Jet = Jet {
        value: 0.0,
        d_dx: 0.0,
        d_dt: 0.0,
        d2_dx2: 0.0,
    };

    pub fn new(value: f64, d_dx: f64, d_dt: f64, d2_dx2: f64) -> Self {
        Self {
            value,
            d_dx,
            d_dt,
            d2_dx2,
        }
    }

    /// Jet of a constant: all derivative channels are zero.
    pub fn constant(value: f64) -> Self {
        Self {
            value,
            ..Self::ZERO
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.d_dx.is_finite()
            && self.d_dt.is_finite()
            && self.d2_dx2.is_finite()
    }

    /// Channel-wise sum of `self` and `a * other`.
    pub fn add_scaled(&self, other: &Jet, a: f64) -> Jet {
        Jet {
            value: self.value + a * other.value,
            d_dx: self.d_dx + a * other.d_dx,
            d_dt: self.d_dt + a * other.d_dt,
            d2_dx2: self.d2_dx2 + a * other.d2_dx2,
        }
    }

    /// Dot product over all four channels.
    pub fn dot(&self, other: &Jet) -> f64 {
        self.value * other.value
            + self.d_dx * other.d_dx
            + self.d_dt * other.d_dt
            + self.d2_dx2 * other.d2_dx2
    }
}

/// Jets of the network inputs at a point `(x, t)`.
///
/// The x input has unit d/dx and the t input unit d/dt; second spatial
/// derivatives of both inputs are zero.
pub fn seed_input_jets(x: f64, t: f64) -> (Jet, Jet) {
    (Jet::new(x, 1.0, 0.0, 0.0), Jet::new(t, 0.0, 1.0, 0.0))
}

/// Affine map `z = W a + b` applied to jets.
///
/// Every channel is transformed by `W`; the bias contributes to the value
/// channel only, since derivatives of a constant vanish.
pub fn jet_affine(weights: &Mat, biases: &[f64], inputs: &[Jet]) -> Result<Vec<Jet>> {
    if weights.cols() != inputs.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.cols(),
            got: inputs.len(),
        });
    }
    if weights.rows() != biases.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} weight rows but {} biases",
            weights.rows(),
            biases.len()
        )));
    }
    let mut out = vec![Jet::ZERO; weights.rows()];
    jet_affine_into(weights, biases, inputs, &mut out);
    Ok(out)
}

pub(crate) fn jet_affine_into(weights: &Mat, biases: &[f64], inputs: &[Jet], out: &mut [Jet]) {
    debug_assert_eq!(weights.cols(), inputs.len());
    debug_assert_eq!(weights.rows(), biases.len());
    debug_assert_eq!(weights.rows(), out.len());
    for (i, z) in out.iter_mut().enumerate() {
        let mut acc = Jet::constant(biases[i]);
        for (w, a) in weights.row(i).iter().zip(inputs) {
            acc = acc.add_scaled(a, *w);
        }
        *z = acc;
    }
}

/// Element-wise `tanh` on jets.
///
/// With `y = tanh(z)` and `s = 1 - y^2`, the chain rule gives
/// `y_x = s z_x`, `y_t = s z_t`, and `y_xx = s z_xx - 2 y s z_x^2`.
pub fn jet_tanh(inputs: &[Jet]) -> Vec<Jet> {
    let mut out = vec![Jet::ZERO; inputs.len()];
    jet_tanh_into(inputs, &mut out);
    out
}

pub(crate) fn jet_tanh_into(inputs: &[Jet], out: &mut [Jet]) {
    debug_assert_eq!(inputs.len(), out.len());
    for (z, y) in inputs.iter().zip(out.iter_mut()) {
        let y0 = z.value.tanh();
        let s = 1.0 - y0 * y0;
        *y = Jet {
            value: y0,
            d_dx: s * z.d_dx,
            d_dt: s * z.d_dt,
            d2_dx2: s * z.d2_dx2 - 2.0 * y0 * s * z.d_dx * z.d_dx,
        };
    }
}

/// Adjoint of [`jet_tanh`] for one neuron.
///
/// Maps the cotangent of the output jet to the cotangent of the input jet.
/// `pre` is the pre-activation jet and `act_value` its stored `tanh`.
pub(crate) fn jet_tanh_adjoint(pre: &Jet, act_value: f64, cot: &Jet) -> Jet {
    let y0 = act_value;
    let s = 1.0 - y0 * y0;
    let zx = pre.d_dx;
    Jet {
        value: s * cot.value
            - 2.0 * y0 * s * (zx * cot.d_dx + pre.d_dt * cot.d_dt + pre.d2_dx2 * cot.d2_dx2)
            - 2.0 * s * (s - 2.0 * y0 * y0) * zx * zx * cot.d2_dx2,
        d_dx: s * cot.d_dx - 4.0 * y0 * s * zx * cot.d2_dx2,
        d_dt: s * cot.d_dt,
        d2_dx2: s * cot.d2_dx2,
    }
}

/// Adjoint of [`jet_affine`].
///
/// Accumulates weight and bias gradients and writes the cotangent of the
/// layer inputs. Weight `w_ij` touches all four channels of output `i`
/// through input `j`, so its gradient is the four-channel dot product of the
/// output cotangent with the input jet; the bias only feeds the value
/// channel.
pub(crate) fn jet_affine_adjoint(
    weights: &Mat,
    inputs: &[Jet],
    cot_out: &[Jet],
    grad_w: &mut Mat,
    grad_b: &mut [f64],
    cot_in: &mut [Jet],
) {
    debug_assert_eq!(weights.cols(), inputs.len());
    debug_assert_eq!(weights.rows(), cot_out.len());
    debug_assert!(grad_w.same_shape(weights));
    debug_assert_eq!(grad_b.len(), cot_out.len());
    debug_assert_eq!(cot_in.len(), inputs.len());
    cot_in.fill(Jet::ZERO);
    for (i, cz) in cot_out.iter().enumerate() {
        grad_b[i] += cz.value;
        for (j, a) in inputs.iter().enumerate() {
            grad_w.add_at(i, j, cz.dot(a));
            cot_in[j] = cot_in[j].add_scaled(cz, weights.get(i, j));
        }
    }
}

/// Gradient of one layer's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrad {
    pub weights: Mat,
    pub biases: Vec<f64>,
}

/// Gradient of the full trainable state: all layer parameters plus the
/// governing-equation coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientBuffer {
    pub layers: Vec<LayerGrad>,
    pub beta: f64,
}

impl GradientBuffer {
    /// Zeroed buffer for layers with the given `(outputs, inputs)` shapes.
    pub fn zeros(shapes: &[(usize, usize)]) -> Self {
        let layers = shapes
            .iter()
            .map(|&(rows, cols)| LayerGrad {
                weights: Mat::zeros(rows, cols),
                biases: vec![0.0; rows],
            })
            .collect();
        Self { layers, beta: 0.0 }
    }

    pub fn reset(&mut self) {
        for layer in &mut self.layers {
            layer.weights.fill(0.0);
            layer.biases.fill(0.0);
        }
        self.beta = 0.0;
    }

    pub fn scale(&mut self, a: f64) {
        for layer in &mut self.layers {
            for w in layer.weights.data_mut() {
                *w *= a;
            }
            for b in &mut layer.biases {
                *b *= a;
            }
        }
        self.beta *= a;
    }

    pub fn add_assign(&mut self, other: &GradientBuffer) -> Result<()> {
        if !self.congruent_with(other) {
            return Err(Error::ShapeMismatch(
                "gradient buffers have different layer shapes".into(),
            ));
        }
        for (dst, src) in self.layers.iter_mut().zip(&other.layers) {
            for (d, s) in dst.weights.data_mut().iter_mut().zip(src.weights.data()) {
                *d += s;
            }
            for (d, s) in dst.biases.iter_mut().zip(&src.biases) {
                *d += s;
            }
        }
        self.beta += other.beta;
        Ok(())
    }

    pub fn congruent_with(&self, other: &GradientBuffer) -> bool {
        self.layers.len() == other.layers.len()
            && self
                .layers
                .iter()
                .zip(&other.layers)
                .all(|(a, b)| a.weights.same_shape(&b.weights) && a.biases.len() == b.biases.len())
    }

    /// Total number of entries including the coefficient slot.
    pub fn flat_len(&self) -> usize {
        let p: usize = self
            .layers
            .iter()
            .map(|l| l.weights.data().len() + l.biases.len())
            .sum();
        p + 1
    }

    /// Flattened copy: per layer the weights row-major then the biases, with
    /// the coefficient gradient last.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.flat_len());
        for layer in &self.layers {
            flat.extend_from_slice(layer.weights.data());
            flat.extend_from_slice(&layer.biases);
        }
        flat.push(self.beta);
        flat
    }
}
