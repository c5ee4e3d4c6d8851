//! Loss assembly, gradient evaluation, Adam, and the training loop.

use std::time::Instant;

use crate::autodiff::{GradientBuffer, Jet};
use crate::error::{Error, Result};
use crate::io::HistoryRecord;
use crate::model::{xavier_init, EvalTrace, MlpParams, NetworkJet, DEFAULT_TOPOLOGY};
use crate::physics::{
    add_noise, component_stds, exact_solution, residual_adjoint, residuals, FieldSample,
};
use crate::sampling::{
    draw_training_points, lhs_sample, stream_rng, CollocationSet, DomainBounds, STREAM_COLLOCATION,
    STREAM_INIT, STREAM_NOISE, STREAM_TRAIN_POINTS,
};

/// Full description of one training run. Two runs with equal configs produce
/// bit-identical results.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Number of optimizer steps.
    pub epochs: usize,
    pub learning_rate: f64,
    /// Weight of the sample-misfit term.
    pub lambda_data: f64,
    /// Weight of the residual term.
    pub lambda_physics: f64,
    /// Number of measured samples.
    pub n_u: usize,
    /// Number of collocation points.
    pub n_f: usize,
    /// Noise as a fraction of each component's spread; 0 means clean data.
    pub noise_level: f64,
    /// Coefficient used to generate the data.
    pub beta_true: f64,
    /// Starting value of the trainable coefficient.
    pub beta_init: f64,
    pub seed: u64,
    /// Layer sizes from input to output.
    pub topology: Vec<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 10_000,
            learning_rate: 1e-3,
            lambda_data: 1.0,
            lambda_physics: 1.0,
            n_u: 500,
            n_f: 20_000,
            noise_level: 0.20,
            beta_true: 1.0,
            beta_init: 0.0,
            seed: 1234,
            topology: DEFAULT_TOPOLOGY.to_vec(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.epochs == 0 {
            return bad("epochs must be at least 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        for (name, v) in [
            ("lambda_data", self.lambda_data),
            ("lambda_physics", self.lambda_physics),
            ("noise_level", self.noise_level),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be nonnegative, got {v}"));
            }
        }
        if self.n_u == 0 {
            return bad("n_u must be at least 1".into());
        }
        if self.n_f == 0 {
            return bad("n_f must be at least 1".into());
        }
        if !(self.beta_true > 0.0 && self.beta_true.is_finite()) {
            return Err(Error::NonPositiveBeta(self.beta_true));
        }
        if !self.beta_init.is_finite() {
            return bad(format!("beta_init must be finite, got {}", self.beta_init));
        }
        MlpParams::zeros(&self.topology)?;
        Ok(())
    }
}

/// Loss components of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub data_loss: f64,
    pub physics_loss: f64,
    pub total_loss: f64,
}

/// Measured samples together with the clean values they were derived from
/// and the injected per-component noise scale.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingData {
    pub noisy: Vec<FieldSample>,
    pub clean: Vec<FieldSample>,
    /// `noise_level * sigma_u` of the clean set; 0 for clean data.
    pub noise_sigma_u: f64,
    pub noise_sigma_v: f64,
}

/// Everything a finished run reports.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub params: MlpParams,
    pub beta_final: f64,
    /// Coefficient after each optimizer step.
    pub beta_history: Vec<f64>,
    /// Losses evaluated before each optimizer step.
    pub loss_history: Vec<LossBreakdown>,
    pub relative_error_percent: f64,
    pub elapsed_seconds: f64,
}

impl RunResult {
    /// History rows with 1-based epochs, ready for CSV emission.
    pub fn history_records(&self) -> Vec<HistoryRecord> {
        self.beta_history
            .iter()
            .zip(&self.loss_history)
            .enumerate()
            .map(|(idx, (&beta, loss))| HistoryRecord {
                epoch: idx + 1,
                beta,
                data_loss: loss.data_loss,
                physics_loss: loss.physics_loss,
                total_loss: loss.total_loss,
            })
            .collect()
    }
}

/// Mean squared misfit against the measured samples.
pub fn data_loss(params: &MlpParams, samples: &[FieldSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let mut acc = 0.0;
    for s in samples {
        let (u, v) = params.forward(s.x, s.t);
        let (du, dv) = (u - s.u, v - s.v);
        acc += du * du + dv * dv;
    }
    Ok(acc / samples.len() as f64)
}

/// Mean squared governing-equation residual over the collocation points,
/// evaluated with the coefficient stored in `params`.
pub fn physics_loss(params: &MlpParams, colloc: &CollocationSet) -> Result<f64> {
    if colloc.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let mut acc = 0.0;
    for &(x, t) in colloc.points() {
        let jet = params.forward_with_derivatives(x, t);
        let r = residuals(&jet, params.beta);
        acc += r.f_u * r.f_u + r.f_v * r.f_v;
    }
    Ok(acc / colloc.len() as f64)
}

/// Weighted sum of the two loss terms.
pub fn total_loss(
    params: &MlpParams,
    samples: &[FieldSample],
    colloc: &CollocationSet,
    lambda_data: f64,
    lambda_physics: f64,
) -> Result<LossBreakdown> {
    let data = data_loss(params, samples)?;
    let physics = physics_loss(params, colloc)?;
    Ok(LossBreakdown {
        data_loss: data,
        physics_loss: physics,
        total_loss: lambda_data * data + lambda_physics * physics,
    })
}

/// Loss and its exact gradient with respect to every weight, bias, and the
/// coefficient, in one data pass and one collocation pass.
///
/// The reported loss components are computed with the same arithmetic as
/// [`total_loss`], so the two agree bit-for-bit. Only the residual term
/// reaches the coefficient gradient; the misfit term does not read the
/// coefficient.
pub fn loss_and_gradient(
    params: &MlpParams,
    samples: &[FieldSample],
    colloc: &CollocationSet,
    lambda_data: f64,
    lambda_physics: f64,
) -> Result<(LossBreakdown, GradientBuffer)> {
    if samples.is_empty() || colloc.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let mut grads = params.grad_buffer();
    let mut trace = EvalTrace::new(params);

    let n = samples.len() as f64;
    let mut data_acc = 0.0;
    let data_scale = 2.0 * lambda_data / n;
    for s in samples {
        let (ju, jv) = trace.forward(params, s.x, s.t);
        let (du, dv) = (ju.value - s.u, jv.value - s.v);
        data_acc += du * du + dv * dv;
        if lambda_data != 0.0 {
            trace.backward(
                params,
                Jet::constant(data_scale * du),
                Jet::constant(data_scale * dv),
                &mut grads,
            );
        }
    }

    let nf = colloc.len() as f64;
    let mut phys_acc = 0.0;
    let phys_scale = 2.0 * lambda_physics / nf;
    for &(x, t) in colloc.points() {
        let (ju, jv) = trace.forward(params, x, t);
        let jet = NetworkJet::from_output_jets(&ju, &jv);
        let r = residuals(&jet, params.beta);
        phys_acc += r.f_u * r.f_u + r.f_v * r.f_v;
        if lambda_physics != 0.0 {
            let (cot_u, cot_v, beta_bar) =
                residual_adjoint(&jet, params.beta, phys_scale * r.f_u, phys_scale * r.f_v);
            trace.backward(params, cot_u, cot_v, &mut grads);
            grads.beta += beta_bar;
        }
    }

    let data = data_acc / n;
    let physics = phys_acc / nf;
    Ok((
        LossBreakdown {
            data_loss: data,
            physics_loss: physics,
            total_loss: lambda_data * data + lambda_physics * physics,
        },
        grads,
    ))
}

/// Adam moment estimates for the full trainable state.
#[derive(Debug, Clone)]
pub struct AdamState {
    first_moment: GradientBuffer,
    second_moment: GradientBuffer,
    pub step_count: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new(params: &MlpParams) -> Self {
        Self {
            first_moment: params.grad_buffer(),
            second_moment: params.grad_buffer(),
            step_count: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

fn adam_update(p: &mut f64, g: f64, m: &mut f64, v: &mut f64, state_scale: &AdamScale) {
    *m = state_scale.beta1 * *m + (1.0 - state_scale.beta1) * g;
    *v = state_scale.beta2 * *v + (1.0 - state_scale.beta2) * g * g;
    let m_hat = *m / state_scale.bc1;
    let v_hat = *v / state_scale.bc2;
    *p -= state_scale.lr * m_hat / (v_hat.sqrt() + state_scale.epsilon);
}

struct AdamScale {
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    bc1: f64,
    bc2: f64,
    lr: f64,
}

/// One bias-corrected Adam step over all weights, biases, and the
/// coefficient.
pub fn adam_step(
    params: &mut MlpParams,
    grads: &GradientBuffer,
    state: &mut AdamState,
    learning_rate: f64,
) -> Result<()> {
    if !state.first_moment.congruent_with(grads)
        || params.weight_shapes().len() != grads.layers.len()
        || params
            .layers
            .iter()
            .zip(&grads.layers)
            .any(|(p, g)| !p.weights.same_shape(&g.weights) || p.biases.len() != g.biases.len())
    {
        return Err(Error::ShapeMismatch(
            "parameters, gradients, and optimizer state disagree".into(),
        ));
    }
    state.step_count += 1;
    let scale = AdamScale {
        beta1: state.beta1,
        beta2: state.beta2,
        epsilon: state.epsilon,
        bc1: 1.0 - state.beta1.powi(state.step_count as i32),
        bc2: 1.0 - state.beta2.powi(state.step_count as i32),
        lr: learning_rate,
    };
    for ((layer, grad), (m_layer, v_layer)) in params
        .layers
        .iter_mut()
        .zip(&grads.layers)
        .zip(
            state
                .first_moment
                .layers
                .iter_mut()
                .zip(&mut state.second_moment.layers),
        )
    {
        for ((p, &g), (m, v)) in layer
            .weights
            .data_mut()
            .iter_mut()
            .zip(grad.weights.data())
            .zip(m_layer.weights.data_mut().iter_mut().zip(v_layer.weights.data_mut()))
        {
            adam_update(p, g, m, v, &scale);
        }
        for ((p, &g), (m, v)) in layer
            .biases
            .iter_mut()
            .zip(&grad.biases)
            .zip(m_layer.biases.iter_mut().zip(v_layer.biases.iter_mut()))
        {
            adam_update(p, g, m, v, &scale);
        }
    }
    adam_update(
        &mut params.beta,
        grads.beta,
        &mut state.first_moment.beta,
        &mut state.second_moment.beta,
        &scale,
    );
    Ok(())
}

/// Samples drawn from the reference solution at seeded uniform locations,
/// with seeded noise applied.
pub fn generate_training_data(config: &TrainConfig) -> Result<TrainingData> {
    let bounds = DomainBounds::default();
    let points = draw_training_points(
        config.n_u,
        &bounds,
        &mut stream_rng(config.seed, STREAM_TRAIN_POINTS),
    )?;
    let clean: Vec<FieldSample> = points
        .iter()
        .map(|&(x, t)| {
            let (u, v) = exact_solution(config.beta_true, x, t)?;
            Ok(FieldSample { x, t, u, v })
        })
        .collect::<Result<_>>()?;
    let noisy = add_noise(
        &clean,
        config.noise_level,
        &mut stream_rng(config.seed, STREAM_NOISE),
    )?;
    let (noise_sigma_u, noise_sigma_v) = if config.noise_level > 0.0 {
        let (sigma_u, sigma_v) = component_stds(&clean)?;
        (config.noise_level * sigma_u, config.noise_level * sigma_v)
    } else {
        (0.0, 0.0)
    };
    Ok(TrainingData {
        noisy,
        clean,
        noise_sigma_u,
        noise_sigma_v,
    })
}

/// Runs one full training according to `config`.
pub fn train(config: &TrainConfig) -> Result<RunResult> {
    train_with_observer(config, |_, _, _, _| {})
}

/// Training loop with a per-epoch callback receiving the 0-based epoch, the
/// losses evaluated before the step, the coefficient after the step, and the
/// updated parameters.
pub fn train_with_observer(
    config: &TrainConfig,
    mut observer: impl FnMut(usize, &LossBreakdown, f64, &MlpParams),
) -> Result<RunResult> {
    config.validate()?;
    let start = Instant::now();
    let bounds = DomainBounds::default();
    let data = generate_training_data(config)?;
    let colloc = lhs_sample(
        config.n_f,
        &bounds,
        &mut stream_rng(config.seed, STREAM_COLLOCATION),
    )?;
    let mut params = xavier_init(
        &config.topology,
        &mut stream_rng(config.seed, STREAM_INIT),
    )?
    .with_beta(config.beta_init);
    let mut adam = AdamState::new(&params);

    let mut beta_history = Vec::with_capacity(config.epochs);
    let mut loss_history = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let (loss, grads) = loss_and_gradient(
            &params,
            &data.noisy,
            &colloc,
            config.lambda_data,
            config.lambda_physics,
        )?;
        if !(loss.data_loss.is_finite()
            && loss.physics_loss.is_finite()
            && loss.total_loss.is_finite())
        {
            return Err(Error::NonFiniteLoss {
                epoch,
                data_loss: loss.data_loss,
                physics_loss: loss.physics_loss,
            });
        }
        adam_step(&mut params, &grads, &mut adam, config.learning_rate)?;
        loss_history.push(loss);
        beta_history.push(params.beta);
        observer(epoch, &loss, params.beta, &params);
    }

    let beta_final = params.beta;
    let relative_error_percent = crate::experiments::relative_error(beta_final, config.beta_true)?;
    Ok(RunResult {
        params,
        beta_final,
        beta_history,
        loss_history,
        relative_error_percent,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}
