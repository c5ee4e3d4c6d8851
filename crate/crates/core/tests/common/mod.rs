//! Helpers shared by the integration test targets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nlse_pinn::model::{xavier_init, MlpParams};
use nlse_pinn::optim::{loss_and_gradient, total_loss};
use nlse_pinn::physics::{exact_solution, FieldSample};
use nlse_pinn::sampling::{draw_training_points, lhs_sample, CollocationSet, DomainBounds};

/// A small random training state derived entirely from one seed: network
/// with 1 to 3 hidden layers of width 1 to 8, a handful of measured samples
/// and collocation points, random loss weights, and a random coefficient.
pub struct RandomState {
    pub params: MlpParams,
    pub samples: Vec<FieldSample>,
    pub colloc: CollocationSet,
    pub lambda_data: f64,
    pub lambda_physics: f64,
}

pub fn random_state(seed: u64) -> RandomState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let depth = rng.random_range(1..=3);
    let mut topology = vec![2usize];
    for _ in 0..depth {
        topology.push(rng.random_range(1..=8));
    }
    topology.push(2);
    let params = xavier_init(&topology, &mut rng)
        .unwrap()
        .with_beta(rng.random_range(-1.5..1.5));

    let bounds = DomainBounds::default();
    let n_samples = rng.random_range(2..=6);
    let points = draw_training_points(n_samples, &bounds, &mut rng).unwrap();
    let samples = points
        .into_iter()
        .map(|(x, t)| {
            let (u, v) = exact_solution(1.0, x, t).unwrap();
            FieldSample { x, t, u, v }
        })
        .collect();
    let n_colloc = rng.random_range(2..=8);
    let colloc = lhs_sample(n_colloc, &bounds, &mut rng).unwrap();

    RandomState {
        params,
        samples,
        colloc,
        lambda_data: rng.random_range(0.1..2.0),
        lambda_physics: rng.random_range(0.1..2.0),
    }
}

/// Worst relative deviation between the analytic gradient and a central
/// finite difference of the total loss, over every parameter slot including
/// the coefficient. Relative to `max(1, |gradient|)`.
pub fn max_gradient_fd_deviation(state: &RandomState, h: f64) -> f64 {
    let (_, grads) = loss_and_gradient(
        &state.params,
        &state.samples,
        &state.colloc,
        state.lambda_data,
        state.lambda_physics,
    )
    .unwrap();
    let flat = grads.to_flat();
    let mut worst: f64 = 0.0;
    for (idx, &grad) in flat.iter().enumerate() {
        let mut plus = state.params.clone();
        plus.set_flat(idx, state.params.get_flat(idx) + h);
        let mut minus = state.params.clone();
        minus.set_flat(idx, state.params.get_flat(idx) - h);
        let lp = total_loss(
            &plus,
            &state.samples,
            &state.colloc,
            state.lambda_data,
            state.lambda_physics,
        )
        .unwrap()
        .total_loss;
        let lm = total_loss(
            &minus,
            &state.samples,
            &state.colloc,
            state.lambda_data,
            state.lambda_physics,
        )
        .unwrap()
        .total_loss;
        let fd = (lp - lm) / (2.0 * h);
        let rel = (grad - fd).abs() / grad.abs().max(1.0);
        worst = worst.max(rel);
    }
    worst
}

/// Worst relative deviation of the derivative channels from central
/// differences of the forward values at random domain points. Returns
/// `(first_order, second_order)` deviations, each relative to
/// `max(1, |channel|)`.
pub fn max_jet_fd_deviation(params: &MlpParams, seed: u64, n_points: usize) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst1: f64 = 0.0;
    let mut worst2: f64 = 0.0;
    for _ in 0..n_points {
        let x = rng.random_range(-4.5..4.5);
        let t = rng.random_range(0.05..1.5);
        let jet = params.forward_with_derivatives(x, t);

        let h1 = 1e-6;
        let (uxp, vxp) = params.forward(x + h1, t);
        let (uxm, vxm) = params.forward(x - h1, t);
        let (utp, vtp) = params.forward(x, t + h1);
        let (utm, vtm) = params.forward(x, t - h1);
        for (analytic, fd) in [
            (jet.u_x, (uxp - uxm) / (2.0 * h1)),
            (jet.v_x, (vxp - vxm) / (2.0 * h1)),
            (jet.u_t, (utp - utm) / (2.0 * h1)),
            (jet.v_t, (vtp - vtm) / (2.0 * h1)),
        ] {
            worst1 = worst1.max((analytic - fd).abs() / analytic.abs().max(1.0));
        }

        let h2 = 1e-4;
        let (u0, v0) = params.forward(x, t);
        let (uxp2, vxp2) = params.forward(x + h2, t);
        let (uxm2, vxm2) = params.forward(x - h2, t);
        for (analytic, fd) in [
            (jet.u_xx, (uxp2 - 2.0 * u0 + uxm2) / (h2 * h2)),
            (jet.v_xx, (vxp2 - 2.0 * v0 + vxm2) / (h2 * h2)),
        ] {
            worst2 = worst2.max((analytic - fd).abs() / analytic.abs().max(1.0));
        }
    }
    (worst1, worst2)
}
