//! Governing equation, reference solution, and measurement noise.
//!
//! The field is the complex solution `psi = u + i v` of
//!
//! ```text
//! i psi_t + 0.5 psi_xx + beta |psi|^2 psi = 0
//! ```
//!
//! split into real residuals
//!
//! ```text
//! f_u = u_t + 0.5 v_xx + beta (u^2 + v^2) v
//! f_v = v_t - 0.5 u_xx - beta (u^2 + v^2) u
//! ```
//!
//! The reference solution used to generate data is the bright soliton
//! `psi(x, t) = sech(x) exp(i t / 2) / sqrt(beta)`, which satisfies the
//! equation exactly for any positive `beta`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::autodiff::Jet;
use crate::error::{Error, Result};
use crate::model::NetworkJet;

/// One measurement of the field at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub x: f64,
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

/// Residuals of the governing equation at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub f_u: f64,
    pub f_v: f64,
}

/// Real and imaginary parts of the reference solution.
pub fn exact_solution(beta: f64, x: f64, t: f64) -> Result<(f64, f64)> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::NonPositiveBeta(beta));
    }
    let amp = beta.sqrt().recip();
    let sech = x.cosh().recip();
    let phase = 0.5 * t;
    Ok((amp * sech * phase.cos(), amp * sech * phase.sin()))
}

/// Reference solution with analytically hand-coded derivative channels.
///
/// Uses `sech' = -sech tanh` and `sech'' = sech (1 - 2 sech^2)`; the time
/// factor `exp(i t / 2)` differentiates to a quarter rotation at rate 1/2.
pub fn exact_solution_jet(beta: f64, x: f64, t: f64) -> Result<NetworkJet> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::NonPositiveBeta(beta));
    }
    let amp = beta.sqrt().recip();
    let sech = x.cosh().recip();
    let tanh = x.tanh();
    let sech_x = -sech * tanh;
    let sech_xx = sech * (1.0 - 2.0 * sech * sech);
    let c = (0.5 * t).cos();
    let s = (0.5 * t).sin();
    Ok(NetworkJet {
        u: amp * sech * c,
        v: amp * sech * s,
        u_x: amp * sech_x * c,
        v_x: amp * sech_x * s,
        u_t: -0.5 * amp * sech * s,
        v_t: 0.5 * amp * sech * c,
        u_xx: amp * sech_xx * c,
        v_xx: amp * sech_xx * s,
    })
}

/// Governing-equation residuals for a field jet under coefficient `beta`.
pub fn residuals(jet: &NetworkJet, beta: f64) -> Residual {
    let amp2 = jet.u * jet.u + jet.v * jet.v;
    Residual {
        f_u: jet.u_t + 0.5 * jet.v_xx + beta * amp2 * jet.v,
        f_v: jet.v_t - 0.5 * jet.u_xx - beta * amp2 * jet.u,
    }
}

/// Adjoint of [`residuals`]: maps residual cotangents `(fbar_u, fbar_v)` to
/// cotangents of the two output jets and the coefficient.
///
/// The residuals read the value, d/dt, and d2/dx2 channels only, so the
/// d/dx cotangent is always zero. Value-channel terms come from the cubic
/// nonlinearity: with `A = u^2 + v^2`,
///
/// ```text
/// df_u/du = 2 beta u v          df_u/dv = beta (A + 2 v^2)
/// df_v/du = -beta (A + 2 u^2)   df_v/dv = -2 beta u v
/// ```
pub(crate) fn residual_adjoint(
    jet: &NetworkJet,
    beta: f64,
    fbar_u: f64,
    fbar_v: f64,
) -> (Jet, Jet, f64) {
    let (u, v) = (jet.u, jet.v);
    let amp2 = u * u + v * v;
    let cot_u = Jet {
        value: fbar_u * (2.0 * beta * u * v) - fbar_v * (beta * (amp2 + 2.0 * u * u)),
        d_dx: 0.0,
        d_dt: fbar_u,
        d2_dx2: -0.5 * fbar_v,
    };
    let cot_v = Jet {
        value: fbar_u * (beta * (amp2 + 2.0 * v * v)) - fbar_v * (2.0 * beta * u * v),
        d_dx: 0.0,
        d_dt: fbar_v,
        d2_dx2: 0.5 * fbar_u,
    };
    let beta_bar = fbar_u * amp2 * v - fbar_v * amp2 * u;
    (cot_u, cot_v, beta_bar)
}

/// Population standard deviation of the u and v components of a sample set.
pub fn component_stds(samples: &[FieldSample]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let n = samples.len() as f64;
    let (mut mean_u, mut mean_v) = (0.0, 0.0);
    for s in samples {
        mean_u += s.u;
        mean_v += s.v;
    }
    mean_u /= n;
    mean_v /= n;
    let (mut var_u, mut var_v) = (0.0, 0.0);
    for s in samples {
        var_u += (s.u - mean_u) * (s.u - mean_u);
        var_v += (s.v - mean_v) * (s.v - mean_v);
    }
    Ok(((var_u / n).sqrt(), (var_v / n).sqrt()))
}

/// Additive Gaussian noise scaled to a fraction of each component's spread.
///
/// Each component is perturbed by `level * sigma * xi` where `sigma` is that
/// component's population standard deviation over the clean set and `xi` a
/// standard normal draw; u and v get independent draws, u first. A level of
/// zero returns the samples unchanged without consuming randomness.
pub fn add_noise(
    samples: &[FieldSample],
    level: f64,
    rng: &mut impl Rng,
) -> Result<Vec<FieldSample>> {
    if level.is_nan() || level < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "noise level must be nonnegative, got {level}"
        )));
    }
    if level == 0.0 {
        return Ok(samples.to_vec());
    }
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let (sigma_u, sigma_v) = component_stds(samples)?;
    Ok(samples
        .iter()
        .map(|s| {
            let xi_u: f64 = rng.sample(StandardNormal);
            let xi_v: f64 = rng.sample(StandardNormal);
            FieldSample {
                x: s.x,
                t: s.t,
                u: s.u + level * sigma_u * xi_u,
                v: s.v + level * sigma_v * xi_v,
            }
        })
        .collect())
}
