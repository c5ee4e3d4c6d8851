//! Domain geometry, seeded point generation, and evaluation grids.
//!
//! All randomness flows through one master seed fanned out to fixed
//! per-purpose stream ids, so changing how many points one consumer draws
//! never shifts the values another consumer sees.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Stream id for network weight initialization.
pub const STREAM_INIT: u64 = 0;
/// Stream id for training sample locations.
pub const STREAM_TRAIN_POINTS: u64 = 1;
/// Stream id for measurement noise.
pub const STREAM_NOISE: u64 = 2;
/// Stream id for collocation points.
pub const STREAM_COLLOCATION: u64 = 3;
/// Stream id for finite-difference baseline noise.
pub const STREAM_FD_NOISE: u64 = 4;

/// Generator for one purpose, decoupled from all other streams of the same
/// master seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Rectangular space-time domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainBounds {
    pub x_min: f64,
    pub x_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl Default for DomainBounds {
    /// The solution domain of the recovery problem:
    /// `x` in `[-5, 5]`, `t` in `[0, pi/2]`.
    fn default() -> Self {
        Self {
            x_min: -5.0,
            x_max: 5.0,
            t_min: 0.0,
            t_max: std::f64::consts::FRAC_PI_2,
        }
    }
}

impl DomainBounds {
    pub fn new(x_min: f64, x_max: f64, t_min: f64, t_max: f64) -> Result<Self> {
        if !(x_min < x_max && t_min < t_max) {
            return Err(Error::InvalidConfig(format!(
                "degenerate domain [{x_min}, {x_max}] x [{t_min}, {t_max}]"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            t_min,
            t_max,
        })
    }

    pub fn contains(&self, x: f64, t: f64) -> bool {
        x >= self.x_min && x <= self.x_max && t >= self.t_min && t <= self.t_max
    }

    pub fn x_span(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn t_span(&self) -> f64 {
        self.t_max - self.t_min
    }
}

/// Points where the governing-equation residual is penalized.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationSet {
    points: Vec<(f64, f64)>,
}

impl CollocationSet {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Latin hypercube draw of `n` points.
///
/// Each dimension is split into `n` equal strata holding exactly one
/// coordinate, placed uniformly inside its stratum; an independent shuffle
/// per dimension decouples the pairing.
pub fn lhs_sample(n: usize, bounds: &DomainBounds, rng: &mut impl Rng) -> Result<CollocationSet> {
    if n == 0 {
        return Err(Error::ZeroSampleCount);
    }
    let stratified = |rng: &mut dyn rand::RngCore, lo: f64, span: f64| -> Vec<f64> {
        let mut vals: Vec<f64> = (0..n)
            .map(|k| lo + span * ((k as f64 + rng.random::<f64>()) / n as f64))
            .collect();
        vals.shuffle(rng);
        vals
    };
    let xs = stratified(rng, bounds.x_min, bounds.x_span());
    let ts = stratified(rng, bounds.t_min, bounds.t_span());
    Ok(CollocationSet {
        points: xs.into_iter().zip(ts).collect(),
    })
}

/// Independent uniform draw of `n` measurement locations, x before t per
/// point.
pub fn draw_training_points(
    n: usize,
    bounds: &DomainBounds,
    rng: &mut impl Rng,
) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(Error::ZeroSampleCount);
    }
    Ok((0..n)
        .map(|_| {
            let x = rng.random_range(bounds.x_min..bounds.x_max);
            let t = rng.random_range(bounds.t_min..bounds.t_max);
            (x, t)
        })
        .collect())
}

/// Endpoint-inclusive uniform grid, time-major: all x at the first time,
/// then all x at the second, and so on.
pub fn evaluation_grid(nx: usize, nt: usize, bounds: &DomainBounds) -> Result<Vec<(f64, f64)>> {
    let needed = 2;
    for got in [nx, nt] {
        if got < needed {
            return Err(Error::GridTooSmall { needed, got });
        }
    }
    let mut points = Vec::with_capacity(nx * nt);
    for j in 0..nt {
        let t = bounds.t_min + bounds.t_span() * (j as f64 / (nt - 1) as f64);
        for i in 0..nx {
            let x = bounds.x_min + bounds.x_span() * (i as f64 / (nx - 1) as f64);
            points.push((x, t));
        }
    }
    Ok(points)
}
