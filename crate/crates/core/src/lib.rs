//! Recovery of the nonlinear coefficient of the one-dimensional nonlinear
//! Schrödinger equation from sparse, noisy measurements of its field.
//!
//! A small fully connected network maps `(x, t)` to the real and imaginary
//! field components. Training balances two mean-square terms: misfit against
//! measured samples, and the governing-equation residual at collocation
//! points, evaluated with exact network derivatives. The unknown coefficient
//! enters the residual as a trainable scalar and is recovered jointly with
//! the network weights.

pub mod autodiff;
pub mod error;
pub mod experiments;
pub mod io;
pub mod mat;
pub mod model;
pub mod optim;
pub mod physics;
pub mod sampling;

pub use error::{Error, Result};
