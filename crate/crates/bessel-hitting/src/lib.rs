//! Monte Carlo simulation of the first time a Bessel process of real
//! dimension delta >= 1 hits a level L, together with the analytic and
//! discretization oracles used to validate the sampler.
//!
//! The sampler walks a Markov chain of exactly-sampled boundary hitting
//! events: each step races the hitting times of two image-method boundaries
//! that share a common horizon, one of dimension floor(delta) restarted at
//! the current position and one of dimension delta - floor(delta) started
//! at zero, and recombines the two squared components through the
//! additivity of squared Bessel processes. The walk stops once
//! L^2 - M^2 <= epsilon, after a number of steps growing like |log eps|.
//!
//! Modules:
//! - [`special`]: log-gamma, I_nu, J_nu and its zeros (power series only)
//! - [`rng`]: seedable, splittable, draw-counted randomness primitives
//! - [`boundary`]: the curved boundary psi_(a,delta) and its exact samplers
//! - [`walk`]: the iterative two-clock algorithm itself
//! - [`oracles`]: independent ground truth (Laplace transform, tail series,
//!   squared-Bessel marginals, Euler discretization, quadrature CDFs)
//! - [`stats`]: KS tests, confidence intervals, histograms
//! - [`experiment`]: replicated experiment tables
//! - [`report`]: CSV/JSON encodings of experiment tables
//! - [`acceptance`]: the end-to-end validation suite

pub mod acceptance;
pub mod boundary;
pub mod error;
pub mod experiment;
pub mod oracles;
pub mod report;
pub mod rng;
pub mod special;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
