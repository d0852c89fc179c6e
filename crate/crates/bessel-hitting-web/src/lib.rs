//! Browser demo bindings: plot-ready data for the static page in `www/`.
//!
//! Three interactive views are exposed: the curved boundary and its
//! hitting-time density, a hitting-time sampler with its analytic Laplace
//! cross-check, and raw walk paths. Everything returns flat `Vec<f64>`
//! buffers (interleaved coordinates) so the page can feed them straight to
//! a canvas; errors surface as strings.
//!
//! The same functions compile and run on the host, which is how they are
//! tested.

use wasm_bindgen::prelude::*;

use bessel_hitting::boundary::{phi, Boundary};
use bessel_hitting::experiment::replicate;
use bessel_hitting::oracles::{empirical_laplace, laplace_hitting_exact};
use bessel_hitting::rng::RngStream;
use bessel_hitting::stats::mean_ci;
use bessel_hitting::walk::{advance, run, BesselDim, WalkConfig, WalkState};

fn err_str(e: bessel_hitting::Error) -> String {
    e.to_string()
}

fn walk_config(delta: f64, level: f64, gamma: f64, eps: f64) -> Result<WalkConfig, String> {
    let dim = BesselDim::new(delta).map_err(err_str)?;
    WalkConfig::new(dim, level, gamma, eps).map_err(err_str)
}

/// [horizon, peak, argmax time] of the boundary psi_(a,delta).
#[wasm_bindgen]
pub fn boundary_info(a: f64, delta: f64) -> Result<Vec<f64>, String> {
    let b = Boundary::new(a, delta).map_err(err_str)?;
    Ok(vec![b.horizon(), b.peak(), b.horizon() / std::f64::consts::E])
}

/// Interleaved (t, psi(t)) samples of the boundary on [0, horizon].
#[wasm_bindgen]
pub fn boundary_curve(a: f64, delta: f64, points: usize) -> Result<Vec<f64>, String> {
    let b = Boundary::new(a, delta).map_err(err_str)?;
    let n = points.max(2);
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let t = b.horizon() * i as f64 / (n - 1) as f64;
        out.push(t);
        out.push(b.psi(t).map_err(err_str)?);
    }
    Ok(out)
}

/// Interleaved (t, density) samples of the hitting-time law of the boundary.
#[wasm_bindgen]
pub fn hitting_density_curve(a: f64, delta: f64, points: usize) -> Result<Vec<f64>, String> {
    let b = Boundary::new(a, delta).map_err(err_str)?;
    let n = points.max(2);
    let mut out = Vec::with_capacity(2 * n);
    for i in 1..=n {
        let t = b.horizon() * i as f64 / n as f64;
        out.push(t);
        out.push(b.tau_psi_density(t).map_err(err_str)?);
    }
    Ok(out)
}

/// `n` independent approximate hitting times Theta for the given walk
/// parameters, one split stream per replication.
#[wasm_bindgen]
pub fn sample_hitting_times(
    delta: f64,
    level: f64,
    gamma: f64,
    eps: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let cfg = walk_config(delta, level, gamma, eps)?;
    replicate(seed, n as u64, |_, stream| run(&cfg, stream).map(|s| s.theta))
        .into_iter()
        .collect::<Result<Vec<f64>, _>>()
        .map_err(err_str)
}

/// Summary of a sampling run:
/// [mean theta, ci95, mean steps, ci95, mean draws, empirical Laplace at
/// lambda, its standard error, exact Laplace at lambda (NaN outside the
/// series-safe regime)].
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn sample_summary(
    delta: f64,
    level: f64,
    gamma: f64,
    eps: f64,
    lambda: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let cfg = walk_config(delta, level, gamma, eps)?;
    let samples = replicate(seed, n as u64, |_, stream| run(&cfg, stream))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(err_str)?;
    let thetas: Vec<f64> = samples.iter().map(|s| s.theta).collect();
    let steps: Vec<f64> = samples.iter().map(|s| s.steps as f64).collect();
    let draws: Vec<f64> = samples.iter().map(|s| s.draws as f64).collect();
    let (mean_theta, ci_theta) = mean_ci(&thetas, 1.96).map_err(err_str)?;
    let (mean_steps, ci_steps) = mean_ci(&steps, 1.96).map_err(err_str)?;
    let (mean_draws, _) = mean_ci(&draws, 1.96).map_err(err_str)?;
    let (emp, se) = empirical_laplace(&thetas, lambda).map_err(err_str)?;
    let exact = laplace_hitting_exact(lambda, cfg.start, level, delta).unwrap_or(f64::NAN);
    Ok(vec![mean_theta, ci_theta, mean_steps, ci_steps, mean_draws, emp, se, exact])
}

/// One walk path as interleaved (Theta_n, M(n)) pairs, starting at (0, 0).
#[wasm_bindgen]
pub fn walk_path(
    delta: f64,
    level: f64,
    gamma: f64,
    eps: f64,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let cfg = walk_config(delta, level, gamma, eps)?;
    let mut stream = RngStream::new(seed);
    let mut state = WalkState::at_position(cfg.start);
    let mut out = vec![state.theta_total, state.m];
    let level_sq = level * level;
    while level_sq - state.r > eps {
        if state.n >= cfg.max_steps {
            return Err("step cap exceeded".into());
        }
        state = advance(&state, &cfg, &mut stream).map_err(err_str)?;
        out.push(state.theta_total);
        out.push(state.m);
    }
    Ok(out)
}

/// Shape profile Phi on [0, 1], for the scaling overlay.
#[wasm_bindgen]
pub fn phi_curve(points: usize) -> Vec<f64> {
    let n = points.max(2);
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let u = i as f64 / (n - 1) as f64;
        out.push(u);
        out.push(phi(u));
    }
    out
}
