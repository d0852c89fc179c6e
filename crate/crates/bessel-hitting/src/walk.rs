//! The iterative two-clock walk that samples the first hitting time of a
//! level L by a Bessel process of real dimension delta >= 1.
//!
//! One step from position m < L builds two image-method boundaries sharing a
//! common horizon s (chosen so the step cannot overshoot L):
//!
//! ```text
//! s = e * (gamma (L^2 - m^2) / (sqrt(fl*m^2 + delta*g) + sqrt(fl*m^2)))^2,
//! g = gamma (L^2 - m^2),  fl = floor(delta),
//! ```
//!
//! one of dimension floor(delta) for the Brownian-norm component started at
//! m, one of dimension delta' = delta - floor(delta) for an independent
//! component started at 0. The two boundary hitting times are raced; the
//! loser's component is sampled at the winning time conditioned on survival,
//! and the squared position recombines through the additivity of squared
//! Bessel processes:
//!
//! ```text
//! theta = theta1 < theta2:  r' = xi'^2 + m^2 + 2 m pi1 psi_int(theta) + psi_int(theta)^2
//! theta = theta2 < theta1:  r' = psi_frac(theta)^2 + m^2 + 2 m pi1 xi + xi^2
//! ```
//!
//! with pi1 the first coordinate of a uniform direction in R^floor(delta)
//! and the conditional positions drawn exactly by rejection (see
//! [`Boundary::sample_position_given_survival_auto`]).
//! The shared horizon makes (m + W_int)^2 + W_frac^2 = m^2 + gamma (L^2 -
//! m^2), so every step keeps the chain strictly below L. The walk stops at
//! the first step with L^2 - M^2 <= epsilon.

use crate::boundary::Boundary;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::special::log_gamma;

/// Default walk parameter gamma (the step-size factor close to 1).
pub const DEFAULT_GAMMA: f64 = 0.95;

/// Default cap on the number of steps; small fractional parts can make the
/// expected step count huge, and a cap turns a hang into a diagnosable error.
pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;

/// Default rejection cap used by the walk. The regime-switching conditional
/// sampler keeps the acceptance rate bounded away from zero (worst ~0.08
/// for delta <= 8), so the cap only trips on genuinely degenerate inputs.
pub const DEFAULT_WALK_REJECTION_CAP: u64 = 1_000_000;

/// A real dimension delta >= 1 with its cached integer and fractional parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselDim {
    delta: f64,
    floor_part: u32,
    frac_part: f64,
}

impl BesselDim {
    pub fn new(delta: f64) -> Result<Self> {
        if !delta.is_finite() || delta < 1.0 {
            return Err(Error::Domain(format!("dimension must be >= 1, got {delta}")));
        }
        let floor = delta.floor();
        Ok(Self { delta, floor_part: floor as u32, frac_part: delta - floor })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// floor(delta) >= 1.
    pub fn floor_part(&self) -> u32 {
        self.floor_part
    }

    /// delta' = delta - floor(delta) in [0, 1).
    pub fn frac_part(&self) -> f64 {
        self.frac_part
    }

    pub fn is_integer(&self) -> bool {
        self.frac_part == 0.0
    }
}

/// Walk parameters. `epsilon >= level^2` is allowed and simply stops the
/// walk immediately (zero steps).
#[derive(Clone, Copy, Debug)]
pub struct WalkConfig {
    pub dim: BesselDim,
    pub level: f64,
    pub gamma: f64,
    pub epsilon: f64,
    /// Starting position in [0, level). The algorithm restarts every step
    /// from an arbitrary interior position, so a nonzero start is the
    /// natural generalization of starting at the origin.
    pub start: f64,
    /// Replace the first step from 0 by a single draw from the full-delta
    /// boundary (exact in law, but without a step-count guarantee; off by
    /// default).
    pub use_fast_first_step: bool,
    pub max_steps: u64,
    /// Iteration cap for the per-step conditional-position rejection loops.
    pub rejection_cap: u64,
}

impl WalkConfig {
    pub fn new(dim: BesselDim, level: f64, gamma: f64, epsilon: f64) -> Result<Self> {
        let cfg = Self {
            dim,
            level,
            gamma,
            epsilon,
            start: 0.0,
            use_fast_first_step: false,
            max_steps: DEFAULT_MAX_STEPS,
            rejection_cap: DEFAULT_WALK_REJECTION_CAP,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.level.is_finite() || self.level <= 0.0 {
            return Err(Error::Config(format!("level must be > 0, got {}", self.level)));
        }
        if !self.gamma.is_finite() || self.gamma <= 0.0 || self.gamma >= 1.0 {
            return Err(Error::Config(format!("gamma must lie in (0, 1), got {}", self.gamma)));
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::Config(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if !self.start.is_finite() || self.start < 0.0 || self.start >= self.level {
            return Err(Error::Config(format!("start must lie in [0, level), got {}", self.start)));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be >= 1".into()));
        }
        if self.rejection_cap == 0 {
            return Err(Error::Config("rejection_cap must be >= 1".into()));
        }
        Ok(())
    }
}

/// Chain state after n completed steps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkState {
    /// Completed steps.
    pub n: u64,
    /// Accumulated time Theta_n.
    pub theta_total: f64,
    /// Position M(n) < L.
    pub m: f64,
    /// Cached squared position R(n) = M(n)^2.
    pub r: f64,
    /// Steps won by the integer clock (theta1 <= theta2).
    pub n_integer: u64,
}

impl WalkState {
    pub fn at_position(x: f64) -> Self {
        Self { n: 0, theta_total: 0.0, m: x, r: x * x, n_integer: 0 }
    }
}

/// Outcome of a completed walk.
#[derive(Clone, Debug, PartialEq)]
pub struct PassageSample {
    /// Approximate hitting time Theta at stopping.
    pub theta: f64,
    /// Final position, with level^2 - m_final^2 <= epsilon.
    pub m_final: f64,
    /// Number of steps.
    pub steps: u64,
    /// Steps in which the integer clock rang first.
    pub steps_integer: u64,
    /// Uniform variates consumed by the whole run.
    pub draws: u64,
}

/// Per-step parameters: the shared horizon `s` and the image parameters of
/// the two boundaries. `beta` is absent for integer dimensions, where the
/// fractional clock (and its peak) degenerate to zero and the identity
/// (m + W_int)^2 = m^2 + gamma (L^2 - m^2) closes on its own.
#[derive(Clone, Copy, Debug)]
pub struct StepParams {
    pub s: f64,
    pub alpha: f64,
    pub beta: Option<f64>,
}

/// Image parameter giving a boundary of dimension `dim` the horizon
/// `horizon`: a = Gamma(dim/2) 2^(dim/2-1) horizon^(dim/2).
fn image_param_for_horizon(dim: f64, horizon: f64) -> f64 {
    let half = 0.5 * dim;
    (log_gamma(half).expect("dimension > 0")
        + (half - 1.0) * std::f64::consts::LN_2
        + half * horizon.ln())
    .exp()
}

/// Step parameters from position `m`, solving
/// (sqrt(x) + W_int)^2 + W_frac^2 = x + gamma (L^2 - x) with x = m^2 under
/// the constraint that both boundaries share the horizon s.
pub fn step_params(dim: BesselDim, gamma: f64, level: f64, m: f64) -> StepParams {
    let x = m * m;
    let shrink = gamma * (level * level - x);
    let fl = dim.floor_part as f64;
    // (fl - delta gamma) x + delta gamma L^2, written without cancellation
    let radicand = fl * x + dim.delta * shrink;
    assert!(radicand >= 0.0 && shrink > 0.0, "step_params needs m < level and gamma < 1");
    let denom = radicand.sqrt() + (fl * x).sqrt();
    let s = std::f64::consts::E * (shrink / denom).powi(2);
    let alpha = image_param_for_horizon(fl, s);
    let beta =
        if dim.frac_part > 0.0 { Some(image_param_for_horizon(dim.frac_part, s)) } else { None };
    StepParams { s, alpha, beta }
}

/// One step of the chain. Consumes, in order: the integer clock, the
/// fractional clock, the surviving component's position (rejection loop),
/// and the sphere coordinate. Ties between the clocks (probability zero,
/// possible in floating point) go to the integer branch.
pub fn advance(state: &WalkState, cfg: &WalkConfig, stream: &mut RngStream) -> Result<WalkState> {
    let params = step_params(cfg.dim, cfg.gamma, cfg.level, state.m);
    let floor = cfg.dim.floor_part();
    let b_int = Boundary::from_horizon(params.s, floor as f64)?;

    // A clock can land exactly on the shared horizon when the Gamma draw
    // underflows; the surviving component's conditional law degenerates to
    // the point 0 there (its boundary has closed), so take that limit
    // instead of sampling.
    let survivor_position = |b: &Boundary, t: f64, stream: &mut RngStream| -> Result<f64> {
        if t >= params.s {
            Ok(0.0)
        } else {
            b.sample_position_given_survival_auto(t, stream, cfg.rejection_cap)
        }
    };

    let (theta, r_new, integer_step) = if cfg.dim.frac_part() > 0.0 {
        let b_frac = Boundary::from_horizon(params.s, cfg.dim.frac_part())?;
        let theta1 = b_int.sample_tau_psi(stream);
        let theta2 = b_frac.sample_tau_psi(stream);
        if theta1 <= theta2 {
            let xi = survivor_position(&b_frac, theta1, stream)?;
            let pi1 = stream.sphere_first_coordinate(floor)?;
            let psi = b_int.psi(theta1)?;
            (theta1, xi * xi + state.r + 2.0 * state.m * pi1 * psi + psi * psi, true)
        } else {
            let xi = survivor_position(&b_int, theta2, stream)?;
            let pi1 = stream.sphere_first_coordinate(floor)?;
            let psi = b_frac.psi(theta2)?;
            (theta2, psi * psi + state.r + 2.0 * state.m * pi1 * xi + xi * xi, false)
        }
    } else {
        // integer dimension: only the floor(delta) = delta clock exists
        let theta = b_int.sample_tau_psi(stream);
        let pi1 = stream.sphere_first_coordinate(floor)?;
        let psi = b_int.psi(theta)?;
        (theta, state.r + 2.0 * state.m * pi1 * psi + psi * psi, true)
    };

    // exact cancellation of m against the cross term can leave an O(ulp)
    // negative sum
    let r_new = r_new.max(0.0);
    Ok(WalkState {
        n: state.n + 1,
        theta_total: state.theta_total + theta,
        m: r_new.sqrt(),
        r: r_new,
        n_integer: state.n_integer + integer_step as u64,
    })
}

/// Run the walk to completion: iterate [`advance`] until
/// L^2 - M^2 <= epsilon, or fail with [`Error::StepLimit`] carrying the
/// partial sample once `max_steps` is exceeded.
///
/// With `use_fast_first_step` and a zero start, the first step instead draws
/// the hitting time of a single full-delta boundary with horizon
/// e*gamma*L^2/delta and places the chain on the boundary there; the step is
/// exact but counts toward neither clock.
pub fn run(cfg: &WalkConfig, stream: &mut RngStream) -> Result<PassageSample> {
    cfg.validate()?;
    let draws_at_start = stream.draw_count();
    let level_sq = cfg.level * cfg.level;
    let mut state = WalkState::at_position(cfg.start);

    if cfg.use_fast_first_step && cfg.start == 0.0 && level_sq - state.r > cfg.epsilon {
        let s = std::f64::consts::E * cfg.gamma * level_sq / cfg.dim.delta();
        let boundary = Boundary::from_horizon(s, cfg.dim.delta())?;
        let theta = boundary.sample_tau_psi(stream);
        let m = boundary.psi(theta)?;
        state = WalkState { n: 1, theta_total: theta, m, r: m * m, n_integer: 0 };
    }

    while level_sq - state.r > cfg.epsilon {
        if state.n >= cfg.max_steps {
            return Err(Error::StepLimit {
                partial: Box::new(to_sample(&state, stream.draw_count() - draws_at_start)),
            });
        }
        state = advance(&state, cfg, stream)?;
    }
    Ok(to_sample(&state, stream.draw_count() - draws_at_start))
}

/// The walk restricted to integer dimensions, where every step uses only the
/// single delta-dimensional clock. Errors unless `frac_part == 0`.
pub fn integer_dimension_run(cfg: &WalkConfig, stream: &mut RngStream) -> Result<PassageSample> {
    if !cfg.dim.is_integer() {
        return Err(Error::Domain(format!(
            "integer_dimension_run needs an integer dimension, got {}",
            cfg.dim.delta()
        )));
    }
    run(cfg, stream)
}

fn to_sample(state: &WalkState, draws: u64) -> PassageSample {
    PassageSample {
        theta: state.theta_total,
        m_final: state.m,
        steps: state.n,
        steps_integer: state.n_integer,
        draws,
    }
}
