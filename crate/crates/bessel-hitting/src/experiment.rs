//! Replicated experiment tables: hitting-time samples, histograms, step
//! counts versus epsilon / dimension / level, and random-draw counts.
//!
//! Every experiment runs aleph independent replications, one split stream
//! per replication, reduced in replication order, so a table is a pure
//! function of (config, seed) no matter how rayon schedules the work.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::stats::{histogram, mean_ci};
use crate::walk::{self, BesselDim, PassageSample, WalkConfig};

/// Coverage multiplier for all confidence-interval columns (95% normal).
pub const CI_Z: f64 = 1.96;

/// Reproducibility header attached to every table.
#[derive(Clone, Debug, Serialize)]
pub struct RunMeta {
    pub artifact: String,
    pub experiment: String,
    pub seed: u64,
    /// Config echo as key = value pairs.
    pub config: Vec<(String, String)>,
}

/// A rectangular, all-numeric result table.
#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub meta: RunMeta,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Shared experiment parameters; each runner reads the fields it needs.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub deltas: Vec<f64>,
    pub levels: Vec<f64>,
    pub gamma: f64,
    pub epsilon: f64,
    /// aleph, the number of independent replications per cell.
    pub replications: u64,
    pub seed: u64,
    pub fast_first_step: bool,
    pub start: f64,
    /// steps-vs-eps sweeps epsilon_k = 0.5^k for k = 1..=k_max.
    pub k_max: u32,
    /// Histogram bin count.
    pub bins: usize,
    /// Fixed-ratio mode of steps-vs-level: epsilon = ratio * level.
    pub eps_over_level: f64,
    /// Step cap per replication.
    pub max_steps: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            deltas: vec![2.2],
            levels: vec![5.0],
            gamma: walk::DEFAULT_GAMMA,
            epsilon: 0.01,
            replications: 1000,
            seed: 0,
            fast_first_step: false,
            start: 0.0,
            k_max: 15,
            bins: 30,
            eps_over_level: 0.01,
            max_steps: walk::DEFAULT_MAX_STEPS,
        }
    }
}

impl ExperimentConfig {
    fn walk_config(&self, delta: f64, level: f64, epsilon: f64) -> Result<WalkConfig> {
        let mut cfg = WalkConfig::new(BesselDim::new(delta)?, level, self.gamma, epsilon)?;
        cfg.start = self.start;
        cfg.use_fast_first_step = self.fast_first_step;
        cfg.max_steps = self.max_steps;
        cfg.validate()?;
        Ok(cfg)
    }

    fn base_echo(&self) -> Vec<(String, String)> {
        vec![
            ("deltas".into(), join_floats(&self.deltas)),
            ("levels".into(), join_floats(&self.levels)),
            ("gamma".into(), self.gamma.to_string()),
            ("epsilon".into(), self.epsilon.to_string()),
            ("replications".into(), self.replications.to_string()),
            ("fast_first_step".into(), self.fast_first_step.to_string()),
            ("start".into(), self.start.to_string()),
        ]
    }

    fn meta(&self, experiment: &str) -> RunMeta {
        RunMeta {
            artifact: format!("bessel-hitting {}", env!("CARGO_PKG_VERSION")),
            experiment: experiment.to_string(),
            seed: self.seed,
            config: self.base_echo(),
        }
    }

    fn require_nonempty(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be >= 1".into()));
        }
        if self.deltas.is_empty() || self.levels.is_empty() {
            return Err(Error::Config("need at least one delta and one level".into()));
        }
        Ok(())
    }
}

fn join_floats(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Run `reps` replications of `f`, each with its own stream split from
/// `seed`, in parallel, collecting results in replication order.
pub fn replicate<T, F>(seed: u64, reps: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut RngStream) -> T + Sync,
{
    let mut master = RngStream::new(seed);
    let streams: Vec<RngStream> = (0..reps).map(|_| master.split()).collect();
    streams.into_par_iter().enumerate().map(|(i, mut stream)| f(i as u64, &mut stream)).collect()
}

/// One walk per replication; sampler errors are recorded, not fatal. The
/// step-limit error still carries a usable partial sample, which is kept.
fn replicated_walks(cfg: &WalkConfig, seed: u64, reps: u64) -> Vec<Result<PassageSample>> {
    replicate(seed, reps, |_, stream| walk::run(cfg, stream))
}

struct CellStats {
    mean_steps: f64,
    ci_steps: f64,
    mean_int: f64,
    ci_int: f64,
    mean_prop: f64,
    ci_prop: f64,
    failures: u64,
    samples: Vec<PassageSample>,
}

fn summarize(outcomes: Vec<Result<PassageSample>>) -> CellStats {
    let mut samples = Vec::with_capacity(outcomes.len());
    let mut failures = 0u64;
    for o in outcomes {
        match o {
            Ok(s) => samples.push(s),
            Err(Error::StepLimit { partial }) => {
                failures += 1;
                samples.push(*partial);
            }
            Err(_) => failures += 1,
        }
    }
    let steps: Vec<f64> = samples.iter().map(|s| s.steps as f64).collect();
    let ints: Vec<f64> = samples.iter().map(|s| s.steps_integer as f64).collect();
    let props: Vec<f64> = samples
        .iter()
        .filter(|s| s.steps > 0)
        .map(|s| s.steps_integer as f64 / s.steps as f64)
        .collect();
    let (mean_steps, ci_steps) = mean_ci(&steps, CI_Z).unwrap_or((f64::NAN, f64::NAN));
    let (mean_int, ci_int) = mean_ci(&ints, CI_Z).unwrap_or((f64::NAN, f64::NAN));
    let (mean_prop, ci_prop) = mean_ci(&props, CI_Z).unwrap_or((f64::NAN, f64::NAN));
    CellStats { mean_steps, ci_steps, mean_int, ci_int, mean_prop, ci_prop, failures, samples }
}

/// Raw per-replication samples for every (delta, level) pair.
pub fn run_sample(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.require_nonempty()?;
    let columns = [
        "delta",
        "level",
        "replication",
        "theta",
        "m_final",
        "steps",
        "steps_integer",
        "draws",
        "error",
    ];
    let mut rows = Vec::new();
    let mut cell_seed = RngStream::new(cfg.seed);
    for &delta in &cfg.deltas {
        for &level in &cfg.levels {
            let wcfg = cfg.walk_config(delta, level, cfg.epsilon)?;
            let outcomes = replicated_walks(&wcfg, cell_seed.split().seed(), cfg.replications);
            for (i, o) in outcomes.into_iter().enumerate() {
                let (s, err) = match o {
                    Ok(s) => (s, 0.0),
                    Err(Error::StepLimit { partial }) => (*partial, 1.0),
                    Err(_) => (
                        PassageSample {
                            theta: 0.0,
                            m_final: 0.0,
                            steps: 0,
                            steps_integer: 0,
                            draws: 0,
                        },
                        1.0,
                    ),
                };
                rows.push(vec![
                    delta,
                    level,
                    i as f64,
                    s.theta,
                    s.m_final,
                    s.steps as f64,
                    s.steps_integer as f64,
                    s.draws as f64,
                    err,
                ]);
            }
        }
    }
    Ok(Table { meta: cfg.meta("sample"), columns: to_strings(&columns), rows })
}

/// Histogram of hitting times per (delta, level), binned over [0, max].
pub fn run_hist(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.require_nonempty()?;
    if cfg.bins == 0 {
        return Err(Error::Config("bins must be >= 1".into()));
    }
    let columns = ["delta", "level", "bin_lo", "bin_hi", "count"];
    let mut rows = Vec::new();
    let mut cell_seed = RngStream::new(cfg.seed);
    for &delta in &cfg.deltas {
        for &level in &cfg.levels {
            let wcfg = cfg.walk_config(delta, level, cfg.epsilon)?;
            let stats =
                summarize(replicated_walks(&wcfg, cell_seed.split().seed(), cfg.replications));
            let thetas: Vec<f64> = stats.samples.iter().map(|s| s.theta).collect();
            let hi = thetas.iter().cloned().fold(0.0, f64::max);
            let counts = histogram(&thetas, cfg.bins, (0.0, hi));
            let width = hi / cfg.bins as f64;
            for (b, &count) in counts.iter().enumerate() {
                rows.push(vec![
                    delta,
                    level,
                    b as f64 * width,
                    (b + 1) as f64 * width,
                    count as f64,
                ]);
            }
        }
    }
    Ok(Table { meta: cfg.meta("hist"), columns: to_strings(&columns), rows })
}

/// Mean step counts over the grid epsilon_k = 0.5^k, k = 1..=k_max, for
/// every delta; one aleph-replication cell per row.
pub fn run_steps_vs_eps(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.require_nonempty()?;
    let level = cfg.levels[0];
    let columns = [
        "delta",
        "k",
        "epsilon",
        "mean_steps",
        "ci_steps",
        "mean_steps_integer",
        "ci_steps_integer",
        "failures",
    ];
    let mut rows = Vec::new();
    let mut cell_seed = RngStream::new(cfg.seed);
    for &delta in &cfg.deltas {
        for k in 1..=cfg.k_max {
            let epsilon = 0.5_f64.powi(k as i32);
            let wcfg = cfg.walk_config(delta, level, epsilon)?;
            let stats =
                summarize(replicated_walks(&wcfg, cell_seed.split().seed(), cfg.replications));
            rows.push(vec![
                delta,
                k as f64,
                epsilon,
                stats.mean_steps,
                stats.ci_steps,
                stats.mean_int,
                stats.ci_int,
                stats.failures as f64,
            ]);
        }
    }
    Ok(Table { meta: cfg.meta("steps-vs-eps"), columns: to_strings(&columns), rows })
}

/// Mean steps and integer-step proportion across a dimension grid.
pub fn run_steps_vs_dim(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.require_nonempty()?;
    let level = cfg.levels[0];
    let columns =
        ["delta", "mean_steps", "ci_steps", "mean_proportion", "ci_proportion", "failures"];
    let mut rows = Vec::new();
    let mut cell_seed = RngStream::new(cfg.seed);
    for &delta in &cfg.deltas {
        let wcfg = cfg.walk_config(delta, level, cfg.epsilon)?;
        let stats = summarize(replicated_walks(&wcfg, cell_seed.split().seed(), cfg.replications));
        rows.push(vec![
            delta,
            stats.mean_steps,
            stats.ci_steps,
            stats.mean_prop,
            stats.ci_prop,
            stats.failures as f64,
        ]);
    }
    Ok(Table { meta: cfg.meta("steps-vs-dim"), columns: to_strings(&columns), rows })
}

/// Mean steps across a level grid, in two modes per row: fixed epsilon and
/// fixed epsilon/level ratio; each carries its position-gap bound
/// eps/(2 level).
pub fn run_steps_vs_level(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.require_nonempty()?;
    let columns = [
        "delta",
        "level",
        "mean_steps_fixed_eps",
        "ci_fixed_eps",
        "gap_bound_fixed_eps",
        "mean_steps_fixed_ratio",
        "ci_fixed_ratio",
        "gap_bound_fixed_ratio",
        "failures",
    ];
    let mut rows = Vec::new();
    let mut cell_seed = RngStream::new(cfg.seed);
    for &delta in &cfg.deltas {
        for &level in &cfg.levels {
            let fixed = summarize(replicated_walks(
                &cfg.walk_config(delta, level, cfg.epsilon)?,
                cell_seed.split().seed(),
                cfg.replications,
            ));
            let ratio_eps = cfg.eps_over_level * level;
            let ratio = summarize(replicated_walks(
                &cfg.walk_config(delta, level, ratio_eps)?,
                cell_seed.split().seed(),
                cfg.replications,
            ));
            rows.push(vec![
                delta,
                level,
                fixed.mean_steps,
                fixed.ci_steps,
                cfg.epsilon / (2.0 * level),
                ratio.mean_steps,
                ratio.ci_steps,
                ratio_eps / (2.0 * level),
                (fixed.failures + ratio.failures) as f64,
            ]);
        }
    }
    Ok(Table { meta: cfg.meta("steps-vs-level"), columns: to_strings(&columns), rows })
}

/// Per-replication (steps, draws) scatter from the counted streams.
pub fn run_rng_count(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.require_nonempty()?;
    let level = cfg.levels[0];
    let columns = ["delta", "replication", "steps", "draws", "error"];
    let mut rows = Vec::new();
    let mut cell_seed = RngStream::new(cfg.seed);
    for &delta in &cfg.deltas {
        let wcfg = cfg.walk_config(delta, level, cfg.epsilon)?;
        let outcomes = replicated_walks(&wcfg, cell_seed.split().seed(), cfg.replications);
        for (i, o) in outcomes.into_iter().enumerate() {
            let (s, err) = match o {
                Ok(s) => (s, 0.0),
                Err(Error::StepLimit { partial }) => (*partial, 1.0),
                Err(_) => (
                    PassageSample {
                        theta: 0.0,
                        m_final: 0.0,
                        steps: 0,
                        steps_integer: 0,
                        draws: 0,
                    },
                    1.0,
                ),
            };
            rows.push(vec![delta, i as f64, s.steps as f64, s.draws as f64, err]);
        }
    }
    Ok(Table { meta: cfg.meta("rng-count"), columns: to_strings(&columns), rows })
}

fn to_strings(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}
