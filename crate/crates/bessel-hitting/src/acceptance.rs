//! End-to-end validation suite: nine criteria covering the sampler against
//! every independent oracle in the crate (analytic Laplace transforms,
//! closed forms, quadrature CDFs, squared-Bessel additivity), the hard path
//! invariants, the step-count growth law, and the step-parameter algebra.
//!
//! Each criterion is deterministic given its seed; [`run_all`] derives one
//! sub-seed per criterion from a master seed so the whole suite is a pure
//! function of that one number. The suite is wired both into the
//! `acceptance` integration test and the CLI `validate` subcommand.

use crate::boundary::{Boundary, REJECTION_CAP};
use crate::error::Error;
use crate::experiment::{replicate, run_steps_vs_eps, ExperimentConfig};
use crate::oracles::{besq_marginal_from_zero, empirical_laplace, laplace_hitting_exact, quad};
use crate::rng::RngStream;
use crate::stats::{ks_one_sample, ks_two_sample, mean_ci};
use crate::walk::{advance, integer_dimension_run, run, BesselDim, WalkConfig, WalkState};

/// Seed the shipped validation runs use; any seed must pass in expectation,
/// this one is pinned so the suite is reproducible bit for bit.
pub const REFERENCE_SEED: u64 = 20170;

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub id: &'static str,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CriterionOutcome {
    fn new(id: &'static str, title: &'static str, pass: bool, detail: String) -> Self {
        Self { id, title, pass, detail }
    }
}

type CriterionFn = fn(u64) -> CriterionOutcome;

const CRITERIA: [(&str, CriterionFn); 9] = [
    ("A1", a1_laplace_noninteger),
    ("A2", a2_integer_closed_forms),
    ("A3", a3_step_growth),
    ("A4", a4_path_invariants),
    ("A5", a5_hitting_time_sampler),
    ("A6", a6_position_sampler),
    ("A7", a7_besq_additivity),
    ("A8", a8_dimension_ordering),
    ("A9", a9_step_parameter_identities),
];

/// Identifiers of all criteria, in execution order.
pub fn criterion_ids() -> Vec<&'static str> {
    CRITERIA.iter().map(|(id, _)| *id).collect()
}

// Sub-seed for the criterion at a given position: the same derivation is
// used whether the suite runs whole or filtered, so a criterion's outcome
// is identical either way.
fn sub_seeds(seed: u64) -> [u64; 9] {
    let mut master = RngStream::new(seed);
    let mut seeds = [0u64; 9];
    for s in &mut seeds {
        *s = master.split().seed();
    }
    seeds
}

/// Run the full suite. One criterion per entry, in order A1..A9.
pub fn run_all(seed: u64) -> Vec<CriterionOutcome> {
    let seeds = sub_seeds(seed);
    CRITERIA.iter().zip(seeds).map(|((_, f), s)| f(s)).collect()
}

/// Run a subset of criteria by id (case-insensitive). Unknown ids error.
pub fn run_subset(seed: u64, ids: &[String]) -> crate::Result<Vec<CriterionOutcome>> {
    let seeds = sub_seeds(seed);
    let mut selected = Vec::new();
    for id in ids {
        let wanted = id.to_uppercase();
        match CRITERIA.iter().position(|(cid, _)| *cid == wanted) {
            Some(pos) => selected.push(CRITERIA[pos].1(seeds[pos])),
            None => return Err(Error::Config(format!("unknown criterion {id}"))),
        }
    }
    Ok(selected)
}

/// A1: empirical Laplace transform of the walk at non-integer dimensions
/// against the exact I_nu ratio, three dimensions x three rates, 1e5 runs,
/// within 3 standard errors plus a 0.5% bias allowance (Theta <= tau_L).
pub fn a1_laplace_noninteger(seed: u64) -> CriterionOutcome {
    const RUNS: u64 = 100_000;
    let lambdas = [0.05, 0.2, 0.5];
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut detail = String::new();
    let mut pass = true;
    let mut seeder = RngStream::new(seed);
    for delta in [1.5, 2.7, 4.2] {
        let cfg = match WalkConfig::new(BesselDim::new(delta).unwrap(), 2.0, 0.95, 1e-4) {
            Ok(c) => c,
            Err(e) => return CriterionOutcome::new("A1", TITLE_A1, false, e.to_string()),
        };
        let cell_seed = seeder.split().seed();
        let thetas: Vec<f64> =
            replicate(cell_seed, RUNS, |_, stream| run(&cfg, stream).map(|s| s.theta))
                .into_iter()
                .collect::<Result<_, _>>()
                .unwrap_or_default();
        if thetas.len() != RUNS as usize {
            return CriterionOutcome::new("A1", TITLE_A1, false, "walk errors".into());
        }
        for lambda in lambdas {
            let (emp, se) = empirical_laplace(&thetas, lambda).unwrap();
            let exact = laplace_hitting_exact(lambda, 0.0, 2.0, delta).unwrap();
            let tol = 3.0 * se + 0.005 * exact;
            let gap = (emp - exact).abs();
            worst = worst.max(gap / tol);
            if gap > tol {
                pass = false;
                detail.push_str(&format!(
                    "delta={delta} lambda={lambda}: |{emp:.6} - {exact:.6}| > {tol:.2e}; "
                ));
            }
        }
    }
    if pass {
        detail = format!("9 cells within 3se + 0.5%; worst margin used {:.0}%", 100.0 * worst);
    }
    CriterionOutcome::new("A1", TITLE_A1, pass, detail)
}
const TITLE_A1: &str = "Laplace-transform correctness, non-integer dimensions";

/// A2: integer-dimension walk against the closed forms 1/cosh(1) (delta=1)
/// and 1/sinh(1) (delta=3) at lambda = 0.5, L = 1, eps = 1e-5.
pub fn a2_integer_closed_forms(seed: u64) -> CriterionOutcome {
    const RUNS: u64 = 100_000;
    let mut seeder = RngStream::new(seed);
    let mut pass = true;
    let mut detail = String::new();
    for (delta, closed_form) in [(1.0, 0.648_054_273_663_885_4), (3.0, 0.850_918_128_239_321_5)] {
        let cfg = WalkConfig::new(BesselDim::new(delta).unwrap(), 1.0, 0.95, 1e-5).unwrap();
        let cell_seed = seeder.split().seed();
        let thetas: Vec<f64> = replicate(cell_seed, RUNS, |_, stream| {
            integer_dimension_run(&cfg, stream).map(|s| s.theta)
        })
        .into_iter()
        .collect::<Result<_, _>>()
        .unwrap_or_default();
        if thetas.len() != RUNS as usize {
            return CriterionOutcome::new("A2", TITLE_A2, false, "walk errors".into());
        }
        let (emp, se) = empirical_laplace(&thetas, 0.5).unwrap();
        let tol = 3.0 * se + 0.005 * closed_form;
        let gap = (emp - closed_form).abs();
        if gap > tol {
            pass = false;
        }
        detail.push_str(&format!("delta={delta}: {emp:.6} vs {closed_form:.6} (tol {tol:.1e}); "));
    }
    CriterionOutcome::new("A2", TITLE_A2, pass, detail)
}
const TITLE_A2: &str = "Closed-form transforms at delta = 1 and 3";

/// A3: mean step count over eps_k = 0.5^k, k = 1..15 (delta 2.2, L 5,
/// gamma 0.95, 1000 replications per point): non-decreasing in k, and
/// mean(15)/15 bounded by three times the incremental slope over k = 8..15.
pub fn a3_step_growth(seed: u64) -> CriterionOutcome {
    let cfg = ExperimentConfig {
        deltas: vec![2.2],
        levels: vec![5.0],
        gamma: 0.95,
        replications: 1000,
        seed,
        k_max: 15,
        ..Default::default()
    };
    let table = match run_steps_vs_eps(&cfg) {
        Ok(t) => t,
        Err(e) => return CriterionOutcome::new("A3", TITLE_A3, false, e.to_string()),
    };
    let means: Vec<f64> = table.rows.iter().map(|r| r[3]).collect();
    let monotone = means.windows(2).all(|w| w[1] >= w[0]);
    let per_k = means[14] / 15.0;
    let slope = (means[14] - means[7]) / 7.0;
    let linear_ok = per_k <= 3.0 * slope;
    let pass = monotone && linear_ok;
    CriterionOutcome::new(
        "A3",
        TITLE_A3,
        pass,
        format!(
            "monotone={monotone}; mean(15)/15 = {per_k:.2} vs 3*slope(8..15) = {:.2}",
            3.0 * slope
        ),
    )
}
const TITLE_A3: &str = "Step count grows like |log eps|";

/// A4: 1e4 full walks at the Fig.-1 parameters (delta 2.7, gamma 0.9, L 5,
/// eps 1e-3) with zero violations of M(n) < L, of the per-step contraction
/// M(n)^2 <= M(n-1)^2 + gamma (L^2 - M(n-1)^2), and of the terminal
/// condition. The contraction comparison carries a 1e-12 relative slack for
/// last-ulp rounding of the bound itself; the inequalities are exact in
/// real arithmetic with margins many orders larger.
// the negated comparison is deliberate: a NaN position must count as a
// violation, and `m >= level` would let it slip through
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn a4_path_invariants(seed: u64) -> CriterionOutcome {
    const RUNS: u64 = 10_000;
    let cfg = WalkConfig::new(BesselDim::new(2.7).unwrap(), 5.0, 0.9, 1e-3).unwrap();
    let level_sq = cfg.level * cfg.level;
    let violations: u64 = replicate(seed, RUNS, |_, stream| {
        let mut bad = 0u64;
        let mut state = WalkState::at_position(0.0);
        while level_sq - state.r > cfg.epsilon {
            let next = match advance(&state, &cfg, stream) {
                Ok(n) => n,
                Err(_) => return 1,
            };
            let bound = state.r + cfg.gamma * (level_sq - state.r);
            if !(next.m < cfg.level) || next.r > bound * (1.0 + 1e-12) {
                bad += 1;
            }
            state = next;
        }
        if level_sq - state.r > cfg.epsilon {
            bad += 1;
        }
        bad
    })
    .into_iter()
    .sum();
    CriterionOutcome::new(
        "A4",
        TITLE_A4,
        violations == 0,
        format!("{violations} violations over {RUNS} runs"),
    )
}
const TITLE_A4: &str = "Hard path invariants on 1e4 full walks";

/// A5: KS (1%) of 1e4 boundary hitting-time draws against the quadrature
/// CDF of the density, for delta in {0.7, 1.0, 2.7} with unit horizon.
pub fn a5_hitting_time_sampler(seed: u64) -> CriterionOutcome {
    let mut seeder = RngStream::new(seed);
    let mut pass = true;
    let mut detail = String::new();
    for delta in [0.7, 1.0, 2.7] {
        let boundary = Boundary::from_horizon(1.0, delta).unwrap();
        let mut stream = seeder.split();
        let draws: Vec<f64> = (0..10_000).map(|_| boundary.sample_tau_psi(&mut stream)).collect();
        let ks = ks_one_sample(&draws, |t| quad::tau_psi_cdf(&boundary, t)).unwrap();
        if !ks.pass {
            pass = false;
        }
        detail.push_str(&format!(
            "delta={delta}: D={:.4} (crit {:.4}); ",
            ks.statistic, ks.critical_1pct
        ));
    }
    CriterionOutcome::new("A5", TITLE_A5, pass, detail)
}
const TITLE_A5: &str = "Exact hitting-time sampler vs quadrature CDF (KS 1%)";

/// A6: KS (1%) of 1e4 conditioned-position draws (the reference rejection
/// sampler with the power envelope) against the quadrature CDF of w(t, .)
/// at t = T/e, same dimension set.
pub fn a6_position_sampler(seed: u64) -> CriterionOutcome {
    let mut seeder = RngStream::new(seed);
    let mut pass = true;
    let mut detail = String::new();
    for delta in [0.7, 1.0, 2.7] {
        let boundary = Boundary::from_horizon(1.0, delta).unwrap();
        let t = boundary.horizon() / std::f64::consts::E;
        let mut stream = seeder.split();
        let draws: Result<Vec<f64>, Error> = (0..10_000)
            .map(|_| boundary.sample_position_given_survival(t, &mut stream, REJECTION_CAP))
            .collect();
        let draws = match draws {
            Ok(d) => d,
            Err(e) => return CriterionOutcome::new("A6", TITLE_A6, false, e.to_string()),
        };
        let ks = ks_one_sample(&draws, |x| quad::position_cdf(&boundary, t, x)).unwrap();
        if !ks.pass {
            pass = false;
        }
        detail.push_str(&format!(
            "delta={delta}: D={:.4} (crit {:.4}); ",
            ks.statistic, ks.critical_1pct
        ));
    }
    CriterionOutcome::new("A6", TITLE_A6, pass, detail)
}
const TITLE_A6: &str = "Conditioned-position rejection sampler vs quadrature CDF (KS 1%)";

/// A7: two-sample KS (1%) between sums of independent BESQ(2) + BESQ(0.7)
/// marginals and direct BESQ(2.7) marginals at t = 1, 1e4 pairs.
pub fn a7_besq_additivity(seed: u64) -> CriterionOutcome {
    let mut stream = RngStream::new(seed);
    let (delta, t) = (2.7_f64, 1.0);
    let floor = delta.floor();
    let frac = delta - floor;
    let sums: Vec<f64> = (0..10_000)
        .map(|_| {
            besq_marginal_from_zero(t, floor, &mut stream)
                + besq_marginal_from_zero(t, frac, &mut stream)
        })
        .collect();
    let direct: Vec<f64> =
        (0..10_000).map(|_| besq_marginal_from_zero(t, delta, &mut stream)).collect();
    let ks = ks_two_sample(&sums, &direct).unwrap();
    CriterionOutcome::new(
        "A7",
        TITLE_A7,
        ks.pass,
        format!("D={:.4} (crit {:.4})", ks.statistic, ks.critical_1pct),
    )
}
const TITLE_A7: &str = "Squared-Bessel additivity in law (two-sample KS 1%)";

/// A8: dimension ordering of hitting times: mean Theta at delta = 1.5
/// exceeds mean Theta at delta = 7.5 by more than 3 combined standard
/// errors (L 5, eps 1e-3, gamma 0.9, 1e3 runs each).
pub fn a8_dimension_ordering(seed: u64) -> CriterionOutcome {
    const RUNS: u64 = 1000;
    let mut seeder = RngStream::new(seed);
    let mut cells = Vec::new();
    for delta in [1.5, 7.5] {
        let cfg = WalkConfig::new(BesselDim::new(delta).unwrap(), 5.0, 0.9, 1e-3).unwrap();
        let cell_seed = seeder.split().seed();
        let thetas: Vec<f64> =
            replicate(cell_seed, RUNS, |_, stream| run(&cfg, stream).map(|s| s.theta))
                .into_iter()
                .collect::<Result<_, _>>()
                .unwrap_or_default();
        if thetas.len() != RUNS as usize {
            return CriterionOutcome::new("A8", TITLE_A8, false, "walk errors".into());
        }
        cells.push(mean_ci(&thetas, 1.0).unwrap());
    }
    let (slow, slow_se) = cells[0];
    let (fast, fast_se) = cells[1];
    let sep = (slow - fast) / (slow_se * slow_se + fast_se * fast_se).sqrt();
    CriterionOutcome::new(
        "A8",
        TITLE_A8,
        sep > 3.0,
        format!("mean(1.5)={slow:.2}, mean(7.5)={fast:.2}, separation {sep:.1} se"),
    )
}
const TITLE_A8: &str = "Higher dimension hits sooner (3-sigma separation)";

/// A9: step-parameter identities on 1e3 random (delta, gamma, L, m):
/// shared horizon T_alpha = T_beta = s and the peak identity
/// (sqrt(x) + W_int)^2 + W_frac^2 = x + gamma (L^2 - x), both to 1e-10
/// relative.
pub fn a9_step_parameter_identities(seed: u64) -> CriterionOutcome {
    let mut rng = RngStream::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let delta = 1.0 + 7.0 * rng.uniform();
        let gamma = 0.05 + 0.9 * rng.uniform();
        let level = 0.5 + 9.5 * rng.uniform();
        let m = 0.999 * level * rng.uniform();
        let dim = BesselDim::new(delta).unwrap();
        let p = crate::walk::step_params(dim, gamma, level, m);
        let b_int = Boundary::new(p.alpha, dim.floor_part() as f64).unwrap();
        worst = worst.max((b_int.horizon() - p.s).abs() / p.s);
        let w_frac = match p.beta {
            Some(beta) => {
                let b_frac = Boundary::new(beta, dim.frac_part()).unwrap();
                worst = worst.max((b_frac.horizon() - p.s).abs() / p.s);
                b_frac.peak()
            }
            None => 0.0,
        };
        let x = m * m;
        let lhs = (m + b_int.peak()).powi(2) + w_frac * w_frac;
        let rhs = x + gamma * (level * level - x);
        worst = worst.max((lhs - rhs).abs() / rhs);
    }
    CriterionOutcome::new(
        "A9",
        TITLE_A9,
        worst <= 1e-10,
        format!("worst relative defect {worst:.2e} over 1000 draws (tol 1e-10)"),
    )
}
const TITLE_A9: &str = "Step-parameter horizon and peak identities (1e-10)";
