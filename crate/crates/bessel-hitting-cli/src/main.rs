//! Command-line experiment runner for the Bessel hitting-time sampler.
//!
//! One subcommand per experiment, plus `validate` for the acceptance suite.
//! Settings resolve in three layers: per-command defaults, then a
//! `key = value` config file (`--config`), then explicit flags.
//!
//! Exit codes: 0 ok, 1 validation failure, 2 configuration error,
//! 3 numeric error.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bessel_hitting::acceptance;
use bessel_hitting::experiment::{self, ExperimentConfig, Table};
use bessel_hitting::report;
use bessel_hitting::Error;

#[derive(Parser)]
#[command(
    name = "bessel-hitting",
    version,
    about = "Monte Carlo sampler and experiments for Bessel hitting times"
)]
struct Cli {
    /// Config file with `key = value` lines (keys match the long flags);
    /// explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(flatten)]
    common: CommonArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Bessel dimension(s) delta >= 1, comma separated.
    #[arg(long, global = true, value_delimiter = ',', value_name = "LIST")]
    delta: Option<Vec<f64>>,

    /// Level(s) L > 0 to hit, comma separated.
    #[arg(long, global = true, value_delimiter = ',', value_name = "LIST")]
    level: Option<Vec<f64>>,

    /// Step-size parameter in (0, 1).
    #[arg(long, global = true)]
    gamma: Option<f64>,

    /// Stopping threshold on L^2 - M^2.
    #[arg(long, global = true)]
    eps: Option<f64>,

    /// Number of independent replications per cell.
    #[arg(long, global = true)]
    reps: Option<u64>,

    /// Master seed; every table is a pure function of (config, seed).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Use the simplified (exact, unproven-convergence) first step from 0.
    #[arg(long, global = true)]
    fast_first_step: bool,

    /// Starting position in [0, L).
    #[arg(long, global = true)]
    start: Option<f64>,

    /// Step cap per replication.
    #[arg(long, global = true)]
    max_steps: Option<u64>,

    /// Output path (stdout when omitted).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output encoding.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Raw per-replication samples (theta, position, steps, draws).
    Sample,
    /// Histogram of hitting times.
    Hist {
        /// Number of uniform bins over [0, max theta].
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Mean steps over the grid eps_k = 0.5^k, k = 1..=k_max.
    StepsVsEps {
        #[arg(long)]
        k_max: Option<u32>,
    },
    /// Mean steps and integer-step proportion over a dimension grid.
    StepsVsDim,
    /// Mean steps over a level grid, fixed eps and fixed eps/L modes.
    StepsVsLevel {
        /// Ratio for the fixed eps/L mode.
        #[arg(long)]
        eps_over_level: Option<f64>,
    },
    /// Per-replication (steps, draws) scatter from the counted streams.
    RngCount,
    /// Run the acceptance suite and emit a machine-readable report.
    Validate {
        /// Run only these criteria (e.g. A1,A5); all when omitted.
        #[arg(long, value_delimiter = ',', value_name = "IDS")]
        only: Option<Vec<String>>,
    },
}

enum AppError {
    Config(String),
    Numeric(String),
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Domain(_) => AppError::Config(e.to_string()),
            other => AppError::Numeric(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(AppError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Numeric(msg)) => {
            eprintln!("numeric error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, AppError> {
    let file = match &cli.config {
        Some(path) => parse_config_file(path)?,
        None => HashMap::new(),
    };
    let settings = Settings::resolve(&cli.common, &file, &cli.command)?;

    if let Command::Validate { only } = &cli.command {
        return run_validate(&settings, only.as_deref());
    }

    let cfg = settings.experiment_config();
    let table = match &cli.command {
        Command::Sample => experiment::run_sample(&cfg)?,
        Command::Hist { .. } => experiment::run_hist(&cfg)?,
        Command::StepsVsEps { .. } => experiment::run_steps_vs_eps(&cfg)?,
        Command::StepsVsDim => experiment::run_steps_vs_dim(&cfg)?,
        Command::StepsVsLevel { .. } => experiment::run_steps_vs_level(&cfg)?,
        Command::RngCount => experiment::run_rng_count(&cfg)?,
        Command::Validate { .. } => unreachable!(),
    };
    emit(&settings, encode_table(&table, settings.format))?;
    Ok(ExitCode::SUCCESS)
}

fn encode_table(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => report::to_csv(table),
        Format::Json => report::to_json(table),
    }
}

fn run_validate(settings: &Settings, only: Option<&[String]>) -> Result<ExitCode, AppError> {
    let selected = match only {
        None => acceptance::run_all(settings.seed),
        Some(ids) => acceptance::run_subset(settings.seed, ids)?,
    };
    let all_pass = selected.iter().all(|o| o.pass);
    let text = match settings.format {
        Format::Csv => {
            let mut out = String::from("id,pass,title,detail\n");
            for o in &selected {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    o.id,
                    o.pass,
                    csv_quote(o.title),
                    csv_quote(&o.detail)
                );
            }
            out
        }
        Format::Json => {
            let items: Vec<String> = selected
                .iter()
                .map(|o| {
                    format!(
                        "{{\"id\":{},\"pass\":{},\"title\":{},\"detail\":{}}}",
                        json_string(o.id),
                        o.pass,
                        json_string(o.title),
                        json_string(&o.detail)
                    )
                })
                .collect();
            format!("[\n  {}\n]\n", items.join(",\n  "))
        }
    };
    emit(settings, text)?;
    for o in &selected {
        eprintln!("{} {} — {}", o.id, if o.pass { "PASS" } else { "FAIL" }, o.title);
    }
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn emit(settings: &Settings, text: String) -> Result<(), AppError> {
    match &settings.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| AppError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Fully resolved run settings.
struct Settings {
    deltas: Vec<f64>,
    levels: Vec<f64>,
    gamma: f64,
    epsilon: f64,
    replications: u64,
    seed: u64,
    fast_first_step: bool,
    start: f64,
    max_steps: u64,
    k_max: u32,
    bins: usize,
    eps_over_level: f64,
    out: Option<PathBuf>,
    format: Format,
}

/// Per-command defaults (dimension sets, epsilon and replication counts
/// follow the experiment write-ups).
struct Defaults {
    deltas: &'static [f64],
    levels: &'static [f64],
    epsilon: f64,
    replications: u64,
}

fn defaults_for(command: &Command) -> Defaults {
    match command {
        Command::Sample | Command::Validate { .. } => {
            Defaults { deltas: &[2.7], levels: &[5.0], epsilon: 0.01, replications: 1000 }
        }
        Command::Hist { .. } => {
            Defaults { deltas: &[1.5, 7.5], levels: &[5.0], epsilon: 1e-3, replications: 1000 }
        }
        Command::StepsVsEps { .. } => {
            Defaults { deltas: &[2.2, 4.7], levels: &[5.0], epsilon: 0.01, replications: 1000 }
        }
        Command::StepsVsDim => Defaults {
            deltas: &[2.1, 2.3, 2.5, 2.7, 2.9, 3.1, 3.3, 3.5, 3.7, 3.9, 4.1, 4.3, 4.5, 4.7, 4.9],
            levels: &[5.0],
            epsilon: 0.01,
            replications: 100,
        },
        Command::StepsVsLevel { .. } => Defaults {
            deltas: &[3.8, 5.2],
            levels: &[2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0],
            epsilon: 0.01,
            replications: 1000,
        },
        Command::RngCount => {
            Defaults { deltas: &[2.5, 4.8], levels: &[5.0], epsilon: 0.01, replications: 1000 }
        }
    }
}

impl Settings {
    fn resolve(
        flags: &CommonArgs,
        file: &HashMap<String, String>,
        command: &Command,
    ) -> Result<Self, AppError> {
        let d = defaults_for(command);
        let known_keys = [
            "delta",
            "level",
            "gamma",
            "eps",
            "reps",
            "seed",
            "fast-first-step",
            "start",
            "max-steps",
            "out",
            "format",
            "k-max",
            "bins",
            "eps-over-level",
        ];
        for key in file.keys() {
            if !known_keys.contains(&key.as_str()) {
                return Err(AppError::Config(format!("unknown config key `{key}`")));
            }
        }

        let (k_max_flag, bins_flag, ratio_flag) = match command {
            Command::StepsVsEps { k_max } => (*k_max, None, None),
            Command::Hist { bins } => (None, *bins, None),
            Command::StepsVsLevel { eps_over_level } => (None, None, *eps_over_level),
            _ => (None, None, None),
        };

        Ok(Settings {
            deltas: pick_list(flags.delta.clone(), file, "delta", d.deltas)?,
            levels: pick_list(flags.level.clone(), file, "level", d.levels)?,
            gamma: pick(flags.gamma, file, "gamma", bessel_hitting::walk::DEFAULT_GAMMA)?,
            epsilon: pick(flags.eps, file, "eps", d.epsilon)?,
            replications: pick(flags.reps, file, "reps", d.replications)?,
            seed: pick(
                flags.seed,
                file,
                "seed",
                if matches!(command, Command::Validate { .. }) {
                    acceptance::REFERENCE_SEED
                } else {
                    0
                },
            )?,
            fast_first_step: flags.fast_first_step || pick(None, file, "fast-first-step", false)?,
            start: pick(flags.start, file, "start", 0.0)?,
            max_steps: pick(
                flags.max_steps,
                file,
                "max-steps",
                bessel_hitting::walk::DEFAULT_MAX_STEPS,
            )?,
            k_max: pick(k_max_flag, file, "k-max", 15)?,
            bins: pick(bins_flag, file, "bins", 30)?,
            eps_over_level: pick(ratio_flag, file, "eps-over-level", 0.01)?,
            out: flags.out.clone().or_else(|| file.get("out").map(PathBuf::from)),
            format: match flags.format {
                Some(f) => f,
                None => match file.get("format").map(String::as_str) {
                    None => Format::Csv,
                    Some("csv") => Format::Csv,
                    Some("json") => Format::Json,
                    Some(other) => {
                        return Err(AppError::Config(format!("unknown format `{other}`")))
                    }
                },
            },
        })
    }

    fn experiment_config(&self) -> ExperimentConfig {
        ExperimentConfig {
            deltas: self.deltas.clone(),
            levels: self.levels.clone(),
            gamma: self.gamma,
            epsilon: self.epsilon,
            replications: self.replications,
            seed: self.seed,
            fast_first_step: self.fast_first_step,
            start: self.start,
            max_steps: self.max_steps,
            k_max: self.k_max,
            bins: self.bins,
            eps_over_level: self.eps_over_level,
        }
    }
}

fn pick<T: std::str::FromStr>(
    flag: Option<T>,
    file: &HashMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, AppError> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match file.get(key) {
        Some(raw) => raw
            .parse()
            .map_err(|_| AppError::Config(format!("config key `{key}`: cannot parse `{raw}`"))),
        None => Ok(default),
    }
}

fn pick_list(
    flag: Option<Vec<f64>>,
    file: &HashMap<String, String>,
    key: &str,
    default: &[f64],
) -> Result<Vec<f64>, AppError> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match file.get(key) {
        Some(raw) => raw
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| AppError::Config(format!("config key `{key}`: bad number `{s}`")))
            })
            .collect(),
        None => Ok(default.to_vec()),
    }
}

fn parse_config_file(path: &PathBuf) -> Result<HashMap<String, String>, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(AppError::Config(format!(
                "{}:{}: expected `key = value`",
                path.display(),
                lineno + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}
