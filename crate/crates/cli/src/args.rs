//! Argument structures and the config-file merge.
//!
//! Every flag can also be supplied through `--config FILE`, a flat JSON
//! object whose keys are the flag names (dashes or underscores); explicit
//! command-line values win.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::usage_error;

#[derive(Parser)]
#[command(
    name = "paritytrack",
    version,
    about = "Passive error tracking of the three-qubit bit-flip code under continuous parity measurement"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run a trial ensemble for one filter and fit the fidelity decay.
    Simulate(SimulateArgs),
    /// Numerically optimize filter parameters over the 10%-drop time.
    Optimize(OptimizeArgs),
    /// Print and save the closed-form performance tables.
    Formulas(FormulasArgs),
    /// Simulate several filters across a flip-rate grid.
    Sweep(SweepArgs),
    /// Emit plot-ready data files for the reference figures.
    Figures(FiguresArgs),
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Master random seed; every trial derives its stream from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for ensembles (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Steps per measurement time: dt = tau / substep.
    #[arg(long, value_parser = ["10", "100"])]
    pub dt_substep: Option<String>,
    /// Flat JSON config supplying defaults for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// bayes | wonham | boxcar | halfbox | double | projective-ideal | none
    #[arg(long)]
    pub filter: Option<String>,
    /// Dimensionless flip rate mu*tau.
    #[arg(long)]
    pub mutau: Option<f64>,
    /// Box duration in units of tau (box filters).
    #[arg(long)]
    pub dt_box: Option<f64>,
    /// Second threshold (double-threshold filter).
    #[arg(long)]
    pub a: Option<f64>,
    /// Resolve box parameters from the numerical optimizer.
    #[arg(long)]
    pub auto_params: bool,
    /// Number of trials (accepts forms like 1e5).
    #[arg(long)]
    pub trials: Option<String>,
    /// Filter's flip-rate estimate as mu_est*tau (default: true rate).
    #[arg(long)]
    pub mu_est: Option<f64>,
    /// Trial horizon in units of tau (default: ten largest optimal boxes).
    #[arg(long)]
    pub horizon_tau: Option<f64>,
    /// Cycle period in units of tau for projective-ideal (default 4).
    #[arg(long)]
    pub cycle_tau: Option<f64>,
    /// Also dump the first trial's trajectory and signals as CSV.
    #[arg(long)]
    pub dump_trajectory: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    /// bayes | boxcar | halfbox | double | all
    #[arg(long)]
    pub filter: Option<String>,
    #[arg(long)]
    pub mutau: Option<f64>,
    /// Log-spaced grid lo:hi:n.
    #[arg(long)]
    pub mutau_grid: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct FormulasArgs {
    #[arg(long)]
    pub mutau: Option<f64>,
    #[arg(long)]
    pub mutau_grid: Option<String>,
    /// Bayesian drop prefactor: derived | noise-corrected.
    #[arg(long)]
    pub drop_prefactor: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Comma-separated filter list (default: bayes,boxcar,halfbox,double).
    #[arg(long)]
    pub filters: Option<String>,
    #[arg(long)]
    pub mutau_grid: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct FiguresArgs {
    /// fig2 | fig5a | fig5b | fig5c | fig5d | all
    #[arg(long)]
    pub which: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    /// Flip rate for fig2 and fig5a (default 5e-3 and 1e-3 respectively).
    #[arg(long)]
    pub mutau: Option<f64>,
    /// Grid for the fig5b-d theory lines.
    #[arg(long)]
    pub mutau_grid: Option<String>,
    /// Flip rates at which to add simulated points to fig5c/fig5d.
    #[arg(long)]
    pub sim_mutau_grid: Option<String>,
    /// Inject a deterministic rapid double flip into the fig2 trajectory.
    #[arg(long)]
    pub inject_double_flip: bool,
    /// Also render simple SVG previews.
    #[arg(long)]
    pub svg: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Flat JSON config: later merged under explicit flags.
pub struct ConfigFile {
    map: serde_json::Map<String, serde_json::Value>,
}

impl ConfigFile {
    pub fn load(path: Option<&PathBuf>) -> Result<Self> {
        let map = match path {
            None => serde_json::Map::new(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                match serde_json::from_str::<serde_json::Value>(&text)
                    .with_context(|| format!("parsing config {}", p.display()))?
                {
                    serde_json::Value::Object(map) => map,
                    _ => return Err(usage_error("config file must hold a flat JSON object")),
                }
            }
        };
        Ok(ConfigFile { map })
    }

    fn get(&self, key: &str) -> Option<&serde_json::Value> {
        self.map
            .get(key)
            .or_else(|| self.map.get(&key.replace('_', "-")))
            .or_else(|| self.map.get(&key.replace('-', "_")))
    }

    pub fn string(&self, key: &str) -> Option<String> {
        self.get(key).map(|v| match v {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        })
    }

    pub fn f64(&self, key: &str) -> Option<f64> {
        self.get(key).and_then(|v| match v {
            serde_json::Value::Number(n) => n.as_f64(),
            serde_json::Value::String(s) => s.parse().ok(),
            _ => None,
        })
    }

    pub fn u64(&self, key: &str) -> Option<u64> {
        self.f64(key).map(|v| v as u64)
    }

    pub fn bool(&self, key: &str) -> Option<bool> {
        self.get(key).and_then(|v| v.as_bool())
    }
}

/// Resolved common settings.
pub struct Common {
    pub seed: u64,
    pub workers: Option<usize>,
    pub out_dir: PathBuf,
    pub dt_substep: u32,
}

impl CommonArgs {
    pub fn resolve(&self, cfg: &ConfigFile) -> Result<Common> {
        let substep = match self.dt_substep.clone().or_else(|| cfg.string("dt-substep")) {
            None => 10,
            Some(s) => match s.as_str() {
                "10" => 10,
                "100" => 100,
                other => return Err(usage_error(format!("dt-substep must be 10 or 100, got {other}"))),
            },
        };
        Ok(Common {
            seed: self.seed.or_else(|| cfg.u64("seed")).unwrap_or(0),
            workers: self.workers.or_else(|| cfg.u64("workers").map(|w| w as usize)),
            out_dir: self
                .out_dir
                .clone()
                .or_else(|| cfg.string("out-dir").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("out")),
            dt_substep: substep,
        })
    }
}

/// Parse a trial count that may be written like `1e5`.
pub fn parse_trials(raw: Option<String>, cfg: &ConfigFile) -> Result<u64> {
    let text = raw
        .or_else(|| cfg.string("trials"))
        .ok_or_else(|| usage_error("--trials is required"))?;
    let value: f64 = text
        .parse()
        .map_err(|_| usage_error(format!("cannot parse trial count {text:?}")))?;
    if !value.is_finite() || !(1.0..=1e12).contains(&value) {
        return Err(usage_error(format!("trial count must be in [1, 1e12], got {text}")));
    }
    Ok(value.round() as u64)
}

/// Parse `lo:hi:n` into an inclusive log-spaced grid.
pub fn parse_log_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(usage_error(format!("grid must be lo:hi:n, got {text:?}")));
    }
    let lo: f64 = parts[0].parse().map_err(|_| usage_error("bad grid lower bound"))?;
    let hi: f64 = parts[1].parse().map_err(|_| usage_error("bad grid upper bound"))?;
    let n: usize = parts[2].parse().map_err(|_| usage_error("bad grid point count"))?;
    if !lo.is_finite() || !hi.is_finite() || lo <= 0.0 || hi < lo || n == 0 {
        return Err(usage_error(format!("grid needs 0 < lo <= hi and n >= 1, got {text:?}")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (log_lo, log_hi) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| {
            // keep the endpoints exact
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (log_lo + (log_hi - log_lo) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect())
}

/// Single value or grid; exactly one must be present.
pub fn resolve_mutau_values(
    mutau: Option<f64>,
    grid: Option<String>,
    cfg: &ConfigFile,
) -> Result<Vec<f64>> {
    let mutau = mutau.or_else(|| cfg.f64("mutau"));
    let grid = grid.or_else(|| cfg.string("mutau-grid"));
    match (mutau, grid) {
        (Some(m), None) => {
            if !m.is_finite() || m <= 0.0 || m >= 0.1 {
                return Err(usage_error(format!("mutau must lie in (0, 0.1), got {m}")));
            }
            Ok(vec![m])
        }
        (None, Some(g)) => parse_log_grid(&g),
        (Some(_), Some(_)) => Err(usage_error("give either --mutau or --mutau-grid, not both")),
        (None, None) => Err(usage_error("one of --mutau or --mutau-grid is required")),
    }
}
