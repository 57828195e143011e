pub mod figures;
pub mod formulas;
pub mod optimize;
pub mod simulate;
pub mod sweep;

use anyhow::Result;
use paritytrack::analytics::FilterId;
use paritytrack::ensemble::{
    default_fit_window, fit_linear_window, run_ensemble, FidelityCurve, FitWindow, LinearFit,
};
use paritytrack::{FilterSpec, SimConfig};

use crate::usage_error;

/// Reference time unit: all rates and durations are expressed through
/// `mu*tau` and `t/tau`, so the internal tau is fixed at one.
pub const TAU: f64 = 1.0;

/// Filters addressable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliFilter {
    Bayes,
    Wonham,
    Boxcar,
    HalfBoxcar,
    DoubleThreshold,
    ProjectiveIdeal,
    None,
}

impl CliFilter {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "bayes" => CliFilter::Bayes,
            "wonham" => CliFilter::Wonham,
            "boxcar" => CliFilter::Boxcar,
            "halfbox" => CliFilter::HalfBoxcar,
            "double" => CliFilter::DoubleThreshold,
            "projective-ideal" => CliFilter::ProjectiveIdeal,
            "none" => CliFilter::None,
            other => {
                return Err(usage_error(format!(
                    "unknown filter {other:?}; expected bayes|wonham|boxcar|halfbox|double|projective-ideal|none"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliFilter::Bayes => "bayes",
            CliFilter::Wonham => "wonham",
            CliFilter::Boxcar => "boxcar",
            CliFilter::HalfBoxcar => "halfbox",
            CliFilter::DoubleThreshold => "double",
            CliFilter::ProjectiveIdeal => "projective-ideal",
            CliFilter::None => "none",
        }
    }

    pub fn theory_id(&self) -> Option<FilterId> {
        match self {
            CliFilter::Bayes | CliFilter::Wonham => Some(FilterId::Bayes),
            CliFilter::Boxcar => Some(FilterId::Boxcar),
            CliFilter::HalfBoxcar => Some(FilterId::HalfBoxcar),
            CliFilter::DoubleThreshold => Some(FilterId::DoubleThreshold),
            CliFilter::ProjectiveIdeal | CliFilter::None => None,
        }
    }
}

/// Box parameters resolved either from flags or from the optimizer.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ResolvedParams {
    pub dt_box_over_tau: Option<f64>,
    pub a: Option<f64>,
    pub mu_est_tau: Option<f64>,
    pub auto: bool,
}

pub fn resolve_params(
    filter: CliFilter,
    mutau: f64,
    dt_box: Option<f64>,
    a: Option<f64>,
    mu_est: Option<f64>,
    auto: bool,
) -> Result<ResolvedParams> {
    let needs_box = matches!(
        filter,
        CliFilter::Boxcar | CliFilter::HalfBoxcar | CliFilter::DoubleThreshold
    );
    let mut resolved = ResolvedParams { dt_box_over_tau: dt_box, a, mu_est_tau: mu_est, auto };
    if auto && needs_box {
        let id = filter.theory_id().unwrap();
        let opt = paritytrack::optimize(id, mutau / TAU, TAU)?;
        if !opt.feasible {
            return Err(anyhow::Error::new(crate::CliError::Infeasible(format!(
                "no parameters keep the initial drop below 10% for {} at mutau={mutau}",
                filter.name()
            ))));
        }
        if resolved.dt_box_over_tau.is_none() {
            resolved.dt_box_over_tau = opt.theory.dt_over_tau;
        }
        if resolved.a.is_none() {
            resolved.a = opt.theory.a;
        }
    }
    if needs_box && resolved.dt_box_over_tau.is_none() {
        return Err(usage_error(format!(
            "--dt-box (or --auto-params) is required for the {} filter",
            filter.name()
        )));
    }
    if matches!(filter, CliFilter::DoubleThreshold) && resolved.a.is_none() {
        return Err(usage_error(
            "--a (or --auto-params) is required for the double-threshold filter",
        ));
    }
    Ok(resolved)
}

pub fn filter_spec(filter: CliFilter, params: &ResolvedParams) -> Result<FilterSpec> {
    Ok(match filter {
        CliFilter::Bayes => FilterSpec::Bayes { mu_est: params.mu_est_tau.map(|m| m / TAU) },
        CliFilter::Wonham => FilterSpec::Wonham { mu_est: params.mu_est_tau.map(|m| m / TAU) },
        CliFilter::Boxcar => FilterSpec::Boxcar { dt_box: params.dt_box_over_tau.unwrap() * TAU },
        CliFilter::HalfBoxcar => {
            FilterSpec::HalfBoxcar { dt_box: params.dt_box_over_tau.unwrap() * TAU }
        }
        CliFilter::DoubleThreshold => FilterSpec::DoubleThreshold {
            dt_box: params.dt_box_over_tau.unwrap() * TAU,
            a: params.a.unwrap(),
        },
        CliFilter::None => FilterSpec::Identity,
        CliFilter::ProjectiveIdeal => {
            return Err(usage_error("projective-ideal runs through its own simulator"))
        }
    })
}

/// Shared ensemble + fit path used by simulate, sweep, and figures.
pub struct SimOutcome {
    pub curve: FidelityCurve,
    pub fit: Result<LinearFit, paritytrack::Error>,
}

#[allow(clippy::too_many_arguments)]
pub fn run_sim(
    filter: CliFilter,
    params: &ResolvedParams,
    mutau: f64,
    dt: f64,
    n_steps: usize,
    seed: u64,
    trials: u64,
    workers: Option<usize>,
) -> Result<SimOutcome> {
    let mu = mutau / TAU;
    if filter == CliFilter::ProjectiveIdeal {
        let cycle = params.dt_box_over_tau.unwrap_or(paritytrack::projective::DEFAULT_CYCLE_OVER_TAU)
            * TAU;
        let n_cycles = ((n_steps as f64 * dt) / cycle).floor() as usize;
        let cfg = paritytrack::ProjectiveConfig::new(mu, TAU, cycle, n_cycles.max(1), seed)?;
        let curve = paritytrack::run_idealized(&cfg, trials, workers)?;
        let t_end = *curve.times().last().unwrap();
        let window = FitWindow { t_lo: 2.0 * cycle, t_hi: t_end - cycle, anchor: 0.5 * cycle };
        let fit = fit_linear_window(&curve, &window);
        return Ok(SimOutcome { curve, fit });
    }
    let spec = filter_spec(filter, params)?;
    let config = SimConfig::new(mu, TAU, dt, n_steps, seed)?;
    let curve = run_ensemble(&spec, &config, trials, workers)?;
    let t_end = *curve.times().last().unwrap();
    let fit = default_fit_window(&spec, mu, TAU, t_end).and_then(|w| fit_linear_window(&curve, &w));
    Ok(SimOutcome { curve, fit })
}

/// Default horizon in steps for a flip rate, shared by all filters at that
/// rate so their curves share a time axis.
pub fn horizon_steps(mutau: f64, dt: f64, override_tau: Option<f64>) -> Result<usize> {
    let steps = match override_tau {
        Some(h) => {
            if !h.is_finite() || h <= 0.0 {
                return Err(usage_error(format!("horizon must be positive, got {h}")));
            }
            (h * TAU / dt).floor() as usize
        }
        None => paritytrack::ensemble::default_horizon_steps(mutau / TAU, TAU, dt)?,
    };
    if steps == 0 {
        return Err(usage_error("horizon shorter than one step"));
    }
    Ok(steps)
}

/// Compact scientific formatting for file names (1e-3 rather than 0.001).
pub fn fmt_mutau(mutau: f64) -> String {
    format!("{mutau:e}")
}
