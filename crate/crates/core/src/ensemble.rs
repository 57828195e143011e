//! Trial ensembles, average fidelity curves, and linear decay fits.
//!
//! Trials are embarrassingly parallel: every trial derives its own random
//! stream from `(master seed, trial index)`, per-trial state stays on the
//! worker, and the reduction sums integer success counters, so results are
//! bit-identical for any worker count or scheduling order. Signals are
//! generated and consumed streamingly per trial; only the fidelity counters
//! are retained.

use rayon::prelude::*;

use crate::code_model::Encoding;
use crate::error::{Error, Result};
use crate::filters::{FilterSpec, FilterState};
use crate::optimizer;
use crate::trajectory::{sample_flip_steps, signal_sample, trial_rng, SimConfig};

/// Continuous filters record fidelity every this many steps.
const CONTINUOUS_SAMPLE_EVERY: usize = 10;

/// Ensemble-averaged binary fidelity per recorded time.
///
/// Success counts are kept as integers so parallel reduction is exact; the
/// mean and binomial standard error are derived on demand.
#[derive(Debug, Clone)]
pub struct FidelityCurve {
    times: Vec<f64>,
    success: Vec<u64>,
    n_trials: u64,
}

impl FidelityCurve {
    pub fn from_parts(times: Vec<f64>, success: Vec<u64>, n_trials: u64) -> Self {
        assert_eq!(times.len(), success.len());
        FidelityCurve { times, success, n_trials }
    }

    /// Recorded sample times, in the simulation's raw time units.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn success_counts(&self) -> &[u64] {
        &self.success
    }

    pub fn n_trials(&self) -> u64 {
        self.n_trials
    }

    pub fn f_mean(&self) -> Vec<f64> {
        self.success.iter().map(|&s| s as f64 / self.n_trials as f64).collect()
    }

    /// Binomial standard error per point, `sqrt(f (1-f) / n)`.
    pub fn stderr(&self) -> Vec<f64> {
        let n = self.n_trials as f64;
        self.f_mean().iter().map(|&f| (f * (1.0 - f) / n).sqrt()).collect()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV with columns `t_over_tau,f_mean,stderr,n_trials`.
    pub fn write_csv<W: std::io::Write>(&self, tau: f64, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "t_over_tau,f_mean,stderr,n_trials")?;
        let f = self.f_mean();
        let se = self.stderr();
        for i in 0..self.times.len() {
            writeln!(
                out,
                "{},{},{},{}",
                self.times[i] / tau,
                f[i],
                se[i],
                self.n_trials
            )?;
        }
        Ok(())
    }
}

/// Where fidelity is recorded for a given filter.
enum SamplePlan {
    /// Every N steps; sample i covers step `i*N - 1` (fidelity after that
    /// step's update), recorded at time `i*N*dt`.
    Continuous { every: usize },
    /// At box boundaries, after each box's verdict, against the truth at the
    /// last step the box averaged.
    Boxes { box_len: usize },
}

fn sample_plan(spec: &FilterSpec, config: &SimConfig) -> Result<SamplePlan> {
    match spec.box_len_steps(config.dt)? {
        Some(box_len) => Ok(SamplePlan::Boxes { box_len }),
        None => Ok(SamplePlan::Continuous { every: CONTINUOUS_SAMPLE_EVERY }),
    }
}

fn sample_times(plan: &SamplePlan, config: &SimConfig) -> Vec<f64> {
    let mut times = vec![0.0];
    match plan {
        SamplePlan::Continuous { every } => {
            for i in 1..=config.n_steps / every {
                times.push((i * every) as f64 * config.dt);
            }
        }
        SamplePlan::Boxes { box_len } => {
            for m in 1..=config.n_steps / box_len {
                times.push((m * box_len) as f64 * config.dt);
            }
        }
    }
    times
}

/// One trial's contribution to the success counters.
#[allow(clippy::needless_range_loop)]
fn accumulate_trial(
    spec: &FilterSpec,
    config: &SimConfig,
    plan: &SamplePlan,
    trial: u64,
    counts: &mut [u64],
) {
    let mut rng = trial_rng(config.seed, trial);
    let flips = sample_flip_steps(config.mu, config.dt, config.n_steps, &mut rng);
    let sd = config.noise_sd();
    let mut state = FilterState::new(spec, config).expect("spec validated before dispatch");
    let mut bits = [false; 3];
    let mut next_flip = [0usize; 3];

    counts[0] += 1; // estimate and truth both start at the reference encoding

    match plan {
        SamplePlan::Continuous { every } => {
            let n_samples = config.n_steps / every;
            for i in 1..=n_samples {
                let mut truth = Encoding::reference();
                for step in (i - 1) * every..i * every {
                    for q in 0..3 {
                        while next_flip[q] < flips[q].len() && flips[q][next_flip[q]] == step as u64
                        {
                            bits[q] = !bits[q];
                            next_flip[q] += 1;
                        }
                    }
                    let r12 = signal_sample(bits[0] ^ bits[1], sd, &mut rng);
                    let r23 = signal_sample(bits[1] ^ bits[2], sd, &mut rng);
                    state.step(r12, r23, config.dt).expect("finite synthesized signals");
                    if step == i * every - 1 {
                        truth = Encoding::from_bits(bits);
                    }
                }
                counts[i] += (state.estimate() == truth) as u64;
            }
        }
        SamplePlan::Boxes { box_len } => {
            let n_boxes = config.n_steps / box_len;
            // Rewrites can relabel the previous box, so buffer per-boundary
            // results and score at the end.
            let mut boundary_est: Vec<Encoding> = Vec::with_capacity(n_boxes);
            let mut boundary_truth: Vec<Encoding> = Vec::with_capacity(n_boxes);
            for step in 0..n_boxes * box_len {
                for q in 0..3 {
                    while next_flip[q] < flips[q].len() && flips[q][next_flip[q]] == step as u64 {
                        bits[q] = !bits[q];
                        next_flip[q] += 1;
                    }
                }
                let r12 = signal_sample(bits[0] ^ bits[1], sd, &mut rng);
                let r23 = signal_sample(bits[1] ^ bits[2], sd, &mut rng);
                let outcome = state.step(r12, r23, config.dt).expect("finite synthesized signals");
                if let Some(verdict) = outcome {
                    if verdict.rewrites_previous {
                        let m = boundary_est.len();
                        boundary_est[m - 1] = verdict.estimate;
                    }
                    boundary_est.push(verdict.estimate);
                    boundary_truth.push(Encoding::from_bits(bits));
                }
            }
            debug_assert_eq!(boundary_est.len(), n_boxes);
            for m in 0..n_boxes {
                counts[m + 1] += (boundary_est[m] == boundary_truth[m]) as u64;
            }
        }
    }
}

/// Run `n_trials` independent trials and average the binary fidelity.
///
/// `workers` overrides the thread count; with the same seed, any worker
/// count produces identical output.
pub fn run_ensemble(
    spec: &FilterSpec,
    config: &SimConfig,
    n_trials: u64,
    workers: Option<usize>,
) -> Result<FidelityCurve> {
    if n_trials == 0 {
        return Err(Error::invalid("n_trials must be at least 1".to_string()));
    }
    FilterState::new(spec, config)?; // surface parameter errors before spawning
    if let Some(dt_box) = spec.dt_box() {
        let horizon = config.n_steps as f64 * config.dt;
        if dt_box > horizon {
            return Err(Error::invalid(format!(
                "box duration {dt_box} exceeds the trial horizon {horizon}"
            )));
        }
    }
    let plan = sample_plan(spec, config)?;
    let times = sample_times(&plan, config);
    let n_points = times.len();

    let reduce = || -> Vec<u64> {
        (0..n_trials)
            .into_par_iter()
            .fold(
                || vec![0u64; n_points],
                |mut counts, trial| {
                    accumulate_trial(spec, config, &plan, trial, &mut counts);
                    counts
                },
            )
            .reduce(
                || vec![0u64; n_points],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            )
    };

    let success = match workers {
        None => reduce(),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
            pool.install(reduce)
        }
    };

    Ok(FidelityCurve { times, success, n_trials })
}

/// Default trial horizon: ten times the largest optimal box duration among
/// the box filters at this flip rate, in steps.
pub fn default_horizon_steps(mu: f64, tau: f64, dt: f64) -> Result<usize> {
    use crate::analytics::FilterId;
    let mut max_dt: f64 = 0.0;
    for filter in [FilterId::Boxcar, FilterId::HalfBoxcar, FilterId::DoubleThreshold] {
        let opt = optimizer::optimize(filter, mu, tau)?;
        max_dt = max_dt.max(opt.theory.dt_over_tau.unwrap_or(0.0) * tau);
    }
    Ok(((10.0 * max_dt) / dt).floor() as usize)
}

/// Fidelity decay model fit: `F(t) = 1 - delta_F_in - Gamma t`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LinearFit {
    /// Initial drop, read at the window's anchor time.
    pub delta_f_in: f64,
    /// Decay rate, in inverse raw time units.
    pub gamma: f64,
    /// One-sigma uncertainty of `gamma` from the weighted fit.
    pub gamma_stderr: f64,
    pub fit_window: (f64, f64),
    pub residual_rms: f64,
}

/// Fit window and the time the initial drop is anchored to.
#[derive(Debug, Clone, Copy)]
pub struct FitWindow {
    pub t_lo: f64,
    pub t_hi: f64,
    /// The drop is `1 - F` extrapolated to this time: mid-first-box for box
    /// filters, zero for continuous filters.
    pub anchor: f64,
}

/// Default fit window for a filter: `[2 dt_box, t_end - dt_box]` anchored at
/// `dt_box / 2` for box filters (the final box is excluded because the
/// half-boxcar cannot rewrite it), `[5 t_r, t_end]` anchored at zero for
/// continuous filters with response time `t_r = (tau/2) ln(1/(mu tau))`.
pub fn default_fit_window(spec: &FilterSpec, mu: f64, tau: f64, t_end: f64) -> Result<FitWindow> {
    match spec.dt_box() {
        Some(dt_box) => {
            if t_end < 5.0 * dt_box {
                return Err(Error::invalid(format!(
                    "curve spans {t_end}, need at least five boxes of {dt_box}"
                )));
            }
            Ok(FitWindow { t_lo: 2.0 * dt_box, t_hi: t_end - dt_box, anchor: 0.5 * dt_box })
        }
        None => {
            let t_r = 0.5 * tau * (1.0 / (mu * tau)).ln();
            if t_end < 10.0 * t_r {
                return Err(Error::invalid(format!(
                    "curve spans {t_end}, need at least ten response times of {t_r}"
                )));
            }
            Ok(FitWindow { t_lo: 5.0 * t_r, t_hi: t_end, anchor: 0.0 })
        }
    }
}

/// Weighted least squares of `1 - F` against time over explicit points.
///
/// Weights are inverse binomial variances with a half-count floor so exact
/// points cannot dominate.
pub fn fit_linear_points(
    times: &[f64],
    f_mean: &[f64],
    n_trials: u64,
    window: &FitWindow,
) -> Result<LinearFit> {
    let n = n_trials as f64;
    let mut pts: Vec<(f64, f64, f64)> = Vec::new();
    for (&t, &f) in times.iter().zip(f_mean) {
        if t < window.t_lo || t > window.t_hi {
            continue;
        }
        let var = (f * (1.0 - f)).max(0.25 / n) / n;
        pts.push((t, 1.0 - f, var));
    }
    if pts.len() < 3 {
        return Err(Error::FitWindowTooShort(pts.len()));
    }
    let (mut sw, mut swx, mut swy, mut swxx, mut swxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(t, y, var) in &pts {
        let w = 1.0 / var;
        sw += w;
        swx += w * t;
        swy += w * y;
        swxx += w * t * t;
        swxy += w * t * y;
    }
    let denom = sw * swxx - swx * swx;
    let gamma = (sw * swxy - swx * swy) / denom;
    let intercept = (swy - gamma * swx) / sw;
    let gamma_stderr = (sw / denom).sqrt();
    let mut ss = 0.0;
    for &(t, y, _) in &pts {
        let r = y - (intercept + gamma * t);
        ss += r * r;
    }
    Ok(LinearFit {
        delta_f_in: intercept + gamma * window.anchor,
        gamma,
        gamma_stderr,
        fit_window: (window.t_lo, window.t_hi),
        residual_rms: (ss / pts.len() as f64).sqrt(),
    })
}

/// Fit a fidelity curve over an explicit window.
pub fn fit_linear_window(curve: &FidelityCurve, window: &FitWindow) -> Result<LinearFit> {
    fit_linear_points(curve.times(), &curve.f_mean(), curve.n_trials(), window)
}

/// Fit a fidelity curve with the filter's default window.
pub fn fit_linear(curve: &FidelityCurve, spec: &FilterSpec, mu: f64, tau: f64) -> Result<LinearFit> {
    let t_end = *curve.times().last().ok_or(Error::FitWindowTooShort(0))?;
    let window = default_fit_window(spec, mu, tau, t_end)?;
    fit_linear_window(curve, &window)
}
