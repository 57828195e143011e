//! Syndrome-interpretation filters.
//!
//! Four filters consume the noisy parity signal pair one step (or one box)
//! at a time and emit a per-step encoding estimate:
//!
//! - [`LinearBayesState`]: unnormalized Bayesian filter. The Gaussian
//!   likelihood update multiplies each component by
//!   `exp[(dt/tau)(r12*s12|k + r23*s23|k)]`; the flip dynamics enter through
//!   the off-diagonal transition part only, since any term proportional to
//!   the identity changes the norm but not the argmax.
//! - [`WonhamState`]: the normalized variant; mathematically the same
//!   estimate, kept on the probability simplex each step.
//! - [`BoxcarState`]: average successive durations `dt_box` and threshold the
//!   box means at zero, decoding the resulting syndrome pair. With a second
//!   threshold `a > 0` this becomes the double-threshold filter, which maps
//!   both parity-corrected means falling below `a` to a bit-2 flip.
//! - [`HalfBoxState`]: boxcar plus a shifted-window recheck. When boxes
//!   report a bit-1 flip then a bit-3 flip (or vice versa), the straddling
//!   window rebuilt from stored half-box averages decides whether the pair
//!   was really a mid-box bit-2 flip, in which case history is rewritten.

use crate::code_model::{decode_syndrome, Encoding, SyndromePair, NEIGHBORS, PARITIES};
use crate::error::{Error, Result};
use crate::trajectory::{SignalPair, SimConfig};

/// Renormalize the unnormalized filter whenever the largest component leaves
/// this range or after this many steps, whichever comes first. Dividing by
/// the maximum preserves the argmax exactly.
const RENORM_UPPER: f64 = 1e100;
const RENORM_LOWER: f64 = 1e-100;
const RENORM_EVERY_STEPS: u32 = 10_000;

#[inline]
fn argmax_lowest_index(v: &[f64; 8]) -> usize {
    let mut best = 0;
    for k in 1..8 {
        if v[k] > v[best] {
            best = k;
        }
    }
    best
}

/// Per-step Gaussian likelihood factors for the four distinct parity-sign
/// patterns, with the largest exponent subtracted (a pure norm change) so the
/// exponentials never overflow.
#[inline]
fn bayes_factors(r12: f64, r23: f64, dt_over_tau: f64) -> [f64; 8] {
    let a = dt_over_tau * r12;
    let b = dt_over_tau * r23;
    let m = a.abs() + b.abs();
    let fpp = (a + b - m).exp();
    let fpm = (a - b - m).exp();
    let fmp = (-a + b - m).exp();
    let fmm = (-a - b - m).exp();
    let mut f = [0.0; 8];
    for k in 0..8 {
        f[k] = match (PARITIES[k][0] > 0, PARITIES[k][1] > 0) {
            (true, true) => fpp,
            (true, false) => fpm,
            (false, true) => fmp,
            (false, false) => fmm,
        };
    }
    f
}

#[inline]
fn check_finite(r12: f64, r23: f64) -> Result<()> {
    if !r12.is_finite() || !r23.is_finite() {
        return Err(Error::NonFiniteSignal { r12, r23 });
    }
    Ok(())
}

/// Unnormalized Bayesian filter state.
#[derive(Debug, Clone)]
pub struct LinearBayesState {
    sigma: [f64; 8],
    mu_est: f64,
    tau: f64,
    steps_since_renorm: u32,
}

impl LinearBayesState {
    pub fn new(initial: Encoding, mu_est: f64, tau: f64) -> Self {
        let mut sigma = [0.0; 8];
        sigma[initial.index() as usize] = 1.0;
        LinearBayesState { sigma, mu_est, tau, steps_since_renorm: 0 }
    }

    pub fn sigma(&self) -> &[f64; 8] {
        &self.sigma
    }

    /// Multiply every component by a positive factor. The overall norm is a
    /// gauge choice, so this never affects the estimate path.
    pub fn scale_by(&mut self, factor: f64) {
        assert!(factor > 0.0 && factor.is_finite());
        for x in &mut self.sigma {
            *x *= factor;
        }
    }

    /// Largest unnormalized probability wins; ties break to the lowest index.
    pub fn estimate(&self) -> Encoding {
        Encoding::from_index(argmax_lowest_index(&self.sigma) as u8).unwrap()
    }

    /// Ratio of the top component to the runner-up (>= 1), for near-tie
    /// diagnostics.
    pub fn top_two_ratio(&self) -> f64 {
        let best = argmax_lowest_index(&self.sigma);
        let mut second = f64::NEG_INFINITY;
        for (k, &v) in self.sigma.iter().enumerate() {
            if k != best && v > second {
                second = v;
            }
        }
        self.sigma[best] / second
    }

    /// One likelihood-then-transition step over an integrated sample pair.
    #[allow(clippy::needless_range_loop)]
    pub fn step(&mut self, r12: f64, r23: f64, dt: f64) -> Result<()> {
        check_finite(r12, r23)?;
        let f = bayes_factors(r12, r23, dt / self.tau);
        let mut s = self.sigma;
        for k in 0..8 {
            s[k] *= f[k];
        }
        // off-diagonal transition part: sigma += mu dt * (sum over neighbors)
        let mudt = self.mu_est * dt;
        let mut out = s;
        for k in 0..8 {
            let n = NEIGHBORS[k];
            out[k] += mudt * (s[n[0] as usize] + s[n[1] as usize] + s[n[2] as usize]);
        }
        self.sigma = out;
        self.steps_since_renorm += 1;
        let max = out[argmax_lowest_index(&out)];
        if !(RENORM_LOWER..=RENORM_UPPER).contains(&max)
            || self.steps_since_renorm >= RENORM_EVERY_STEPS
        {
            let inv = 1.0 / max;
            for x in &mut self.sigma {
                *x *= inv;
            }
            self.steps_since_renorm = 0;
        }
        Ok(())
    }
}

/// Normalized Bayesian (Wonham) filter state.
///
/// Implemented as the normalized linear filter: identical mathematics, but
/// kept on the simplex so the state is a bona fide probability vector. A
/// direct Euler discretization of the nonlinear filtering equation is kept in
/// [`WonhamState::step_euler`] as a cross-check; it can leave the simplex at
/// finite `dt`.
#[derive(Debug, Clone)]
pub struct WonhamState {
    p: [f64; 8],
    mu_est: f64,
    tau: f64,
}

impl WonhamState {
    pub fn new(initial: Encoding, mu_est: f64, tau: f64) -> Self {
        let mut p = [0.0; 8];
        p[initial.index() as usize] = 1.0;
        WonhamState { p, mu_est, tau }
    }

    pub fn probabilities(&self) -> &[f64; 8] {
        &self.p
    }

    pub fn estimate(&self) -> Encoding {
        Encoding::from_index(argmax_lowest_index(&self.p) as u8).unwrap()
    }

    pub fn top_two_ratio(&self) -> f64 {
        let best = argmax_lowest_index(&self.p);
        let mut second = f64::NEG_INFINITY;
        for (k, &v) in self.p.iter().enumerate() {
            if k != best && v > second {
                second = v;
            }
        }
        self.p[best] / second
    }

    #[allow(clippy::needless_range_loop)]
    pub fn step(&mut self, r12: f64, r23: f64, dt: f64) -> Result<()> {
        check_finite(r12, r23)?;
        let f = bayes_factors(r12, r23, dt / self.tau);
        let mut s = self.p;
        for k in 0..8 {
            s[k] *= f[k];
        }
        let mudt = self.mu_est * dt;
        let mut out = s;
        for k in 0..8 {
            let n = NEIGHBORS[k];
            out[k] += mudt * (s[n[0] as usize] + s[n[1] as usize] + s[n[2] as usize]);
        }
        let sum: f64 = out.iter().sum();
        let inv = 1.0 / sum;
        for k in 0..8 {
            self.p[k] = out[k] * inv;
        }
        debug_assert!((self.p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        Ok(())
    }

    /// Direct Euler step of the nonlinear filtering equation, including the
    /// full transition matrix. Cross-check mode only.
    #[allow(clippy::needless_range_loop)]
    pub fn step_euler(&mut self, r12: f64, r23: f64, dt: f64) -> Result<()> {
        check_finite(r12, r23)?;
        let p = self.p;
        let mut c = [0.0; 8];
        let mut c_bar = 0.0;
        for k in 0..8 {
            c[k] = PARITIES[k][0] as f64 * r12 + PARITIES[k][1] as f64 * r23;
            c_bar += p[k] * c[k];
        }
        let mu = self.mu_est;
        let mut out = [0.0; 8];
        for k in 0..8 {
            let n = NEIGHBORS[k];
            let drift = mu * (p[n[0] as usize] + p[n[1] as usize] + p[n[2] as usize] - 3.0 * p[k]);
            out[k] = p[k] + dt * (drift + p[k] * (c[k] - c_bar) / self.tau);
        }
        // Finite dt can push components slightly negative; clamp, renormalize.
        let mut sum = 0.0;
        for x in &mut out {
            *x = x.max(0.0);
            sum += *x;
        }
        let inv = 1.0 / sum;
        for k in 0..8 {
            self.p[k] = out[k] * inv;
        }
        Ok(())
    }
}

/// What a completed box reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxVerdict {
    /// Which bit the box inferred flipped, if any.
    pub flipped_bit: Option<u8>,
    /// Estimate in effect after this box.
    pub estimate: Encoding,
    /// When set, the previous box's verdict was rewritten: it now records a
    /// bit-2 flip and this box records no flip. `estimate` above is the
    /// rewritten belief for both boxes.
    pub rewrites_previous: bool,
}

/// Outcome of feeding one sample into a box filter.
pub type BoxOutcome = Option<BoxVerdict>;

/// Boxcar filter state; with `threshold_a > 0` this is the double-threshold
/// filter (a plain boxcar has `threshold_a = 0`).
#[derive(Debug, Clone)]
pub struct BoxcarState {
    box_len_steps: usize,
    acc12: f64,
    acc23: f64,
    step_in_box: usize,
    estimate: Encoding,
    threshold_a: f64,
}

impl BoxcarState {
    pub fn new(initial: Encoding, box_len_steps: usize, threshold_a: f64) -> Result<Self> {
        if box_len_steps == 0 {
            return Err(Error::invalid("box length must be at least one step".to_string()));
        }
        if !(0.0..1.0).contains(&threshold_a) {
            return Err(Error::invalid(format!("threshold a must lie in [0, 1), got {threshold_a}")));
        }
        Ok(BoxcarState {
            box_len_steps,
            acc12: 0.0,
            acc23: 0.0,
            step_in_box: 0,
            estimate: initial,
            threshold_a,
        })
    }

    pub fn estimate(&self) -> Encoding {
        self.estimate
    }

    pub fn box_len_steps(&self) -> usize {
        self.box_len_steps
    }

    /// Accumulate one sample; at a box boundary, threshold the box means and
    /// update the estimate.
    pub fn step(&mut self, r12: f64, r23: f64) -> BoxOutcome {
        self.acc12 += r12;
        self.acc23 += r23;
        self.step_in_box += 1;
        if self.step_in_box < self.box_len_steps {
            return None;
        }
        let inv = 1.0 / self.box_len_steps as f64;
        let mean12 = self.acc12 * inv;
        let mean23 = self.acc23 * inv;
        self.acc12 = 0.0;
        self.acc23 = 0.0;
        self.step_in_box = 0;
        let before = self.estimate;
        self.estimate = apply_threshold_verdict(self.estimate, mean12, mean23, self.threshold_a);
        Some(BoxVerdict {
            flipped_bit: flipped_bit_between(before, self.estimate),
            estimate: self.estimate,
            rewrites_previous: false,
        })
    }
}

fn flipped_bit_between(before: Encoding, after: Encoding) -> Option<u8> {
    if before == after {
        return None;
    }
    for bit in 1..=3u8 {
        if before.flip(bit).unwrap() == after {
            return Some(bit);
        }
    }
    unreachable!("box verdicts move along single-flip edges");
}

/// Threshold box means against the current estimate's parities.
///
/// With parity-corrected means `c = mean * parity`: both below `a` flips
/// bit 2; otherwise a negative `c12` flips bit 1, a negative `c23` flips
/// bit 3. At `a = 0` this is exactly syndrome decoding of the mean signs.
fn apply_threshold_verdict(estimate: Encoding, mean12: f64, mean23: f64, a: f64) -> Encoding {
    let (p12, p23) = estimate.parities();
    let c12 = mean12 * p12 as f64;
    let c23 = mean23 * p23 as f64;
    if c12 < a && c23 < a {
        estimate.flip_idx(1)
    } else if c12 < 0.0 {
        estimate.flip_idx(0)
    } else if c23 < 0.0 {
        estimate.flip_idx(2)
    } else {
        estimate
    }
}

/// Boxcar decode via an observed syndrome pair (sign of the box means). Used
/// by the box filters at `a = 0`; equivalent to [`apply_threshold_verdict`].
pub fn boxcar_decode(estimate: Encoding, mean12: f64, mean23: f64) -> Encoding {
    let (p12, p23) = estimate.parities();
    let s12 = if mean12 * (p12 as f64) < 0.0 { -p12 } else { p12 };
    let s23 = if mean23 * (p23 as f64) < 0.0 { -p23 } else { p23 };
    decode_syndrome(estimate, SyndromePair::new(s12, s23).unwrap())
}

/// Half-boxcar filter state.
///
/// Averages half-box intervals, keeping the most recent three half-box means
/// per channel. Full boxes are pairs of halves; an ostensible bit-1/bit-3
/// flip sequence across adjacent boxes triggers a recheck of the shifted
/// window straddling both, compared against the estimate held before the
/// first suspected flip. If both parities are flipped there, the pair is
/// reinterpreted as one bit-2 flip.
#[derive(Debug, Clone)]
pub struct HalfBoxState {
    half_len_steps: usize,
    acc12: f64,
    acc23: f64,
    step_in_half: usize,
    /// Most recent three half-box means, oldest first.
    h12: [f64; 3],
    h23: [f64; 3],
    halves_done: usize,
    estimate: Encoding,
    /// Estimate in effect before the previous box's verdict.
    est_before_prev: Encoding,
    /// Which bit the previous box inferred, if any.
    prev_flipped_bit: Option<u8>,
}

impl HalfBoxState {
    /// `box_len_steps` is the full box; it must be even so halves align.
    pub fn new(initial: Encoding, box_len_steps: usize) -> Result<Self> {
        if box_len_steps < 2 || box_len_steps % 2 != 0 {
            return Err(Error::invalid(format!(
                "half-boxcar needs an even box length of at least 2 steps, got {box_len_steps}"
            )));
        }
        Ok(HalfBoxState {
            half_len_steps: box_len_steps / 2,
            acc12: 0.0,
            acc23: 0.0,
            step_in_half: 0,
            h12: [0.0; 3],
            h23: [0.0; 3],
            halves_done: 0,
            estimate: initial,
            est_before_prev: initial,
            prev_flipped_bit: None,
        })
    }

    pub fn estimate(&self) -> Encoding {
        self.estimate
    }

    pub fn step(&mut self, r12: f64, r23: f64) -> BoxOutcome {
        self.acc12 += r12;
        self.acc23 += r23;
        self.step_in_half += 1;
        if self.step_in_half < self.half_len_steps {
            return None;
        }
        let inv = 1.0 / self.half_len_steps as f64;
        let half12 = self.acc12 * inv;
        let half23 = self.acc23 * inv;
        self.acc12 = 0.0;
        self.acc23 = 0.0;
        self.step_in_half = 0;
        self.h12 = [self.h12[1], self.h12[2], half12];
        self.h23 = [self.h23[1], self.h23[2], half23];
        self.halves_done += 1;
        if self.halves_done % 2 != 0 {
            return None;
        }
        // A full box just completed from the last two halves.
        let mean12 = 0.5 * (self.h12[1] + self.h12[2]);
        let mean23 = 0.5 * (self.h23[1] + self.h23[2]);
        let before = self.estimate;
        let after = apply_threshold_verdict(before, mean12, mean23, 0.0);
        let flipped = flipped_bit_between(before, after);

        let rewrite = match (self.prev_flipped_bit, flipped) {
            (Some(1), Some(3)) | (Some(3), Some(1)) => {
                // Re-average the window shifted back half a box; it straddles
                // the previous and current boxes.
                let shifted12 = 0.5 * (self.h12[0] + self.h12[1]);
                let shifted23 = 0.5 * (self.h23[0] + self.h23[1]);
                let (p12, p23) = self.est_before_prev.parities();
                shifted12 * (p12 as f64) < 0.0 && shifted23 * (p23 as f64) < 0.0
            }
            _ => false,
        };

        if rewrite {
            // Previous box becomes a bit-2 flip, this box records no flip.
            self.estimate = self.est_before_prev.flip_idx(1);
            self.est_before_prev = self.estimate;
            self.prev_flipped_bit = None;
            Some(BoxVerdict {
                flipped_bit: None,
                estimate: self.estimate,
                rewrites_previous: true,
            })
        } else {
            self.est_before_prev = before;
            self.prev_flipped_bit = flipped;
            self.estimate = after;
            Some(BoxVerdict {
                flipped_bit: flipped,
                estimate: after,
                rewrites_previous: false,
            })
        }
    }
}

/// Filter selection plus parameters, in the time units of the signals.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(tag = "filter", rename_all = "snake_case")]
pub enum FilterSpec {
    Bayes {
        /// Flip-rate estimate used by the filter; `None` uses the true rate.
        mu_est: Option<f64>,
    },
    Wonham {
        mu_est: Option<f64>,
    },
    Boxcar {
        dt_box: f64,
    },
    HalfBoxcar {
        dt_box: f64,
    },
    DoubleThreshold {
        dt_box: f64,
        a: f64,
    },
    /// Never updates its estimate; reproduces the untracked baseline.
    Identity,
}

impl FilterSpec {
    pub fn name(&self) -> &'static str {
        match self {
            FilterSpec::Bayes { .. } => "bayes",
            FilterSpec::Wonham { .. } => "wonham",
            FilterSpec::Boxcar { .. } => "boxcar",
            FilterSpec::HalfBoxcar { .. } => "halfbox",
            FilterSpec::DoubleThreshold { .. } => "double",
            FilterSpec::Identity => "none",
        }
    }

    pub fn dt_box(&self) -> Option<f64> {
        match *self {
            FilterSpec::Boxcar { dt_box }
            | FilterSpec::HalfBoxcar { dt_box }
            | FilterSpec::DoubleThreshold { dt_box, .. } => Some(dt_box),
            _ => None,
        }
    }

    /// Box length in steps, rounded down to a whole number of samples. Warns
    /// when rounding moves the box duration by more than 1%.
    pub fn box_len_steps(&self, dt: f64) -> Result<Option<usize>> {
        let Some(dt_box) = self.dt_box() else {
            return Ok(None);
        };
        if !dt_box.is_finite() || dt_box <= 0.0 {
            return Err(Error::invalid(format!("box duration must be positive, got {dt_box}")));
        }
        let mut len = (dt_box / dt).floor() as usize;
        if len == 0 {
            return Err(Error::invalid(format!(
                "box duration {dt_box} shorter than one step {dt}"
            )));
        }
        if matches!(self, FilterSpec::HalfBoxcar { .. }) && len % 2 == 1 {
            len -= 1; // halves must align on the step grid
            if len == 0 {
                return Err(Error::invalid(format!(
                    "half-boxcar box duration {dt_box} shorter than two steps"
                )));
            }
        }
        let actual = len as f64 * dt;
        if (actual - dt_box).abs() > 0.01 * dt_box {
            log::warn!(
                "box duration rounded from {dt_box} to {actual} ({} steps), more than 1% change",
                len
            );
        }
        Ok(Some(len))
    }
}

/// Running state for any filter spec.
pub enum FilterState {
    Bayes(LinearBayesState),
    Wonham(WonhamState),
    Box(BoxcarState),
    HalfBox(HalfBoxState),
    Identity(Encoding),
}

impl FilterState {
    pub fn new(spec: &FilterSpec, config: &SimConfig) -> Result<Self> {
        let initial = Encoding::reference();
        let state = match *spec {
            FilterSpec::Bayes { mu_est } => FilterState::Bayes(LinearBayesState::new(
                initial,
                mu_est.unwrap_or(config.mu),
                config.tau,
            )),
            FilterSpec::Wonham { mu_est } => FilterState::Wonham(WonhamState::new(
                initial,
                mu_est.unwrap_or(config.mu),
                config.tau,
            )),
            FilterSpec::Boxcar { .. } => {
                let len = spec.box_len_steps(config.dt)?.unwrap();
                FilterState::Box(BoxcarState::new(initial, len, 0.0)?)
            }
            FilterSpec::DoubleThreshold { a, .. } => {
                let len = spec.box_len_steps(config.dt)?.unwrap();
                FilterState::Box(BoxcarState::new(initial, len, a)?)
            }
            FilterSpec::HalfBoxcar { .. } => {
                let len = spec.box_len_steps(config.dt)?.unwrap();
                FilterState::HalfBox(HalfBoxState::new(initial, len)?)
            }
            FilterSpec::Identity => FilterState::Identity(initial),
        };
        Ok(state)
    }

    /// Feed one sample. Returns a verdict at box boundaries for box filters.
    pub fn step(&mut self, r12: f64, r23: f64, dt: f64) -> Result<BoxOutcome> {
        match self {
            FilterState::Bayes(s) => {
                s.step(r12, r23, dt)?;
                Ok(None)
            }
            FilterState::Wonham(s) => {
                s.step(r12, r23, dt)?;
                Ok(None)
            }
            FilterState::Box(s) => Ok(s.step(r12, r23)),
            FilterState::HalfBox(s) => Ok(s.step(r12, r23)),
            FilterState::Identity(_) => Ok(None),
        }
    }

    pub fn estimate(&self) -> Encoding {
        match self {
            FilterState::Bayes(s) => s.estimate(),
            FilterState::Wonham(s) => s.estimate(),
            FilterState::Box(s) => s.estimate(),
            FilterState::HalfBox(s) => s.estimate(),
            FilterState::Identity(e) => *e,
        }
    }
}

/// A filter's per-step estimate sequence over one signal realization.
///
/// `estimates[s]` is the belief in effect during step `s`: box-filter
/// verdicts apply from the first step after their box, and half-boxcar
/// rewrites retroactively relabel the steps of the box whose verdict was
/// rewritten.
#[derive(Debug, Clone)]
pub struct FilterRun {
    pub estimates: Vec<Encoding>,
    /// For box filters: estimate in effect after each completed box.
    pub boundary_estimates: Vec<Encoding>,
    /// Belief after the final sample (the estimate a readout at the end of
    /// the record would return).
    pub final_estimate: Encoding,
}

/// Stream a full signal pair through a filter.
pub fn run_filter(spec: &FilterSpec, signals: &SignalPair, config: &SimConfig) -> Result<FilterRun> {
    let n = signals.len();
    if let Some(dt_box) = spec.dt_box() {
        let horizon = config.n_steps as f64 * config.dt;
        if !dt_box.is_finite() || dt_box <= 0.0 || dt_box > horizon {
            return Err(Error::invalid(format!(
                "box duration {dt_box} outside (0, {horizon}]"
            )));
        }
    }
    let mut state = FilterState::new(spec, config)?;
    let box_len = spec.box_len_steps(config.dt)?;
    let mut estimates = Vec::with_capacity(n);
    let mut boundary_estimates = Vec::new();
    for step in 0..n {
        estimates.push(state.estimate());
        let outcome = state.step(signals.r12[step], signals.r23[step], config.dt)?;
        if let Some(verdict) = outcome {
            if verdict.rewrites_previous {
                // Relabel the steps of the box that just closed; its verdict
                // (previous box's) was rewritten to a bit-2 flip.
                let len = box_len.unwrap();
                let box_start = (step + 1) - len;
                for e in &mut estimates[box_start..=step] {
                    *e = verdict.estimate;
                }
                let m = boundary_estimates.len();
                boundary_estimates[m - 1] = verdict.estimate;
            }
            boundary_estimates.push(verdict.estimate);
        }
    }
    let final_estimate = state.estimate();
    Ok(FilterRun { estimates, boundary_estimates, final_estimate })
}

/// Run the linear Bayesian filter recording normalized probability traces,
/// for single-trajectory diagnostics.
pub fn run_bayes_recording(
    signals: &SignalPair,
    config: &SimConfig,
    mu_est: Option<f64>,
) -> Result<(Vec<Encoding>, Vec<[f64; 8]>)> {
    let mut state = LinearBayesState::new(
        Encoding::reference(),
        mu_est.unwrap_or(config.mu),
        config.tau,
    );
    let mut estimates = Vec::with_capacity(signals.len());
    let mut traces = Vec::with_capacity(signals.len());
    for step in 0..signals.len() {
        state.step(signals.r12[step], signals.r23[step], config.dt)?;
        estimates.push(state.estimate());
        let sum: f64 = state.sigma().iter().sum();
        let mut row = *state.sigma();
        for x in &mut row {
            *x /= sum;
        }
        traces.push(row);
    }
    Ok((estimates, traces))
}
