//! Idealized ancilla-based reference simulator.
//!
//! Perfect projective parity syndromes at a fixed cycle period: flips are
//! sampled in continuous time, and at every cycle boundary the estimate is
//! updated by decoding the noiseless parities of the true state. Logical
//! errors therefore require at least two flips between consecutive syndrome
//! reads; a lone flip is always corrected at the next boundary.

use rand_distr::{Distribution, Exp};
use rayon::prelude::*;

use crate::code_model::{decode_syndrome, Encoding, SyndromePair};
use crate::ensemble::FidelityCurve;
use crate::error::{Error, Result};
use crate::trajectory::trial_rng;

/// Default cycle period over tau: the two-CNOT gate time of the idealized
/// ancilla circuit.
pub const DEFAULT_CYCLE_OVER_TAU: f64 = 4.0;

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ProjectiveConfig {
    pub mu: f64,
    pub tau: f64,
    /// Cycle period between syndrome reads.
    pub cycle: f64,
    pub n_cycles: usize,
    pub seed: u64,
}

impl ProjectiveConfig {
    pub fn new(mu: f64, tau: f64, cycle: f64, n_cycles: usize, seed: u64) -> Result<Self> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::invalid(format!("mu must be >= 0, got {mu}")));
        }
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::invalid(format!("tau must be > 0, got {tau}")));
        }
        if !cycle.is_finite() || cycle <= 0.0 {
            return Err(Error::invalid(format!("cycle must be > 0, got {cycle}")));
        }
        if n_cycles == 0 {
            return Err(Error::invalid("n_cycles must be >= 1".to_string()));
        }
        Ok(ProjectiveConfig { mu, tau, cycle, n_cycles, seed })
    }
}

/// Instrumentation of logical errors against the flip record.
#[derive(Debug, Clone, Copy, Default, serde::Serialize)]
pub struct DoubleFlipAudit {
    /// Trials whose estimate first diverged from the truth at some boundary.
    pub logical_errors: u64,
    /// Among those, first-failure cycles holding fewer than two flips.
    /// Must be zero: a single flip is always decoded at the next read.
    pub errors_with_fewer_than_two_flips: u64,
}

struct TrialOutcome {
    success: Vec<u64>,
    audit: DoubleFlipAudit,
}

fn run_trial(config: &ProjectiveConfig, trial: u64) -> TrialOutcome {
    let mut rng = trial_rng(config.seed, trial);
    let total_time = config.cycle * config.n_cycles as f64;
    // Continuous-time flip times per qubit, drawn up front in qubit order.
    let mut flip_times: [Vec<f64>; 3] = Default::default();
    if config.mu > 0.0 {
        let exp = Exp::new(config.mu).expect("positive rate");
        for times in &mut flip_times {
            let mut t = 0.0;
            loop {
                t += exp.sample(&mut rng);
                if t >= total_time {
                    break;
                }
                times.push(t);
            }
        }
    }
    let mut success = vec![0u64; config.n_cycles + 1];
    success[0] = 1;
    let mut bits = [false; 3];
    let mut next = [0usize; 3];
    let mut estimate = Encoding::reference();
    let mut audit = DoubleFlipAudit::default();
    let mut was_correct = true;
    for m in 0..config.n_cycles {
        let boundary = (m + 1) as f64 * config.cycle;
        let mut flips_in_cycle = 0u32;
        for q in 0..3 {
            while next[q] < flip_times[q].len() && flip_times[q][next[q]] < boundary {
                bits[q] = !bits[q];
                next[q] += 1;
                flips_in_cycle += 1;
            }
        }
        let truth = Encoding::from_bits(bits);
        let (s12, s23) = truth.parities();
        estimate = decode_syndrome(estimate, SyndromePair::new(s12, s23).unwrap());
        let correct = estimate == truth;
        success[m + 1] = correct as u64;
        if was_correct && !correct {
            audit.logical_errors += 1;
            if flips_in_cycle < 2 {
                audit.errors_with_fewer_than_two_flips += 1;
            }
        }
        was_correct = correct;
    }
    TrialOutcome { success, audit }
}

/// Run the idealized reference and return the fidelity curve at cycle
/// boundaries, along with the double-flip audit.
pub fn run_idealized_instrumented(
    config: &ProjectiveConfig,
    n_trials: u64,
    workers: Option<usize>,
) -> Result<(FidelityCurve, DoubleFlipAudit)> {
    if n_trials == 0 {
        return Err(Error::invalid("n_trials must be at least 1".to_string()));
    }
    let n_points = config.n_cycles + 1;
    let reduce = || {
        (0..n_trials)
            .into_par_iter()
            .fold(
                || (vec![0u64; n_points], DoubleFlipAudit::default()),
                |(mut counts, mut audit), trial| {
                    let outcome = run_trial(config, trial);
                    for (c, s) in counts.iter_mut().zip(&outcome.success) {
                        *c += s;
                    }
                    audit.logical_errors += outcome.audit.logical_errors;
                    audit.errors_with_fewer_than_two_flips +=
                        outcome.audit.errors_with_fewer_than_two_flips;
                    (counts, audit)
                },
            )
            .reduce(
                || (vec![0u64; n_points], DoubleFlipAudit::default()),
                |(mut a, mut audit_a), (b, audit_b)| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    audit_a.logical_errors += audit_b.logical_errors;
                    audit_a.errors_with_fewer_than_two_flips +=
                        audit_b.errors_with_fewer_than_two_flips;
                    (a, audit_a)
                },
            )
    };
    let (success, audit) = match workers {
        None => reduce(),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
            pool.install(reduce)
        }
    };
    let times = (0..=config.n_cycles).map(|m| m as f64 * config.cycle).collect();
    Ok((FidelityCurve::from_parts(times, success, n_trials), audit))
}

/// Fidelity curve of the idealized reference.
pub fn run_idealized(
    config: &ProjectiveConfig,
    n_trials: u64,
    workers: Option<usize>,
) -> Result<FidelityCurve> {
    run_idealized_instrumented(config, n_trials, workers).map(|(curve, _)| curve)
}
