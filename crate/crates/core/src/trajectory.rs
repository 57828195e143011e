//! Hidden-Markov bit-flip trajectories and the noisy continuous parity
//! signals synthesized from them.
//!
//! Each trial draws per-qubit flip times (exponential waits, floored to whole
//! steps), builds the true bit trajectory, and synthesizes the two parity
//! readouts `r12`, `r23` as Gaussians of variance `tau/dt` centered on the
//! instantaneous parity eigenvalue. Every trial derives its random stream
//! from `(master seed, trial index)`, so parallel ensembles reproduce
//! bit-identically regardless of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::code_model::Encoding;
use crate::error::{Error, Result};

/// Simulation parameters for one trajectory/signal realization.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SimConfig {
    /// Bit-flip rate per qubit (1/time). Zero gives flip-free trajectories.
    pub mu: f64,
    /// Characteristic measurement time (unit signal-to-noise integration).
    pub tau: f64,
    /// Step size; the signals are integrated samples over `dt`.
    pub dt: f64,
    pub n_steps: usize,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(mu: f64, tau: f64, dt: f64, n_steps: usize, seed: u64) -> Result<Self> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::invalid(format!("mu must be >= 0, got {mu}")));
        }
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::invalid(format!("tau must be > 0, got {tau}")));
        }
        if !dt.is_finite() || dt <= 0.0 || dt > tau {
            return Err(Error::invalid(format!("dt must satisfy 0 < dt <= tau, got {dt}")));
        }
        if mu * dt >= 0.1 {
            return Err(Error::invalid(format!(
                "mu*dt = {} too coarse; flips per step must be rare (< 0.1)",
                mu * dt
            )));
        }
        if n_steps == 0 {
            return Err(Error::invalid("n_steps must be >= 1".to_string()));
        }
        Ok(SimConfig { mu, tau, dt, n_steps, seed })
    }

    /// Gaussian standard deviation of one integrated signal sample.
    pub fn noise_sd(&self) -> f64 {
        (self.tau / self.dt).sqrt()
    }
}

/// Random stream for one trial, derived from the master seed and the trial
/// index. Streams are independent by construction, so reductions over trials
/// are order-independent.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Draw per-qubit flip step indices over `n_steps` steps.
///
/// Successive inter-flip gaps are `floor(n)` with `n` exponential of mean
/// `1/(mu*dt)` steps; flips landing at or beyond `n_steps` are discarded.
/// The floor slightly biases waits short at coarse `dt`; this discretization
/// is kept as-is rather than corrected.
pub fn sample_flip_steps<R: Rng>(mu: f64, dt: f64, n_steps: usize, rng: &mut R) -> [Vec<u64>; 3] {
    let mut lists: [Vec<u64>; 3] = Default::default();
    if mu <= 0.0 {
        return lists;
    }
    let exp = Exp::new(mu * dt).expect("positive rate");
    for list in &mut lists {
        let mut pos: u64 = 0;
        loop {
            let wait: f64 = exp.sample(rng);
            pos = pos.saturating_add(wait.floor() as u64);
            if pos >= n_steps as u64 {
                break;
            }
            list.push(pos);
        }
    }
    lists
}

/// The true physical bit states over discretized time, starting from 000.
#[derive(Debug, Clone)]
pub struct BitTrajectory {
    bits: Vec<[bool; 3]>,
    config: SimConfig,
}

impl BitTrajectory {
    /// Build the trajectory from per-qubit flip step lists. A flip takes
    /// effect at the start of its step: the bit value is the parity of the
    /// number of flips at or before each step.
    pub fn from_flip_steps(config: SimConfig, flips: &[Vec<u64>; 3]) -> Self {
        let mut bits = vec![[false; 3]; config.n_steps];
        let mut state = [false; 3];
        let mut next = [0usize; 3];
        for (step, col) in bits.iter_mut().enumerate() {
            for q in 0..3 {
                while next[q] < flips[q].len() && flips[q][next[q]] == step as u64 {
                    state[q] = !state[q];
                    next[q] += 1;
                }
            }
            *col = state;
        }
        BitTrajectory { bits, config }
    }

    pub fn flip_free(config: SimConfig) -> Self {
        BitTrajectory {
            bits: vec![[false; 3]; config.n_steps],
            config,
        }
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn n_steps(&self) -> usize {
        self.bits.len()
    }

    pub fn bits_at(&self, step: usize) -> [bool; 3] {
        self.bits[step]
    }

    pub fn encoding_at(&self, step: usize) -> Encoding {
        Encoding::from_bits(self.bits[step])
    }
}

/// Sample a full trajectory for one trial. Deterministic given the RNG state.
pub fn generate_trajectory<R: Rng>(config: &SimConfig, rng: &mut R) -> BitTrajectory {
    let flips = sample_flip_steps(config.mu, config.dt, config.n_steps, rng);
    BitTrajectory::from_flip_steps(*config, &flips)
}

/// The two noisy parity readouts over a trajectory.
#[derive(Debug, Clone)]
pub struct SignalPair {
    pub r12: Vec<f64>,
    pub r23: Vec<f64>,
}

impl SignalPair {
    pub fn len(&self) -> usize {
        self.r12.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r12.is_empty()
    }

    /// Noiseless signals equal to the parity eigenvalues of the trajectory.
    pub fn noiseless(traj: &BitTrajectory) -> Self {
        let n = traj.n_steps();
        let mut r12 = Vec::with_capacity(n);
        let mut r23 = Vec::with_capacity(n);
        for step in 0..n {
            let b = traj.bits_at(step);
            r12.push(if b[0] ^ b[1] { -1.0 } else { 1.0 });
            r23.push(if b[1] ^ b[2] { -1.0 } else { 1.0 });
        }
        SignalPair { r12, r23 }
    }
}

/// One integrated signal sample: `-2x + xi` for parity bit `x`, with `xi`
/// Gaussian of mean +1 and standard deviation `sd = sqrt(tau/dt)`. Even
/// parity centers the sample at +1, odd parity at -1.
#[inline]
pub(crate) fn signal_sample<R: Rng>(x: bool, sd: f64, rng: &mut R) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    let xi = 1.0 + sd * z;
    if x {
        xi - 2.0
    } else {
        xi
    }
}

/// Synthesize the noisy parity signals for a trajectory. Noise draws are
/// ordered (r12 then r23) per step so streaming and materialized paths agree
/// bit-for-bit on a shared RNG.
pub fn synthesize_signals<R: Rng>(traj: &BitTrajectory, rng: &mut R) -> SignalPair {
    let sd = traj.config.noise_sd();
    let n = traj.n_steps();
    let mut r12 = Vec::with_capacity(n);
    let mut r23 = Vec::with_capacity(n);
    for step in 0..n {
        let b = traj.bits_at(step);
        r12.push(signal_sample(b[0] ^ b[1], sd, rng));
        r23.push(signal_sample(b[1] ^ b[2], sd, rng));
    }
    SignalPair { r12, r23 }
}

/// Debug dump: CSV with columns `step,t,b1,b2,b3,r12,r23`, time in units of
/// tau.
pub fn write_trajectory_csv<W: std::io::Write>(
    traj: &BitTrajectory,
    signals: &SignalPair,
    out: &mut W,
) -> std::io::Result<()> {
    writeln!(out, "step,t,b1,b2,b3,r12,r23")?;
    let dt_over_tau = traj.config.dt / traj.config.tau;
    for step in 0..traj.n_steps() {
        let b = traj.bits_at(step);
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            step,
            step as f64 * dt_over_tau,
            b[0] as u8,
            b[1] as u8,
            b[2] as u8,
            signals.r12[step],
            signals.r23[step]
        )?;
    }
    Ok(())
}
