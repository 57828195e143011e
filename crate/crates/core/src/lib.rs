//! Monte Carlo simulator and analytics engine for passive error tracking of
//! the three-qubit bit-flip code under continuous parity measurement.
//!
//! The crate provides:
//!
//! - [`code_model`]: encodings, parity syndromes, and the untracked Markov
//!   flip dynamics of the code.
//! - [`trajectory`]: hidden-Markov bit-flip trajectories and the noisy
//!   parity signals they produce.
//! - [`filters`]: four syndrome-interpretation filters (linear Bayesian,
//!   normalized Wonham, boxcar, half-boxcar, double-threshold) consuming the
//!   signals one step at a time.
//! - [`analytics`]: closed-form initial fidelity drops, logical error rates,
//!   and misidentification integrals for every filter.
//! - [`optimizer`]: numerical optimization of filter parameters against the
//!   time-to-10%-fidelity-loss objective.
//! - [`ensemble`]: reproducible parallel trial ensembles, average fidelity
//!   curves, and linear decay fits.
//! - [`projective`]: an idealized projective-syndrome reference simulator.

pub mod analytics;
pub mod code_model;
pub mod ensemble;
pub mod error;
pub mod filters;
pub mod optimizer;
pub mod projective;
mod quad;
pub mod trajectory;

pub use code_model::{
    decode_syndrome, markov_matrix, no_tracking_fidelity, propagate, propagate_expm, Encoding,
    ProbabilityVector, SyndromePair, TransitionMatrix,
};
pub use ensemble::{fit_linear, fit_linear_window, run_ensemble, FidelityCurve, FitWindow, LinearFit};
pub use error::{Error, Result};
pub use filters::{
    BoxOutcome, BoxcarState, FilterRun, FilterSpec, HalfBoxState, LinearBayesState, WonhamState,
};
pub use optimizer::{crude_optimum, optimize, t_max_objective, OptimizationResult};
pub use projective::{run_idealized, run_idealized_instrumented, DoubleFlipAudit, ProjectiveConfig};
pub use trajectory::{
    generate_trajectory, sample_flip_steps, synthesize_signals, trial_rng, BitTrajectory,
    SignalPair, SimConfig,
};
pub use analytics::{
    ancilla_theory, bit2_overlap_approx, bit2_overlap_integral, p2, p2_asymptotic, p_mis,
    p_mis_asymptotic, simplified_scaling, theory, AncillaStrategy, AncillaTheory, DropPrefactor,
    FilterId, FilterTheory,
};
