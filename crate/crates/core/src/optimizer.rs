//! Numerical optimization of filter parameters.
//!
//! The objective is the time for the average fidelity to fall by 10% under
//! the linear decay model, `t_max = (0.1 - delta_F_in) / Gamma`, maximized
//! over the box duration (and second threshold for the double-threshold
//! filter). Grid-then-golden-section is used because the rate mixes erfc and
//! power-law terms with broad plateaus; a 200-point log grid bounds the
//! bracketing error before refinement.

use crate::analytics::{theory, DropPrefactor, FilterId, FilterTheory};
use crate::error::{Error, Result};

/// Box-filter parameters in dimensionless form.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BoxParams {
    pub dt_over_tau: f64,
    pub a: f64,
}

/// Search range for the box duration, in units of tau. The upper bound
/// covers the boxcar filter down to `mu tau = 1e-6`.
const DT_RANGE: (f64, f64) = (1.0, 1e5);
const GRID_POINTS: usize = 200;
const GOLDEN_REL_TOL: f64 = 1e-4;
const COORD_TOL: f64 = 1e-3;
const COORD_MAX_ROUNDS: usize = 50;

/// Time for the fidelity to drop by 10% at the given parameters, in the same
/// units as `tau`. Negative when the initial drop alone exceeds 10%;
/// infinite when the rate vanishes.
pub fn t_max_objective(
    filter: FilterId,
    mu: f64,
    tau: f64,
    dt_box: Option<f64>,
    a: Option<f64>,
) -> f64 {
    let t = theory(filter, mu, tau, dt_box, a, DropPrefactor::default());
    if t.gamma_tau == 0.0 {
        return f64::INFINITY;
    }
    tau * (0.1 - t.delta_f_in) / t.gamma_tau
}

/// Golden-section maximization of `f` on `[lo, hi]` to the given relative
/// tolerance on the argument.
pub(crate) fn golden_section_max<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while (hi - lo) > rel_tol * hi.abs().max(1.0) {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Log-spaced grid search followed by golden-section refinement.
pub(crate) fn grid_then_golden<F: Fn(f64) -> f64 + Copy>(
    f: F,
    lo: f64,
    hi: f64,
    n_grid: usize,
    rel_tol: f64,
) -> (f64, f64) {
    let log_lo = lo.ln();
    let log_hi = hi.ln();
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    let mut xs = Vec::with_capacity(n_grid + 1);
    for i in 0..=n_grid {
        let x = (log_lo + (log_hi - log_lo) * i as f64 / n_grid as f64).exp();
        let v = f(x);
        xs.push(x);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let bracket_lo = xs[best_i.saturating_sub(1)];
    let bracket_hi = xs[(best_i + 1).min(n_grid)];
    golden_section_max(f, bracket_lo, bracket_hi, rel_tol)
}

/// The optimized operating point of one filter.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct OptimizationResult {
    pub filter: FilterId,
    /// Theory evaluation at the optimum; carries the optimal parameters.
    pub theory: FilterTheory,
    /// Optimal 10%-drop time in the units of `tau`.
    pub t_max: f64,
    /// False when no parameters keep the initial drop below 10%.
    pub feasible: bool,
}

/// Maximize the 10%-drop time over the filter's free parameters.
///
/// The Bayesian filter has none; boxcar and half-boxcar optimize the box
/// duration; the double-threshold filter alternates one-dimensional searches
/// in the duration and the threshold until both stall.
pub fn optimize(filter: FilterId, mu: f64, tau: f64) -> Result<OptimizationResult> {
    if !mu.is_finite() || mu <= 0.0 || !tau.is_finite() || tau <= 0.0 {
        return Err(Error::invalid(format!("mu and tau must be positive, got {mu}, {tau}")));
    }
    match filter {
        FilterId::Bayes => {
            let th = theory(filter, mu, tau, None, None, DropPrefactor::default());
            let t_max = tau * (0.1 - th.delta_f_in) / th.gamma_tau;
            Ok(OptimizationResult { filter, theory: th, t_max, feasible: th.delta_f_in < 0.1 })
        }
        FilterId::Boxcar | FilterId::HalfBoxcar => {
            let objective = |x: f64| t_max_objective(filter, mu, tau, Some(x * tau), Some(0.0));
            let (x, t_max) =
                grid_then_golden(objective, DT_RANGE.0, DT_RANGE.1, GRID_POINTS, GOLDEN_REL_TOL);
            let th = theory(filter, mu, tau, Some(x * tau), Some(0.0), DropPrefactor::default());
            Ok(OptimizationResult { filter, theory: th, t_max, feasible: th.delta_f_in < 0.1 })
        }
        FilterId::DoubleThreshold => {
            let (x, a, t_max) = coordinate_descent(
                |x, a| t_max_objective(filter, mu, tau, Some(x * tau), Some(a)),
                20.0,
                0.5,
            );
            let th = theory(filter, mu, tau, Some(x * tau), Some(a), DropPrefactor::default());
            Ok(OptimizationResult { filter, theory: th, t_max, feasible: th.delta_f_in < 0.1 })
        }
    }
}

/// Alternate one-dimensional maximizations over `(dt/tau, a)` until the
/// parameter change per round falls below tolerance.
pub(crate) fn coordinate_descent<F: Fn(f64, f64) -> f64 + Copy>(
    objective: F,
    mut x: f64,
    mut a: f64,
) -> (f64, f64, f64) {
    let mut value = objective(x, a);
    for _ in 0..COORD_MAX_ROUNDS {
        let (x_new, _) = grid_then_golden(
            |xx| objective(xx, a),
            DT_RANGE.0,
            DT_RANGE.1,
            GRID_POINTS,
            GOLDEN_REL_TOL,
        );
        // threshold line search: coarse grid then golden refinement
        let mut best_a = 0.0;
        let mut best_v = f64::NEG_INFINITY;
        let n = 99;
        for i in 0..=n {
            let aa = 0.99 * i as f64 / n as f64;
            let v = objective(x_new, aa);
            if v > best_v {
                best_v = v;
                best_a = aa;
            }
        }
        let lo = (best_a - 0.99 / n as f64).max(0.0);
        let hi = (best_a + 0.99 / n as f64).min(0.99);
        let (a_new, v_new) = golden_section_max(|aa| objective(x_new, aa), lo, hi, 1e-6);
        let converged = (x_new - x).abs() <= COORD_TOL * x.abs() && (a_new - a).abs() <= COORD_TOL;
        x = x_new;
        a = a_new;
        value = v_new;
        if converged {
            break;
        }
    }
    (x, a, value)
}

/// Closed-form approximations to the optimized parameters.
///
/// Boxcar: `0.207 (mu tau)^{-2/3} - 1.3 (mu tau)^{-1/3} + 6`.
/// Half-boxcar: `2 ln(1/(15 mu tau))`.
/// Double-threshold: threshold fit `a = 0.525 [1 - 2.5 (mu tau)^{1/3}]` and
/// the second-order truncation of the recursive duration solution.
pub fn crude_optimum(filter: FilterId, mu: f64, tau: f64) -> Result<BoxParams> {
    let mu_tau = mu * tau;
    if !mu_tau.is_finite() || mu_tau <= 0.0 {
        return Err(Error::invalid(format!("mu*tau must be positive, got {mu_tau}")));
    }
    match filter {
        FilterId::Bayes => Err(Error::invalid(
            "the Bayesian filter has no free parameters".to_string(),
        )),
        FilterId::Boxcar => Ok(BoxParams {
            dt_over_tau: 0.207 * mu_tau.powf(-2.0 / 3.0) - 1.3 * mu_tau.powf(-1.0 / 3.0) + 6.0,
            a: 0.0,
        }),
        FilterId::HalfBoxcar => Ok(BoxParams {
            dt_over_tau: 2.0 * (1.0 / (15.0 * mu_tau)).ln(),
            a: 0.0,
        }),
        FilterId::DoubleThreshold => {
            let a = (0.525 * (1.0 - 2.5 * mu_tau.powf(1.0 / 3.0))).max(0.0);
            let one_minus_a_sq = (1.0 - a) * (1.0 - a);
            let sqrt_pi = std::f64::consts::PI.sqrt();
            let inner = (one_minus_a_sq / (6.0 * mu_tau * sqrt_pi)).ln();
            let dt_over_tau = 2.0 / one_minus_a_sq
                * (one_minus_a_sq / (6.0 * mu_tau * (std::f64::consts::PI * inner).sqrt())).ln();
            Ok(BoxParams { dt_over_tau, a })
        }
    }
}
