//! Acceptance suite: every criterion runs at its stated tolerance and prints
//! one pass/fail line (visible with `--nocapture`).
//!
//! Heavy ensembles are shared between criteria through lazy statics, so the
//! gamma-reproduction runs are computed once and reused by the drop,
//! scaling-law, and ordering checks.

use once_cell::sync::Lazy;

use paritytrack::analytics::{p_mis, DropPrefactor, FilterId};
use paritytrack::ensemble::{
    default_horizon_steps, fit_linear, fit_linear_window, run_ensemble, FitWindow, LinearFit,
};
use paritytrack::{
    generate_trajectory, no_tracking_fidelity, propagate, synthesize_signals, theory, trial_rng,
    BitTrajectory, Encoding, FilterSpec, FilterTheory, LinearBayesState, ProbabilityVector,
    ProjectiveConfig, SimConfig, WonhamState,
};

const TAU: f64 = 1.0;
const DT: f64 = 0.1;

fn report(criterion: u32, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion:02} [{status}] {name}: {detail}");
    assert!(pass, "criterion {criterion} ({name}) failed: {detail}");
}

struct HeavyRun {
    fit: LinearFit,
    theory: FilterTheory,
    trials: u64,
}

fn heavy_run(filter: FilterId, mutau: f64, trials: u64, seed: u64) -> HeavyRun {
    let opt = paritytrack::optimize(filter, mutau, TAU).expect("optimize");
    assert!(opt.feasible);
    let spec = match filter {
        FilterId::Bayes => FilterSpec::Bayes { mu_est: None },
        FilterId::Boxcar => FilterSpec::Boxcar { dt_box: opt.theory.dt_over_tau.unwrap() * TAU },
        FilterId::HalfBoxcar => {
            FilterSpec::HalfBoxcar { dt_box: opt.theory.dt_over_tau.unwrap() * TAU }
        }
        FilterId::DoubleThreshold => FilterSpec::DoubleThreshold {
            dt_box: opt.theory.dt_over_tau.unwrap() * TAU,
            a: opt.theory.a.unwrap(),
        },
    };
    let n_steps = default_horizon_steps(mutau / TAU, TAU, DT).expect("horizon");
    let config = SimConfig::new(mutau / TAU, TAU, DT, n_steps, seed).expect("config");
    let curve = run_ensemble(&spec, &config, trials, None).expect("ensemble");
    let fit = fit_linear(&curve, &spec, config.mu, TAU).expect("fit");
    HeavyRun { fit, theory: opt.theory, trials }
}

static BAYES_1E3: Lazy<HeavyRun> =
    Lazy::new(|| heavy_run(FilterId::Bayes, 1e-3, 1_000_000, 6001));
static BOXCAR_1E3: Lazy<HeavyRun> =
    Lazy::new(|| heavy_run(FilterId::Boxcar, 1e-3, 100_000, 6002));
static HALFBOX_1E3: Lazy<HeavyRun> =
    Lazy::new(|| heavy_run(FilterId::HalfBoxcar, 1e-3, 1_000_000, 6003));
static DOUBLE_1E3: Lazy<HeavyRun> =
    Lazy::new(|| heavy_run(FilterId::DoubleThreshold, 1e-3, 1_000_000, 6004));
static BAYES_3E4: Lazy<HeavyRun> =
    Lazy::new(|| heavy_run(FilterId::Bayes, 3e-4, 1_000_000, 6005));
static HALFBOX_3E4: Lazy<HeavyRun> =
    Lazy::new(|| heavy_run(FilterId::HalfBoxcar, 3e-4, 1_000_000, 6006));

#[test]
fn criterion_01_no_tracking_baseline() {
    // Encoding-0 occupancy with no tracking follows the closed-form decay
    // within 3 binomial sigma at every recorded point over mu t in [0, 0.3].
    let mutau = 1e-3;
    let trials: u64 = 100_000;
    let n_steps = (0.3 / mutau / DT) as usize; // 3000 steps = 300 tau
    let config = SimConfig::new(mutau / TAU, TAU, DT, n_steps, 101).unwrap();
    let curve = run_ensemble(&FilterSpec::Identity, &config, trials, None).unwrap();
    let f = curve.f_mean();
    let mut worst = 0.0f64;
    for (i, &t) in curve.times().iter().enumerate() {
        let expect = no_tracking_fidelity(config.mu, t);
        let sigma = (expect * (1.0 - expect) / trials as f64).sqrt().max(1e-12);
        let pulls = (f[i] - expect).abs() / sigma;
        worst = worst.max(pulls);
    }
    report(
        1,
        "no-tracking baseline",
        worst < 3.0,
        &format!("{} points, worst deviation {:.2} sigma", curve.len(), worst),
    );
}

#[test]
fn criterion_02_filter_oracle_equivalence() {
    // Linear-Bayes and Wonham argmax paths agree on shared realizations at
    // >= 99.9% of steps; disagreements only at near-ties.
    let mutau = 1e-3;
    let realizations = 1000u64;
    let n_steps = 2000usize;
    let mut total_steps = 0u64;
    let mut disagreements = 0u64;
    let mut non_tie_disagreements = 0u64;
    for trial in 0..realizations {
        let config = SimConfig::new(mutau / TAU, TAU, DT, n_steps, 202).unwrap();
        let mut rng = trial_rng(config.seed, trial);
        let traj = generate_trajectory(&config, &mut rng);
        let signals = synthesize_signals(&traj, &mut rng);
        let mut lin = LinearBayesState::new(Encoding::reference(), config.mu, TAU);
        let mut won = WonhamState::new(Encoding::reference(), config.mu, TAU);
        for step in 0..n_steps {
            lin.step(signals.r12[step], signals.r23[step], DT).unwrap();
            won.step(signals.r12[step], signals.r23[step], DT).unwrap();
            total_steps += 1;
            if lin.estimate() != won.estimate() {
                disagreements += 1;
                let tie = lin.top_two_ratio() < 1.0 + 1e-6 || won.top_two_ratio() < 1.0 + 1e-6;
                if !tie {
                    non_tie_disagreements += 1;
                }
            }
        }
    }
    let agreement = 1.0 - disagreements as f64 / total_steps as f64;
    report(
        2,
        "filter oracle equivalence",
        agreement >= 0.999 && non_tie_disagreements == 0,
        &format!(
            "agreement {:.6}, {disagreements} disagreements ({non_tie_disagreements} off-tie)",
            agreement
        ),
    );
}

#[test]
fn criterion_03_master_equation_recovery() {
    // Noise-averaged Wonham state matches the untracked master equation
    // componentwise within 3 sigma at t = 10 tau and t = 100 tau.
    let mutau = 1e-3;
    let realizations = 10_000u64;
    let checks = [100usize, 1000usize]; // steps at dt = tau/10
    let n_steps = 1000;
    let mut sums = [[0.0f64; 8]; 2];
    let mut sums_sq = [[0.0f64; 8]; 2];
    for trial in 0..realizations {
        let config = SimConfig::new(mutau / TAU, TAU, DT, n_steps, 303).unwrap();
        let mut rng = trial_rng(config.seed, trial);
        let traj = generate_trajectory(&config, &mut rng);
        let signals = synthesize_signals(&traj, &mut rng);
        let mut won = WonhamState::new(Encoding::reference(), config.mu, TAU);
        for step in 0..n_steps {
            won.step(signals.r12[step], signals.r23[step], DT).unwrap();
            if let Some(slot) = checks.iter().position(|&c| c == step + 1) {
                for k in 0..8 {
                    let p = won.probabilities()[k];
                    sums[slot][k] += p;
                    sums_sq[slot][k] += p * p;
                }
            }
        }
    }
    let n = realizations as f64;
    let mut worst = 0.0f64;
    for (slot, &steps) in checks.iter().enumerate() {
        let t = steps as f64 * DT;
        let expect = propagate(&ProbabilityVector::point(Encoding::reference()), mutau / TAU, t)
            .unwrap();
        for k in 0..8 {
            let mean = sums[slot][k] / n;
            let var = (sums_sq[slot][k] / n - mean * mean).max(0.0);
            let sigma = (var / n).sqrt().max(1e-9);
            let pulls = (mean - expect.component(k)).abs() / sigma;
            worst = worst.max(pulls);
        }
    }
    report(
        3,
        "master-equation recovery",
        worst < 3.0,
        &format!("worst componentwise deviation {worst:.2} sigma"),
    );
}

#[test]
fn criterion_04_misidentification_rate() {
    // Per-box parity misidentification on flip-free signals matches
    // erfc(sqrt(dt_box/2 tau))/2 within 10% relative at 1e6 boxes.
    let n_boxes = 1_000_000usize;
    let mut details = Vec::new();
    let mut pass = true;
    for (dt_box_tau, seed) in [(2.0, 404u64), (10.0, 405u64)] {
        let box_len = (dt_box_tau / DT) as usize;
        let chunk_boxes = 20_000;
        let mut mis = 0u64;
        let mut chunk_index = 0u64;
        let mut remaining = n_boxes;
        while remaining > 0 {
            let boxes = remaining.min(chunk_boxes);
            let config =
                SimConfig::new(0.0, TAU, DT, boxes * box_len, seed).unwrap();
            let traj = BitTrajectory::flip_free(config);
            let mut rng = trial_rng(seed, chunk_index);
            let signals = synthesize_signals(&traj, &mut rng);
            for b in 0..boxes {
                let lo = b * box_len;
                let hi = lo + box_len;
                let m12: f64 = signals.r12[lo..hi].iter().sum::<f64>();
                let m23: f64 = signals.r23[lo..hi].iter().sum::<f64>();
                mis += (m12 < 0.0) as u64 + (m23 < 0.0) as u64;
            }
            remaining -= boxes;
            chunk_index += 1;
        }
        let got = mis as f64 / (2 * n_boxes) as f64;
        let expect = p_mis(0.0, dt_box_tau, TAU);
        let rel = got / expect - 1.0;
        pass &= rel.abs() < 0.10;
        details.push(format!(
            "dt_box={dt_box_tau} tau: {got:.4e} vs {expect:.4e} ({:+.1}%)",
            100.0 * rel
        ));
        if dt_box_tau == 10.0 {
            pass &= expect < 1e-3; // anchor: below 0.1%
        }
    }
    report(4, "misidentification rate", pass, &details.join("; "));
}

#[test]
fn criterion_05_integral_cross_checks() {
    use paritytrack::{bit2_overlap_approx, bit2_overlap_integral, p2};
    let mut pass = true;
    let mut details = Vec::new();
    // overlap quadrature vs asymptote within 1% for dt_box >= 10 tau
    let mut worst = 0.0f64;
    for &x in &[10.0, 12.0, 15.0, 20.0, 30.0, 50.0, 100.0] {
        let q = bit2_overlap_integral(0.0, x, TAU);
        let asym = (1.0 / (std::f64::consts::PI * x)).sqrt();
        worst = worst.max((q / asym - 1.0).abs());
    }
    pass &= worst < 0.01;
    details.push(format!("overlap vs asymptote worst {worst:.2e}"));
    // bit-2 non-detection probability at 15 tau
    let p = p2(0.0, 15.0, TAU);
    pass &= (p - 0.85).abs() < 0.02;
    details.push(format!("P2(15 tau) = {p:.4}"));
    // thresholded-overlap approximation near its validity threshold; the
    // error grows with a*sqrt(dt_box) beyond it, so 10 tau is the honest
    // domain of the 10% claim across the full threshold range
    let mut worst_a = 0.0f64;
    for &a in &[0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8] {
        let q = bit2_overlap_integral(a, 10.0, TAU);
        let ap = bit2_overlap_approx(a, 10.0, TAU);
        worst_a = worst_a.max((ap / q - 1.0).abs());
    }
    pass &= worst_a < 0.10;
    details.push(format!("approx at 10 tau worst {worst_a:.3}"));
    report(5, "integral cross-checks", pass, &details.join("; "));
}

fn check_gamma(run: &HeavyRun, tolerance: f64) -> (bool, String) {
    let gamma_tau = run.fit.gamma * TAU;
    let rel = gamma_tau / run.theory.gamma_tau - 1.0;
    (
        rel.abs() < tolerance,
        format!(
            "fitted {:.3e} vs theory {:.3e} ({:+.1}%, tol {:.0}%, {} trials)",
            gamma_tau,
            run.theory.gamma_tau,
            100.0 * rel,
            100.0 * tolerance,
            run.trials
        ),
    )
}

#[test]
fn criterion_06_gamma_reproduction() {
    // Known red on the half-boxcar clause: its closed-form rate is built
    // from large-box asymptotics valid for boxes >~ 15 tau, while the
    // optimum at mutau = 1e-3 is 8.85 tau. The measured excess of the
    // fitted rate over the formula falls from ~+31% at the optimum to +7%
    // at a 30 tau box (see the core halfbox_validation tests, which also
    // match the filter box-for-box against an independent naive
    // reimplementation), so the 25% tolerance is not attainable at this
    // rate. Kept faithful rather than loosened.
    let (p1, d1) = check_gamma(&BAYES_1E3, 0.20);
    let (p2, d2) = check_gamma(&BOXCAR_1E3, 0.15);
    let (p3, d3) = check_gamma(&HALFBOX_1E3, 0.25);
    let (p4, d4) = check_gamma(&DOUBLE_1E3, 0.25);
    report(
        6,
        "gamma reproduction at mutau=1e-3",
        p1 && p2 && p3 && p4,
        &format!("bayes {d1}; boxcar {d2}; halfbox {d3}; double {d4}"),
    );
}

#[test]
fn criterion_07_initial_drop_reproduction() {
    let mut pass = true;
    let mut details = Vec::new();
    for (name, run) in [
        ("bayes", &*BAYES_1E3),
        ("boxcar", &*BOXCAR_1E3),
        ("halfbox", &*HALFBOX_1E3),
        ("double", &*DOUBLE_1E3),
    ] {
        let rel = run.fit.delta_f_in / run.theory.delta_f_in - 1.0;
        pass &= rel.abs() < 0.20;
        details.push(format!(
            "{name}: {:.3e} vs {:.3e} ({:+.1}%)",
            run.fit.delta_f_in,
            run.theory.delta_f_in,
            100.0 * rel
        ));
    }
    report(7, "initial drop reproduction", pass, &details.join("; "));
}

#[test]
fn criterion_08_scaling_law() {
    // Gamma ratio between mutau = 1e-3 and 3e-4 follows the closed forms
    // within 20% for the quadratic-scaling filters.
    let mut pass = true;
    let mut details = Vec::new();
    for (name, hi, lo) in [
        ("bayes", &*BAYES_1E3, &*BAYES_3E4),
        ("halfbox", &*HALFBOX_1E3, &*HALFBOX_3E4),
    ] {
        let sim_ratio = hi.fit.gamma / lo.fit.gamma;
        let theory_ratio = hi.theory.gamma_tau / lo.theory.gamma_tau;
        let rel = sim_ratio / theory_ratio - 1.0;
        pass &= rel.abs() < 0.20;
        details.push(format!(
            "{name}: sim ratio {sim_ratio:.2} vs theory {theory_ratio:.2} ({:+.1}%)",
            100.0 * rel
        ));
    }
    report(8, "scaling law", pass, &details.join("; "));
}

#[test]
fn criterion_09_optimizer_fidelity() {
    let mut pass = true;
    let mut details = Vec::new();
    for &mutau in &[1e-5, 1e-4, 1e-3] {
        let b = paritytrack::optimize(FilterId::Boxcar, mutau, TAU).unwrap();
        let b_crude = 0.207 * mutau.powf(-2.0 / 3.0) - 1.3 * mutau.powf(-1.0 / 3.0) + 6.0;
        let rel_b = b.theory.dt_over_tau.unwrap() / b_crude - 1.0;
        pass &= rel_b.abs() < 0.20;
        let h = paritytrack::optimize(FilterId::HalfBoxcar, mutau, TAU).unwrap();
        let h_crude = 2.0 * (1.0 / (15.0 * mutau)).ln();
        let rel_h = h.theory.dt_over_tau.unwrap() / h_crude - 1.0;
        pass &= rel_h.abs() < 0.20;
        let d = paritytrack::optimize(FilterId::DoubleThreshold, mutau, TAU).unwrap();
        let a_crude = 0.525 * (1.0 - 2.5 * mutau.powf(1.0 / 3.0));
        let da = d.theory.a.unwrap() - a_crude;
        pass &= da.abs() < 0.08;
        details.push(format!(
            "mutau={mutau:.0e}: boxcar {:+.1}%, halfbox {:+.1}%, a {da:+.3}",
            100.0 * rel_b,
            100.0 * rel_h
        ));
    }
    report(9, "optimizer vs crude formulas", pass, &details.join("; "));
}

#[test]
fn criterion_10_ordering() {
    // Theory ordering across the range, and simulated ordering at 1e-3
    // within error bars.
    let mut pass = true;
    for i in 0..=20 {
        let mutau = 1e-5 * (100.0f64).powf(i as f64 / 20.0);
        let bayes = theory(FilterId::Bayes, mutau, TAU, None, None, DropPrefactor::default());
        let boxcar = paritytrack::optimize(FilterId::Boxcar, mutau, TAU).unwrap().theory;
        let halfbox = paritytrack::optimize(FilterId::HalfBoxcar, mutau, TAU).unwrap().theory;
        let double = paritytrack::optimize(FilterId::DoubleThreshold, mutau, TAU).unwrap().theory;
        pass &= bayes.gamma_tau <= halfbox.gamma_tau
            && halfbox.gamma_tau <= double.gamma_tau
            && double.gamma_tau <= boxcar.gamma_tau;
    }
    let order = [&*BAYES_1E3, &*HALFBOX_1E3, &*DOUBLE_1E3, &*BOXCAR_1E3];
    let mut sim_detail = Vec::new();
    for pair in order.windows(2) {
        let (lo, hi) = (&pair[0], &pair[1]);
        let slack = 2.0 * (lo.fit.gamma_stderr + hi.fit.gamma_stderr);
        pass &= lo.fit.gamma <= hi.fit.gamma + slack;
        sim_detail.push(format!("{:.2e} <= {:.2e}", lo.fit.gamma, hi.fit.gamma));
    }
    report(
        10,
        "rate ordering bayes <= halfbox <= double <= boxcar",
        pass,
        &format!("sim at 1e-3: {}", sim_detail.join(", ")),
    );
}

#[test]
fn criterion_11_projective_reference() {
    let mutau = 1e-3;
    let cfg = ProjectiveConfig::new(mutau / TAU, TAU, 4.0 * TAU, 250, 1101).unwrap();
    let (curve, audit) =
        paritytrack::run_idealized_instrumented(&cfg, 1_000_000, None).unwrap();
    let t_end = *curve.times().last().unwrap();
    let window = FitWindow { t_lo: 8.0, t_hi: t_end - 4.0, anchor: 2.0 };
    let fit = fit_linear_window(&curve, &window).unwrap();
    let expect = 12.0 * mutau * mutau;
    let rel = fit.gamma * TAU / expect - 1.0;
    // Decoding from noiseless instantaneous parities sees every flip at the
    // next read, so the fitted drop sits far below the gate-based 4 mu tau
    // (whose CNOT window hides late flips).
    let drop_ok = fit.delta_f_in < 4.0 * mutau;
    let pass = rel.abs() < 0.25 && audit.errors_with_fewer_than_two_flips == 0 && drop_ok;
    report(
        11,
        "projective reference",
        pass,
        &format!(
            "gamma_tau {:.3e} vs {expect:.3e} ({:+.1}%); drop {:.1e} (< 4 mu tau = {:.1e}); {} logical errors, {} with < 2 flips",
            fit.gamma * TAU,
            100.0 * rel,
            fit.delta_f_in,
            4.0 * mutau,
            audit.logical_errors,
            audit.errors_with_fewer_than_two_flips
        ),
    );
}

#[test]
fn criterion_12_determinism() {
    // Identical seed must give byte-identical CSV for 1 and 8 workers, and
    // across reruns.
    let bin = env!("CARGO_BIN_EXE_paritytrack");
    let base = std::env::temp_dir().join(format!("paritytrack_accept_{}", std::process::id()));
    let mut outputs = Vec::new();
    for (label, workers) in [("w1a", 1u32), ("w8a", 8), ("w1b", 1), ("w8b", 8)] {
        let dir = base.join(label);
        std::fs::create_dir_all(&dir).unwrap();
        let status = std::process::Command::new(bin)
            .args([
                "simulate",
                "--filter",
                "halfbox",
                "--mutau",
                "1e-3",
                "--dt-box",
                "8.85",
                "--trials",
                "2e3",
                "--seed",
                "11",
                "--workers",
                &workers.to_string(),
                "--out-dir",
            ])
            .arg(&dir)
            .status()
            .expect("run simulate");
        assert!(status.success());
        let csv = std::fs::read(dir.join("simulate_halfbox_mutau1e-3_seed11.csv")).unwrap();
        outputs.push(csv);
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    let _ = std::fs::remove_dir_all(&base);
    report(
        12,
        "determinism across reruns and worker counts",
        identical,
        &format!("4 runs, {} bytes each", outputs[0].len()),
    );
}
