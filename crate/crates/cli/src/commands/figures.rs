//! `figures`: plot-ready data files.
//!
//! - fig2: one seeded trajectory with the Bayesian filter's normalized
//!   probability traces and the true encoding per step.
//! - fig5a: average fidelity in time for every filter at one flip rate,
//!   with matching theory lines.
//! - fig5b: optimized box durations versus flip rate (plus the projective
//!   reference cycle).
//! - fig5c/fig5d: optimized initial drops and decay rates versus flip rate,
//!   theory lines plus simulated points.

use anyhow::{Context, Result};

use paritytrack::analytics::{DropPrefactor, FilterId};
use paritytrack::projective::DEFAULT_CYCLE_OVER_TAU;
use paritytrack::trajectory::{generate_trajectory, synthesize_signals, trial_rng};
use paritytrack::{BitTrajectory, SimConfig};

use crate::args::{parse_log_grid, parse_trials, ConfigFile, FiguresArgs};
use crate::commands::{horizon_steps, resolve_params, run_sim, CliFilter, TAU};
use crate::manifest::{ensure_out_dir, ManifestBuilder};
use crate::svg;
use crate::usage_error;

pub fn run(args: FiguresArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.common.config.as_ref())?;
    let common = args.common.resolve(&cfg)?;
    let which = args.which.or_else(|| cfg.string("which")).unwrap_or_else(|| "all".to_string());
    let trials = parse_trials(args.trials.or(Some("1e4".to_string())), &cfg)?;
    let grid = parse_log_grid(
        &args.mutau_grid.or_else(|| cfg.string("mutau-grid")).unwrap_or_else(|| "1e-5:1e-3:9".into()),
    )?;
    let sim_grid = parse_log_grid(
        &args
            .sim_mutau_grid
            .or_else(|| cfg.string("sim-mutau-grid"))
            .unwrap_or_else(|| "3e-4:1e-3:2".into()),
    )?;
    let inject = args.inject_double_flip || cfg.bool("inject-double-flip").unwrap_or(false);
    let render_svg = args.svg || cfg.bool("svg").unwrap_or(false);
    let dt = TAU / common.dt_substep as f64;

    ensure_out_dir(&common.out_dir)?;
    let config_json = serde_json::json!({
        "which": which,
        "trials": trials,
        "mutau_grid": grid,
        "sim_mutau_grid": sim_grid,
        "seed": common.seed,
        "inject_double_flip": inject,
    });
    let mut manifest = ManifestBuilder::new(Some(common.seed), config_json);

    let all = which == "all";
    if all || which == "fig2" {
        let mutau = args.mutau.unwrap_or(5e-3);
        fig2(&common.out_dir, mutau, dt, common.seed, inject, render_svg, &mut manifest)?;
    }
    if all || which == "fig5a" {
        let mutau = args.mutau.unwrap_or(1e-3);
        fig5a(&common.out_dir, mutau, dt, common.seed, trials, common.workers, render_svg, &mut manifest)?;
    }
    if all || which == "fig5b" {
        fig5b(&common.out_dir, &grid, &mut manifest)?;
    }
    if all || which == "fig5c" || which == "fig5d" {
        fig5cd(
            &common.out_dir,
            &grid,
            &sim_grid,
            dt,
            common.seed,
            trials,
            common.workers,
            render_svg,
            &mut manifest,
        )?;
    }
    if !all && !["fig2", "fig5a", "fig5b", "fig5c", "fig5d"].contains(&which.as_str()) {
        return Err(usage_error(format!("unknown figure {which:?}")));
    }
    manifest.write(&common.out_dir, "figures")?;
    Ok(())
}

/// Single-trajectory probability traces.
fn fig2(
    out_dir: &std::path::Path,
    mutau: f64,
    dt: f64,
    seed: u64,
    inject: bool,
    render_svg: bool,
    manifest: &mut ManifestBuilder,
) -> Result<()> {
    let n_steps = (300.0 * TAU / dt) as usize;
    let config = SimConfig::new(mutau / TAU, TAU, dt, n_steps, seed)?;
    let mut rng = trial_rng(seed, 0);
    let traj = if inject {
        // two flips (bits 1 and 3) a fraction of tau apart, mid-run: the
        // filter reads them as a single bit-2 flip and tracks the complement
        let mid = (n_steps / 3) as u64;
        let gap = ((0.3 * TAU / dt) as u64).max(1);
        BitTrajectory::from_flip_steps(config, &[vec![mid], vec![], vec![mid + gap]])
    } else {
        generate_trajectory(&config, &mut rng)
    };
    let signals = synthesize_signals(&traj, &mut rng);
    let (estimates, traces) =
        paritytrack::filters::run_bayes_recording(&signals, &config, None)?;

    let path = out_dir.join("fig2.csv");
    let mut out = String::from("step,t_over_tau,true_k,est_k,p0,p1,p2,p3,p4,p5,p6,p7\n");
    for step in 0..n_steps {
        let row = traces[step];
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            step,
            step as f64 * dt / TAU,
            traj.encoding_at(step).index(),
            estimates[step].index(),
            row.map(|p| p.to_string()).join(","),
        ));
    }
    std::fs::write(&path, &out).with_context(|| format!("writing {}", path.display()))?;
    manifest.record(&path);
    if render_svg {
        let series: Vec<(String, Vec<(f64, f64)>)> = vec![
            (
                "true_k".to_string(),
                (0..n_steps)
                    .map(|s| (s as f64 * dt / TAU, traj.encoding_at(s).index() as f64))
                    .collect(),
            ),
            (
                "est_k".to_string(),
                (0..n_steps)
                    .map(|s| (s as f64 * dt / TAU, estimates[s].index() as f64))
                    .collect(),
            ),
        ];
        let svg_path = out_dir.join("fig2.svg");
        svg::write_line_plot(&svg_path, "encoding index vs t/tau", &series, false, false)?;
        manifest.record(&svg_path);
    }
    Ok(())
}

/// Fidelity curves for every filter at one flip rate.
#[allow(clippy::too_many_arguments)]
fn fig5a(
    out_dir: &std::path::Path,
    mutau: f64,
    dt: f64,
    seed: u64,
    trials: u64,
    workers: Option<usize>,
    render_svg: bool,
    manifest: &mut ManifestBuilder,
) -> Result<()> {
    let n_steps = horizon_steps(mutau, dt, None)?;
    let mut out = String::from("source,filter,t_over_tau,f_mean,stderr\n");
    let mut svg_series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    let filters = [
        CliFilter::Bayes,
        CliFilter::HalfBoxcar,
        CliFilter::DoubleThreshold,
        CliFilter::Boxcar,
        CliFilter::ProjectiveIdeal,
    ];
    for filter in filters {
        let params = resolve_params(filter, mutau, None, None, None, true)?;
        let outcome = run_sim(filter, &params, mutau, dt, n_steps, seed, trials, workers)?;
        let f = outcome.curve.f_mean();
        let se = outcome.curve.stderr();
        let mut pts = Vec::new();
        for (i, &t) in outcome.curve.times().iter().enumerate() {
            out.push_str(&format!(
                "sim,{},{},{},{}\n",
                filter.name(),
                t / TAU,
                f[i],
                se[i]
            ));
            pts.push((t / TAU, f[i]));
        }
        svg_series.push((filter.name().to_string(), pts));
        // theory line from the closed forms at the same parameters
        let (drop, gamma_tau) = match filter.theory_id() {
            Some(id) => {
                let th = paritytrack::theory(
                    id,
                    mutau,
                    1.0,
                    params.dt_box_over_tau,
                    params.a,
                    DropPrefactor::default(),
                );
                (th.delta_f_in, th.gamma_tau)
            }
            None => (0.0, 12.0 * mutau * mutau), // idealized projective reference
        };
        let t_end = n_steps as f64 * dt / TAU;
        for i in 0..=50 {
            let t = t_end * i as f64 / 50.0;
            let f_line = (1.0 - drop - gamma_tau * t).max(0.0);
            out.push_str(&format!("theory_full,{},{},{},\n", filter.name(), t, f_line));
        }
    }
    let path = out_dir.join("fig5a.csv");
    std::fs::write(&path, &out).with_context(|| format!("writing {}", path.display()))?;
    manifest.record(&path);
    if render_svg {
        let svg_path = out_dir.join("fig5a.svg");
        svg::write_line_plot(&svg_path, "F(t) vs t/tau", &svg_series, false, false)?;
        manifest.record(&svg_path);
    }
    Ok(())
}

/// Optimized box durations versus flip rate.
fn fig5b(
    out_dir: &std::path::Path,
    grid: &[f64],
    manifest: &mut ManifestBuilder,
) -> Result<()> {
    let mut out = String::from("source,filter,mutau,dt_over_tau\n");
    for &mutau in grid {
        for filter in [FilterId::Boxcar, FilterId::HalfBoxcar, FilterId::DoubleThreshold] {
            let opt = paritytrack::optimize(filter, mutau, 1.0)?;
            out.push_str(&format!(
                "theory_full,{},{},{}\n",
                filter.name(),
                mutau,
                opt.theory.dt_over_tau.unwrap()
            ));
            let crude = paritytrack::crude_optimum(filter, mutau, 1.0)?;
            out.push_str(&format!(
                "theory_crude,{},{},{}\n",
                filter.name(),
                mutau,
                crude.dt_over_tau
            ));
        }
        // projective reference: constant rapid cycle
        out.push_str(&format!(
            "theory_full,projective-ideal,{mutau},{DEFAULT_CYCLE_OVER_TAU}\n"
        ));
    }
    let path = out_dir.join("fig5b.csv");
    std::fs::write(&path, &out).with_context(|| format!("writing {}", path.display()))?;
    manifest.record(&path);
    Ok(())
}

/// Optimized initial drops (fig5c) and decay rates (fig5d) versus flip rate.
#[allow(clippy::too_many_arguments)]
fn fig5cd(
    out_dir: &std::path::Path,
    grid: &[f64],
    sim_grid: &[f64],
    dt: f64,
    seed: u64,
    trials: u64,
    workers: Option<usize>,
    render_svg: bool,
    manifest: &mut ManifestBuilder,
) -> Result<()> {
    let mut out_c = String::from("source,filter,mutau,delta_f_in,stderr\n");
    let mut out_d = String::from("source,filter,mutau,gamma_tau,stderr\n");
    for &mutau in grid {
        for filter in FilterId::ALL {
            let opt = paritytrack::optimize(filter, mutau, 1.0)?;
            out_c.push_str(&format!(
                "theory_full,{},{},{},\n",
                filter.name(),
                mutau,
                opt.theory.delta_f_in
            ));
            out_d.push_str(&format!(
                "theory_full,{},{},{},\n",
                filter.name(),
                mutau,
                opt.theory.gamma_tau
            ));
            let crude = paritytrack::simplified_scaling(filter, mutau, 1.0);
            out_c.push_str(&format!(
                "theory_crude,{},{},{},\n",
                filter.name(),
                mutau,
                crude.delta_f_in
            ));
            out_d.push_str(&format!(
                "theory_crude,{},{},{},\n",
                filter.name(),
                mutau,
                crude.gamma_tau
            ));
        }
        out_c.push_str(&format!("theory_full,projective-ideal,{mutau},{},\n", 4.0 * mutau));
        out_d.push_str(&format!(
            "theory_full,projective-ideal,{mutau},{},\n",
            12.0 * mutau * mutau
        ));
    }
    for &mutau in sim_grid {
        if trials == 0 {
            break;
        }
        let n_steps = horizon_steps(mutau, dt, None)?;
        for filter in [
            CliFilter::Bayes,
            CliFilter::Boxcar,
            CliFilter::HalfBoxcar,
            CliFilter::DoubleThreshold,
        ] {
            let params = resolve_params(filter, mutau, None, None, None, true)?;
            let outcome = run_sim(filter, &params, mutau, dt, n_steps, seed, trials, workers)?;
            if let Ok(fit) = outcome.fit {
                out_c.push_str(&format!(
                    "sim,{},{},{},\n",
                    filter.name(),
                    mutau,
                    fit.delta_f_in
                ));
                out_d.push_str(&format!(
                    "sim,{},{},{},{}\n",
                    filter.name(),
                    mutau,
                    fit.gamma * TAU,
                    fit.gamma_stderr * TAU
                ));
            }
        }
    }
    let path_c = out_dir.join("fig5c.csv");
    std::fs::write(&path_c, &out_c).with_context(|| format!("writing {}", path_c.display()))?;
    manifest.record(&path_c);
    let path_d = out_dir.join("fig5d.csv");
    std::fs::write(&path_d, &out_d).with_context(|| format!("writing {}", path_d.display()))?;
    manifest.record(&path_d);
    if render_svg {
        let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
        for filter in FilterId::ALL {
            let pts: Vec<(f64, f64)> = grid
                .iter()
                .map(|&mutau| {
                    let opt = paritytrack::optimize(filter, mutau, 1.0).unwrap();
                    (mutau, opt.theory.gamma_tau)
                })
                .collect();
            series.push((filter.name().to_string(), pts));
        }
        let svg_path = out_dir.join("fig5d.svg");
        svg::write_line_plot(&svg_path, "Gamma*tau vs mutau", &series, true, true)?;
        manifest.record(&svg_path);
    }
    Ok(())
}
