//! `simulate`: one filter, one flip rate, one ensemble; writes the fidelity
//! curve CSV, the linear-fit JSON summary, and a manifest.

use anyhow::{Context, Result};

use paritytrack::trajectory::{
    generate_trajectory, synthesize_signals, trial_rng, write_trajectory_csv,
};

use crate::args::{parse_trials, ConfigFile, SimulateArgs};
use crate::commands::{
    fmt_mutau, horizon_steps, resolve_params, run_sim, CliFilter, ResolvedParams, TAU,
};
use crate::manifest::{ensure_out_dir, ManifestBuilder};
use crate::usage_error;

pub fn run(args: SimulateArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.common.config.as_ref())?;
    let common = args.common.resolve(&cfg)?;
    let filter = CliFilter::parse(
        &args
            .filter
            .or_else(|| cfg.string("filter"))
            .ok_or_else(|| usage_error("--filter is required"))?,
    )?;
    let mutau = args
        .mutau
        .or_else(|| cfg.f64("mutau"))
        .ok_or_else(|| usage_error("--mutau is required"))?;
    if !mutau.is_finite() || mutau <= 0.0 || mutau >= 0.1 {
        return Err(usage_error(format!("mutau must lie in (0, 0.1), got {mutau}")));
    }
    let trials = parse_trials(args.trials, &cfg)?;
    let auto = args.auto_params || cfg.bool("auto-params").unwrap_or(false);
    let dump = args.dump_trajectory || cfg.bool("dump-trajectory").unwrap_or(false);
    let dt = TAU / common.dt_substep as f64;

    let mut params = resolve_params(
        filter,
        mutau,
        args.dt_box.or_else(|| cfg.f64("dt-box")),
        args.a.or_else(|| cfg.f64("a")),
        args.mu_est.or_else(|| cfg.f64("mu-est")),
        auto,
    )?;
    if filter == CliFilter::ProjectiveIdeal {
        let cycle = args
            .cycle_tau
            .or_else(|| cfg.f64("cycle-tau"))
            .unwrap_or(paritytrack::projective::DEFAULT_CYCLE_OVER_TAU);
        params.dt_box_over_tau = Some(cycle);
    }
    let n_steps = horizon_steps(mutau, dt, args.horizon_tau.or_else(|| cfg.f64("horizon-tau")))?;

    let outcome = run_sim(filter, &params, mutau, dt, n_steps, common.seed, trials, common.workers)?;

    ensure_out_dir(&common.out_dir)?;
    let base = format!("simulate_{}_mutau{}_seed{}", filter.name(), fmt_mutau(mutau), common.seed);
    let config_json = serde_json::json!({
        "filter": filter.name(),
        "mutau": mutau,
        "params": params,
        "trials": trials,
        "seed": common.seed,
        "workers": common.workers,
        "dt_substep": common.dt_substep,
        "horizon_steps": n_steps,
    });
    let mut manifest = ManifestBuilder::new(Some(common.seed), config_json);

    let csv_path = common.out_dir.join(format!("{base}.csv"));
    let mut csv = Vec::new();
    outcome.curve.write_csv(TAU, &mut csv)?;
    std::fs::write(&csv_path, csv).with_context(|| format!("writing {}", csv_path.display()))?;
    manifest.record(&csv_path);

    let fit_json = match &outcome.fit {
        Ok(fit) => serde_json::json!({
            "filter": filter.name(),
            "mutau": mutau,
            "params": params,
            "delta_f_in": fit.delta_f_in,
            "gamma_tau": fit.gamma * TAU,
            "gamma_tau_stderr": fit.gamma_stderr * TAU,
            "fit_window": [fit.fit_window.0 / TAU, fit.fit_window.1 / TAU],
            "residual_rms": fit.residual_rms,
            "n_trials": trials,
        }),
        Err(err) => serde_json::json!({
            "filter": filter.name(),
            "mutau": mutau,
            "params": params,
            "fit_error": err.to_string(),
            "n_trials": trials,
        }),
    };
    let fit_path = common.out_dir.join(format!("{base}_fit.json"));
    std::fs::write(&fit_path, serde_json::to_string_pretty(&fit_json)? + "\n")
        .with_context(|| format!("writing {}", fit_path.display()))?;
    manifest.record(&fit_path);

    if dump {
        let dump_path = common.out_dir.join(format!("{base}_trajectory.csv"));
        write_first_trial_dump(filter, &params, mutau, dt, n_steps, common.seed, &dump_path)?;
        manifest.record(&dump_path);
    }

    manifest.write(&common.out_dir, &base)?;
    if let Ok(fit) = &outcome.fit {
        println!(
            "{}: mutau={mutau} trials={trials} delta_f_in={:.4e} gamma_tau={:.4e} (fit window {:.1}..{:.1} tau)",
            filter.name(),
            fit.delta_f_in,
            fit.gamma * TAU,
            fit.fit_window.0 / TAU,
            fit.fit_window.1 / TAU,
        );
    } else {
        println!("{}: mutau={mutau} trials={trials} (no fit: window too short)", filter.name());
    }
    Ok(())
}

fn write_first_trial_dump(
    filter: CliFilter,
    params: &ResolvedParams,
    mutau: f64,
    dt: f64,
    n_steps: usize,
    seed: u64,
    path: &std::path::Path,
) -> Result<()> {
    let _ = (filter, params);
    let config = paritytrack::SimConfig::new(mutau / TAU, TAU, dt, n_steps, seed)?;
    let mut rng = trial_rng(seed, 0);
    let traj = generate_trajectory(&config, &mut rng);
    let signals = synthesize_signals(&traj, &mut rng);
    let mut buf = Vec::new();
    write_trajectory_csv(&traj, &signals, &mut buf)?;
    std::fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
