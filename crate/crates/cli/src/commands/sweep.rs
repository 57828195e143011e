//! `sweep`: run `simulate` across a flip-rate grid for several filters and
//! collect simulated points plus theory lines in a single CSV with a
//! `source` column (`sim`, `theory_full`, `theory_crude`).

use anyhow::{Context, Result};

use paritytrack::analytics::DropPrefactor;

use crate::args::{parse_trials, resolve_mutau_values, ConfigFile, SweepArgs};
use crate::commands::{horizon_steps, resolve_params, run_sim, CliFilter, TAU};
use crate::manifest::{ensure_out_dir, ManifestBuilder};
use crate::usage_error;

pub fn run(args: SweepArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.common.config.as_ref())?;
    let common = args.common.resolve(&cfg)?;
    let filters: Vec<CliFilter> = args
        .filters
        .or_else(|| cfg.string("filters"))
        .unwrap_or_else(|| "bayes,boxcar,halfbox,double".to_string())
        .split(',')
        .map(|s| CliFilter::parse(s.trim()))
        .collect::<Result<_>>()?;
    if filters.is_empty() {
        return Err(usage_error("at least one filter is required"));
    }
    let mutaus = resolve_mutau_values(None, args.mutau_grid, &cfg)?;
    let trials = parse_trials(args.trials, &cfg)?;
    let dt = TAU / common.dt_substep as f64;

    let mut out = String::from(
        "source,filter,mutau,dt_over_tau,a,delta_f_in,gamma_tau,gamma_tau_stderr,n_trials\n",
    );
    for &mutau in &mutaus {
        let n_steps = horizon_steps(mutau, dt, None)?;
        for &filter in &filters {
            let mut params = resolve_params(filter, mutau, None, None, None, true)?;
            if filter == CliFilter::ProjectiveIdeal {
                params.dt_box_over_tau =
                    Some(paritytrack::projective::DEFAULT_CYCLE_OVER_TAU);
            }
            let outcome =
                run_sim(filter, &params, mutau, dt, n_steps, common.seed, trials, common.workers)?;
            if let Ok(fit) = &outcome.fit {
                out.push_str(&format!(
                    "sim,{},{},{},{},{},{},{},{}\n",
                    filter.name(),
                    mutau,
                    params.dt_box_over_tau.map_or(String::new(), |v| v.to_string()),
                    params.a.map_or(String::new(), |v| v.to_string()),
                    fit.delta_f_in,
                    fit.gamma * TAU,
                    fit.gamma_stderr * TAU,
                    trials,
                ));
            }
            if let Some(id) = filter.theory_id() {
                let th = paritytrack::theory(
                    id,
                    mutau,
                    1.0,
                    params.dt_box_over_tau,
                    params.a,
                    DropPrefactor::default(),
                );
                out.push_str(&format!(
                    "theory_full,{},{},{},{},{},{},,\n",
                    filter.name(),
                    mutau,
                    th.dt_over_tau.map_or(String::new(), |v| v.to_string()),
                    th.a.map_or(String::new(), |v| v.to_string()),
                    th.delta_f_in,
                    th.gamma_tau,
                ));
                let crude = paritytrack::simplified_scaling(id, mutau, 1.0);
                out.push_str(&format!(
                    "theory_crude,{},{},{},{},{},{},,\n",
                    filter.name(),
                    mutau,
                    crude.dt_over_tau.map_or(String::new(), |v| v.to_string()),
                    crude.a.map_or(String::new(), |v| v.to_string()),
                    crude.delta_f_in,
                    crude.gamma_tau,
                ));
            } else if filter == CliFilter::ProjectiveIdeal {
                out.push_str(&format!(
                    "theory_full,projective-ideal,{},4,,{},{},,\n",
                    mutau,
                    4.0 * mutau,
                    12.0 * mutau * mutau,
                ));
            }
        }
    }

    ensure_out_dir(&common.out_dir)?;
    let path = common.out_dir.join("sweep.csv");
    std::fs::write(&path, &out).with_context(|| format!("writing {}", path.display()))?;
    let config_json = serde_json::json!({
        "filters": filters.iter().map(|f| f.name()).collect::<Vec<_>>(),
        "mutau_values": mutaus,
        "trials": trials,
        "seed": common.seed,
        "dt_substep": common.dt_substep,
    });
    let mut manifest = ManifestBuilder::new(Some(common.seed), config_json);
    manifest.record(&path);
    manifest.write(&common.out_dir, "sweep")?;
    println!("wrote {}", path.display());
    Ok(())
}
