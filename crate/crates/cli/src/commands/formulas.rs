//! `formulas`: closed-form performance tables across a flip-rate grid:
//! numerically optimized full expressions, the dominant-scaling forms, and
//! the ancilla-based strategies.

use anyhow::{Context, Result};

use paritytrack::analytics::{
    ancilla_optimized, ancilla_theory, AncillaStrategy, DropPrefactor, FilterId,
    ANCILLA_GATE_TIME_OVER_TAU,
};

use crate::args::{resolve_mutau_values, ConfigFile, FormulasArgs};
use crate::manifest::{ensure_out_dir, ManifestBuilder};
use crate::usage_error;

struct Row {
    source: &'static str,
    name: String,
    mutau: f64,
    dt_over_tau: Option<f64>,
    a: Option<f64>,
    delta_f_in: f64,
    gamma_tau: f64,
}

pub fn run(args: FormulasArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.common.config.as_ref())?;
    let common = args.common.resolve(&cfg)?;
    let mutaus = resolve_mutau_values(args.mutau, args.mutau_grid, &cfg)?;
    let prefactor = match args
        .drop_prefactor
        .or_else(|| cfg.string("drop-prefactor"))
        .unwrap_or_else(|| "noise-corrected".to_string())
        .as_str()
    {
        "derived" => DropPrefactor::Derived,
        "noise-corrected" | "noise_corrected" => DropPrefactor::NoiseCorrected,
        other => return Err(usage_error(format!("unknown drop prefactor {other:?}"))),
    };

    let mut rows: Vec<Row> = Vec::new();
    for &mutau in &mutaus {
        for filter in FilterId::ALL {
            let opt = paritytrack::optimize(filter, mutau, 1.0)?;
            let th = paritytrack::theory(
                filter,
                mutau,
                1.0,
                opt.theory.dt_over_tau,
                opt.theory.a,
                prefactor,
            );
            rows.push(Row {
                source: "optimized",
                name: filter.name().to_string(),
                mutau,
                dt_over_tau: th.dt_over_tau,
                a: th.a,
                delta_f_in: th.delta_f_in,
                gamma_tau: th.gamma_tau,
            });
        }
        for filter in FilterId::ALL {
            let th = paritytrack::simplified_scaling(filter, mutau, 1.0);
            rows.push(Row {
                source: "scaling",
                name: filter.name().to_string(),
                mutau,
                dt_over_tau: th.dt_over_tau,
                a: th.a,
                delta_f_in: th.delta_f_in,
                gamma_tau: th.gamma_tau,
            });
        }
        for strategy in [
            AncillaStrategy::Idealistic,
            AncillaStrategy::Pessimistic,
            AncillaStrategy::Optimistic,
        ] {
            let crude = ancilla_optimized(strategy, mutau, 1.0);
            rows.push(Row {
                source: "ancilla_crude",
                name: strategy.name().to_string(),
                mutau,
                dt_over_tau: Some(crude.dt_over_tau),
                a: None,
                delta_f_in: crude.delta_f_in,
                gamma_tau: crude.gamma_tau,
            });
            if !matches!(strategy, AncillaStrategy::Idealistic) {
                // full formulas evaluated at the crude-optimized times
                let cycle = crude.cycle_over_tau.max(crude.dt_over_tau + ANCILLA_GATE_TIME_OVER_TAU);
                let full = ancilla_theory(strategy, mutau, 1.0, crude.dt_over_tau, cycle)?;
                rows.push(Row {
                    source: "ancilla_full",
                    name: strategy.name().to_string(),
                    mutau,
                    dt_over_tau: Some(full.dt_over_tau),
                    a: None,
                    delta_f_in: full.delta_f_in,
                    gamma_tau: full.gamma_tau,
                });
            }
        }
    }

    ensure_out_dir(&common.out_dir)?;
    let mut csv = String::from("source,filter,mutau,dt_over_tau,a,delta_f_in,gamma_tau\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.source,
            r.name,
            r.mutau,
            r.dt_over_tau.map_or(String::new(), |v| v.to_string()),
            r.a.map_or(String::new(), |v| v.to_string()),
            r.delta_f_in,
            r.gamma_tau,
        ));
    }
    let path = common.out_dir.join("formulas.csv");
    std::fs::write(&path, &csv).with_context(|| format!("writing {}", path.display()))?;

    println!(
        "{:<14} {:<12} {:>10} {:>12} {:>8} {:>13} {:>13}",
        "source", "filter", "mutau", "dt_over_tau", "a", "delta_f_in", "gamma_tau"
    );
    for r in &rows {
        println!(
            "{:<14} {:<12} {:>10.3e} {:>12} {:>8} {:>13.4e} {:>13.4e}",
            r.source,
            r.name,
            r.mutau,
            r.dt_over_tau.map_or(String::from("-"), |v| format!("{v:.3}")),
            r.a.map_or(String::from("-"), |v| format!("{v:.3}")),
            r.delta_f_in,
            r.gamma_tau,
        );
    }

    let config_json = serde_json::json!({ "mutau_values": mutaus });
    let mut manifest = ManifestBuilder::new(None, config_json);
    manifest.record(&path);
    manifest.write(&common.out_dir, "formulas")?;
    Ok(())
}
