//! `optimize`: numerically optimized parameters per filter and flip rate.

use anyhow::{Context, Result};

use paritytrack::analytics::FilterId;

use crate::args::{resolve_mutau_values, ConfigFile, OptimizeArgs};
use crate::manifest::{ensure_out_dir, ManifestBuilder};
use crate::{usage_error, CliError};

fn parse_filters(name: &str) -> Result<Vec<FilterId>> {
    Ok(match name {
        "all" => FilterId::ALL.to_vec(),
        "bayes" => vec![FilterId::Bayes],
        "boxcar" => vec![FilterId::Boxcar],
        "halfbox" => vec![FilterId::HalfBoxcar],
        "double" => vec![FilterId::DoubleThreshold],
        other => {
            return Err(usage_error(format!(
                "unknown filter {other:?}; expected bayes|boxcar|halfbox|double|all"
            )))
        }
    })
}

pub fn run(args: OptimizeArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.common.config.as_ref())?;
    let common = args.common.resolve(&cfg)?;
    let filters = parse_filters(
        &args.filter.or_else(|| cfg.string("filter")).unwrap_or_else(|| "all".to_string()),
    )?;
    let mutaus = resolve_mutau_values(args.mutau, args.mutau_grid, &cfg)?;

    ensure_out_dir(&common.out_dir)?;
    let mut out = String::from("filter,mutau,dt_over_tau,a,t_max,delta_f_in,gamma_tau,feasible\n");
    let mut any_infeasible = false;
    for &mutau in &mutaus {
        for &filter in &filters {
            let r = paritytrack::optimize(filter, mutau, 1.0)?;
            any_infeasible |= !r.feasible;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                filter.name(),
                mutau,
                r.theory.dt_over_tau.map_or(String::new(), |v| v.to_string()),
                r.theory.a.map_or(String::new(), |v| v.to_string()),
                r.t_max,
                r.theory.delta_f_in,
                r.theory.gamma_tau,
                r.feasible,
            ));
        }
    }
    let path = common.out_dir.join("optimize.csv");
    std::fs::write(&path, &out).with_context(|| format!("writing {}", path.display()))?;
    let config_json = serde_json::json!({
        "filters": filters.iter().map(|f| f.name()).collect::<Vec<_>>(),
        "mutau_values": mutaus,
    });
    let mut manifest = ManifestBuilder::new(None, config_json);
    manifest.record(&path);
    manifest.write(&common.out_dir, "optimize")?;
    print!("{out}");
    if any_infeasible {
        return Err(anyhow::Error::new(CliError::Infeasible(
            "some requested points admit no parameters with an initial drop below 10%".to_string(),
        )));
    }
    Ok(())
}
