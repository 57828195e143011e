//! Minimal SVG line plots. Decorative previews only; the CSV files are the
//! data contract.

use std::path::Path;

use anyhow::{Context, Result};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 6] = ["#d95f02", "#1b9e77", "#7570b3", "#e7298a", "#666666", "#a6761d"];

fn transform(v: f64, lo: f64, hi: f64, log: bool) -> f64 {
    if log {
        (v.ln() - lo.ln()) / (hi.ln() - lo.ln())
    } else {
        (v - lo) / (hi - lo)
    }
}

pub fn write_line_plot(
    path: &Path,
    title: &str,
    series: &[(String, Vec<(f64, f64)>)],
    log_x: bool,
    log_y: bool,
) -> Result<()> {
    let all: Vec<(f64, f64)> = series.iter().flat_map(|(_, pts)| pts.iter().copied()).collect();
    let finite = |v: f64| v.is_finite() && (!log_y || v > 0.0);
    let xs: Vec<f64> = all.iter().map(|p| p.0).filter(|&v| v.is_finite()).collect();
    let ys: Vec<f64> = all.iter().map(|p| p.1).filter(|&v| finite(v)).collect();
    if xs.is_empty() || ys.is_empty() {
        return Err(anyhow::anyhow!("nothing to plot"));
    }
    let (x_lo, x_hi) = (
        xs.iter().cloned().fold(f64::INFINITY, f64::min),
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let (y_lo, y_hi) = (
        ys.iter().cloned().fold(f64::INFINITY, f64::min),
        ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">{title}</text>\n",
        MARGIN
    ));
    svg.push_str(&format!(
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999\"/>\n",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    ));
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut d = String::new();
        let mut started = false;
        for &(x, y) in pts {
            if !x.is_finite() || !finite(y) {
                continue;
            }
            let px = MARGIN + transform(x, x_lo, x_hi, log_x) * (WIDTH - 2.0 * MARGIN);
            let py = HEIGHT - MARGIN - transform(y, y_lo, y_hi, log_y) * (HEIGHT - 2.0 * MARGIN);
            d.push_str(if started { "L" } else { "M" });
            d.push_str(&format!("{px:.1},{py:.1} "));
            started = true;
        }
        svg.push_str(&format!(
            "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{name}</text>\n",
            WIDTH - MARGIN - 140.0,
            MARGIN + 16.0 * (i + 1) as f64
        ));
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
