//! Static SVG figures from trajectory rows.

use std::path::Path;

use anyhow::{anyhow, Result};
use plotters::prelude::*;

use hems_core::env::{ComfortParams, StepRecord};

const PALETTE: [RGBColor; 5] = [BLUE, RED, GREEN, MAGENTA, CYAN];

fn series_plot(
    path: &Path,
    title: &str,
    y_label: &str,
    runs: &[(String, Vec<StepRecord>)],
    value: impl Fn(&StepRecord) -> f64,
    bands: &[f64],
) -> Result<()> {
    let hours = runs.iter().map(|(_, r)| r.len()).max().unwrap_or(0);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in runs.iter().flat_map(|(_, r)| r.iter().map(&value)).chain(bands.iter().copied()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(anyhow!("nothing to plot for {title}"));
    }
    let pad = ((hi - lo) * 0.05).max(1e-3);
    let root = SVGBackend::new(path, (1000, 420)).into_drawing_area();
    let err = |e: DrawingAreaErrorKind<_>| anyhow!("plotting {}: {e:?}", path.display());
    root.fill(&WHITE).map_err(err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(10)
        .x_label_area_size(35)
        .y_label_area_size(55)
        .build_cartesian_2d(0..hours.max(1), (lo - pad)..(hi + pad))
        .map_err(err)?;
    chart.configure_mesh().x_desc("hour").y_desc(y_label).draw().map_err(err)?;
    for &b in bands {
        chart
            .draw_series(LineSeries::new([(0, b), (hours, b)], BLACK.mix(0.5).stroke_width(1)))
            .map_err(err)?;
    }
    for (k, (label, records)) in runs.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        chart
            .draw_series(LineSeries::new(records.iter().enumerate().map(|(i, r)| (i, value(r))), color))
            .map_err(err)?
            .label(label.as_str())
            .legend(move |(x, y)| PathElement::new([(x, y), (x + 18, y)], color));
    }
    chart.configure_series_labels().background_style(WHITE.mix(0.8)).border_style(BLACK).draw().map_err(err)?;
    root.present().map_err(err)?;
    Ok(())
}

/// Writes temperature (with the comfort band), SoC and grid-power plots.
pub fn render_all(out: &Path, runs: &[(String, Vec<StepRecord>)], comfort: &ComfortParams) -> Result<()> {
    series_plot(
        &out.join("temperature.svg"),
        "Indoor temperature",
        "°C",
        runs,
        |r| r.t_in,
        &[comfort.t_min, comfort.t_max],
    )?;
    series_plot(&out.join("soc_ess.svg"), "Home battery state of charge", "SoC", runs, |r| r.soc_ess, &[])?;
    series_plot(&out.join("soc_ev.svg"), "EV state of charge", "SoC", runs, |r| r.soc_ev, &[])?;
    series_plot(&out.join("grid_power.svg"), "Grid exchange", "kW", runs, |r| r.p_grid, &[0.0])?;
    Ok(())
}
