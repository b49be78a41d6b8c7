//! Static SVG learning curves.

use std::path::Path;

use plotters::prelude::*;

use crate::error::{LabError, Result};

/// One line with a ±std band.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub timesteps: Vec<u64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

const SIZE: (u32, u32) = (900, 560);

fn plot_err(e: impl std::fmt::Display) -> LabError {
    LabError::Plot(e.to_string())
}

/// Draws every curve as a smoothed mean line with a translucent standard-deviation band.
pub fn plot_curves(path: &Path, title: &str, y_label: &str, curves: &[Curve]) -> Result<()> {
    let x_max = curves
        .iter()
        .flat_map(|c| c.timesteps.last().copied())
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for c in curves {
        for (m, s) in c.mean.iter().zip(&c.std) {
            y_min = y_min.min(m - s);
            y_max = y_max.max(m + s);
        }
    }
    if !y_min.is_finite() || !y_max.is_finite() {
        (y_min, y_max) = (0.0, 1.0);
    }
    let pad = ((y_max - y_min) * 0.05).max(1e-3);

    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(45)
        .y_label_area_size(60)
        .build_cartesian_2d(0.0..x_max, (y_min - pad)..(y_max + pad))
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc("timesteps")
        .y_desc(y_label)
        .draw()
        .map_err(plot_err)?;

    for (i, c) in curves.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        let xs: Vec<f64> = c.timesteps.iter().map(|&t| t as f64).collect();
        let mut band: Vec<(f64, f64)> = xs
            .iter()
            .zip(c.mean.iter().zip(&c.std))
            .map(|(&x, (m, s))| (x, m + s))
            .collect();
        band.extend(
            xs.iter()
                .zip(c.mean.iter().zip(&c.std))
                .rev()
                .map(|(&x, (m, s))| (x, m - s)),
        );
        if band.len() > 2 {
            chart
                .draw_series(std::iter::once(Polygon::new(band, color.mix(0.2).filled())))
                .map_err(plot_err)?;
        }
        chart
            .draw_series(LineSeries::new(
                xs.iter().copied().zip(c.mean.iter().copied()),
                color.stroke_width(2),
            ))
            .map_err(plot_err)?
            .label(c.label.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .position(SeriesLabelPosition::LowerRight)
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)
}
