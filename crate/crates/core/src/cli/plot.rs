//! Self-contained SVG figures of a norm series.

use plotters::prelude::*;

use crate::analysis::{
    default_window, fit_decay, l2_exponent, AnalysisConfig, NormSeries, Quantity,
};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Data,
    Fit,
    Reference,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub label: String,
    pub style: Style,
    /// Index into the palette; a fit and its data share a color.
    pub color: usize,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Panel {
    /// Output file name.
    pub file: String,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub curves: Vec<Curve>,
}

const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(23, 190, 207),
];

fn positive(points: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    points
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite())
        .collect()
}

/// Data, fitted line and reference slope of one quantity against `1 + t`.
/// The reference line passes through the fitted line at the window start.
fn fitted_curves(
    series: &NormSeries,
    q: Quantity,
    target: f64,
    window: (f64, f64),
    color: usize,
) -> Result<Vec<Curve>> {
    let data = positive(series.rows.iter().map(|r| (1.0 + r.t, q.value(r))));
    let mut curves = vec![Curve {
        label: q.to_string(),
        style: Style::Data,
        color,
        points: data,
    }];
    // a window with zeros or too few samples just gets no overlay
    let Ok(fit) = fit_decay(series, q, window, target, 1.0) else {
        return Ok(curves);
    };
    if fit.slope.is_finite() {
        let xs: Vec<f64> = fit.residuals.iter().map(|(t, _)| 1.0 + t).collect();
        let line = |x: f64, slope: f64, x0: f64, y0: f64| y0 * (x / x0).powf(slope);
        let x0 = xs[0];
        let y0 = (fit.intercept + fit.slope * x0.ln()).exp();
        curves.push(Curve {
            label: format!("fit {:.3}", fit.slope),
            style: Style::Fit,
            color,
            points: xs
                .iter()
                .map(|&x| (x, (fit.intercept + fit.slope * x.ln()).exp()))
                .collect(),
        });
        curves.push(Curve {
            label: format!("rate {target}"),
            style: Style::Reference,
            color,
            points: xs.iter().map(|&x| (x, line(x, target, x0, y0))).collect(),
        });
    }
    Ok(curves)
}

/// The figures drawn by [`plot_series`]: L² norms, sup norm, lower-bound
/// ratios and energies, plus the chemical excess when recorded.
pub fn panels(series: &NormSeries, cfg: &AnalysisConfig) -> Result<Vec<Panel>> {
    let meta = &series.meta;
    let window = cfg
        .window
        .map(|w| (w[0], w[1]))
        .unwrap_or_else(|| default_window(series));
    let k_fit = cfg.k_fit_max.unwrap_or(2).min(meta.k_max as usize);
    let dim = meta.dim.max(1);
    let mut out = Vec::new();

    let mut norms = Vec::new();
    for k in 0..=k_fit {
        norms.extend(fitted_curves(
            series,
            Quantity::Joint(k),
            l2_exponent(dim, k),
            window,
            k,
        )?);
    }
    out.push(Panel {
        file: "norms.svg".into(),
        title: "joint L2 seminorms".into(),
        x_label: "1 + t".into(),
        y_label: "|grad^k (n, v)|".into(),
        log_y: true,
        curves: norms,
    });

    out.push(Panel {
        file: "linf.svg".into(),
        title: "sup |u - u_bar|".into(),
        x_label: "1 + t".into(),
        y_label: "sup |n|".into(),
        log_y: true,
        curves: fitted_curves(series, Quantity::NInf, -((dim + 2) as f64) / 4.0, window, 0)?,
    });

    let mut ratios = Vec::new();
    for (i, &k) in cfg
        .lower_bound_orders
        .iter()
        .filter(|&&k| k <= meta.k_max as usize)
        .enumerate()
    {
        let p = -l2_exponent(dim, k);
        for (j, (name, q)) in [("n", Quantity::N(k)), ("v", Quantity::V(k))]
            .into_iter()
            .enumerate()
        {
            ratios.push(Curve {
                label: format!("{name}_{k} (1+t)^{p}"),
                style: Style::Data,
                color: 2 * i + j,
                points: positive(
                    series
                        .rows
                        .iter()
                        .map(|r| (1.0 + r.t, q.value(r) * (1.0 + r.t).powf(p))),
                ),
            });
        }
    }
    out.push(Panel {
        file: "ratios.svg".into(),
        title: "lower-bound ratios".into(),
        x_label: "1 + t".into(),
        y_label: "rescaled norm".into(),
        log_y: true,
        curves: ratios,
    });

    let energy = (0..meta.k_max as usize)
        .map(|k| Curve {
            label: format!("E_{k}"),
            style: Style::Data,
            color: k,
            points: positive(series.rows.iter().map(|r| (1.0 + r.t, r.energy[k]))),
        })
        .collect();
    out.push(Panel {
        file: "energy.svg".into(),
        title: "energies".into(),
        x_label: "1 + t".into(),
        y_label: "E_k".into(),
        log_y: true,
        curves: energy,
    });

    if series.has_c() {
        out.push(Panel {
            file: "chem.svg".into(),
            title: "ln sup c + u_bar t".into(),
            x_label: "1 + t".into(),
            y_label: "excess".into(),
            log_y: false,
            curves: vec![Curve {
                label: "ln sup c + u_bar t".into(),
                style: Style::Data,
                color: 0,
                points: series
                    .rows
                    .iter()
                    .map(|r| (1.0 + r.t, r.log_c_inf + meta.u_bar * r.t))
                    .filter(|p| p.1.is_finite())
                    .collect(),
            }],
        });
    }
    Ok(out)
}

fn bounds(values: impl Iterator<Item = f64>, log: bool, fallback: (f64, f64)) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if !(lo.is_finite() && hi.is_finite()) {
        return fallback;
    }
    if log {
        let (lo, hi) = if hi > lo {
            (lo, hi)
        } else {
            (lo / 2.0, hi * 2.0)
        };
        (lo / 1.2, hi * 1.2)
    } else {
        let pad = if hi > lo {
            0.05 * (hi - lo)
        } else {
            0.5 * hi.abs().max(1.0)
        };
        (lo - pad, hi + pad)
    }
}

fn draw_error<E: std::error::Error + Send + Sync>(e: DrawingAreaErrorKind<E>) -> crate::Error {
    crate::Error::InvalidParameter(format!("plot rendering: {e}"))
}

/// Renders one panel as an SVG document.
pub fn render_svg(panel: &Panel) -> Result<String> {
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (720, 540)).into_drawing_area();
        root.fill(&WHITE).map_err(draw_error)?;
        let all = || panel.curves.iter().flat_map(|c| c.points.iter());
        let (x0, x1) = bounds(all().map(|p| p.0), true, (1.0, 10.0));
        let (y0, y1) = bounds(
            all().map(|p| p.1),
            panel.log_y,
            if panel.log_y { (0.1, 1.0) } else { (0.0, 1.0) },
        );
        let mut builder = ChartBuilder::on(&root);
        builder
            .caption(&panel.title, ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(70);
        macro_rules! draw {
            ($chart:expr) => {{
                let mut chart = $chart;
                chart
                    .configure_mesh()
                    .x_desc(panel.x_label.as_str())
                    .y_desc(panel.y_label.as_str())
                    .y_label_formatter(&|v| format!("{v:.1e}"))
                    .draw()
                    .map_err(draw_error)?;
                for c in &panel.curves {
                    let color = PALETTE[c.color % PALETTE.len()];
                    let pts = c.points.iter().copied();
                    match c.style {
                        Style::Data => {
                            chart
                                .draw_series(pts.map(|p| Circle::new(p, 2, color.filled())))
                                .map_err(draw_error)?
                                .label(c.label.as_str())
                                .legend(move |(x, y)| Circle::new((x + 10, y), 3, color.filled()));
                        }
                        Style::Fit => {
                            chart
                                .draw_series(LineSeries::new(pts, color.stroke_width(2)))
                                .map_err(draw_error)?
                                .label(c.label.as_str())
                                .legend(move |(x, y)| {
                                    PathElement::new(
                                        vec![(x, y), (x + 20, y)],
                                        color.stroke_width(2),
                                    )
                                });
                        }
                        Style::Reference => {
                            chart
                                .draw_series(DashedLineSeries::new(
                                    pts,
                                    6,
                                    4,
                                    BLACK.mix(0.6).stroke_width(1),
                                ))
                                .map_err(draw_error)?
                                .label(c.label.as_str())
                                .legend(|(x, y)| {
                                    PathElement::new(vec![(x, y), (x + 20, y)], BLACK.mix(0.6))
                                });
                        }
                    }
                }
                if !panel.curves.is_empty() {
                    chart
                        .configure_series_labels()
                        .background_style(WHITE.mix(0.8))
                        .border_style(BLACK)
                        .draw()
                        .map_err(draw_error)?;
                }
            }};
        }
        if panel.log_y {
            draw!(builder
                .build_cartesian_2d((x0..x1).log_scale(), (y0..y1).log_scale())
                .map_err(draw_error)?);
        } else {
            draw!(builder
                .build_cartesian_2d((x0..x1).log_scale(), y0..y1)
                .map_err(draw_error)?);
        }
        root.present().map_err(draw_error)?;
    }
    Ok(svg)
}

/// Writes every panel of `series` into `dir`; returns the paths written.
pub fn plot_series(
    series: &NormSeries,
    cfg: &AnalysisConfig,
    dir: &std::path::Path,
) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| crate::Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for p in panels(series, cfg)? {
        let path = dir.join(&p.file);
        std::fs::write(&path, render_svg(&p)?).map_err(|source| crate::Error::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
