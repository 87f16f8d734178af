use std::fmt;

use super::series::{NormRow, NormSeries};
use crate::error::{Error, Result};

/// Minimum number of samples inside a fit window.
pub const MIN_SAMPLES: usize = 10;

/// Column of a [`NormSeries`] that can be fitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    N(usize),
    V(usize),
    Joint(usize),
    /// `min(||∇^k n||, ||∇^k v||)`.
    MinNV(usize),
    NInf,
    LogCInf,
    Energy(usize),
}

impl Quantity {
    pub fn value(&self, row: &NormRow) -> f64 {
        match *self {
            Quantity::N(k) => row.n[k],
            Quantity::V(k) => row.v[k],
            Quantity::Joint(k) => row.joint(k),
            Quantity::MinNV(k) => row.n[k].min(row.v[k]),
            Quantity::NInf => row.n_inf,
            Quantity::LogCInf => row.log_c_inf,
            Quantity::Energy(k) => row.energy[k],
        }
    }

    /// Derivative order, where meaningful.
    pub fn order(&self) -> Option<usize> {
        match *self {
            Quantity::N(k)
            | Quantity::V(k)
            | Quantity::Joint(k)
            | Quantity::MinNV(k)
            | Quantity::Energy(k) => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::N(k) => write!(f, "n_{k}"),
            Quantity::V(k) => write!(f, "v_{k}"),
            Quantity::Joint(k) => write!(f, "joint_{k}"),
            Quantity::MinNV(k) => write!(f, "min_nv_{k}"),
            Quantity::NInf => write!(f, "n_inf"),
            Quantity::LogCInf => write!(f, "log_c_inf"),
            Quantity::Energy(k) => write!(f, "E_{k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    InsufficientWindow,
    NotApplicable,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_failure(&self) -> bool {
        *self == Verdict::Fail
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::InsufficientWindow => "insufficient_window",
            Verdict::NotApplicable => "not_applicable",
        })
    }
}

/// Least-squares line `y = intercept + slope x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    /// Residual standard error.
    pub residual_se: f64,
}

/// Ordinary least squares on centered data.
pub fn least_squares(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let dof = (x.len() as f64 - 2.0).max(1.0);
    let residual_se = (ssr / dof).sqrt();
    LineFit {
        slope,
        intercept,
        stderr: residual_se / sxx.sqrt(),
        residual_se,
    }
}

/// Result of one slope fit.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub quantity: Quantity,
    pub target: f64,
    pub tolerance: f64,
    pub window: (f64, f64),
    pub samples: usize,
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub residual_se: f64,
    pub verdict: Verdict,
    /// `(t, residual)` at every sample inside the window.
    pub residuals: Vec<(f64, f64)>,
}

impl DecayFit {
    fn insufficient(
        quantity: Quantity,
        target: f64,
        tolerance: f64,
        window: (f64, f64),
        samples: usize,
    ) -> Self {
        DecayFit {
            quantity,
            target,
            tolerance,
            window,
            samples,
            slope: f64::NAN,
            intercept: f64::NAN,
            stderr: f64::NAN,
            residual_se: f64::NAN,
            verdict: Verdict::InsufficientWindow,
            residuals: Vec::new(),
        }
    }
}

/// `-(d + 2k) / 4`, the heat-kernel rate of `||∇^k f||_{L^2}` in `d` dimensions.
pub fn l2_exponent(dim: usize, k: usize) -> f64 {
    -((dim + 2 * k) as f64) / 4.0
}

/// `[10, min(t_final, (L / 2 pi)^2 / 2)]`.
pub fn default_window(series: &NormSeries) -> (f64, f64) {
    let l = series.meta.box_length / (2.0 * std::f64::consts::PI);
    (10.0, series.meta.t_final.min(0.5 * l * l))
}

fn window_rows(series: &NormSeries, window: (f64, f64)) -> Vec<&NormRow> {
    // a hair of slack so that output times snapped to the step grid stay in
    let slack = 1e-9 * window.1.abs().max(1.0);
    series
        .rows
        .iter()
        .filter(|r| r.t >= window.0 - slack && r.t <= window.1 + slack)
        .collect()
}

/// Fits `log value` against `log(1 + t)` over `window`; passes when
/// `|slope - target| <= tolerance`. Fewer than [`MIN_SAMPLES`] points give
/// an [`Verdict::InsufficientWindow`] result; a nonpositive value inside the
/// window is an error.
pub fn fit_decay(
    series: &NormSeries,
    quantity: Quantity,
    window: (f64, f64),
    target: f64,
    tolerance: f64,
) -> Result<DecayFit> {
    fit_generic(
        series,
        quantity,
        window,
        target,
        tolerance,
        |t| (1.0 + t).ln(),
        |v| v.ln(),
    )
}

pub(crate) fn fit_generic(
    series: &NormSeries,
    quantity: Quantity,
    window: (f64, f64),
    target: f64,
    tolerance: f64,
    fx: impl Fn(f64) -> f64,
    fy: impl Fn(f64) -> f64,
) -> Result<DecayFit> {
    if quantity
        .order()
        .is_some_and(|k| k > series.meta.k_max as usize)
    {
        return Err(Error::NotRecorded(format!(
            "{quantity} (k_max = {})",
            series.meta.k_max
        )));
    }
    let rows = window_rows(series, window);
    if rows.len() < MIN_SAMPLES || window.1 <= window.0 {
        return Ok(DecayFit::insufficient(
            quantity,
            target,
            tolerance,
            window,
            rows.len(),
        ));
    }
    let mut x = Vec::with_capacity(rows.len());
    let mut y = Vec::with_capacity(rows.len());
    for r in &rows {
        let v = quantity.value(r);
        let yv = fy(v);
        if !yv.is_finite() {
            return Err(Error::NonPositiveInWindow {
                time: r.t,
                value: v,
            });
        }
        x.push(fx(r.t));
        y.push(yv);
    }
    let line = least_squares(&x, &y);
    let residuals = rows
        .iter()
        .zip(x.iter().zip(&y))
        .map(|(r, (a, b))| (r.t, b - line.intercept - line.slope * a))
        .collect();
    Ok(DecayFit {
        quantity,
        target,
        tolerance,
        window,
        samples: rows.len(),
        slope: line.slope,
        intercept: line.intercept,
        stderr: line.stderr,
        residual_se: line.residual_se,
        verdict: Verdict::from_bool((line.slope - target).abs() <= tolerance),
        residuals,
    })
}

/// Outcome of [`lower_bound_ratio`].
#[derive(Clone, Debug, PartialEq)]
pub struct RatioCheck {
    pub quantity: Quantity,
    pub window: (f64, f64),
    /// `(t, value (1 + t)^((d + 2k)/4))` over the window.
    pub ratios: Vec<(f64, f64)>,
    pub min: f64,
    pub median: f64,
    /// Slope of `log ratio` against `log(1 + t)`.
    pub drift: f64,
    pub verdict: Verdict,
}

/// Checks that `value (1+t)^((d+2k)/4)` neither trends to zero nor dips:
/// passes when `min >= 0.5 median` and the drift slope is in `[-0.1, 0.1]`.
/// Reported as not applicable when the run carries no mass.
pub fn lower_bound_ratio(
    series: &NormSeries,
    quantity: Quantity,
    window: (f64, f64),
) -> Result<RatioCheck> {
    let k = quantity
        .order()
        .ok_or_else(|| Error::InvalidParameter(format!("{quantity} has no derivative order")))?;
    let mut out = RatioCheck {
        quantity,
        window,
        ratios: Vec::new(),
        min: f64::NAN,
        median: f64::NAN,
        drift: f64::NAN,
        verdict: Verdict::NotApplicable,
    };
    if !series.has_mass() {
        return Ok(out);
    }
    let rows = window_rows(series, window);
    if rows.len() < MIN_SAMPLES {
        out.verdict = Verdict::InsufficientWindow;
        return Ok(out);
    }
    let p = -l2_exponent(series.meta.dim, k);
    out.ratios = rows
        .iter()
        .map(|r| (r.t, quantity.value(r) * (1.0 + r.t).powf(p)))
        .collect();
    if let Some(&(time, value)) = out.ratios.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::NonPositiveInWindow { time, value });
    }
    let mut sorted: Vec<f64> = out.ratios.iter().map(|r| r.1).collect();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    out.median = if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    };
    out.min = sorted[0];
    let x: Vec<f64> = out.ratios.iter().map(|r| (1.0 + r.0).ln()).collect();
    let y: Vec<f64> = out.ratios.iter().map(|r| r.1.ln()).collect();
    out.drift = least_squares(&x, &y).slope;
    out.verdict =
        Verdict::from_bool(out.min >= 0.5 * out.median && (-0.1..=0.1).contains(&out.drift));
    Ok(out)
}
