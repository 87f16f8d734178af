use super::fit::{fit_generic, DecayFit, Quantity, Verdict};
use super::series::NormSeries;
use crate::error::{Error, Result};
use crate::semigroup::SpectralState;
use crate::spectral::SpectralOps;

/// Relative per-interval growth tolerated by [`energy_audit`].
pub const ENERGY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyReport {
    /// Number of intervals with `E_k(t_{i+1}) > E_k(t_i) (1 + 1e-10)`, per `k`.
    pub violations: Vec<usize>,
    /// Largest relative increase seen, per `k`.
    pub worst: Vec<f64>,
    pub verdict: Verdict,
}

pub fn energy_audit(series: &NormSeries) -> EnergyReport {
    let k = series.meta.k_max as usize;
    let mut violations = vec![0; k];
    let mut worst = vec![0.0f64; k];
    for w in series.rows.windows(2) {
        for i in 0..k {
            let (a, b) = (w[0].energy[i], w[1].energy[i]);
            if b > a * (1.0 + ENERGY_TOLERANCE) {
                violations[i] += 1;
            }
            if a > 0.0 {
                worst[i] = worst[i].max(b / a - 1.0);
            }
        }
    }
    let verdict = Verdict::from_bool(violations.iter().all(|&v| v == 0));
    EnergyReport {
        violations,
        worst,
        verdict,
    }
}

/// `(E_low, E_high)`: `L^-d sum |U_hat|^2` over `|xi|^2 <= R/(1+t)` and
/// over the rest, where `|U_hat|^2 = |n_hat|^2 + sum_a |v_hat_a|^2`.
pub fn fourier_split(
    ops: &SpectralOps,
    state: &SpectralState,
    r: f64,
    t: f64,
) -> Result<(f64, f64)> {
    ops.grid().ensure_same(state.grid())?;
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "split radius R must be > 0, got {r}"
        )));
    }
    let threshold = r / (1.0 + t);
    let xi2 = ops.wavenumbers().xi2();
    let power = |i: usize| -> f64 {
        state.n()[i].norm_sqr() + state.v().iter().map(|c| c[i].norm_sqr()).sum::<f64>()
    };
    let low = crate::spectral::pairwise_sum_by(xi2.len(), &|i| {
        if xi2[i] <= threshold {
            power(i)
        } else {
            0.0
        }
    });
    let high = crate::spectral::pairwise_sum_by(xi2.len(), &|i| {
        if xi2[i] > threshold {
            power(i)
        } else {
            0.0
        }
    });
    let vol = ops.grid().volume();
    Ok((low / vol, high / vol))
}

/// Exponential decay check for `||c||_inf`.
#[derive(Clone, Debug, PartialEq)]
pub struct CDecayCheck {
    /// Fit of `ln ||c||_inf` against `t`; target `-u_bar`, tolerance `0.1 u_bar`.
    pub fit: DecayFit,
    /// `max_window(ln ||c||_inf + u_bar t) - ln ||c0||_inf`.
    pub excess: f64,
    pub bounded: bool,
    pub verdict: Verdict,
}

/// Allowed growth of `ln ||c||_inf + u_bar t` above its initial value.
pub const C_EXCESS_BOUND: f64 = 1.0;

pub fn c_decay_check(series: &NormSeries, window: (f64, f64)) -> Result<CDecayCheck> {
    if !series.has_c() {
        return Err(Error::NotRecorded("log_c_inf".into()));
    }
    let u_bar = series.meta.u_bar;
    let fit = fit_generic(
        series,
        Quantity::LogCInf,
        window,
        -u_bar,
        0.1 * u_bar,
        |t| t,
        |v| v,
    )?;
    let start = series.rows[0].log_c_inf + u_bar * series.rows[0].t;
    let excess = fit
        .residuals
        .iter()
        .filter_map(|(t, _)| series.rows.iter().find(|r| r.t == *t))
        .map(|r| r.log_c_inf + u_bar * r.t - start)
        .fold(f64::NEG_INFINITY, f64::max);
    let bounded = excess <= C_EXCESS_BOUND;
    let verdict = match fit.verdict {
        Verdict::Pass if !bounded => Verdict::Fail,
        v => v,
    };
    Ok(CDecayCheck {
        fit,
        excess,
        bounded,
        verdict,
    })
}

/// Fit of `sup |n - mean n|` against `-(d + 2)/4`.
pub fn linfty_decay_check(
    series: &NormSeries,
    window: (f64, f64),
    tolerance: f64,
) -> Result<DecayFit> {
    let target = -((series.meta.dim + 2) as f64) / 4.0;
    super::fit::fit_decay(series, Quantity::NInf, window, target, tolerance)
}

/// Rows violating `||∇n||^2 <= ||n|| ||∇^2 n|| + 1e-12` or, for
/// `k = 2..=k_max`, `||∇n|| <= ||n||^(1-1/k) ||∇^k n||^(1/k) + 1e-12`.
pub fn interpolation_violations(series: &NormSeries) -> usize {
    let k_max = series.meta.k_max as usize;
    if k_max < 2 {
        return 0;
    }
    series
        .rows
        .iter()
        .filter(|r| {
            let n = &r.n;
            let mut bad = n[1] * n[1] > n[0] * n[2] + 1e-12;
            for k in 2..=k_max {
                let kf = k as f64;
                bad |= n[1] > n[0].powf(1.0 - 1.0 / kf) * n[k].powf(1.0 / kf) + 1e-12;
            }
            bad
        })
        .count()
}

/// Largest `|M(t) - M(0)| / max(1, |M(0)|)` over `M_n` and the components of `M_v`.
pub fn mass_drift(series: &NormSeries) -> f64 {
    let Some(first) = series.rows.first() else {
        return 0.0;
    };
    let rel = |m: f64, m0: f64| (m - m0).abs() / m0.abs().max(1.0);
    series
        .rows
        .iter()
        .map(|r| {
            let dv = r
                .mass_v
                .iter()
                .zip(&first.mass_v)
                .map(|(a, b)| rel(*a, *b))
                .fold(0.0, f64::max);
            rel(r.mass_n, first.mass_n).max(dv)
        })
        .fold(0.0, f64::max)
}
