use super::stepper::{spectral_finite, Stepper};
use super::{default_dt, IntegratorConfig, Schedule};
use crate::analysis::{fourier_split, NormRow, NormSeries, SeriesMeta};
use crate::error::Result;
use crate::model::{CReconstruction, InitialData, ModelParams, State};
use crate::semigroup::{propagate, SpectralState};
use crate::spectral::{max_by, ScalarField, SpectralOps, SpectralScalar, SpectralVector};

/// Output of [`run`].
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub config: IntegratorConfig,
    pub params: ModelParams,
    /// Step actually used.
    pub dt: f64,
    /// Steps completed.
    pub steps: usize,
    pub series: NormSeries,
    pub final_state: State,
    /// `ln c` at the final time, when tracked.
    pub final_ln_c: Option<ScalarField>,
    /// Set when the run stopped early; the series ends at the last good output.
    pub failure: Option<String>,
}

impl Trajectory {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }
}

fn series_meta(ops: &SpectralOps, params: &ModelParams, cfg: &IntegratorConfig) -> SeriesMeta {
    let g = ops.grid();
    SeriesMeta {
        dim: g.dim(),
        points_per_dim: g.points_per_dim(),
        box_length: g.box_length(),
        epsilon: params.epsilon,
        u_bar: params.u_bar,
        k_max: cfg.k_max,
        split_r: cfg.split_r,
        t_final: cfg.t_final,
        linear_only: cfg.linear_only,
    }
}

/// Norms of one spectral state; `n_real` is its real-space `n`.
pub fn measure(
    ops: &SpectralOps,
    params: &ModelParams,
    u: &SpectralState,
    n_real: &[f64],
    t: f64,
    log_c_inf: f64,
    config: &IntegratorConfig,
) -> Result<NormRow> {
    let (k_max, split_r) = (config.k_max, config.split_r);
    let grid = ops.grid();
    let norm_v = |k: u32| {
        u.v()
            .iter()
            .map(|c| ops.seminorm_raw(c, k, true).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let n: Vec<f64> = (0..=k_max)
        .map(|k| ops.seminorm_raw(u.n(), k, true))
        .collect();
    let v: Vec<f64> = (0..=k_max).map(norm_v).collect();
    let mean = u.n()[0].re / grid.volume();
    let n_inf = max_by(n_real.len(), &|i| (n_real[i] - mean).abs());
    let energy = (0..k_max as usize)
        .map(|k| n[k].powi(2) + n[k + 1].powi(2) + params.u_bar * (v[k].powi(2) + v[k + 1].powi(2)))
        .collect();
    let (split_low, split_high) = fourier_split(ops, u, split_r, t)?;
    let comps = u
        .v()
        .iter()
        .map(|c| SpectralScalar::new(grid, c.clone()))
        .collect::<Result<Vec<_>>>()?;
    let curl_v = ops.seminorm_vector(&ops.curl(&SpectralVector::new(comps)?)?, 0);
    Ok(NormRow {
        t,
        n,
        v,
        n_inf,
        log_c_inf,
        mass_n: u.n()[0].re,
        mass_v: u.v().iter().map(|c| c[0].re).collect(),
        energy,
        split_low,
        split_high,
        curl_v,
    })
}

/// Integrates from `initial` to `config.t_final`, recording a row at every
/// scheduled output.
///
/// Non-finite values or a loss of positivity (`u_bar + n <= 0`) stop the
/// run; the trajectory is returned with `failure` set.
pub fn run(
    ops: &SpectralOps,
    initial: &InitialData,
    params: &ModelParams,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    config.validate()?;
    ops.grid().ensure_same(initial.state.grid())?;
    let dt_req = config.dt.unwrap_or_else(|| default_dt(&initial.state));
    let schedule = Schedule::new(config, dt_req)?;
    let dt = schedule.dt;
    let stepper = Stepper::new(ops, *params, dt, config.scheme, config.linear_only)?;
    let track_c = config.track_c && !config.linear_only;
    let nonlinear = !config.linear_only;

    let mut u = initial.state.to_spectral(ops)?;
    let mut series = NormSeries::new(series_meta(ops, params, config));
    let mut crecon: Option<CReconstruction> = None;
    let mut next_output = 0;
    let mut failure = None;
    let mut done = 0;
    let mut prev: Option<SpectralState> = None;

    for k in 0..=schedule.steps {
        let t = k as f64 * dt;
        let is_output = schedule.output_steps.get(next_output) == Some(&k);
        let need_eval = nonlinear || is_output;
        let eval = need_eval.then(|| stepper.evaluate(&u, nonlinear && k < schedule.steps));
        if let Some(e) = &eval {
            let min_u = params.u_bar + e.min_n();
            if !e.is_finite() || !(min_u > 0.0) {
                failure = Some(if e.is_finite() {
                    format!("positivity lost at step {k} (t = {t}): min u = {min_u:e}")
                } else {
                    format!("non-finite values at step {k} (t = {t})")
                });
                if let Some(p) = prev.take() {
                    u = p;
                }
                break;
            }
            if track_c {
                let integrand = e.chem_integrand(params.epsilon);
                match crecon.as_mut() {
                    None => {
                        crecon = Some(CReconstruction::start(&initial.ln_c0, params, integrand))
                    }
                    Some(c) => c.advance(integrand, dt),
                }
            }
        }
        if is_output {
            let e = eval.as_ref().expect("evaluated at outputs");
            let log_c = match &crecon {
                Some(c) => c.log_sup(t)?,
                None => f64::NAN,
            };
            series
                .rows
                .push(measure(ops, params, &u, &e.n, t, log_c, config)?);
            next_output += 1;
        }
        done = k;
        if k == schedule.steps {
            break;
        }
        let next = stepper.advance(&u, eval.as_ref());
        if !spectral_finite(&next) {
            failure = Some(format!(
                "non-finite coefficients after step {} (t = {})",
                k + 1,
                t + dt
            ));
            break;
        }
        prev = Some(std::mem::replace(&mut u, next));
    }

    let t_end = done as f64 * dt;
    let final_ln_c = match &crecon {
        Some(c) if (c.time() - t_end).abs() <= 1e-9 * t_end.max(1.0) => Some(c.ln_c(t_end)?),
        _ => None,
    };
    Ok(Trajectory {
        config: config.clone(),
        params: *params,
        dt,
        steps: done,
        series,
        final_state: State::from_spectral(ops, &u, t_end)?,
        final_ln_c,
        failure,
    })
}

/// Linear evolution without stepping: every output row is measured on
/// `G(t) U0`, evaluated mode by mode. Uses the same output schedule as
/// [`run`] with the same config.
pub fn run_linear_direct(
    ops: &SpectralOps,
    initial: &State,
    params: &ModelParams,
    config: &IntegratorConfig,
) -> Result<NormSeries> {
    let mut cfg = config.clone();
    cfg.linear_only = true;
    cfg.validate()?;
    let dt_req = cfg.dt.unwrap_or_else(|| default_dt(initial));
    let schedule = Schedule::new(&cfg, dt_req)?;
    let system = params.linear_system()?;
    let u0 = initial.to_spectral(ops)?;
    let mut series = NormSeries::new(series_meta(ops, params, &cfg));
    for t in schedule.times() {
        let mut u = u0.clone();
        propagate(ops.wavenumbers(), &system, t, &mut u)?;
        let n_real = ops.inverse_real(u.n());
        series
            .rows
            .push(measure(ops, params, &u, &n_real, t, f64::NAN, &cfg)?);
    }
    Ok(series)
}
