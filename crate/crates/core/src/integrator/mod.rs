//! Exponential time stepping with the exact linear propagator, output
//! scheduling and trajectory bookkeeping.

mod run;
mod stepper;

pub use run::{measure, run, run_linear_direct, Trajectory};
pub use stepper::{step, Stepper};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::State;

/// One-step Duhamel schemes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// `U+ = G(dt) (U + dt S(U))`, first order.
    Etd1,
    /// Exponential trapezoid with an `etd1` predictor, second order.
    #[default]
    EtdTrap,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Etd1 => "etd1",
            Scheme::EtdTrap => "etd_trap",
        })
    }
}

fn default_per_decade() -> usize {
    40
}

fn default_k_max() -> u32 {
    3
}

fn default_split_r() -> f64 {
    8.0
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    /// Requested step; `None` picks [`default_dt`]. The step actually used
    /// is `t_final / ceil(t_final / dt)`.
    #[serde(default)]
    pub dt: Option<f64>,
    pub t_final: f64,
    #[serde(default)]
    pub scheme: Scheme,
    /// Explicit output times; `None` gives [`log_spaced_times`].
    #[serde(default)]
    pub output_times: Option<Vec<f64>>,
    #[serde(default = "default_per_decade")]
    pub per_decade: usize,
    /// Drop the nonlinear sources.
    #[serde(default)]
    pub linear_only: bool,
    /// Highest derivative order recorded.
    #[serde(default = "default_k_max")]
    pub k_max: u32,
    /// `R` of the low/high Fourier split `|xi|^2 <= R/(1+t)`.
    #[serde(default = "default_split_r")]
    pub split_r: f64,
    /// Accumulate `ln c` along the run. Ignored for linear runs.
    #[serde(default = "default_true")]
    pub track_c: bool,
}

impl IntegratorConfig {
    pub fn new(t_final: f64) -> Self {
        IntegratorConfig {
            dt: None,
            t_final,
            scheme: Scheme::default(),
            output_times: None,
            per_decade: default_per_decade(),
            linear_only: false,
            k_max: default_k_max(),
            split_r: default_split_r(),
            track_c: true,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn linear(mut self) -> Self {
        self.linear_only = true;
        self
    }

    pub fn with_outputs(mut self, times: Vec<f64>) -> Self {
        self.output_times = Some(times);
        self
    }

    pub fn with_k_max(mut self, k_max: u32) -> Self {
        self.k_max = k_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad =
            |field: &str, detail: String| Err(Error::config(format!("integrator.{field}"), detail));
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return bad(
                "t_final",
                format!("must be finite and >= 0, got {}", self.t_final),
            );
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return bad("dt", format!("must be > 0, got {dt}"));
            }
        }
        if self.per_decade == 0 {
            return bad("per_decade", "must be >= 1".into());
        }
        if self.k_max == 0 {
            return bad("k_max", "must be >= 1".into());
        }
        if !(self.split_r.is_finite() && self.split_r > 0.0) {
            return bad("split_r", format!("must be > 0, got {}", self.split_r));
        }
        if let Some(times) = &self.output_times {
            if times
                .iter()
                .any(|t| !(t.is_finite() && *t >= 0.0 && *t <= self.t_final))
            {
                return bad("output_times", format!("must lie in [0, {}]", self.t_final));
            }
            if times.windows(2).any(|w| w[1] <= w[0]) {
                return bad("output_times", "must be strictly increasing".into());
            }
        }
        Ok(())
    }
}

/// `min(0.1, 0.25 dx / max(1, sup|v0| + sup|n0|))`.
pub fn default_dt(initial: &State) -> f64 {
    let dx = initial.grid().spacing();
    let speed = initial.v().sup_norm() + initial.n().sup_norm();
    (0.25 * dx / speed.max(1.0)).min(0.1)
}

/// `0` and `(1 + t_final)^(j/m) - 1` for `j = 1..=m`, with
/// `m = ceil(per_decade log10(1 + t_final))`.
pub fn log_spaced_times(t_final: f64, per_decade: usize) -> Vec<f64> {
    if t_final <= 0.0 {
        return vec![0.0];
    }
    let decades = (1.0 + t_final).log10();
    let m = ((per_decade as f64) * decades).ceil().max(1.0) as usize;
    let mut out = vec![0.0];
    for j in 1..m {
        out.push((1.0 + t_final).powf(j as f64 / m as f64) - 1.0);
    }
    out.push(t_final);
    out
}

/// Step size and output step indices of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub dt: f64,
    pub steps: usize,
    /// Strictly increasing, starting at 0.
    pub output_steps: Vec<usize>,
}

impl Schedule {
    /// Snaps the requested output times to the nearest step; duplicates
    /// collapse and step 0 is always recorded.
    pub fn new(config: &IntegratorConfig, dt: f64) -> Result<Self> {
        config.validate()?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::config(
                "integrator.dt",
                format!("must be > 0, got {dt}"),
            ));
        }
        let t = config.t_final;
        if t == 0.0 {
            return Ok(Schedule {
                dt,
                steps: 0,
                output_steps: vec![0],
            });
        }
        let steps = (t / dt).ceil().max(1.0) as usize;
        let dt = t / steps as f64;
        let times = match &config.output_times {
            Some(ts) => ts.clone(),
            None => log_spaced_times(t, config.per_decade),
        };
        let mut output_steps = vec![0];
        for time in times {
            let k = ((time / dt).round() as usize).min(steps);
            if k > *output_steps.last().expect("nonempty") {
                output_steps.push(k);
            }
        }
        Ok(Schedule {
            dt,
            steps,
            output_steps,
        })
    }

    pub fn times(&self) -> Vec<f64> {
        self.output_steps
            .iter()
            .map(|&k| k as f64 * self.dt)
            .collect()
    }
}

#[cfg(test)]
mod tests;
