use std::io::Write;

use serde::{Deserialize, Serialize};

use super::checks::{
    c_decay_check, energy_audit, interpolation_violations, linfty_decay_check, mass_drift,
};
use super::fit::{
    default_window, fit_decay, l2_exponent, lower_bound_ratio, DecayFit, Quantity, Verdict,
};
use super::series::NormSeries;
use crate::error::Result;

pub const VERDICT_SCHEMA: &str = "# schema: chemodecay/verdict/v1";
pub const RESIDUAL_SCHEMA: &str = "# schema: chemodecay/fit-residuals/v1";

/// Tolerances and windows for [`analyze`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    /// Highest `k` fitted; `None` means `min(2, k_max)`.
    pub k_fit_max: Option<usize>,
    pub tolerance: f64,
    pub linf_tolerance: f64,
    pub mass_tolerance: f64,
    /// `[t_min, t_max]`; `None` uses [`default_window`].
    pub window: Option<[f64; 2]>,
    /// Orders `k` for the lower-bound ratio checks.
    pub lower_bound_orders: Vec<usize>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            k_fit_max: None,
            tolerance: 0.1,
            linf_tolerance: 0.15,
            mass_tolerance: 1e-10,
            window: None,
            lower_bound_orders: vec![0, 1],
        }
    }
}

/// One named verdict with its supporting numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub details: Vec<(String, String)>,
}

impl Check {
    fn new(name: impl Into<String>, verdict: Verdict) -> Self {
        Check {
            name: name.into(),
            verdict,
            details: Vec::new(),
        }
    }

    fn with(mut self, key: &str, value: impl std::fmt::Debug) -> Self {
        self.details.push((key.to_string(), format!("{value:?}")));
        self
    }

    fn with_text(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        self.details.push((key.to_string(), value.to_string()));
        self
    }

    pub fn detail(&self, key: &str) -> Option<&str> {
        self.details
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
    pub fits: Vec<DecayFit>,
}

impl Report {
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(|c| c.verdict.is_failure())
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Flat `key = value` text: overall verdict first, then
    /// `<check>.verdict` and `<check>.<detail>` lines.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{VERDICT_SCHEMA}")?;
        writeln!(
            w,
            "overall = {}",
            if self.passed() { "pass" } else { "fail" }
        )?;
        writeln!(w, "checks = {}", self.checks.len())?;
        let failed = self
            .checks
            .iter()
            .filter(|c| c.verdict.is_failure())
            .count();
        writeln!(w, "failed = {failed}")?;
        for c in &self.checks {
            writeln!(w, "{}.verdict = {}", c.name, c.verdict)?;
            for (k, v) in &c.details {
                writeln!(w, "{}.{k} = {v}", c.name)?;
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn write_residuals<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{RESIDUAL_SCHEMA}")?;
        writeln!(w, "quantity,t,residual")?;
        for f in &self.fits {
            for (t, r) in &f.residuals {
                writeln!(w, "{},{t:?},{r:?}", f.quantity)?;
            }
        }
        Ok(())
    }
}

fn fit_check(name: String, fit: &DecayFit) -> Check {
    Check::new(name, fit.verdict)
        .with_text("quantity", fit.quantity)
        .with("target", fit.target)
        .with("tolerance", fit.tolerance)
        .with("slope", fit.slope)
        .with("stderr", fit.stderr)
        .with("intercept", fit.intercept)
        .with("t_min", fit.window.0)
        .with("t_max", fit.window.1)
        .with("samples", fit.samples)
}

/// Runs every applicable check on a series.
///
/// L² slopes of the joint norm are checked two-sided against
/// `-(d+2k)/4` when the data carry mass; without mass only the upper bound
/// `slope <= target + tol` applies. Lower-bound ratios are checked on `n`
/// and `v` separately. The energy audit counts towards the verdict for
/// `eps > 0` or linear runs. The Fourier-split trend is informational.
pub fn analyze(series: &NormSeries, cfg: &AnalysisConfig) -> Result<Report> {
    let meta = &series.meta;
    let window = cfg
        .window
        .map(|w| (w[0], w[1]))
        .unwrap_or_else(|| default_window(series));
    let k_fit = cfg.k_fit_max.unwrap_or(2).min(meta.k_max as usize);
    let mass = series.has_mass();
    let mut checks = Vec::new();
    let mut fits = Vec::new();

    for k in 0..=k_fit {
        let mut fit = fit_decay(
            series,
            Quantity::Joint(k),
            window,
            l2_exponent(meta.dim, k),
            cfg.tolerance,
        )?;
        if !mass && fit.verdict != Verdict::InsufficientWindow {
            fit.verdict = Verdict::from_bool(fit.slope <= fit.target + fit.tolerance);
        }
        let mode = if mass {
            "two_sided"
        } else {
            "upper_bound_only"
        };
        checks.push(fit_check(format!("l2_joint_k{k}"), &fit).with_text("mode", mode));
        fits.push(fit);
    }

    for &k in &cfg.lower_bound_orders {
        if k > meta.k_max as usize {
            continue;
        }
        for (label, q) in [("n", Quantity::N(k)), ("v", Quantity::V(k))] {
            let r = lower_bound_ratio(series, q, window)?;
            checks.push(
                Check::new(format!("lower_{label}_k{k}"), r.verdict)
                    .with("min", r.min)
                    .with("median", r.median)
                    .with("drift", r.drift)
                    .with("samples", r.ratios.len()),
            );
        }
    }

    let audit = energy_audit(series);
    let counted = meta.epsilon > 0.0 || meta.linear_only;
    let mut c = Check::new(
        "energy",
        if counted {
            audit.verdict
        } else {
            Verdict::NotApplicable
        },
    );
    for (k, (v, w)) in audit.violations.iter().zip(&audit.worst).enumerate() {
        c = c
            .with(&format!("violations_k{k}"), v)
            .with(&format!("worst_growth_k{k}"), w);
    }
    checks.push(c);

    let drift = mass_drift(series);
    checks.push(
        Check::new("mass", Verdict::from_bool(drift <= cfg.mass_tolerance))
            .with("max_relative_drift", drift)
            .with("tolerance", cfg.mass_tolerance),
    );

    let interp = interpolation_violations(series);
    checks.push(
        Check::new("interpolation", Verdict::from_bool(interp == 0)).with("violations", interp),
    );

    let linf = linfty_decay_check(series, window, cfg.linf_tolerance)?;
    checks.push(fit_check("linf_n".into(), &linf));
    fits.push(linf);

    if series.has_c() {
        let c = c_decay_check(series, window)?;
        checks.push(
            fit_check("c_decay".into(), &c.fit)
                .with("excess", c.excess)
                .with("bounded", c.bounded)
                .with_text("combined", c.verdict),
        );
        let last = checks.last_mut().expect("just pushed");
        last.verdict = c.verdict;
        fits.push(c.fit);
    }

    let ratios: Vec<f64> = series
        .rows
        .iter()
        .filter(|r| r.split_low > 0.0)
        .map(|r| r.split_high / r.split_low)
        .collect();
    let increases = ratios.windows(2).filter(|w| w[1] > w[0]).count();
    checks.push(
        Check::new("fourier_split", Verdict::NotApplicable)
            .with("split_r", meta.split_r)
            .with("ratio_increases", increases)
            .with(
                "final_high_over_low",
                ratios.last().copied().unwrap_or(f64::NAN),
            ),
    );

    Ok(Report { checks, fits })
}
