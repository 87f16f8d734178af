use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::AnalysisConfig;
use crate::error::{Error, Result};
use crate::integrator::IntegratorConfig;
use crate::model::{InitialDataSpec, ModelParams};
use crate::spectral::Grid;

pub const CONFIG_SCHEMA: &str = "chemodecay/experiment/v1";

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "CHEMODECAY_OUT";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    /// Points per dimension.
    pub n: usize,
    /// Box side `L`.
    pub length: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default = "one")]
    pub epsilon: f64,
    #[serde(default = "one")]
    pub u_bar: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for ParamsConfig {
    fn default() -> Self {
        ParamsConfig {
            epsilon: 1.0,
            u_bar: 1.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Run directory; `--out` wins over it.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// Write final `n` (and `ln c`) snapshots.
    #[serde(default)]
    pub snapshots: bool,
}

/// One experiment, read from a TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    pub name: String,
    /// Overrides `initial.seed`.
    #[serde(default)]
    pub seed: Option<u64>,
    pub grid: GridConfig,
    #[serde(default)]
    pub params: ParamsConfig,
    pub initial: InitialDataSpec,
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

const PRESETS: &[(&str, &str)] = &[
    ("d2_gaussian", include_str!("../../presets/d2_gaussian.cfg")),
    ("d2_eps0", include_str!("../../presets/d2_eps0.cfg")),
    ("d2_ubar2", include_str!("../../presets/d2_ubar2.cfg")),
    ("d2_linear", include_str!("../../presets/d2_linear.cfg")),
    ("d2_dipole", include_str!("../../presets/d2_dipole.cfg")),
    ("d3_linear", include_str!("../../presets/d3_linear.cfg")),
    ("smoke", include_str!("../../presets/smoke.cfg")),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.0).collect()
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            detail: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, path)
    }

    /// A bundled preset; accepts the name with or without `.cfg`.
    pub fn preset(name: &str) -> Result<Self> {
        let key = name.strip_suffix(".cfg").unwrap_or(name);
        let (_, text) = PRESETS.iter().find(|p| p.0 == key).ok_or_else(|| {
            Error::config(
                "preset",
                format!(
                    "unknown preset {name:?}; available: {}",
                    preset_names().join(", ")
                ),
            )
        })?;
        Self::from_toml(text, Path::new(&format!("<preset {key}>")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.dim, self.grid.n, self.grid.length)
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.params.epsilon, self.params.u_bar)
    }

    /// Initial-data spec with the top-level seed applied.
    pub fn initial_spec(&self) -> InitialDataSpec {
        let mut spec = self.initial.clone();
        if let Some(seed) = self.seed {
            spec.seed = seed;
        }
        spec
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != CONFIG_SCHEMA {
            return Err(Error::config(
                "schema",
                format!("expected {CONFIG_SCHEMA:?}, found {:?}", self.schema),
            ));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::config(
                "name",
                "must be a nonempty file-name-safe string",
            ));
        }
        self.grid()
            .map_err(|e| Error::config("grid", e.to_string()))?;
        self.params()
            .map_err(|e| Error::config("params", e.to_string()))?;
        self.integrator.validate()?;
        let n = self.grid.n as u32;
        if self.integrator.k_max > n / 3 {
            return Err(Error::config(
                "integrator.k_max",
                format!(
                    "{} exceeds N/3 = {} for N = {n}",
                    self.integrator.k_max,
                    n / 3
                ),
            ));
        }
        let a = &self.analysis;
        for (field, value) in [
            ("tolerance", a.tolerance),
            ("linf_tolerance", a.linf_tolerance),
            ("mass_tolerance", a.mass_tolerance),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::config(
                    format!("analysis.{field}"),
                    format!("must be > 0, got {value}"),
                ));
            }
        }
        if let Some(k) = a.k_fit_max {
            if k > self.integrator.k_max as usize {
                return Err(Error::config(
                    "analysis.k_fit_max",
                    "exceeds integrator.k_max",
                ));
            }
        }
        if a.lower_bound_orders
            .iter()
            .any(|&k| k > self.integrator.k_max as usize)
        {
            return Err(Error::config(
                "analysis.lower_bound_orders",
                "exceeds integrator.k_max",
            ));
        }
        if let Some([lo, hi]) = a.window {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
                return Err(Error::config(
                    "analysis.window",
                    format!("need 0 <= t_min < t_max, got [{lo}, {hi}]"),
                ));
            }
        }
        Ok(())
    }

    /// `--out`, then `output.dir`, then `$CHEMODECAY_OUT/<name>`, then
    /// `runs/<name>`.
    pub fn output_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(p) = flag {
            return p.to_path_buf();
        }
        if let Some(p) = &self.output.dir {
            return p.clone();
        }
        let root = std::env::var_os(OUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("runs"));
        root.join(&self.name)
    }
}
