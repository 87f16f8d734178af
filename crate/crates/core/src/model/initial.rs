use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cole_hopf::neg_gradient;
use super::{ModelParams, State};
use crate::error::{Error, Result};
use crate::spectral::{load_snapshot, Grid, ScalarField, SpectralOps};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    GaussianBump,
    MeanZeroDipole,
    FromFile,
}

/// Recipe for `(n0, ln c0)`; `v0 = -∇ln c0` in every case.
///
/// `sigma` defaults to `L/40`, `center` to the box center. `ln c0` is a
/// Gaussian of height `chem_amplitude` and width `chem_sigma` (default
/// `sigma`) centered at `center` plus a seeded offset of at most `sigma`
/// per axis. `from_file` reads `n0` and `ln c0` from snapshot files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDataSpec {
    pub kind: InitialKind,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub chem_amplitude: Option<f64>,
    #[serde(default)]
    pub chem_sigma: Option<f64>,
    #[serde(default)]
    pub n_file: Option<PathBuf>,
    #[serde(default)]
    pub ln_c_file: Option<PathBuf>,
}

fn default_amplitude() -> f64 {
    0.01
}

impl InitialDataSpec {
    pub fn gaussian(amplitude: f64) -> Self {
        InitialDataSpec {
            kind: InitialKind::GaussianBump,
            amplitude,
            sigma: None,
            center: None,
            seed: 0,
            chem_amplitude: None,
            chem_sigma: None,
            n_file: None,
            ln_c_file: None,
        }
    }

    pub fn dipole(amplitude: f64) -> Self {
        InitialDataSpec {
            kind: InitialKind::MeanZeroDipole,
            ..Self::gaussian(amplitude)
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = Some(sigma);
        self
    }

    pub fn with_chem(mut self, amplitude: f64, sigma: Option<f64>) -> Self {
        self.chem_amplitude = Some(amplitude);
        self.chem_sigma = sigma;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn sigma_for(&self, grid: &Grid) -> f64 {
        self.sigma.unwrap_or(grid.box_length() / 40.0)
    }
}

/// Initial perturbation plus the `ln c0` it came from.
#[derive(Clone, Debug)]
pub struct InitialData {
    pub state: State,
    pub ln_c0: ScalarField,
}

/// Builds the initial state; fails if `u_bar + min(n0) <= 0`.
pub fn make_initial(
    ops: &SpectralOps,
    spec: &InitialDataSpec,
    params: &ModelParams,
) -> Result<InitialData> {
    let grid = ops.grid();
    let (n0, ln_c0) = match spec.kind {
        InitialKind::FromFile => {
            let read = |p: &Option<PathBuf>, what: &str| -> Result<ScalarField> {
                let path = p.as_ref().ok_or_else(|| {
                    Error::config(format!("initial.{what}"), "required for from_file")
                })?;
                let snap = load_snapshot(path)?;
                grid.ensure_same(snap.field.grid())?;
                Ok(snap.field)
            };
            (
                read(&spec.n_file, "n_file")?,
                read(&spec.ln_c_file, "ln_c_file")?,
            )
        }
        InitialKind::GaussianBump | InitialKind::MeanZeroDipole => analytic(grid, spec)?,
    };
    let min_u = params.u_bar + n0.min();
    if !(min_u > 0.0) {
        return Err(Error::Positivity { min_u });
    }
    let v0 = neg_gradient(ops, &ln_c0)?;
    Ok(InitialData {
        state: State::new(n0, v0, 0.0)?,
        ln_c0,
    })
}

fn analytic(grid: &Grid, spec: &InitialDataSpec) -> Result<(ScalarField, ScalarField)> {
    let dim = grid.dim();
    let l = grid.box_length();
    let sigma = spec.sigma_for(grid);
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::config(
            "initial.sigma",
            format!("must be > 0, got {sigma}"),
        ));
    }
    if !spec.amplitude.is_finite() {
        return Err(Error::config("initial.amplitude", "must be finite"));
    }
    let center = match &spec.center {
        Some(c) if c.len() == dim => c.clone(),
        Some(c) => {
            return Err(Error::config(
                "initial.center",
                format!("has {} entries, grid is {dim}-dimensional", c.len()),
            ))
        }
        None => vec![l / 2.0; dim],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let chem_center: Vec<f64> = center
        .iter()
        .map(|c| c + sigma * rng.gen_range(-1.0..=1.0))
        .collect();
    let chem_sigma = spec.chem_sigma.unwrap_or(sigma);
    let chem_amp = spec.chem_amplitude.unwrap_or(spec.amplitude);
    if !(chem_sigma > 0.0 && chem_sigma.is_finite() && chem_amp.is_finite()) {
        return Err(Error::config(
            "initial.chem_sigma",
            "must be finite and > 0",
        ));
    }

    let profile = periodic_gaussian(grid, &center, sigma);
    let n0 = match spec.kind {
        InitialKind::GaussianBump => profile.iter().map(|p| spec.amplitude * p).collect(),
        _ => {
            // two copies shifted by a whole number of cells, so the sampled
            // integrals agree to rounding
            let shift = ((sigma / grid.spacing()).round() as usize).max(1);
            (0..grid.len())
                .map(|idx| {
                    let plus = shifted_index(grid, idx, shift as i64);
                    let minus = shifted_index(grid, idx, -(shift as i64));
                    spec.amplitude * (profile[minus] - profile[plus])
                })
                .collect()
        }
    };
    let g0 = periodic_gaussian(grid, &chem_center, chem_sigma)
        .into_iter()
        .map(|p| chem_amp * p)
        .collect();
    Ok((ScalarField::new(grid, n0)?, ScalarField::new(grid, g0)?))
}

/// Index of the grid point `shift` cells further along axis 0.
fn shifted_index(grid: &Grid, idx: usize, shift: i64) -> usize {
    let n = grid.points_per_dim() as i64;
    let mut pos = grid.unravel(idx);
    pos[0] = (pos[0] as i64 + shift).rem_euclid(n) as usize;
    grid.ravel(pos)
}

/// `exp(-|x - x0|^2 / (2 sigma^2))` summed over the nearest periodic images.
fn periodic_gaussian(grid: &Grid, center: &[f64], sigma: f64) -> Vec<f64> {
    let dim = grid.dim();
    let l = grid.box_length();
    let inv = 1.0 / (2.0 * sigma * sigma);
    let axis_weights: Vec<Vec<f64>> = (0..dim)
        .map(|a| {
            (0..grid.points_per_dim())
                .map(|j| {
                    let mut d = grid.coordinate(j) - center[a];
                    d -= l * (d / l).round();
                    (-1i32..=1)
                        .map(|m| {
                            let r = d + m as f64 * l;
                            (-r * r * inv).exp()
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    (0..grid.len())
        .map(|idx| {
            let pos = grid.unravel(idx);
            (0..dim).map(|a| axis_weights[a][pos[a]]).product()
        })
        .collect()
}
