//! Perturbation state about `(u_bar, 0)`, nonlinear sources, initial data
//! and the Cole-Hopf transform between `(u, c)` and `(n, v)`.
//!
//! With `n = u - u_bar` and `v = -∇ln c` the system reads
//! `n_t - Δn - u_bar div v = div(n v)` and `v_t - eps Δv - ∇n = -eps ∇|v|^2`.

mod cole_hopf;
mod initial;
mod nonlinear;

pub use cole_hopf::{cole_hopf_forward, reconstruct_ln_c, CReconstruction, GRADIENT_TOLERANCE};
pub use initial::{make_initial, InitialData, InitialDataSpec, InitialKind};
pub(crate) use nonlinear::{chem_integrand, source_hat};
pub use nonlinear::{nonlinear_terms, SourcePair};

use crate::error::{Error, Result};
use crate::semigroup::{LinearSystem, SpectralState};
use crate::spectral::{Grid, ScalarField, SpectralOps, SpectralVector, VectorField};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub epsilon: f64,
    pub u_bar: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            epsilon: 1.0,
            u_bar: 1.0,
        }
    }
}

impl ModelParams {
    pub fn new(epsilon: f64, u_bar: f64) -> Result<Self> {
        LinearSystem::with_background(epsilon, u_bar)?;
        Ok(ModelParams { epsilon, u_bar })
    }

    pub fn linear_system(&self) -> Result<LinearSystem> {
        LinearSystem::with_background(self.epsilon, self.u_bar)
    }
}

/// `(n, v)` at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    n: ScalarField,
    v: VectorField,
    time: f64,
}

impl State {
    pub fn new(n: ScalarField, v: VectorField, time: f64) -> Result<Self> {
        n.grid().ensure_same(v.grid())?;
        if !(time.is_finite() && time >= 0.0) {
            return Err(Error::InvalidParameter(format!("state time {time}")));
        }
        Ok(State { n, v, time })
    }

    pub fn zeros(grid: &Grid) -> Self {
        State {
            n: ScalarField::zeros(grid),
            v: VectorField::zeros(grid),
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.n.grid()
    }

    pub fn n(&self) -> &ScalarField {
        &self.n
    }

    pub fn v(&self) -> &VectorField {
        &self.v
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn to_spectral(&self, ops: &SpectralOps) -> Result<SpectralState> {
        let n = ops.forward(&self.n)?.into_coeffs();
        let v = ops
            .forward_vector(&self.v)?
            .into_components()
            .into_iter()
            .map(|c| c.into_coeffs())
            .collect();
        SpectralState::from_parts(self.grid(), n, v)
    }

    pub fn from_spectral(ops: &SpectralOps, u: &SpectralState, time: f64) -> Result<Self> {
        let grid = ops.grid();
        let n = ops.inverse(&crate::spectral::SpectralScalar::new(grid, u.n().to_vec())?)?;
        let comps = u
            .v()
            .iter()
            .map(|c| crate::spectral::SpectralScalar::new(grid, c.clone()))
            .collect::<Result<Vec<_>>>()?;
        let v = ops.inverse_vector(&SpectralVector::new(comps)?)?;
        State::new(n, v, time)
    }
}

/// Cell density and chemical concentration.
#[derive(Clone, Debug, PartialEq)]
pub struct ChemState {
    pub u: ScalarField,
    pub c: ScalarField,
    pub time: f64,
}

/// `(M_n, M_v)`: integrals of `n` and of each component of `v`.
pub fn masses(state: &State) -> (f64, Vec<f64>) {
    let mv = state.v.components().iter().map(|c| c.integral()).collect();
    (state.n.integral(), mv)
}

/// `||curl v||_{L^2}`.
pub fn curl_norm(ops: &SpectralOps, v: &VectorField) -> Result<f64> {
    let curl = ops.curl(&ops.forward_vector(v)?)?;
    Ok(ops.seminorm_vector(&curl, 0))
}
