use num_complex::Complex64;
use rayon::prelude::*;

use super::{chem_integrand, ChemState, ModelParams, State};
use crate::error::{Error, Result};
use crate::spectral::{
    Grid, ScalarField, SpectralOps, SpectralScalar, SpectralVector, VectorField,
};

/// Largest `||curl v|| / ||∇v||` accepted as a gradient field.
pub const GRADIENT_TOLERANCE: f64 = 1e-6;

/// `n = u - u_bar`, `v = -∇ln c` (spectral gradient).
pub fn cole_hopf_forward(
    ops: &SpectralOps,
    chem: &ChemState,
    params: &ModelParams,
) -> Result<State> {
    let grid = ops.grid();
    grid.ensure_same(chem.u.grid())?;
    grid.ensure_same(chem.c.grid())?;
    if let Some((index, &value)) = chem.c.values().iter().enumerate().find(|(_, &c)| c <= 0.0) {
        return Err(Error::NonPositiveConcentration { index, value });
    }
    let ln_c = ScalarField::new(grid, chem.c.values().iter().map(|c| c.ln()).collect())?;
    let n = ScalarField::new(
        grid,
        chem.u.values().iter().map(|u| u - params.u_bar).collect(),
    )?;
    let v = neg_gradient(ops, &ln_c)?;
    State::new(n, v, chem.time)
}

pub(crate) fn neg_gradient(ops: &SpectralOps, f: &ScalarField) -> Result<VectorField> {
    let g = ops.gradient(&ops.forward(f)?)?;
    let neg = g
        .into_components()
        .into_iter()
        .map(|c| {
            let coeffs = c.coeffs().iter().map(|z| -z).collect();
            SpectralScalar::new(ops.grid(), coeffs)
        })
        .collect::<Result<Vec<_>>>()?;
    ops.inverse_vector(&SpectralVector::new(neg)?)
}

/// Mean-zero `phi` with `∇phi = -v`, i.e. `ln c` up to a constant.
///
/// `phi_hat = i xi.v_hat / |xi|^2`. Rejects `v` whose relative curl
/// exceeds [`GRADIENT_TOLERANCE`].
pub fn reconstruct_ln_c(ops: &SpectralOps, v: &VectorField) -> Result<ScalarField> {
    let vh = ops.forward_vector(v)?;
    let grad = vh
        .components()
        .iter()
        .map(|c| ops.seminorm(c, 1).powi(2))
        .sum::<f64>()
        .sqrt();
    let curl = ops.seminorm_vector(&ops.curl(&vh)?, 0);
    if curl > 0.0 {
        let defect = if grad > 0.0 {
            curl / grad
        } else {
            f64::INFINITY
        };
        if defect > GRADIENT_TOLERANCE {
            return Err(Error::NotGradient { defect });
        }
    }
    let wn = ops.wavenumbers();
    let comps: Vec<&[Complex64]> = vh.components().iter().map(|c| c.coeffs()).collect();
    let phi: Vec<Complex64> = (0..ops.grid().len())
        .into_par_iter()
        .map(|idx| {
            let xi = wn.xi_odd(idx);
            let q: f64 = xi.iter().map(|x| x * x).sum();
            if q == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let dot: Complex64 = comps.iter().enumerate().map(|(a, c)| c[idx] * xi[a]).sum();
            Complex64::new(0.0, 1.0) * dot / q
        })
        .collect();
    ops.inverse(&SpectralScalar::new(ops.grid(), phi)?)
}

/// Running trapezoidal integral that rebuilds `c` along a trajectory:
/// `ln c(t) = ln c0 - u_bar t + int_0^t (-n + eps (|v|^2 - div v)) dtau`.
#[derive(Clone, Debug)]
pub struct CReconstruction {
    grid: Grid,
    u_bar: f64,
    epsilon: f64,
    ln_c0: Vec<f64>,
    integral: Vec<f64>,
    last: Vec<f64>,
    time: f64,
}

impl CReconstruction {
    /// Starts at `t = 0` from `c0 > 0` and the state at `t = 0`.
    pub fn new(
        ops: &SpectralOps,
        c0: &ScalarField,
        state: &State,
        params: &ModelParams,
    ) -> Result<Self> {
        if let Some((index, &value)) = c0.values().iter().enumerate().find(|(_, &c)| c <= 0.0) {
            return Err(Error::NonPositiveConcentration { index, value });
        }
        let ln_c0 = ScalarField::new(c0.grid(), c0.values().iter().map(|c| c.ln()).collect())?;
        Self::from_ln_c0(ops, &ln_c0, state, params)
    }

    pub fn from_ln_c0(
        ops: &SpectralOps,
        ln_c0: &ScalarField,
        state: &State,
        params: &ModelParams,
    ) -> Result<Self> {
        ops.grid().ensure_same(ln_c0.grid())?;
        let first = Self::integrand(ops, state, params.epsilon)?;
        Ok(Self::start(ln_c0, params, first))
    }

    pub(crate) fn start(ln_c0: &ScalarField, params: &ModelParams, integrand: Vec<f64>) -> Self {
        CReconstruction {
            grid: *ln_c0.grid(),
            u_bar: params.u_bar,
            epsilon: params.epsilon,
            ln_c0: ln_c0.values().to_vec(),
            integral: vec![0.0; ln_c0.values().len()],
            last: integrand,
            time: 0.0,
        }
    }

    /// Pointwise `-n + eps (|v|^2 - div v)` of a state.
    pub fn integrand(ops: &SpectralOps, state: &State, epsilon: f64) -> Result<Vec<f64>> {
        let div = ops.inverse_real(
            &ops.divergence(&ops.forward_vector(state.v())?)?
                .into_coeffs(),
        );
        let v: Vec<&[f64]> = state.v().components().iter().map(|c| c.values()).collect();
        Ok(chem_integrand(state.n().values(), &v, &div, epsilon))
    }

    /// Adds the trapezoid `dt/2 (f_old + f_new)`.
    pub fn advance(&mut self, integrand: Vec<f64>, dt: f64) {
        let half = 0.5 * dt;
        self.integral
            .par_iter_mut()
            .zip(self.last.par_iter().zip(integrand.par_iter()))
            .for_each(|(s, (a, b))| *s += half * (a + b));
        self.last = integrand;
        self.time += dt;
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if (self.time - t).abs() > 1e-9 * t.abs().max(1.0) {
            return Err(Error::TimeMismatch {
                accumulated: self.time,
                requested: t,
            });
        }
        Ok(())
    }

    pub fn ln_c(&self, t: f64) -> Result<ScalarField> {
        self.check_time(t)?;
        let shift = self.u_bar * self.time;
        let values = self
            .ln_c0
            .par_iter()
            .zip(self.integral.par_iter())
            .map(|(a, s)| a - shift + s)
            .collect();
        ScalarField::new(&self.grid, values)
    }

    /// `c(., t)`; may underflow for large `u_bar t`, see [`log_sup`](Self::log_sup).
    pub fn c(&self, t: f64) -> Result<ScalarField> {
        let ln_c = self.ln_c(t)?;
        ScalarField::new(&self.grid, ln_c.values().iter().map(|x| x.exp()).collect())
    }

    /// `ln ||c(t)||_inf`, computed without forming `c`.
    pub fn log_sup(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let m = self
            .ln_c0
            .par_iter()
            .zip(self.integral.par_iter())
            .map(|(a, s)| a + s)
            .reduce(|| f64::NEG_INFINITY, f64::max);
        Ok(m - self.u_bar * self.time)
    }
}
