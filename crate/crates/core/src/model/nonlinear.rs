use num_complex::Complex64;
use rayon::prelude::*;

use super::{ModelParams, State};
use crate::error::Result;
use crate::semigroup::SpectralState;
use crate::spectral::{ScalarField, SpectralOps, VectorField};

/// `S1 = div(n v)` and `S2 = -eps ∇|v|^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SourcePair {
    pub s1: ScalarField,
    pub s2: VectorField,
}

/// Evaluates the quadratic sources: products in real space, then
/// transformed, dealiased (2/3 rule) and differentiated spectrally.
pub fn nonlinear_terms(
    ops: &SpectralOps,
    state: &State,
    params: &ModelParams,
) -> Result<SourcePair> {
    ops.grid().ensure_same(state.grid())?;
    let v: Vec<&[f64]> = state.v().components().iter().map(|c| c.values()).collect();
    let s = source_hat(ops, state.n().values(), &v, params.epsilon);
    let grid = ops.grid();
    let s1 = ScalarField::new(grid, ops.inverse_real(s.n()))?;
    let s2 = VectorField::new(
        s.v()
            .iter()
            .map(|c| ScalarField::new(grid, ops.inverse_real(c)))
            .collect::<Result<Vec<_>>>()?,
    )?;
    Ok(SourcePair { s1, s2 })
}

/// Spectrum of `(S1, S2)` from real-space `n` and `v`.
pub(crate) fn source_hat(
    ops: &SpectralOps,
    n: &[f64],
    v: &[&[f64]],
    epsilon: f64,
) -> SpectralState {
    let grid = ops.grid();
    let dim = grid.dim();
    let mut products: Vec<Vec<f64>> = v
        .iter()
        .map(|va| {
            n.par_iter()
                .zip(va.par_iter())
                .map(|(a, b)| a * b)
                .collect()
        })
        .collect();
    if epsilon != 0.0 {
        products.push(
            (0..grid.len())
                .into_par_iter()
                .map(|i| v.iter().map(|va| va[i] * va[i]).sum())
                .collect(),
        );
    }
    let refs: Vec<&[f64]> = products.iter().map(|p| p.as_slice()).collect();
    let mut spectra = ops.forward_real_many(&refs);
    for f in &mut spectra {
        ops.dealias_in_place(f);
    }
    let flux: Vec<&[Complex64]> = spectra[..dim].iter().map(|f| f.as_slice()).collect();
    let s1 = ops.divergence_raw(&flux);

    let s2 = if epsilon == 0.0 {
        vec![vec![Complex64::new(0.0, 0.0); grid.len()]; dim]
    } else {
        let q = &spectra[dim];
        (0..dim)
            .map(|a| {
                let mut d = ops.derivative_raw(q, a);
                d.par_iter_mut().for_each(|z| *z *= -epsilon);
                d
            })
            .collect()
    };
    SpectralState::from_parts(grid, s1, s2).expect("shapes match the grid")
}

/// Pointwise `-n + eps (|v|^2 - div v)`, the time derivative of
/// `ln c + u_bar t`.
pub(crate) fn chem_integrand(n: &[f64], v: &[&[f64]], div_v: &[f64], epsilon: f64) -> Vec<f64> {
    (0..n.len())
        .into_par_iter()
        .map(|i| {
            let speed2: f64 = v.iter().map(|va| va[i] * va[i]).sum();
            -n[i] + epsilon * (speed2 - div_v[i])
        })
        .collect()
}
