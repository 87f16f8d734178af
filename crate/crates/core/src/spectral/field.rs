use num_complex::Complex64;

use super::grid::Grid;
use super::sum::{max_by, pairwise_sum_by};
use crate::error::{Error, Result};

/// Real samples of a scalar function on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        ScalarField {
            grid: *grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Wraps `values`; rejects wrong lengths and non-finite entries.
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "field has {} values, {grid} needs {}",
                values.len(),
                grid.len()
            )));
        }
        check_finite(&values)?;
        Ok(ScalarField {
            grid: *grid,
            values,
        })
    }

    pub(crate) fn from_raw(grid: &Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField {
            grid: *grid,
            values,
        }
    }

    /// Samples `f` at every grid point `x_j = j dx`.
    pub fn from_fn<F>(grid: &Grid, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64,
    {
        let values = (0..grid.len())
            .map(|idx| {
                let pos = grid.unravel(idx);
                let x: Vec<f64> = (0..grid.dim()).map(|a| grid.coordinate(pos[a])).collect();
                f(&x)
            })
            .collect();
        ScalarField {
            grid: *grid,
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `dx^d * sum f`.
    pub fn integral(&self) -> f64 {
        let v = &self.values;
        self.grid.cell_volume() * pairwise_sum_by(v.len(), &|i| v[i])
    }

    /// Real-space `(dx^d * sum |f|^2)^(1/2)`.
    pub fn l2_norm(&self) -> f64 {
        let v = &self.values;
        (self.grid.cell_volume() * pairwise_sum_by(v.len(), &|i| v[i] * v[i])).sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        let v = &self.values;
        self.grid.cell_volume() * pairwise_sum_by(v.len(), &|i| v[i].abs())
    }

    pub fn sup_norm(&self) -> f64 {
        let v = &self.values;
        max_by(v.len(), &|i| v[i].abs())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `d` scalar components on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    grid: Grid,
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn zeros(grid: &Grid) -> Self {
        VectorField {
            grid: *grid,
            components: (0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let grid = *components
            .first()
            .ok_or_else(|| Error::InvalidGrid("vector field needs components".into()))?
            .grid();
        if components.len() != grid.dim() {
            return Err(Error::InvalidGrid(format!(
                "{} components for a {}-dimensional grid",
                components.len(),
                grid.dim()
            )));
        }
        for c in &components {
            grid.ensure_same(c.grid())?;
        }
        Ok(VectorField { grid, components })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> &ScalarField {
        &self.components[axis]
    }

    pub fn l2_norm(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.l2_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Pointwise `sup |v|`.
    pub fn sup_norm(&self) -> f64 {
        let comps = &self.components;
        max_by(self.grid.len(), &|i| {
            comps
                .iter()
                .map(|c| c.values[i] * c.values[i])
                .sum::<f64>()
                .sqrt()
        })
    }
}

/// Fourier coefficients `f_hat_j`, stored in FFT order on the same
/// flat layout as the grid (position `k` along an axis is mode
/// `j = k` for `k < N/2`, `j = k - N` otherwise).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralScalar {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralScalar {
    pub fn zeros(grid: &Grid) -> Self {
        SpectralScalar {
            grid: *grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn new(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "spectrum has {} coefficients, {grid} needs {}",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(SpectralScalar {
            grid: *grid,
            coeffs,
        })
    }

    pub(crate) fn from_raw(grid: &Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        SpectralScalar {
            grid: *grid,
            coeffs,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of the signed mode `j` (entries beyond `dim` ignored).
    pub fn mode(&self, j: [i64; 3]) -> Complex64 {
        self.coeffs[self.mode_index(j)]
    }

    pub fn set_mode(&mut self, j: [i64; 3], value: Complex64) {
        let idx = self.mode_index(j);
        self.coeffs[idx] = value;
    }

    fn mode_index(&self, j: [i64; 3]) -> usize {
        let mut pos = [0usize; 3];
        for a in 0..self.grid.dim() {
            pos[a] = self.grid.mode_position(j[a]);
        }
        self.grid.ravel(pos)
    }

    /// Largest relative violation of `f_hat(-j) = conj(f_hat(j))`.
    pub fn hermitian_defect(&self) -> (f64, usize) {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return (0.0, 0);
        }
        let mut worst = (0.0, 0);
        for (idx, c) in self.coeffs.iter().enumerate() {
            let partner = self.coeffs[self.grid.conjugate_index(idx)];
            let d = (c - partner.conj()).norm() / scale;
            if d > worst.0 {
                worst = (d, idx);
            }
        }
        worst
    }
}

/// Spectrum of a vector field, one [`SpectralScalar`] per component.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralVector {
    grid: Grid,
    components: Vec<SpectralScalar>,
}

impl SpectralVector {
    pub fn zeros(grid: &Grid) -> Self {
        SpectralVector {
            grid: *grid,
            components: (0..grid.dim())
                .map(|_| SpectralScalar::zeros(grid))
                .collect(),
        }
    }

    pub fn new(components: Vec<SpectralScalar>) -> Result<Self> {
        let grid = *components
            .first()
            .ok_or_else(|| Error::InvalidGrid("vector spectrum needs components".into()))?
            .grid();
        for c in &components {
            grid.ensure_same(c.grid())?;
        }
        Ok(SpectralVector { grid, components })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> &[SpectralScalar] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> &SpectralScalar {
        &self.components[axis]
    }

    pub fn into_components(self) -> Vec<SpectralScalar> {
        self.components
    }
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}
