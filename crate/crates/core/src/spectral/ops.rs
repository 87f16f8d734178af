use num_complex::Complex64;
use rayon::prelude::*;

use super::fft::NdFft;
use super::field::{check_finite, ScalarField, SpectralScalar, SpectralVector, VectorField};
use super::grid::{Grid, WavenumberTable};
use super::sum::pairwise_sum_by;
use crate::error::{Error, Result};

/// Relative tolerance on Hermitian symmetry accepted by [`SpectralOps::inverse`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Transforms and spectral calculus on one periodic grid.
///
/// The forward transform approximates the continuum Fourier integral,
/// `f_hat_j = dx^d sum_x f(x) exp(-i xi_j . x)`, and the inverse is
/// `f(x) = L^-d sum_j f_hat_j exp(i xi_j . x)`. With this scaling the
/// discrete Parseval identity reads `dx^d sum |f|^2 = L^-d sum |f_hat|^2`.
pub struct SpectralOps {
    grid: Grid,
    wavenumbers: WavenumberTable,
    fft: NdFft,
    /// Per-mode 2/3-rule mask.
    keep: Vec<bool>,
    /// Flat index of `-j` for every mode `j`.
    conj: Vec<usize>,
}

impl SpectralOps {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.points_per_dim();
        let axis_keep: Vec<bool> = (0..n)
            .map(|k| 3 * grid.signed_mode(k).unsigned_abs() as usize <= n)
            .collect();
        let keep = (0..grid.len())
            .map(|idx| {
                let pos = grid.unravel(idx);
                (0..grid.dim()).all(|a| axis_keep[pos[a]])
            })
            .collect();
        let conj = (0..grid.len())
            .map(|idx| grid.conjugate_index(idx))
            .collect();
        SpectralOps {
            grid: *grid,
            wavenumbers: WavenumberTable::new(grid),
            fft: NdFft::new(n, grid.dim()),
            keep,
            conj,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn wavenumbers(&self) -> &WavenumberTable {
        &self.wavenumbers
    }

    pub fn forward(&self, f: &ScalarField) -> Result<SpectralScalar> {
        self.grid.ensure_same(f.grid())?;
        check_finite(f.values())?;
        Ok(SpectralScalar::from_raw(
            &self.grid,
            self.forward_real(f.values()),
        ))
    }

    /// Inverse transform; fails if the spectrum is not Hermitian to
    /// [`HERMITIAN_TOLERANCE`] (relative to its largest coefficient).
    pub fn inverse(&self, fh: &SpectralScalar) -> Result<ScalarField> {
        self.grid.ensure_same(fh.grid())?;
        let (defect, mode) = fh.hermitian_defect();
        if defect > HERMITIAN_TOLERANCE || defect.is_nan() {
            return Err(Error::NotHermitian { defect, mode });
        }
        Ok(ScalarField::from_raw(
            &self.grid,
            self.inverse_real(fh.coeffs()),
        ))
    }

    pub fn forward_vector(&self, v: &VectorField) -> Result<SpectralVector> {
        let comps = v
            .components()
            .iter()
            .map(|c| self.forward(c))
            .collect::<Result<Vec<_>>>()?;
        SpectralVector::new(comps)
    }

    pub fn inverse_vector(&self, vh: &SpectralVector) -> Result<VectorField> {
        let comps = vh
            .components()
            .iter()
            .map(|c| self.inverse(c))
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(comps)
    }

    pub(crate) fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let w = self.grid.cell_volume();
        let mut data: Vec<Complex64> = values.par_iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fft.forward(&mut data);
        data.par_iter_mut().for_each(|c| *c *= w);
        data
    }

    /// Real part of the inverse transform, without the symmetry check.
    pub(crate) fn inverse_real(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut data = coeffs.to_vec();
        self.fft.inverse(&mut data);
        let w = 1.0 / self.grid.volume();
        data.par_iter().map(|c| c.re * w).collect()
    }

    /// Forward transforms of several real arrays, two per complex FFT:
    /// `Z = F(a + i b)` splits as `A_j = (Z_j + conj Z_-j)/2`,
    /// `B_j = (Z_j - conj Z_-j)/(2i)`.
    pub(crate) fn forward_real_many(&self, fields: &[&[f64]]) -> Vec<Vec<Complex64>> {
        let w = self.grid.cell_volume();
        let conj = &self.conj;
        let mut out = Vec::with_capacity(fields.len());
        for pair in fields.chunks(2) {
            if pair.len() == 1 {
                out.push(self.forward_real(pair[0]));
                continue;
            }
            let (a, b) = (pair[0], pair[1]);
            let mut z: Vec<Complex64> = a
                .par_iter()
                .zip(b.par_iter())
                .map(|(&x, &y)| Complex64::new(x, y))
                .collect();
            self.fft.forward(&mut z);
            let (fa, fb): (Vec<Complex64>, Vec<Complex64>) = (0..z.len())
                .into_par_iter()
                .map(|j| {
                    let p = z[j];
                    let q = z[conj[j]].conj();
                    let half = 0.5 * w;
                    (
                        (p + q) * half,
                        Complex64::new((p - q).im, -(p - q).re) * half,
                    )
                })
                .unzip();
            out.push(fa);
            out.push(fb);
        }
        out
    }

    /// Inverse transforms of several Hermitian spectra, two per complex
    /// FFT: `F^-1(A + i B) = a + i b`.
    pub(crate) fn inverse_real_many(&self, spectra: &[&[Complex64]]) -> Vec<Vec<f64>> {
        let w = 1.0 / self.grid.volume();
        let i = Complex64::new(0.0, 1.0);
        let mut out = Vec::with_capacity(spectra.len());
        for pair in spectra.chunks(2) {
            if pair.len() == 1 {
                out.push(self.inverse_real(pair[0]));
                continue;
            }
            let mut z: Vec<Complex64> = pair[0]
                .par_iter()
                .zip(pair[1].par_iter())
                .map(|(&x, &y)| x + i * y)
                .collect();
            self.fft.inverse(&mut z);
            let (a, b): (Vec<f64>, Vec<f64>) = z.par_iter().map(|c| (c.re * w, c.im * w)).unzip();
            out.push(a);
            out.push(b);
        }
        out
    }

    /// Multiplies by `i xi_axis`; the Nyquist coefficient along `axis` becomes zero.
    pub fn derivative(&self, fh: &SpectralScalar, axis: usize) -> Result<SpectralScalar> {
        self.grid.ensure_same(fh.grid())?;
        if axis >= self.grid.dim() {
            return Err(Error::InvalidAxis {
                axis,
                dim: self.grid.dim(),
            });
        }
        Ok(SpectralScalar::from_raw(
            &self.grid,
            self.derivative_raw(fh.coeffs(), axis),
        ))
    }

    pub(crate) fn derivative_raw(&self, coeffs: &[Complex64], axis: usize) -> Vec<Complex64> {
        let wn = &self.wavenumbers;
        coeffs
            .par_iter()
            .enumerate()
            .map(|(idx, &c)| Complex64::new(0.0, wn.xi_odd(idx)[axis]) * c)
            .collect()
    }

    /// Applies `prod_a (i xi_a)` over `axes` with the factor formed in
    /// sorted axis order, so the result does not depend on the order given.
    pub fn mixed_derivative(&self, fh: &SpectralScalar, axes: &[usize]) -> Result<SpectralScalar> {
        self.grid.ensure_same(fh.grid())?;
        let dim = self.grid.dim();
        if let Some(&axis) = axes.iter().find(|&&a| a >= dim) {
            return Err(Error::InvalidAxis { axis, dim });
        }
        let mut sorted = axes.to_vec();
        sorted.sort_unstable();
        let grid = &self.grid;
        let wn = &self.wavenumbers;
        let coeffs = fh
            .coeffs()
            .par_iter()
            .enumerate()
            .map(|(idx, &c)| {
                let pos = grid.unravel(idx);
                let factor = sorted.iter().fold(Complex64::new(1.0, 0.0), |acc, &a| {
                    acc * Complex64::new(0.0, wn.axis_xi_odd(pos[a]))
                });
                factor * c
            })
            .collect();
        Ok(SpectralScalar::from_raw(&self.grid, coeffs))
    }

    pub fn gradient(&self, fh: &SpectralScalar) -> Result<SpectralVector> {
        let comps = (0..self.grid.dim())
            .map(|a| self.derivative(fh, a))
            .collect::<Result<Vec<_>>>()?;
        SpectralVector::new(comps)
    }

    pub fn divergence(&self, vh: &SpectralVector) -> Result<SpectralScalar> {
        self.grid.ensure_same(vh.grid())?;
        let comps: Vec<&[Complex64]> = vh.components().iter().map(|c| c.coeffs()).collect();
        Ok(SpectralScalar::from_raw(
            &self.grid,
            self.divergence_raw(&comps),
        ))
    }

    pub(crate) fn divergence_raw(&self, comps: &[&[Complex64]]) -> Vec<Complex64> {
        let wn = &self.wavenumbers;
        (0..self.grid.len())
            .into_par_iter()
            .map(|idx| {
                let xi = wn.xi_odd(idx);
                let s: Complex64 = comps.iter().enumerate().map(|(a, c)| c[idx] * xi[a]).sum();
                Complex64::new(0.0, 1.0) * s
            })
            .collect()
    }

    /// Multiplies by `-|xi|^2` (exact, Nyquist included).
    pub fn laplacian(&self, fh: &SpectralScalar) -> Result<SpectralScalar> {
        self.grid.ensure_same(fh.grid())?;
        let xi2 = self.wavenumbers.xi2();
        let coeffs = fh
            .coeffs()
            .par_iter()
            .zip(xi2.par_iter())
            .map(|(&c, &x2)| -x2 * c)
            .collect();
        Ok(SpectralScalar::from_raw(&self.grid, coeffs))
    }

    /// Curl of a vector spectrum: one component (`d1 v2 - d2 v1`) in 2-D,
    /// three in 3-D.
    pub fn curl(&self, vh: &SpectralVector) -> Result<SpectralVector> {
        self.grid.ensure_same(vh.grid())?;
        let d = |comp: usize, axis: usize| self.derivative_raw(vh.component(comp).coeffs(), axis);
        let sub = |a: Vec<Complex64>, b: Vec<Complex64>| -> SpectralScalar {
            SpectralScalar::from_raw(
                &self.grid,
                a.into_iter().zip(b).map(|(x, y)| x - y).collect(),
            )
        };
        let comps = if self.grid.dim() == 2 {
            vec![sub(d(1, 0), d(0, 1))]
        } else {
            vec![
                sub(d(2, 1), d(1, 2)),
                sub(d(0, 2), d(2, 0)),
                sub(d(1, 0), d(0, 1)),
            ]
        };
        SpectralVector::new(comps)
    }

    /// 2/3 rule: zero every coefficient with some `|j_axis| > N/3`.
    pub fn dealias(&self, fh: &SpectralScalar) -> Result<SpectralScalar> {
        self.grid.ensure_same(fh.grid())?;
        let mut coeffs = fh.coeffs().to_vec();
        self.dealias_in_place(&mut coeffs);
        Ok(SpectralScalar::from_raw(&self.grid, coeffs))
    }

    pub(crate) fn dealias_in_place(&self, coeffs: &mut [Complex64]) {
        let keep = &self.keep;
        coeffs.par_iter_mut().enumerate().for_each(|(idx, c)| {
            if !keep[idx] {
                *c = Complex64::new(0.0, 0.0);
            }
        });
    }

    /// `L^-d sum_j weight(j) |f_hat_j|^2`, summed pairwise over modes.
    pub(crate) fn weighted_energy<W>(&self, coeffs: &[Complex64], weight: W) -> f64
    where
        W: Fn(usize) -> f64 + Sync,
    {
        pairwise_sum_by(coeffs.len(), &|i| weight(i) * coeffs[i].norm_sqr()) / self.grid.volume()
    }

    /// `(L^-d sum |xi|^{2k} |f_hat|^2)^(1/2)`; with `k = 0` this is the L² norm.
    pub fn seminorm(&self, fh: &SpectralScalar, k: u32) -> f64 {
        self.seminorm_raw(fh.coeffs(), k, false)
    }

    pub fn seminorm_vector(&self, vh: &SpectralVector, k: u32) -> f64 {
        vh.components()
            .iter()
            .map(|c| self.seminorm_raw(c.coeffs(), k, false).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Seminorm with the zero mode optionally left out (the deviation from
    /// the box mean).
    pub(crate) fn seminorm_raw(&self, coeffs: &[Complex64], k: u32, skip_zero: bool) -> f64 {
        let xi2 = self.wavenumbers.xi2();
        self.weighted_energy(coeffs, |i| {
            if skip_zero && i == 0 {
                0.0
            } else {
                xi2[i].powi(k as i32)
            }
        })
        .sqrt()
    }

    pub fn sobolev_seminorm(&self, f: &ScalarField, k: u32) -> Result<f64> {
        Ok(self.seminorm(&self.forward(f)?, k))
    }

    pub fn sobolev_seminorm_vector(&self, v: &VectorField, k: u32) -> Result<f64> {
        Ok(self.seminorm_vector(&self.forward_vector(v)?, k))
    }
}

/// One-shot forward transform; see [`SpectralOps`] for the normalization.
pub fn forward_dft(f: &ScalarField) -> Result<SpectralScalar> {
    SpectralOps::new(f.grid()).forward(f)
}

pub fn inverse_dft(fh: &SpectralScalar) -> Result<ScalarField> {
    SpectralOps::new(fh.grid()).inverse(fh)
}

pub fn spectral_derivative(fh: &SpectralScalar, axis: usize) -> Result<SpectralScalar> {
    SpectralOps::new(fh.grid()).derivative(fh, axis)
}

pub fn sobolev_seminorm(f: &ScalarField, k: u32) -> Result<f64> {
    SpectralOps::new(f.grid()).sobolev_seminorm(f, k)
}

pub fn dealias(fh: &SpectralScalar) -> Result<SpectralScalar> {
    SpectralOps::new(fh.grid()).dealias(fh)
}
