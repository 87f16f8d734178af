use num_complex::Complex64;
use rayon::prelude::*;

use super::eigen::{LinearSystem, ModeCoefficients};
use crate::error::{Error, Result};
use crate::spectral::{Grid, WavenumberTable};

/// Fourier coefficients of the perturbation pair `(n, v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralState {
    grid: Grid,
    n: Vec<Complex64>,
    v: Vec<Vec<Complex64>>,
}

impl SpectralState {
    pub fn zeros(grid: &Grid) -> Self {
        let zero = vec![Complex64::new(0.0, 0.0); grid.len()];
        SpectralState {
            grid: *grid,
            n: zero.clone(),
            v: vec![zero; grid.dim()],
        }
    }

    pub fn from_parts(grid: &Grid, n: Vec<Complex64>, v: Vec<Vec<Complex64>>) -> Result<Self> {
        if v.len() != grid.dim() || n.len() != grid.len() || v.iter().any(|c| c.len() != grid.len())
        {
            return Err(Error::InvalidGrid(format!(
                "state arrays do not match {grid}"
            )));
        }
        Ok(SpectralState { grid: *grid, n, v })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n(&self) -> &[Complex64] {
        &self.n
    }

    pub fn v(&self) -> &[Vec<Complex64>] {
        &self.v
    }

    #[cfg(test)]
    pub(crate) fn n_mut(&mut self) -> &mut Vec<Complex64> {
        &mut self.n
    }

    #[cfg(test)]
    pub(crate) fn v_mut(&mut self) -> &mut Vec<Vec<Complex64>> {
        &mut self.v
    }

    /// `(n_hat, v_hat)` of one mode as a `d + 1` vector.
    pub fn mode_vector(&self, index: usize) -> Vec<Complex64> {
        std::iter::once(self.n[index])
            .chain(self.v.iter().map(|c| c[index]))
            .collect()
    }

    /// `self += k * other`.
    pub(crate) fn axpy(&mut self, k: f64, other: &SpectralState) {
        add_scaled(&mut self.n, k, &other.n);
        for (a, b) in self.v.iter_mut().zip(&other.v) {
            add_scaled(a, k, b);
        }
    }

    /// Applies `f(mode, [n, v_1, .., v_d])` to every mode in parallel.
    pub(crate) fn for_each_mode<F>(&mut self, f: F)
    where
        F: Fn(usize, &mut [Complex64; 4]) + Sync,
    {
        const CHUNK: usize = 2048;
        let dim = self.grid.dim();
        let mut v_iters: Vec<_> = self.v.iter_mut().map(|c| c.chunks_mut(CHUNK)).collect();
        let groups: Vec<(&mut [Complex64], Vec<&mut [Complex64]>)> = self
            .n
            .chunks_mut(CHUNK)
            .map(|nc| {
                let vc = v_iters
                    .iter_mut()
                    .map(|it| it.next().expect("equal lengths"))
                    .collect();
                (nc, vc)
            })
            .collect();
        groups
            .into_par_iter()
            .enumerate()
            .for_each(|(chunk, (nc, mut vc))| {
                for i in 0..nc.len() {
                    let mut m = [Complex64::new(0.0, 0.0); 4];
                    m[0] = nc[i];
                    for a in 0..dim {
                        m[a + 1] = vc[a][i];
                    }
                    f(chunk * CHUNK + i, &mut m);
                    nc[i] = m[0];
                    for a in 0..dim {
                        vc[a][i] = m[a + 1];
                    }
                }
            });
    }
}

fn add_scaled(a: &mut [Complex64], k: f64, b: &[Complex64]) {
    a.par_iter_mut()
        .zip(b.par_iter())
        .for_each(|(x, y)| *x += y * k);
}

/// Coefficients of one grid mode: dissipation from the exact `|xi|^2`,
/// coupling from the odd-operator wavevector. The two differ only on
/// Nyquist planes, where this is still the exact exponential of the
/// discrete generator.
fn mode_coefficients(
    system: &LinearSystem,
    wavenumbers: &WavenumberTable,
    t: f64,
    idx: usize,
) -> ModeCoefficients {
    let q = wavenumbers.xi_odd(idx).iter().map(|x| x * x).sum();
    system.block_coefficients(t, wavenumbers.xi2()[idx], q, 0.0)
}

/// Applies one mode's propagator; `xi` is the odd-operator wavevector.
#[inline]
fn apply_mode(m: &mut [Complex64; 4], xi: &[f64; 3], dim: usize, u_bar: f64, c: &ModeCoefficients) {
    let n = m[0];
    let xo2: f64 = xi[..dim].iter().map(|x| x * x).sum();
    let xi_dot_v: Complex64 = (0..dim).map(|a| m[a + 1] * xi[a]).sum();
    let i = Complex64::new(0.0, 1.0);
    m[0] = n * c.nn + i * (u_bar * c.coupling) * xi_dot_v;
    let along = if xo2 > 0.0 {
        xi_dot_v * ((c.parallel - c.perpendicular) / xo2)
    } else {
        Complex64::new(0.0, 0.0)
    };
    for a in 0..dim {
        m[a + 1] = i * (xi[a] * c.coupling) * n + m[a + 1] * c.perpendicular + along * xi[a];
    }
}

/// Per-mode propagator `G(dt, xi)` for one grid, `eps`, `u_bar` and `dt`.
///
/// Entries are stored in the compact form of [`ModeCoefficients`]. The
/// off-diagonal blocks use the wavevector of the odd-order operators
/// (Nyquist components removed), which keeps real states real.
#[derive(Clone, Debug)]
pub struct PropagatorTable {
    grid: Grid,
    system: LinearSystem,
    dt: f64,
    coeffs: Vec<ModeCoefficients>,
}

impl PropagatorTable {
    pub fn build(wavenumbers: &WavenumberTable, system: LinearSystem, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dt must be >= 0, got {dt}"
            )));
        }
        let grid = *wavenumbers.grid();
        let coeffs = (0..grid.len())
            .into_par_iter()
            .map(|idx| mode_coefficients(&system, wavenumbers, dt, idx))
            .collect();
        Ok(PropagatorTable {
            grid,
            system,
            dt,
            coeffs,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn system(&self) -> &LinearSystem {
        &self.system
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn coefficients(&self, mode: usize) -> &ModeCoefficients {
        &self.coeffs[mode]
    }

    /// Left-multiplies every mode of `state` by its matrix.
    pub fn apply(&self, wavenumbers: &WavenumberTable, state: &mut SpectralState) -> Result<()> {
        self.grid.ensure_same(state.grid())?;
        self.grid.ensure_same(wavenumbers.grid())?;
        let dim = self.grid.dim();
        let u_bar = self.system.u_bar();
        let coeffs = &self.coeffs;
        state.for_each_mode(|idx, m| {
            apply_mode(m, &wavenumbers.xi_odd(idx), dim, u_bar, &coeffs[idx]);
        });
        Ok(())
    }
}

/// Evaluates `G(t) * state` mode by mode without storing a table.
pub fn propagate(
    wavenumbers: &WavenumberTable,
    system: &LinearSystem,
    t: f64,
    state: &mut SpectralState,
) -> Result<()> {
    let grid = *wavenumbers.grid();
    grid.ensure_same(state.grid())?;
    let dim = grid.dim();
    let u_bar = system.u_bar();
    state.for_each_mode(|idx, m| {
        let c = mode_coefficients(system, wavenumbers, t, idx);
        apply_mode(m, &wavenumbers.xi_odd(idx), dim, u_bar, &c);
    });
    Ok(())
}
