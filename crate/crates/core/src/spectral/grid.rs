use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Periodic box `[0, L)^d` sampled with `N` points per axis.
///
/// Storage is row-major with axis 0 slowest: the flat index of grid point
/// `(i0, i1[, i2])` is `(i0 * N + i1) * N + i2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidGrid(format!("dim must be 2 or 3, got {dim}")));
        }
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "points per dimension must be even and >= 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {length}"
            )));
        }
        Ok(Grid { dim, n, length })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_dim(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Total number of grid points (and Fourier modes), `N^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `L^d`.
    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// `dx^d`, the quadrature weight of one grid point.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Flat-index stride of `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.dim - 1 - axis) as u32)
    }

    /// Per-axis array positions of a flat index. Unused trailing entries are 0.
    pub fn unravel(&self, index: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        let mut rem = index;
        for axis in (0..self.dim).rev() {
            out[axis] = rem % self.n;
            rem /= self.n;
        }
        out
    }

    pub fn ravel(&self, pos: [usize; 3]) -> usize {
        (0..self.dim).fold(0, |acc, axis| acc * self.n + pos[axis])
    }

    /// Signed mode number `j` in `[-N/2, N/2)` for FFT array position `k`.
    pub fn signed_mode(&self, k: usize) -> i64 {
        let n = self.n as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Array position of signed mode `j` (taken modulo `N`).
    pub fn mode_position(&self, j: i64) -> usize {
        j.rem_euclid(self.n as i64) as usize
    }

    /// Flat index of the mode `-j` paired with the mode at `index`.
    pub fn conjugate_index(&self, index: usize) -> usize {
        let pos = self.unravel(index);
        let mut conj = [0usize; 3];
        for axis in 0..self.dim {
            conj[axis] = (self.n - pos[axis]) % self.n;
        }
        self.ravel(conj)
    }

    /// Coordinate `x_j = j dx` of array position `j`.
    pub fn coordinate(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            })
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}D grid N={} L={}", self.dim, self.n, self.length)
    }
}

/// Per-mode wavenumbers `xi_j = 2 pi j / L`.
///
/// `xi2` holds the exact `|xi|^2`. Odd-order operators use the axis
/// wavenumbers with the Nyquist entry (`j = -N/2`) set to zero so that
/// derivatives of real fields stay real.
#[derive(Clone, Debug)]
pub struct WavenumberTable {
    grid: Grid,
    axis_xi: Vec<f64>,
    axis_xi_odd: Vec<f64>,
    xi2: Vec<f64>,
    odd: Vec<[f64; 3]>,
}

impl WavenumberTable {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.points_per_dim();
        let scale = 2.0 * PI / grid.box_length();
        let axis_xi: Vec<f64> = (0..n).map(|k| scale * grid.signed_mode(k) as f64).collect();
        let mut axis_xi_odd = axis_xi.clone();
        axis_xi_odd[n / 2] = 0.0;
        let xi2 = (0..grid.len())
            .map(|idx| {
                let pos = grid.unravel(idx);
                (0..grid.dim())
                    .map(|a| axis_xi[pos[a]] * axis_xi[pos[a]])
                    .sum()
            })
            .collect();
        let odd = (0..grid.len())
            .map(|idx| {
                let pos = grid.unravel(idx);
                let mut out = [0.0; 3];
                for a in 0..grid.dim() {
                    out[a] = axis_xi_odd[pos[a]];
                }
                out
            })
            .collect();
        WavenumberTable {
            grid: *grid,
            axis_xi,
            axis_xi_odd,
            xi2,
            odd,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `|xi|^2` for every mode, in storage order.
    pub fn xi2(&self) -> &[f64] {
        &self.xi2
    }

    /// Wavenumber of array position `k` along one axis.
    pub fn axis_xi(&self, k: usize) -> f64 {
        self.axis_xi[k]
    }

    pub(crate) fn axis_xi_odd(&self, k: usize) -> f64 {
        self.axis_xi_odd[k]
    }

    /// Wavevector of a mode. Unused trailing entries are 0.
    pub fn xi(&self, index: usize) -> [f64; 3] {
        let pos = self.grid.unravel(index);
        let mut out = [0.0; 3];
        for a in 0..self.grid.dim() {
            out[a] = self.axis_xi[pos[a]];
        }
        out
    }

    /// Wavevector with Nyquist components removed; used by every operator
    /// that multiplies by `i xi`.
    pub fn xi_odd(&self, index: usize) -> [f64; 3] {
        self.odd[index]
    }

    /// Smallest nonzero `|xi|^2`, i.e. `(2 pi / L)^2`.
    pub fn min_nonzero_xi2(&self) -> f64 {
        let k = 2.0 * PI / self.grid.box_length();
        k * k
    }
}
