use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SIZE: usize = 4;

/// Small dense complex matrix (at most 4x4) acting on `(n_hat, v_hat)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeMatrix {
    size: usize,
    data: [Complex64; MAX_SIZE * MAX_SIZE],
}

impl ModeMatrix {
    pub fn zeros(size: usize) -> Self {
        assert!((1..=MAX_SIZE).contains(&size), "mode matrix size {size}");
        ModeMatrix {
            size,
            data: [Complex64::new(0.0, 0.0); MAX_SIZE * MAX_SIZE],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(size: usize, mut f: F) -> Self {
        let mut m = Self::zeros(size);
        for r in 0..size {
            for c in 0..size {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * MAX_SIZE + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Complex64) {
        self.data[r * MAX_SIZE + c] = value;
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::from_fn(self.size, |r, c| self.get(r, c) * k)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn entries(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.size).flat_map(move |r| (0..self.size).map(move |c| self.get(r, c)))
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.size)
            .map(|r| (0..self.size).map(|c| self.get(r, c) * x[c]).sum())
            .collect()
    }

    /// `max |self - other| / max |other|`, with 0 when both vanish.
    pub fn relative_error(&self, reference: &ModeMatrix) -> f64 {
        let diff = (*self - *reference).max_abs();
        let scale = reference.max_abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / scale
        }
    }
}

impl Add for ModeMatrix {
    type Output = ModeMatrix;
    fn add(self, rhs: ModeMatrix) -> ModeMatrix {
        ModeMatrix::from_fn(self.size, |r, c| self.get(r, c) + rhs.get(r, c))
    }
}

impl Sub for ModeMatrix {
    type Output = ModeMatrix;
    fn sub(self, rhs: ModeMatrix) -> ModeMatrix {
        ModeMatrix::from_fn(self.size, |r, c| self.get(r, c) - rhs.get(r, c))
    }
}

impl Mul for ModeMatrix {
    type Output = ModeMatrix;
    fn mul(self, rhs: ModeMatrix) -> ModeMatrix {
        ModeMatrix::from_fn(self.size, |r, c| {
            (0..self.size).map(|k| self.get(r, k) * rhs.get(k, c)).sum()
        })
    }
}

/// Dense real square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n || n == 0 {
            return Err(Error::InvalidParameter(format!(
                "{} entries do not form a nonempty {n}x{n} matrix",
                data.len()
            )));
        }
        Ok(RealMatrix { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        RealMatrix { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n + c]
    }

    fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|c| (0..self.n).map(|r| self.get(r, c).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn matmul(&self, rhs: &RealMatrix) -> RealMatrix {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                for c in 0..n {
                    data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        RealMatrix { n, data }
    }

    fn scaled(&self, k: f64) -> RealMatrix {
        RealMatrix {
            n: self.n,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    /// `self + k I`.
    pub fn shifted(&self, k: f64) -> RealMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            out.data[i * self.n + i] += k;
        }
        out
    }

    pub fn to_complex(&self) -> ModeMatrix {
        ModeMatrix::from_fn(self.n, |r, c| Complex64::new(self.get(r, c), 0.0))
    }
}

/// `||A t||_1` above which [`matrix_exp_oracle`] refuses to run.
pub const EXP_NORM_GUARD: f64 = 1e8;

/// `exp(t A)` by scaling and squaring around a truncated Taylor series.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 1/2, the
/// series is summed until the next term drops below `1e-18` of the partial
/// sum (at most 40 terms), then the result is squared `s` times.
pub fn matrix_exp_oracle(a: &RealMatrix, t: f64) -> Result<ModeMatrix> {
    Ok(real_matrix_exp(a, t)?.to_complex())
}

pub fn real_matrix_exp(a: &RealMatrix, t: f64) -> Result<RealMatrix> {
    if !t.is_finite() || a.data.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(
            "matrix exponential needs finite entries".into(),
        ));
    }
    let at = a.scaled(t);
    let norm = at.norm1();
    if norm > EXP_NORM_GUARD {
        return Err(Error::ExpOverflow { norm });
    }
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let x = at.scaled(0.5f64.powi(squarings));
    let mut sum = RealMatrix::identity(a.n);
    let mut term = RealMatrix::identity(a.n);
    for k in 1..=40 {
        term = term.matmul(&x).scaled(1.0 / k as f64);
        for (s, t) in sum.data.iter_mut().zip(&term.data) {
            *s += t;
        }
        if term.norm1() <= 1e-18 * sum.norm1() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_gives_identity() {
        let a = RealMatrix::new(3, vec![0.0; 9]).unwrap();
        assert_eq!(matrix_exp_oracle(&a, 5.0).unwrap(), ModeMatrix::identity(3));
    }

    #[test]
    fn diagonal_gives_elementwise_exponentials() {
        let d = [-3.0, 0.25, -700.0];
        let mut data = vec![0.0; 9];
        for i in 0..3 {
            data[i * 3 + i] = d[i];
        }
        let e = real_matrix_exp(&RealMatrix::new(3, data).unwrap(), 1.0).unwrap();
        for i in 0..3 {
            let want = d[i].exp();
            assert!((e.get(i, i) - want).abs() <= 1e-12 * want, "{i}");
        }
    }

    #[test]
    fn nilpotent_series_terminates() {
        let a = RealMatrix::new(2, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let e = real_matrix_exp(&a, 1.0).unwrap();
        assert_eq!(e.data, vec![1.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn rotation_generator_is_accurate() {
        for theta in [0.3, 7.0, 100.0, 1000.0] {
            let a = RealMatrix::new(2, vec![0.0, 1.0, -1.0, 0.0]).unwrap();
            let e = real_matrix_exp(&a, theta).unwrap();
            let (s, c) = f64::sin_cos(theta);
            let err = [
                e.get(0, 0) - c,
                e.get(0, 1) - s,
                e.get(1, 0) + s,
                e.get(1, 1) - c,
            ]
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(err <= 1e-12, "theta {theta}: {err}");
        }
    }

    #[test]
    fn overflow_guard() {
        let a = RealMatrix::new(1, vec![1.0]).unwrap();
        assert!(matches!(
            real_matrix_exp(&a, 1e9),
            Err(Error::ExpOverflow { .. })
        ));
    }

    #[test]
    fn mode_matrix_algebra() {
        let i = ModeMatrix::identity(3);
        let m = ModeMatrix::from_fn(3, |r, c| Complex64::new(r as f64, c as f64));
        assert_eq!(m * i, m);
        assert_eq!((m + m) - m, m);
        assert_eq!(m.relative_error(&m), 0.0);
        assert_eq!(
            i.matvec(&[Complex64::new(2.0, 1.0); 3])[2],
            Complex64::new(2.0, 1.0)
        );
    }
}
