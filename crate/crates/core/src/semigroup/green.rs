use num_complex::Complex64;

use super::eigen::LinearSystem;
use super::matrix::{matrix_exp_oracle, ModeMatrix, RealMatrix};
use crate::error::{Error, Result};

/// Minimum relative eigenvalue separation accepted by [`LinearSystem::spectral_projectors`].
pub const PROJECTOR_SEPARATION: f64 = 1e-8;

fn xi2_of(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x * x).sum()
}

fn check_xi(xi: &[f64]) {
    assert!(
        (2..=3).contains(&xi.len()),
        "wavevector must have 2 or 3 components, got {}",
        xi.len()
    );
}

const I: Complex64 = Complex64::new(0.0, 1.0);

impl LinearSystem {
    /// Fourier symbol `A(xi)` of the linear operator:
    /// `[[-|xi|^2, i u_bar xi^T], [i xi, -eps |xi|^2 I]]`.
    pub fn generator(&self, xi: &[f64]) -> ModeMatrix {
        check_xi(xi);
        let d = xi.len();
        let s = xi2_of(xi);
        let mut a = ModeMatrix::zeros(d + 1);
        a.set(0, 0, Complex64::new(-s, 0.0));
        for j in 0..d {
            a.set(0, j + 1, I * (self.u_bar() * xi[j]));
            a.set(j + 1, 0, I * xi[j]);
            a.set(j + 1, j + 1, Complex64::new(-self.epsilon() * s, 0.0));
        }
        a
    }

    /// Real matrix similar to [`generator`](Self::generator) under
    /// `T = diag(1, i, .., i)`: `A = T R T^-1` with
    /// `R = [[-|xi|^2, -u_bar xi^T], [xi, -eps |xi|^2 I]]`.
    pub fn real_generator(&self, xi: &[f64]) -> RealMatrix {
        check_xi(xi);
        let d = xi.len();
        let n = d + 1;
        let s = xi2_of(xi);
        let mut data = vec![0.0; n * n];
        data[0] = -s;
        for j in 0..d {
            data[j + 1] = -self.u_bar() * xi[j];
            data[(j + 1) * n] = xi[j];
            data[(j + 1) * n + j + 1] = -self.epsilon() * s;
        }
        RealMatrix::new(n, data).expect("square by construction")
    }

    /// `exp(t A(xi))` in closed form.
    ///
    /// Top-left `psi1 - |xi|^2 psi2`, off-diagonal `i u_bar xi^T psi2` and
    /// `i xi psi2`, bottom-right
    /// `e^{lambda0 t}(I - xi xi^T/|xi|^2) + (xi xi^T/|xi|^2)(psi1 - eps |xi|^2 psi2)`.
    /// The zero mode maps to the identity.
    pub fn green_hat(&self, t: f64, xi: &[f64]) -> ModeMatrix {
        self.green_hat_shifted(t, xi, 0.0)
    }

    /// `e^{-shift t} exp(t A(xi))`. With `shift` = [`decay_shift`](Self::decay_shift)
    /// the entries stay representable where the unshifted ones underflow.
    pub fn green_hat_shifted(&self, t: f64, xi: &[f64], shift: f64) -> ModeMatrix {
        check_xi(xi);
        let d = xi.len();
        let s = xi2_of(xi);
        if s == 0.0 {
            return ModeMatrix::identity(d + 1).scale(Complex64::new((-shift * t).exp(), 0.0));
        }
        let m = self.block_coefficients(t, s, s, shift);
        let mut g = ModeMatrix::zeros(d + 1);
        g.set(0, 0, Complex64::new(m.nn, 0.0));
        for j in 0..d {
            g.set(0, j + 1, I * (self.u_bar() * xi[j] * m.coupling));
            g.set(j + 1, 0, I * (xi[j] * m.coupling));
            for k in 0..d {
                let proj = xi[j] * xi[k] / s;
                let delta = if j == k { m.perpendicular } else { 0.0 };
                g.set(
                    j + 1,
                    k + 1,
                    Complex64::new(delta + (m.parallel - m.perpendicular) * proj, 0.0),
                );
            }
        }
        g
    }

    /// Spectral projectors `(P0, P+, P-)` with
    /// `P_i = prod_{j != i} (A - lambda_j I) / (lambda_i - lambda_j)`.
    ///
    /// Fails when two of `lambda0, lambda+, lambda-` are closer than
    /// [`PROJECTOR_SEPARATION`] relative to their size.
    pub fn spectral_projectors(&self, xi: &[f64]) -> Result<[ModeMatrix; 3]> {
        check_xi(xi);
        let s = xi2_of(xi);
        if s == 0.0 {
            return Err(Error::EigenvalueCollision { separation: 0.0 });
        }
        let e = self.eigenvalues(s);
        let lambdas = [
            Complex64::new(e.lambda0, 0.0),
            e.lambda_plus,
            e.lambda_minus,
        ];
        for i in 0..3 {
            for j in (i + 1)..3 {
                let sep =
                    (lambdas[i] - lambdas[j]).norm() / lambdas[i].norm().max(lambdas[j].norm());
                if sep <= PROJECTOR_SEPARATION {
                    return Err(Error::EigenvalueCollision { separation: sep });
                }
            }
        }
        let a = self.generator(xi);
        let id = ModeMatrix::identity(a.size());
        let projector = |i: usize| {
            (0..3).filter(|&j| j != i).fold(id, |acc, j| {
                acc * (a - id.scale(lambdas[j])).scale(1.0 / (lambdas[i] - lambdas[j]))
            })
        };
        Ok([projector(0), projector(1), projector(2)])
    }

    /// `e^{lambda0 t} P0 + e^{lambda+ t} P+ + e^{lambda- t} P-`.
    pub fn exp_from_projectors(&self, t: f64, xi: &[f64]) -> Result<ModeMatrix> {
        let [p0, pp, pm] = self.spectral_projectors(xi)?;
        let e = self.eigenvalues(xi2_of(xi));
        Ok(p0.scale(Complex64::new(e.lambda0 * t, 0.0).exp())
            + pp.scale((e.lambda_plus * t).exp())
            + pm.scale((e.lambda_minus * t).exp()))
    }
}

/// Maps `exp(t R)` for the real similar generator back to `exp(t A)`.
pub fn from_real_similarity(e: &ModeMatrix) -> ModeMatrix {
    let t = |i: usize| if i == 0 { Complex64::new(1.0, 0.0) } else { I };
    ModeMatrix::from_fn(e.size(), |r, c| t(r) * e.get(r, c) / t(c))
}

impl LinearSystem {
    /// `exp(t A(xi))` by brute force: scaling and squaring on the real
    /// similar generator, mapped back. Independent of the closed form.
    pub fn oracle_green(&self, t: f64, xi: &[f64]) -> Result<ModeMatrix> {
        self.oracle_green_shifted(t, xi, 0.0)
    }

    /// `exp(t (A(xi) - shift I))` by the brute-force route.
    pub fn oracle_green_shifted(&self, t: f64, xi: &[f64], shift: f64) -> Result<ModeMatrix> {
        let r = self.real_generator(xi).shifted(-shift);
        Ok(from_real_similarity(&matrix_exp_oracle(&r, t)?))
    }
}

/// Closed-form propagator for `u_bar = 1`.
pub fn green_hat(t: f64, xi: &[f64], epsilon: f64) -> Result<ModeMatrix> {
    Ok(LinearSystem::new(epsilon)?.green_hat(t, xi))
}

pub fn spectral_projectors(xi: &[f64], epsilon: f64) -> Result<[ModeMatrix; 3]> {
    LinearSystem::new(epsilon)?.spectral_projectors(xi)
}

/// First line of [`write_green_csv`] output.
pub const GREEN_CSV_SCHEMA: &str = "# schema: chemodecay/green-table/v1";

/// Writes `G(t, xi)` for `xi = |xi| e_1` in `dim` dimensions.
///
/// Columns: `xi_norm,epsilon,u_bar,t`, then `g{r}{c}_re,g{r}{c}_im` for
/// every entry in row-major order, rows and columns numbered from 0 with
/// index 0 the density component.
pub fn write_green_csv<W: std::io::Write>(
    mut w: W,
    system: &LinearSystem,
    dim: usize,
    xi_norms: &[f64],
    times: &[f64],
) -> std::io::Result<()> {
    writeln!(w, "{GREEN_CSV_SCHEMA}")?;
    let size = dim + 1;
    let mut header = vec![
        "xi_norm".to_string(),
        "epsilon".into(),
        "u_bar".into(),
        "t".into(),
    ];
    for r in 0..size {
        for c in 0..size {
            header.push(format!("g{r}{c}_re"));
            header.push(format!("g{r}{c}_im"));
        }
    }
    writeln!(w, "{}", header.join(","))?;
    for &k in xi_norms {
        let mut xi = vec![0.0; dim];
        xi[0] = k;
        for &t in times {
            let g = system.green_hat(t, &xi);
            let mut row = vec![
                format!("{k:e}"),
                format!("{:e}", system.epsilon()),
                format!("{:e}", system.u_bar()),
                format!("{t:e}"),
            ];
            for z in g.entries() {
                row.push(format!("{:e}", z.re));
                row.push(format!("{:e}", z.im));
            }
            writeln!(w, "{}", row.join(","))?;
        }
    }
    Ok(())
}
