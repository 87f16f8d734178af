use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative width of the discriminant band treated as a repeated root.
pub const CRITICAL_BAND: f64 = 1e-12;

/// `|b t|` below which `sin(bt)/b`, `cos(bt)` (and the hyperbolic
/// analogues) are evaluated by their Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Complex pair `a +- i b`.
    Oscillatory,
    /// Repeated root (within [`CRITICAL_BAND`]).
    Critical,
    /// Two distinct real roots `a +- b`.
    Monotone,
}

/// Eigenvalues of the per-mode generator.
///
/// `lambda0 = -eps |xi|^2` has multiplicity `d - 1`; `lambda_plus` and
/// `lambda_minus` are the roots of
/// `lambda^2 + (1 + eps)|xi|^2 lambda + eps|xi|^4 + u_bar |xi|^2`.
/// `a` is their mean and `b >= 0` half their separation, imaginary in the
/// oscillatory regime and real in the monotone one. Labels: `lambda_plus`
/// carries `+i b` (oscillatory) or is the less negative root (monotone).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenTriple {
    pub lambda0: f64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub a: f64,
    pub b: f64,
    pub regime: Regime,
}

/// The two symmetric eigenvalue combinations
/// `psi1 = (l+ e^{l- t} - l- e^{l+ t}) / (l+ - l-)` and
/// `psi2 = (e^{l+ t} - e^{l- t}) / (l+ - l-)`; real for real inputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Psi {
    pub psi1: f64,
    pub psi2: f64,
}

/// The four scalars that determine the propagator of one mode:
/// `nn = psi1 - |xi|^2 psi2`, `coupling = psi2`,
/// `parallel = psi1 - eps |xi|^2 psi2` and `perpendicular = e^{-eps |xi|^2 t}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeCoefficients {
    pub nn: f64,
    pub coupling: f64,
    pub parallel: f64,
    pub perpendicular: f64,
}

impl ModeCoefficients {
    pub const IDENTITY: ModeCoefficients = ModeCoefficients {
        nn: 1.0,
        coupling: 0.0,
        parallel: 1.0,
        perpendicular: 1.0,
    };
}

/// Linearization of the transformed system about `(u_bar, 0)`:
/// `n_t = Δn + u_bar div v`, `v_t = eps Δv + ∇n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearSystem {
    epsilon: f64,
    u_bar: f64,
}

impl LinearSystem {
    /// Background density `u_bar = 1`.
    pub fn new(epsilon: f64) -> Result<Self> {
        Self::with_background(epsilon, 1.0)
    }

    pub fn with_background(epsilon: f64, u_bar: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be finite and >= 0, got {epsilon}"
            )));
        }
        if !(u_bar.is_finite() && u_bar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "u_bar must be finite and > 0, got {u_bar}"
            )));
        }
        Ok(LinearSystem { epsilon, u_bar })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn u_bar(&self) -> f64 {
        self.u_bar
    }

    /// Eigenvalues of the generator at `|xi|^2 = xi2`.
    pub fn eigenvalues(&self, xi2: f64) -> EigenTriple {
        self.block_eigenvalues(xi2, xi2)
    }

    /// `psi1`, `psi2` at `|xi|^2 = xi2`.
    pub fn psi(&self, t: f64, xi2: f64) -> Psi {
        self.block_psi(t, xi2, xi2, 0.0)
    }

    pub fn mode_coefficients(&self, t: f64, xi2: f64) -> ModeCoefficients {
        self.block_coefficients(t, xi2, xi2, 0.0)
    }

    /// Largest real part among the eigenvalues, `max(lambda0, Re lambda_plus)`.
    pub fn decay_shift(&self, xi2: f64) -> f64 {
        let e = self.eigenvalues(xi2);
        e.lambda0.max(e.lambda_plus.re)
    }

    /// Eigenvalues of the `(n, xi.v)` block
    /// `[[-s, i u_bar |q|^(1/2)], [i |q|^(1/2), -eps s]]` together with
    /// `lambda0 = -eps s`. The generator has `q = s = |xi|^2`; `q < s`
    /// describes a mode whose coupling wavevector lost Nyquist components.
    pub(crate) fn block_eigenvalues(&self, s: f64, q: f64) -> EigenTriple {
        let eps = self.epsilon;
        let a = -0.5 * (1.0 + eps) * s;
        let lambda0 = -eps * s;
        let (w, scale) = self.quarter_discriminant(s, q);
        if s == 0.0 || w.abs() <= CRITICAL_BAND * scale {
            let l = Complex64::new(a, 0.0);
            return EigenTriple {
                lambda0,
                lambda_plus: l,
                lambda_minus: l,
                a,
                b: 0.0,
                regime: Regime::Critical,
            };
        }
        if w > 0.0 {
            let b = w.sqrt();
            EigenTriple {
                lambda0,
                lambda_plus: Complex64::new(a, b),
                lambda_minus: Complex64::new(a, -b),
                a,
                b,
                regime: Regime::Oscillatory,
            }
        } else {
            let b = (-w).sqrt();
            let fast = a - b;
            // product of the roots; avoids cancellation in a + b
            let slow = (eps * s * s + self.u_bar * q) / fast;
            EigenTriple {
                lambda0,
                lambda_plus: Complex64::new(slow, 0.0),
                lambda_minus: Complex64::new(fast, 0.0),
                a,
                b,
                regime: Regime::Monotone,
            }
        }
    }

    /// Signed quarter-discriminant `w = u_bar q - ((1 - eps) s / 2)^2`:
    /// `b^2` when oscillatory, `-b^2` when monotone.
    fn quarter_discriminant(&self, s: f64, q: f64) -> (f64, f64) {
        let drift = 0.5 * (1.0 - self.epsilon) * s;
        let coupling = self.u_bar * q;
        (coupling - drift * drift, coupling.max(drift * drift))
    }

    /// `e^{-shift t} psi` for the block of [`block_eigenvalues`](Self::block_eigenvalues).
    pub(crate) fn block_psi(&self, t: f64, s: f64, q: f64, shift: f64) -> Psi {
        let e = self.block_eigenvalues(s, q);
        let (w, _) = self.quarter_discriminant(s, q);
        let a = e.a;
        // mu = -w t^2 = -(bt)^2 oscillatory, +(bt)^2 monotone
        let mu = -w * t * t;
        if e.regime == Regime::Critical || mu.abs() < SERIES_THRESHOLD * SERIES_THRESHOLD {
            let (c, sn) = if e.regime == Regime::Critical {
                (1.0, t)
            } else {
                (
                    1.0 + mu / 2.0 + mu * mu / 24.0,
                    t * (1.0 + mu / 6.0 + mu * mu / 120.0),
                )
            };
            let ea = ((a - shift) * t).exp();
            return Psi {
                psi1: ea * (c - a * sn),
                psi2: ea * sn,
            };
        }
        let b = e.b;
        if e.regime == Regime::Oscillatory {
            let ea = ((a - shift) * t).exp();
            let (sin, cos) = (b * t).sin_cos();
            Psi {
                psi1: ea * (cos - a * sin / b),
                psi2: ea * sin / b,
            }
        } else {
            let slow = e.lambda_plus.re;
            let e_slow = ((slow - shift) * t).exp();
            let psi2 = -e_slow * (-2.0 * b * t).exp_m1() / (2.0 * b);
            Psi {
                psi1: e_slow - slow * psi2,
                psi2,
            }
        }
    }

    pub(crate) fn block_coefficients(
        &self,
        t: f64,
        s: f64,
        q: f64,
        shift: f64,
    ) -> ModeCoefficients {
        if s == 0.0 && shift == 0.0 {
            return ModeCoefficients::IDENTITY;
        }
        let Psi { psi1, psi2 } = self.block_psi(t, s, q, shift);
        ModeCoefficients {
            nn: psi1 - s * psi2,
            coupling: psi2,
            parallel: psi1 - self.epsilon * s * psi2,
            perpendicular: ((-self.epsilon * s - shift) * t).exp(),
        }
    }
}

/// [`LinearSystem::eigenvalues`] with `u_bar = 1`.
pub fn char_eigenvalues(xi2: f64, epsilon: f64) -> Result<EigenTriple> {
    Ok(LinearSystem::new(epsilon)?.eigenvalues(xi2))
}

/// [`LinearSystem::psi`] with `u_bar = 1`.
pub fn psi_functions(t: f64, xi2: f64, epsilon: f64) -> Result<Psi> {
    Ok(LinearSystem::new(epsilon)?.psi(t, xi2))
}
