use std::borrow::Cow;

use rayon::prelude::*;

use super::Scheme;
use crate::error::{Error, Result};
use crate::model::{chem_integrand, source_hat, ModelParams};
use crate::semigroup::{PropagatorTable, SpectralState};
use crate::spectral::SpectralOps;

/// Real-space fields of a spectral state plus its source spectrum.
pub(crate) struct Evaluation {
    pub n: Vec<f64>,
    pub v: Vec<Vec<f64>>,
    pub div_v: Vec<f64>,
    pub source: Option<SpectralState>,
}

impl Evaluation {
    pub fn min_n(&self) -> f64 {
        self.n
            .par_iter()
            .copied()
            .reduce(|| f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        self.n.par_iter().all(|x| x.is_finite())
            && self.v.iter().all(|c| c.par_iter().all(|x| x.is_finite()))
    }

    /// `-n + eps (|v|^2 - div v)`.
    pub fn chem_integrand(&self, epsilon: f64) -> Vec<f64> {
        let v: Vec<&[f64]> = self.v.iter().map(|c| c.as_slice()).collect();
        chem_integrand(&self.n, &v, &self.div_v, epsilon)
    }
}

/// Advances spectral states with a fixed table.
pub struct Stepper<'a> {
    ops: &'a SpectralOps,
    table: Cow<'a, PropagatorTable>,
    params: ModelParams,
    scheme: Scheme,
    linear_only: bool,
}

impl<'a> Stepper<'a> {
    pub fn new(
        ops: &'a SpectralOps,
        params: ModelParams,
        dt: f64,
        scheme: Scheme,
        linear_only: bool,
    ) -> Result<Self> {
        let table = PropagatorTable::build(ops.wavenumbers(), params.linear_system()?, dt)?;
        Ok(Stepper {
            ops,
            table: Cow::Owned(table),
            params,
            scheme,
            linear_only,
        })
    }

    pub fn dt(&self) -> f64 {
        self.table.dt()
    }

    pub fn table(&self) -> &PropagatorTable {
        &self.table
    }

    pub(crate) fn evaluate(&self, u: &SpectralState, with_source: bool) -> Evaluation {
        let ops = self.ops;
        let comps: Vec<&[num_complex::Complex64]> = u.v().iter().map(|c| c.as_slice()).collect();
        let div_hat = ops.divergence_raw(&comps);
        let mut spectra = vec![u.n()];
        spectra.extend(comps.iter().copied());
        spectra.push(&div_hat);
        let mut fields = ops.inverse_real_many(&spectra);
        let div_v = fields.pop().expect("divergence");
        let v = fields.split_off(1);
        let n = fields.pop().expect("density");
        let source = with_source.then(|| {
            let vr: Vec<&[f64]> = v.iter().map(|c| c.as_slice()).collect();
            source_hat(ops, &n, &vr, self.params.epsilon)
        });
        Evaluation {
            n,
            v,
            div_v,
            source,
        }
    }

    fn propagate(&self, u: &mut SpectralState) {
        self.table
            .apply(self.ops.wavenumbers(), u)
            .expect("table and state share the grid");
    }

    /// One step from `u`; `eval` must be `self.evaluate(u, true)` unless the
    /// stepper is linear.
    pub(crate) fn advance(&self, u: &SpectralState, eval: Option<&Evaluation>) -> SpectralState {
        let dt = self.dt();
        let source = match (self.linear_only, eval.and_then(|e| e.source.as_ref())) {
            (false, Some(s)) => s,
            _ => {
                let mut next = u.clone();
                self.propagate(&mut next);
                return next;
            }
        };
        match self.scheme {
            Scheme::Etd1 => {
                let mut next = u.clone();
                next.axpy(dt, source);
                self.propagate(&mut next);
                next
            }
            Scheme::EtdTrap => {
                let mut star = u.clone();
                star.axpy(dt, source);
                self.propagate(&mut star);
                let star_source = self.evaluate(&star, true).source.expect("requested");
                let mut next = u.clone();
                next.axpy(0.5 * dt, source);
                self.propagate(&mut next);
                next.axpy(0.5 * dt, &star_source);
                next
            }
        }
    }
}

/// Advances `state` by one step of `table.dt()`.
///
/// `etd1`: `U+ = G(dt)(U + dt S(U))`. `etd_trap`: predictor
/// `U* = G(dt)(U + dt S(U))`, then `U+ = G(dt)(U + dt/2 S(U)) + dt/2 S(U*)`.
/// The sources are dealiased; the zero mode is left unchanged.
pub fn step(
    ops: &SpectralOps,
    params: &ModelParams,
    table: &PropagatorTable,
    scheme: Scheme,
    state: &SpectralState,
) -> Result<SpectralState> {
    ops.grid().ensure_same(table.grid())?;
    ops.grid().ensure_same(state.grid())?;
    let stepper = Stepper {
        ops,
        table: Cow::Borrowed(table),
        params: *params,
        scheme,
        linear_only: false,
    };
    let eval = stepper.evaluate(state, true);
    let next = stepper.advance(state, Some(&eval));
    if !spectral_finite(&next) {
        return Err(Error::BlowUp {
            step: 1,
            time: table.dt(),
            detail: "non-finite coefficients after the step".into(),
        });
    }
    Ok(next)
}

pub(crate) fn spectral_finite(u: &SpectralState) -> bool {
    let ok =
        |c: &[num_complex::Complex64]| c.par_iter().all(|z| z.re.is_finite() && z.im.is_finite());
    ok(u.n()) && u.v().iter().all(|c| ok(c))
}
