//! Oracle and property suites for the linear propagator, runnable from the
//! command line.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::semigroup::{LinearSystem, ModeMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Semigroup,
    Law,
    Projector,
    Generator,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Semigroup,
        Suite::Law,
        Suite::Projector,
        Suite::Generator,
    ];

    pub fn parse(name: &str) -> Result<Vec<Suite>> {
        Ok(match name {
            "all" => Suite::ALL.to_vec(),
            "semigroup" => vec![Suite::Semigroup],
            "law" => vec![Suite::Law],
            "projector" => vec![Suite::Projector],
            "generator" => vec![Suite::Generator],
            other => return Err(Error::config(
                "suite",
                format!(
                    "unknown suite {other:?}; expected all, semigroup, law, projector or generator"
                ),
            )),
        })
    }

    pub fn run(self) -> Result<SuiteResult> {
        match self {
            Suite::Semigroup => semigroup_suite(),
            Suite::Law => law_suite(1000, 7),
            Suite::Projector => projector_suite(),
            Suite::Generator => generator_suite(),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Semigroup => "semigroup",
            Suite::Law => "law",
            Suite::Projector => "projector",
            Suite::Generator => "generator",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub suite: Suite,
    /// Worst error (or, for the generator suite, the ratio furthest from 2).
    pub value: f64,
    /// Accepted range for `value`.
    pub bounds: (f64, f64),
    pub cases: usize,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.value >= self.bounds.0 && self.value <= self.bounds.1
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<10} {} value = {:.3e} in [{:e}, {:e}] over {} cases",
            self.suite.to_string(),
            if self.passed() { "pass" } else { "FAIL" },
            self.value,
            self.bounds.0,
            self.bounds.1,
            self.cases
        )
    }
}

pub const EPSILONS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

/// `n` log-spaced points in `[lo, hi]`.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn shapes(k: f64) -> [Vec<f64>; 2] {
    [vec![0.8 * k, -0.6 * k], vec![0.48 * k, -0.6 * k, 0.64 * k]]
}

/// Closed form against the brute-force exponential on the lattice
/// `eps x 60 |xi| in [1e-3, 1e2] x t in {0.01, 1, 10}`, in 2D and 3D,
/// for `u_bar` 1 and 2. Both sides carry the factor `e^{-mu t}` with `mu`
/// the slowest decay rate, so that entries stay representable.
pub fn semigroup_suite() -> Result<SuiteResult> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for eps in EPSILONS {
        for u_bar in [1.0, 2.0] {
            let sys = LinearSystem::with_background(eps, u_bar)?;
            for k in log_space(1e-3, 1e2, 60) {
                let mu = sys.decay_shift(k * k);
                for t in [0.01, 1.0, 10.0] {
                    for xi in shapes(k) {
                        let g = sys.green_hat_shifted(t, &xi, mu);
                        let o = sys.oracle_green_shifted(t, &xi, mu)?;
                        worst = worst.max(g.relative_error(&o));
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(SuiteResult {
        suite: Suite::Semigroup,
        value: worst,
        bounds: (0.0, 1e-9),
        cases,
    })
}

/// `max |G(t+s) - G(t) G(s)| / max |G(t+s)|` on random samples.
pub fn law_suite(samples: usize, seed: u64) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let eps = EPSILONS[rng.gen_range(0..EPSILONS.len())];
        let sys = LinearSystem::new(eps)?;
        let k = 10f64.powf(rng.gen_range(-3.0..2.0));
        let xi = if rng.gen_bool(0.5) {
            let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            vec![k * a.cos(), k * a.sin()]
        } else {
            shapes(k)[1].clone()
        };
        let t = 10f64.powf(rng.gen_range(-2.0..1.0));
        let s = 10f64.powf(rng.gen_range(-2.0..1.0));
        let whole = sys.green_hat(t + s, &xi);
        let split = sys.green_hat(t, &xi) * sys.green_hat(s, &xi);
        let scale = whole.max_abs();
        if scale > 0.0 {
            worst = worst.max((whole - split).max_abs() / scale);
        }
    }
    Ok(SuiteResult {
        suite: Suite::Law,
        value: worst,
        bounds: (0.0, 1e-9),
        cases: samples,
    })
}

/// `|P0 + P+ + P- - I|` away from eigenvalue collisions.
pub fn projector_suite() -> Result<SuiteResult> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for eps in EPSILONS {
        let sys = LinearSystem::new(eps)?;
        for k in log_space(1e-2, 1e1, 25) {
            for xi in shapes(k) {
                let [p0, pp, pm] = match sys.spectral_projectors(&xi) {
                    Ok(p) => p,
                    Err(Error::EigenvalueCollision { .. }) => continue,
                    Err(e) => return Err(e),
                };
                let id = ModeMatrix::identity(xi.len() + 1);
                worst = worst.max((p0 + pp + pm - id).max_abs());
                cases += 1;
            }
        }
    }
    Ok(SuiteResult {
        suite: Suite::Projector,
        value: worst,
        bounds: (0.0, 1e-12),
        cases,
    })
}

/// Ratio `e(h) / e(h/2)` of the error `|(G(h) - I)/h - A|`; first order
/// means a ratio near 2. Reports the ratio furthest from 2.
pub fn generator_suite() -> Result<SuiteResult> {
    let mut furthest = 2.0;
    let mut cases = 0;
    for eps in EPSILONS {
        let sys = LinearSystem::new(eps)?;
        for xi in [vec![1.0, 0.5], vec![0.3, -0.2, 0.8]] {
            let a = sys.generator(&xi);
            let id = ModeMatrix::identity(xi.len() + 1);
            let err = |h: f64| {
                let g = sys.green_hat(h, &xi);
                ((g - id).scale((1.0 / h).into()) - a).max_abs()
            };
            let mut h = 1e-2;
            for _ in 0..4 {
                let ratio = err(h) / err(h / 2.0);
                if (ratio - 2.0).abs() > (furthest - 2.0f64).abs() || !ratio.is_finite() {
                    furthest = ratio;
                }
                cases += 1;
                h /= 2.0;
            }
        }
    }
    Ok(SuiteResult {
        suite: Suite::Generator,
        value: furthest,
        bounds: (1.7, 2.3),
        cases,
    })
}
