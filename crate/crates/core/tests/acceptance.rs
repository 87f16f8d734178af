//! Acceptance criteria 1-10 at their stated tolerances. Prints one line per
//! criterion, then fails if any criterion failed.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use chemodecay::analysis::{
    c_decay_check, default_window, energy_audit, fit_decay, interpolation_violations, l2_exponent,
    linfty_decay_check, lower_bound_ratio, mass_drift, NormSeries, Quantity, Verdict,
};
use chemodecay::cli::oracle::{generator_suite, law_suite, semigroup_suite};
use chemodecay::cli::{execute, ExperimentConfig};
use chemodecay::integrator::{run, run_linear_direct, IntegratorConfig, Scheme};
use chemodecay::model::{
    cole_hopf_forward, make_initial, reconstruct_ln_c, CReconstruction, ChemState, InitialDataSpec,
    ModelParams, State,
};
use chemodecay::spectral::{Grid, ScalarField, SpectralOps};

struct Line {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
}

/// Bypasses the test harness capture so the lines show in `cargo test`.
fn emit(line: &Line) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(
        err,
        "acceptance {:>2} {:<5} {}: {}",
        line.id,
        if line.pass { "PASS" } else { "FAIL" },
        line.title,
        line.detail
    );
}

fn note(text: String) {
    let _ = writeln!(std::io::stderr().lock(), "           info  {text}");
}

struct Run {
    label: &'static str,
    series: NormSeries,
    /// Counts towards the energy audit (eps > 0).
    dissipative: bool,
}

fn linear_run(preset: &str, label: &'static str) -> Run {
    let cfg = ExperimentConfig::preset(preset).unwrap();
    let grid = cfg.grid().unwrap();
    let ops = SpectralOps::new(&grid);
    let params = cfg.params().unwrap();
    let init = make_initial(&ops, &cfg.initial_spec(), &params).unwrap();
    let started = Instant::now();
    let series = run_linear_direct(&ops, &init.state, &params, &cfg.integrator).unwrap();
    note(format!(
        "{label}: {} rows in {:.1?}",
        series.rows.len(),
        started.elapsed()
    ));
    Run {
        label,
        series,
        dissipative: params.epsilon > 0.0,
    }
}

fn nonlinear_run(preset: &str, label: &'static str) -> (Run, chemodecay::analysis::Report) {
    let cfg = ExperimentConfig::preset(preset).unwrap();
    let started = Instant::now();
    let out = execute(&cfg).unwrap();
    assert!(
        out.trajectory.completed(),
        "{label}: {:?}",
        out.trajectory.failure
    );
    note(format!(
        "{label}: {} steps in {:.1?}",
        out.trajectory.steps,
        started.elapsed()
    ));
    let run = Run {
        label,
        series: out.trajectory.series,
        dissipative: cfg.params.epsilon > 0.0,
    };
    (run, out.report)
}

fn slopes(series: &NormSeries, window: (f64, f64), ks: &[usize], tol: f64) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for &k in ks {
        let target = l2_exponent(series.meta.dim, k);
        let fit = fit_decay(series, Quantity::Joint(k), window, target, tol).unwrap();
        ok &= fit.verdict == Verdict::Pass;
        parts.push(format!("k{k} {:.3} (target {target})", fit.slope));
    }
    (ok, parts.join(", "))
}

fn ratios(series: &NormSeries, window: (f64, f64)) -> (bool, Vec<String>) {
    let mut ok = true;
    let mut failed = Vec::new();
    for k in [0, 1] {
        for q in [Quantity::N(k), Quantity::V(k)] {
            let r = lower_bound_ratio(series, q, window).unwrap();
            if r.verdict != Verdict::Pass {
                ok = false;
                failed.push(format!(
                    "{q} (drift {:.3}, min/median {:.2})",
                    r.drift,
                    r.min / r.median
                ));
            }
        }
    }
    (ok, failed)
}

fn l2_diff(a: &State, b: &State) -> f64 {
    let mut s = 0.0;
    let mut add = |x: &ScalarField, y: &ScalarField| {
        s += x
            .values()
            .iter()
            .zip(y.values())
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>();
    };
    add(a.n(), b.n());
    for (x, y) in a.v().components().iter().zip(b.v().components()) {
        add(x, y);
    }
    s.sqrt()
}

fn observed_order(scheme: Scheme) -> f64 {
    let grid = Grid::new(2, 32, 16.0).unwrap();
    let ops = SpectralOps::new(&grid);
    let params = ModelParams::new(1.0, 1.0).unwrap();
    let spec = InitialDataSpec::gaussian(0.5)
        .with_sigma(1.5)
        .with_chem(0.8, Some(1.5))
        .with_seed(1);
    let init = make_initial(&ops, &spec, &params).unwrap();
    let solve = |dt: f64| {
        let cfg = IntegratorConfig::new(1.0)
            .with_dt(dt)
            .with_scheme(scheme)
            .with_outputs(vec![1.0]);
        run(&ops, &init, &params, &cfg).unwrap().final_state
    };
    let reference = solve(1.0 / 640.0);
    let errs: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dt| l2_diff(&solve(dt), &reference))
        .collect();
    errs.windows(2)
        .map(|w| (w[0] / w[1]).log2())
        .fold(f64::INFINITY, f64::min)
}

/// Smooth positive `c` built from a few low modes, with its exact log.
fn smooth_log(grid: &Grid) -> ScalarField {
    let l = grid.box_length();
    ScalarField::from_fn(grid, |x| {
        let w = 2.0 * PI / l;
        0.7 * (w * x[0]).sin()
            + 0.4 * (2.0 * w * x[1] + 0.3).cos()
            + 0.2 * (w * (x[0] - 2.0 * x[1])).sin()
    })
}

fn cole_hopf_errors() -> (f64, f64) {
    let grid = Grid::new(2, 64, 12.0).unwrap();
    let ops = SpectralOps::new(&grid);
    let params = ModelParams::new(1.0, 1.5).unwrap();
    let ln_c = smooth_log(&grid);
    let chem = ChemState {
        u: ScalarField::from_fn(&grid, |x| 1.5 + 0.1 * (2.0 * PI * x[1] / 12.0).cos()),
        c: ScalarField::new(&grid, ln_c.values().iter().map(|v| v.exp()).collect()).unwrap(),
        time: 0.0,
    };
    let state = cole_hopf_forward(&ops, &chem, &params).unwrap();
    let back = reconstruct_ln_c(&ops, state.v()).unwrap();
    let mean = ln_c.values().iter().sum::<f64>() / grid.len() as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for (b, a) in back.values().iter().zip(ln_c.values()) {
        num += (b - (a - mean)).powi(2);
        den += (a - mean).powi(2);
    }
    let roundtrip = (num / den).sqrt();

    let rest = State::zeros(&grid);
    let c0 = chem.c.clone();
    let mut acc = CReconstruction::new(&ops, &c0, &rest, &params).unwrap();
    let dt = 0.25;
    for _ in 0..16 {
        acc.advance(
            CReconstruction::integrand(&ops, &rest, params.epsilon).unwrap(),
            dt,
        );
    }
    let c = acc.c(4.0).unwrap();
    let decay = (-params.u_bar * 4.0f64).exp();
    let worst = c
        .values()
        .iter()
        .zip(c0.values())
        .map(|(a, b)| (a - b * decay).abs() / (b * decay))
        .fold(0.0, f64::max);
    (roundtrip, worst)
}

#[test]
fn acceptance_criteria() {
    let mut lines = Vec::new();
    let mut push = |line: Line| {
        emit(&line);
        lines.push(line);
    };

    let started = Instant::now();
    let lattice = semigroup_suite().unwrap();
    let elapsed = started.elapsed();
    push(Line {
        id: 1,
        title: "closed-form propagator vs brute-force exponential",
        pass: lattice.passed() && elapsed.as_secs_f64() < 10.0,
        detail: format!(
            "max relative error {:.2e} over {} cases in {elapsed:.2?}",
            lattice.value, lattice.cases
        ),
    });

    let law = law_suite(1000, 2024).unwrap();
    let gen = generator_suite().unwrap();
    push(Line {
        id: 2,
        title: "semigroup law and generator consistency",
        pass: law.passed() && gen.passed(),
        detail: format!(
            "law {:.2e} on {} samples, halving ratio furthest from 2: {:.3}",
            law.value, law.cases, gen.value
        ),
    });

    let lin2 = linear_run("d2_linear", "linear d=2");
    let dip2 = linear_run("d2_dipole", "linear d=2 dipole");
    let lin3 = linear_run("d3_linear", "linear d=3");
    let w2 = (10.0, 400.0);
    let w3 = default_window(&lin3.series);
    let (ok2, s2) = slopes(&lin2.series, w2, &[0, 1, 2], 0.1);
    let (ok3, s3) = slopes(&lin3.series, w3, &[0, 1], 0.1);
    push(Line {
        id: 3,
        title: "linear upper rates",
        pass: ok2 && ok3,
        detail: format!(
            "d=2 on {w2:?}: {s2}; d=3 on ({:.1}, {:.1}): {s3}",
            w3.0, w3.1
        ),
    });

    let (r2, f2) = ratios(&lin2.series, w2);
    let (r3, f3) = ratios(&lin3.series, w3);
    let gauss = fit_decay(&lin2.series, Quantity::Joint(0), w2, -0.5, 0.1).unwrap();
    let dipole = fit_decay(&dip2.series, Quantity::Joint(0), w2, -0.5, 0.1).unwrap();
    let margin = gauss.slope - dipole.slope;
    let mut failed: Vec<String> = f2.iter().map(|f| format!("d=2 {f}")).collect();
    failed.extend(f3.iter().map(|f| format!("d=3 {f}")));
    push(Line {
        id: 4,
        title: "linear lower bounds and massless contrast",
        pass: r2 && r3 && margin >= 0.2,
        detail: format!(
            "ratio checks failing: {}; dipole k0 slope {:.3} vs {:.3} (margin {margin:.3})",
            if failed.is_empty() {
                "none".to_string()
            } else {
                failed.join(", ")
            },
            dipole.slope,
            gauss.slope
        ),
    });

    let (eps1, report1) = nonlinear_run("d2_gaussian", "nonlinear eps=1");
    let (eps0, _) = nonlinear_run("d2_eps0", "nonlinear eps=0");
    let (ubar2, _) = nonlinear_run("d2_ubar2", "nonlinear u_bar=2");
    let mut ok5 = true;
    let mut parts = Vec::new();
    for r in [&eps1, &eps0] {
        let w = default_window(&r.series);
        let (ok_s, s) = slopes(&r.series, w, &[0, 1, 2], 0.15);
        let (ok_r, f) = ratios(&r.series, w);
        ok5 &= ok_s && ok_r;
        parts.push(format!(
            "{}: {s}; ratio failures: {}",
            r.label,
            if f.is_empty() {
                "none".to_string()
            } else {
                f.join(", ")
            }
        ));
    }
    push(Line {
        id: 5,
        title: "nonlinear rates, d=2, eps in {0, 1}",
        pass: ok5,
        detail: parts.join("; "),
    });
    let k0 = report1.check("l2_joint_k0").unwrap();
    note(format!(
        "preset d2_gaussian report: l2_joint_k0 {} slope {}",
        k0.verdict,
        k0.detail("slope").unwrap()
    ));

    let runs = [&lin2, &dip2, &lin3, &eps1, &eps0, &ubar2];
    let drift = runs
        .iter()
        .map(|r| mass_drift(&r.series))
        .fold(0.0, f64::max);
    let mut energy_bad = Vec::new();
    for r in runs.iter().filter(|r| r.dissipative) {
        let e = energy_audit(&r.series);
        if e.verdict != Verdict::Pass {
            energy_bad.push(format!("{} {:?}", r.label, e.violations));
        }
    }
    push(Line {
        id: 6,
        title: "mass conservation and energy monotonicity",
        pass: drift <= 1e-10 && energy_bad.is_empty(),
        detail: format!(
            "max mass drift {drift:.2e}; energy violations: {}",
            if energy_bad.is_empty() {
                "none".to_string()
            } else {
                energy_bad.join(", ")
            }
        ),
    });

    let trap = observed_order(Scheme::EtdTrap);
    let etd1 = observed_order(Scheme::Etd1);
    push(Line {
        id: 7,
        title: "time-stepping order",
        pass: trap >= 1.8 && etd1 >= 0.9,
        detail: format!("etd_trap {trap:.3}, etd1 {etd1:.3}"),
    });

    let (roundtrip, rest) = cole_hopf_errors();
    push(Line {
        id: 8,
        title: "Cole-Hopf consistency",
        pass: roundtrip <= 1e-10 && rest <= 1e-12,
        detail: format!("ln c roundtrip {roundtrip:.2e}, rest-state c {rest:.2e}"),
    });

    let mut ok9 = true;
    let mut parts = Vec::new();
    for r in [&eps1, &ubar2] {
        let w = default_window(&r.series);
        let c = c_decay_check(&r.series, w).unwrap();
        let linf = linfty_decay_check(&r.series, w, 0.15).unwrap();
        ok9 &= c.verdict == Verdict::Pass && linf.verdict == Verdict::Pass;
        parts.push(format!(
            "u_bar={}: ln c slope {:.4} ({}), sup slope {:.3} vs {} ({})",
            r.series.meta.u_bar, c.fit.slope, c.verdict, linf.slope, linf.target, linf.verdict
        ));
    }
    push(Line {
        id: 9,
        title: "chemical and sup-norm decay",
        pass: ok9,
        detail: parts.join("; "),
    });

    let violations: usize = runs
        .iter()
        .map(|r| interpolation_violations(&r.series))
        .sum();
    let rows: usize = runs.iter().map(|r| r.series.rows.len()).sum();
    push(Line {
        id: 10,
        title: "discrete interpolation inequality",
        pass: violations == 0,
        detail: format!("{violations} violations over {rows} recorded states"),
    });

    let failed: Vec<u32> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    assert!(failed.is_empty(), "failed acceptance criteria: {failed:?}");
}
