use super::stepper::Stepper;
use super::*;
use crate::model::{make_initial, InitialData, InitialDataSpec, ModelParams};
use crate::semigroup::{propagate, SpectralState};
use crate::spectral::{Grid, SpectralOps};

fn setup(n: usize, length: f64) -> (Grid, SpectralOps) {
    let grid = Grid::new(2, n, length).unwrap();
    let ops = SpectralOps::new(&grid);
    (grid, ops)
}

fn bump(ops: &SpectralOps, params: &ModelParams, amplitude: f64, sigma: f64) -> InitialData {
    let spec = InitialDataSpec::gaussian(amplitude)
        .with_sigma(sigma)
        .with_seed(7);
    make_initial(ops, &spec, params).unwrap()
}

fn diff_norm(a: &SpectralState, b: &SpectralState) -> f64 {
    let d = |x: &[num_complex::Complex64], y: &[num_complex::Complex64]| -> f64 {
        x.iter().zip(y).map(|(p, q)| (p - q).norm_sqr()).sum()
    };
    let mut s = d(a.n(), b.n());
    for (x, y) in a.v().iter().zip(b.v()) {
        s += d(x, y);
    }
    s.sqrt()
}

fn state_norm(a: &SpectralState) -> f64 {
    diff_norm(a, &SpectralState::zeros(a.grid()))
}

#[test]
fn log_spaced_schedule() {
    let t = log_spaced_times(99.0, 40);
    assert_eq!(t.len(), 81);
    assert_eq!(t[0], 0.0);
    assert_eq!(*t.last().unwrap(), 99.0);
    assert!(((1.0 + t[40]) - 10.0).abs() < 1e-12);

    let cfg = IntegratorConfig::new(10.0).with_dt(0.3);
    let s = Schedule::new(&cfg, 0.3).unwrap();
    assert_eq!(s.steps, 34);
    assert!((s.dt * 34.0 - 10.0).abs() < 1e-12);
    assert_eq!(s.output_steps[0], 0);
    assert_eq!(*s.output_steps.last().unwrap(), 34);
    assert!(s.output_steps.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn config_validation() {
    assert!(IntegratorConfig::new(-1.0).validate().is_err());
    assert!(IntegratorConfig::new(1.0).with_dt(0.0).validate().is_err());
    assert!(IntegratorConfig::new(1.0)
        .with_outputs(vec![0.5, 0.2])
        .validate()
        .is_err());
    assert!(IntegratorConfig::new(1.0)
        .with_outputs(vec![0.5, 2.0])
        .validate()
        .is_err());
    let cfg: IntegratorConfig = toml::from_str("t_final = 5.0\nscheme = \"etd1\"").unwrap();
    assert_eq!(cfg.scheme, Scheme::Etd1);
    assert_eq!(cfg.per_decade, 40);
    assert!(toml::from_str::<IntegratorConfig>("t_final = 5.0\nbogus = 1").is_err());
}

#[test]
fn zero_final_time_gives_only_the_initial_row() {
    let (_, ops) = setup(16, 20.0);
    let params = ModelParams::default();
    let init = bump(&ops, &params, 0.01, 2.0);
    let traj = run(&ops, &init, &params, &IntegratorConfig::new(0.0)).unwrap();
    assert_eq!(traj.series.rows.len(), 1);
    assert_eq!(traj.series.rows[0].t, 0.0);
    assert!(traj.completed());
    assert_eq!(traj.steps, 0);
}

#[test]
fn zero_data_stays_zero() {
    let (grid, ops) = setup(16, 20.0);
    let params = ModelParams::default();
    let init = InitialData {
        state: crate::model::State::zeros(&grid),
        ln_c0: crate::spectral::ScalarField::zeros(&grid),
    };
    let traj = run(
        &ops,
        &init,
        &params,
        &IntegratorConfig::new(2.0).with_dt(0.1),
    )
    .unwrap();
    for r in &traj.series.rows {
        assert!(r.n.iter().chain(&r.v).all(|&x| x == 0.0));
        assert_eq!(r.n_inf, 0.0);
        assert!((r.log_c_inf + r.t).abs() < 1e-12);
    }
}

#[test]
fn zero_sources_reduce_to_the_propagator() {
    let (grid, ops) = setup(16, 20.0);
    let params = ModelParams::new(0.5, 1.0).unwrap();
    let mut u = SpectralState::zeros(&grid);
    u.n_mut()[0] = num_complex::Complex64::new(3.0, 0.0);
    let table = crate::semigroup::PropagatorTable::build(
        ops.wavenumbers(),
        params.linear_system().unwrap(),
        0.2,
    )
    .unwrap();
    let stepped = step(&ops, &params, &table, Scheme::EtdTrap, &u).unwrap();
    let mut direct = u.clone();
    table.apply(ops.wavenumbers(), &mut direct).unwrap();
    assert_eq!(stepped, direct);
}

#[test]
fn linear_steps_compose() {
    let (_, ops) = setup(32, 30.0);
    let params = ModelParams::new(2.0, 1.0).unwrap();
    let init = bump(&ops, &params, 0.1, 2.0);
    let u0 = init.state.to_spectral(&ops).unwrap();
    let small = Stepper::new(&ops, params, 0.05, Scheme::EtdTrap, true).unwrap();
    let big = Stepper::new(&ops, params, 0.1, Scheme::EtdTrap, true).unwrap();
    let two = small.advance(&small.advance(&u0, None), None);
    let one = big.advance(&u0, None);
    assert!(diff_norm(&two, &one) <= 1e-10 * state_norm(&one));
}

#[test]
fn zero_mode_is_preserved_exactly() {
    let (_, ops) = setup(32, 30.0);
    let params = ModelParams::default();
    let init = bump(&ops, &params, 0.3, 2.0);
    let traj = run(
        &ops,
        &init,
        &params,
        &IntegratorConfig::new(5.0).with_dt(0.05),
    )
    .unwrap();
    let m0 = &traj.series.rows[0];
    for r in &traj.series.rows {
        assert_eq!(r.mass_n, m0.mass_n);
        assert_eq!(r.mass_v, m0.mass_v);
    }
    assert_eq!(crate::analysis::mass_drift(&traj.series), 0.0);
}

fn final_spectrum(
    ops: &SpectralOps,
    init: &InitialData,
    params: &ModelParams,
    scheme: Scheme,
    dt: f64,
) -> SpectralState {
    let cfg = IntegratorConfig::new(1.0)
        .with_dt(dt)
        .with_scheme(scheme)
        .with_outputs(vec![1.0]);
    let traj = run(ops, init, params, &cfg).unwrap();
    assert!(traj.completed());
    traj.final_state.to_spectral(ops).unwrap()
}

#[test]
fn richardson_orders() {
    let (_, ops) = setup(32, 16.0);
    let params = ModelParams::default();
    let spec = InitialDataSpec::gaussian(0.5)
        .with_sigma(1.5)
        .with_chem(0.8, Some(1.5))
        .with_seed(1);
    let init = make_initial(&ops, &spec, &params).unwrap();
    for (scheme, lo, hi) in [(Scheme::Etd1, 0.9, 1.2), (Scheme::EtdTrap, 1.8, 2.3)] {
        let reference = final_spectrum(&ops, &init, &params, scheme, 1.0 / 640.0);
        let errs: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&dt| {
                diff_norm(
                    &final_spectrum(&ops, &init, &params, scheme, dt),
                    &reference,
                )
            })
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(
                order >= lo && order <= hi,
                "{scheme}: {errs:?} order {order}"
            );
        }
    }
}

#[test]
fn stepped_linear_run_matches_direct_evaluation() {
    let (_, ops) = setup(64, 60.0);
    let params = ModelParams::new(1.0, 1.0).unwrap();
    let init = bump(&ops, &params, 0.05, 3.0);
    let cfg = IntegratorConfig::new(40.0).with_dt(0.1).linear();
    let traj = run(&ops, &init, &params, &cfg).unwrap();
    let direct = run_linear_direct(&ops, &init.state, &params, &cfg).unwrap();
    assert_eq!(traj.series.rows.len(), direct.rows.len());
    for (a, b) in traj.series.rows.iter().zip(&direct.rows) {
        assert_eq!(a.t, b.t);
        for k in 0..=2 {
            assert!(
                (a.joint(k) - b.joint(k)).abs() <= 1e-8 * b.joint(k),
                "t = {} k = {k}",
                a.t
            );
        }
    }
}

#[test]
fn direct_linear_evolution_matches_propagate() {
    let (_, ops) = setup(32, 30.0);
    let params = ModelParams::default();
    let init = bump(&ops, &params, 0.05, 2.0);
    let cfg = IntegratorConfig::new(3.0)
        .with_dt(0.5)
        .with_outputs(vec![3.0]);
    let series = run_linear_direct(&ops, &init.state, &params, &cfg).unwrap();
    let mut u = init.state.to_spectral(&ops).unwrap();
    propagate(
        ops.wavenumbers(),
        &params.linear_system().unwrap(),
        3.0,
        &mut u,
    )
    .unwrap();
    let expect = ops.seminorm_raw(u.n(), 1, true);
    assert_eq!(series.rows.last().unwrap().n[1], expect);
}

#[test]
fn replay_is_bit_identical() {
    let (_, ops) = setup(32, 30.0);
    let params = ModelParams::new(0.5, 2.0).unwrap();
    let init = bump(&ops, &params, 0.2, 2.0);
    let cfg = IntegratorConfig::new(3.0).with_dt(0.1);
    let csv = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let traj = pool.install(|| run(&ops, &init, &params, &cfg).unwrap());
        let mut buf = Vec::new();
        traj.series.write_csv(&mut buf).unwrap();
        buf
    };
    let a = csv(1);
    assert_eq!(a, csv(4));
    assert_eq!(a, csv(1));
}

#[test]
fn c_reconstruction_tracks_the_run() {
    let (_, ops) = setup(32, 30.0);
    let params = ModelParams::new(1.0, 2.0).unwrap();
    let init = bump(&ops, &params, 0.05, 2.0);
    let traj = run(
        &ops,
        &init,
        &params,
        &IntegratorConfig::new(4.0).with_dt(0.05),
    )
    .unwrap();
    assert!(traj.series.has_c());
    let first = &traj.series.rows[0];
    assert!((first.log_c_inf - init.ln_c0.max()).abs() < 1e-14);
    let last = traj.series.rows.last().unwrap();
    // ln ||c|| + u_bar t drifts only by the small perturbation
    assert!((last.log_c_inf + 2.0 * last.t - first.log_c_inf).abs() < 0.2);
    let ln_c = traj.final_ln_c.unwrap();
    assert!((ln_c.max() - last.log_c_inf).abs() < 1e-12);
}

#[test]
fn lost_positivity_truncates_the_run() {
    let (_, ops) = setup(32, 16.0);
    let params = ModelParams::new(0.0, 1.0).unwrap();
    let spec = InitialDataSpec::gaussian(0.5)
        .with_sigma(1.0)
        .with_chem(30.0, Some(1.0));
    let init = make_initial(&ops, &spec, &params).unwrap();
    let cfg = IntegratorConfig::new(20.0).with_dt(0.5);
    let traj = run(&ops, &init, &params, &cfg).unwrap();
    assert!(!traj.completed(), "expected failure");
    assert!(traj.failure.as_ref().unwrap().contains("step"));
    assert!(!traj.series.rows.is_empty());
    assert!(traj.final_state.time() < 20.0);
}
