use std::f64::consts::PI;
use std::path::Path;

use proptest::prelude::*;

use chemodecay::analysis::{
    energy_audit, fit_decay, fourier_split, NormRow, NormSeries, Quantity, SeriesMeta, Verdict,
};
use chemodecay::cli::ExperimentConfig;
use chemodecay::integrator::{run, run_linear_direct, IntegratorConfig};
use chemodecay::model::{
    cole_hopf_forward, make_initial, reconstruct_ln_c, ChemState, InitialDataSpec, ModelParams,
};
use chemodecay::spectral::{Grid, ScalarField, SpectralOps};

fn trig_field(grid: &Grid, modes: &[(i32, i32, f64, f64)]) -> ScalarField {
    let w = 2.0 * PI / grid.box_length();
    ScalarField::from_fn(grid, |x| {
        modes
            .iter()
            .map(|&(a, b, amp, ph)| amp * (w * (a as f64 * x[0] + b as f64 * x[1]) + ph).cos())
            .sum()
    })
}

fn modes() -> impl Strategy<Value = Vec<(i32, i32, f64, f64)>> {
    prop::collection::vec((-4i32..=4, -4i32..=4, -1.0f64..1.0, 0.0f64..6.3), 1..5)
}

fn power_law(exponent: f64, scale: f64) -> NormSeries {
    let mut s = NormSeries::new(SeriesMeta {
        dim: 2,
        points_per_dim: 64,
        box_length: 1000.0,
        epsilon: 1.0,
        u_bar: 1.0,
        k_max: 1,
        split_r: 8.0,
        t_final: 500.0,
        linear_only: true,
    });
    for j in 0..40 {
        let t = 501f64.powf(j as f64 / 39.0) - 1.0;
        let v = scale * (1.0 + t).powf(exponent);
        s.rows.push(NormRow {
            t,
            n: vec![v, v],
            v: vec![v, v],
            n_inf: v,
            log_c_inf: f64::NAN,
            mass_n: 1.0,
            mass_v: vec![0.0, 0.0],
            energy: vec![v],
            split_low: v,
            split_high: 0.0,
            curl_v: 0.0,
        });
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn slope_fit_is_exact_on_power_laws(exponent in -3.0f64..-0.1, scale in 1e-6f64..1e3) {
        let s = power_law(exponent, scale);
        let fit = fit_decay(&s, Quantity::N(0), (10.0, 500.0), exponent, 1e-9).unwrap();
        prop_assert!((fit.slope - exponent).abs() < 1e-12);
        prop_assert_eq!(fit.verdict, Verdict::Pass);
        prop_assert!(fit.residuals.iter().all(|(_, r)| r.abs() < 1e-12));
    }

    #[test]
    fn fourier_split_partitions_the_energy(n_modes in modes(), v_modes in modes(), r in 0.01f64..100.0, t in 0.0f64..1e3) {
        let grid = Grid::new(2, 32, 17.0).unwrap();
        let ops = SpectralOps::new(&grid);
        let n = trig_field(&grid, &n_modes);
        let v = trig_field(&grid, &v_modes);
        let state = chemodecay::model::State::new(
            n.clone(),
            chemodecay::spectral::VectorField::new(vec![v.clone(), n.clone()]).unwrap(),
            0.0,
        )
        .unwrap();
        let (lo, hi) = fourier_split(&ops, &state.to_spectral(&ops).unwrap(), r, t).unwrap();
        // Parseval against the real-space integral
        let sq = |f: &ScalarField| f.values().iter().map(|x| x * x).sum::<f64>() * grid.cell_volume();
        let total = 2.0 * sq(&n) + sq(&v);
        prop_assert!((lo + hi - total).abs() <= 1e-12 * total.max(1e-300) + 1e-300);
    }

    #[test]
    fn cole_hopf_round_trip(m in modes(), u_bar in 0.5f64..3.0) {
        let grid = Grid::new(2, 32, 9.0).unwrap();
        let ops = SpectralOps::new(&grid);
        let ln_c = trig_field(&grid, &m);
        let chem = ChemState {
            u: ScalarField::from_fn(&grid, |_| u_bar),
            c: ScalarField::new(&grid, ln_c.values().iter().map(|x| x.exp()).collect()).unwrap(),
            time: 0.0,
        };
        let params = ModelParams::new(1.0, u_bar).unwrap();
        let st = cole_hopf_forward(&ops, &chem, &params).unwrap();
        prop_assert!(st.n().sup_norm() < 1e-14);
        let back = reconstruct_ln_c(&ops, st.v()).unwrap();
        let mean = ln_c.integral() / grid.volume();
        let scale = ln_c.sup_norm().max(1e-3);
        for (b, a) in back.values().iter().zip(ln_c.values()) {
            prop_assert!((b - (a - mean)).abs() <= 1e-11 * scale);
        }
    }

    #[test]
    fn config_survives_a_toml_round_trip(
        dim in 2usize..4, n_pow in 4u32..7, length in 1.0f64..500.0,
        eps in 0.0f64..3.0, u_bar in 0.1f64..4.0, t_final in 0.0f64..100.0, seed in any::<u64>(),
    ) {
        let mut cfg = ExperimentConfig::preset("smoke").unwrap();
        cfg.grid.dim = dim;
        cfg.grid.n = 1 << n_pow;
        cfg.grid.length = length;
        cfg.params.epsilon = eps;
        cfg.params.u_bar = u_bar;
        cfg.integrator.t_final = t_final;
        cfg.seed = Some(seed);
        let back = ExperimentConfig::from_toml(&cfg.to_toml(), Path::new("rt")).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn linear_energies_never_grow(eps in 0.1f64..2.5, u_bar in 0.5f64..3.0, amp in 0.01f64..1.0, sigma in 0.8f64..3.0) {
        let grid = Grid::new(2, 32, 20.0).unwrap();
        let ops = SpectralOps::new(&grid);
        let params = ModelParams::new(eps, u_bar).unwrap();
        let spec = InitialDataSpec::gaussian(amp).with_sigma(sigma).with_chem(amp, None);
        let init = make_initial(&ops, &spec, &params).unwrap();
        let series = run_linear_direct(&ops, &init.state, &params, &IntegratorConfig::new(50.0).with_dt(0.5)).unwrap();
        prop_assert_eq!(energy_audit(&series).verdict, Verdict::Pass);
    }

    #[test]
    fn nonlinear_steps_keep_the_mean(eps in 0.0f64..2.0, amp in 0.01f64..0.3, seed in any::<u64>()) {
        let grid = Grid::new(2, 32, 20.0).unwrap();
        let ops = SpectralOps::new(&grid);
        let params = ModelParams::new(eps, 1.0).unwrap();
        let spec = InitialDataSpec::gaussian(amp).with_sigma(1.5).with_chem(amp, None).with_seed(seed);
        let init = make_initial(&ops, &spec, &params).unwrap();
        let traj = run(&ops, &init, &params, &IntegratorConfig::new(2.0).with_dt(0.1)).unwrap();
        prop_assert!(traj.completed());
        let m0 = &traj.series.rows[0];
        for r in &traj.series.rows {
            prop_assert_eq!(r.mass_n, m0.mass_n);
            prop_assert_eq!(&r.mass_v, &m0.mass_v);
        }
    }
}
