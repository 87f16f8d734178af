use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_field(grid: &Grid, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    ScalarField::new(grid, values).unwrap()
}

fn gaussian(grid: &Grid, sigma: f64) -> ScalarField {
    let l = grid.box_length();
    ScalarField::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|&xi| (xi - l / 2.0).powi(2)).sum();
        (-r2 / (2.0 * sigma * sigma)).exp()
    })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn constant_field_has_only_dc_mode() {
    for (dim, n, l) in [(2, 16, 3.0), (3, 8, 7.5)] {
        let g = Grid::new(dim, n, l).unwrap();
        let fh = forward_dft(&ScalarField::from_fn(&g, |_| 1.0)).unwrap();
        let vol = g.volume();
        assert!((fh.coeffs()[0] - c(vol, 0.0)).norm() < 1e-12 * vol);
        for z in &fh.coeffs()[1..] {
            assert!(z.norm() < 1e-12 * vol);
        }
    }
}

#[test]
fn single_sine_transforms_to_two_modes() {
    let g = Grid::new(2, 16, 5.0).unwrap();
    let l = g.box_length();
    let f = ScalarField::from_fn(&g, |x| (2.0 * PI * x[0] / l).sin());
    let fh = forward_dft(&f).unwrap();
    let vol = g.volume();
    assert!((fh.mode([1, 0, 0]) - c(0.0, -vol / 2.0)).norm() < 1e-12 * vol);
    assert!((fh.mode([-1, 0, 0]) - c(0.0, vol / 2.0)).norm() < 1e-12 * vol);
    let others = fh
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != g.ravel([1, 0, 0]) && *i != g.ravel([g.points_per_dim() - 1, 0, 0]))
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max);
    assert!(others < 1e-12 * vol);
}

#[test]
fn roundtrip_random_field() {
    for (dim, n) in [(2, 32), (3, 16)] {
        let g = Grid::new(dim, n, 10.0).unwrap();
        let f = random_field(&g, 11);
        let ops = SpectralOps::new(&g);
        let back = ops.inverse(&ops.forward(&f).unwrap()).unwrap();
        let err = max_abs_diff(back.values(), f.values()) / f.sup_norm();
        assert!(err <= 1e-12, "roundtrip error {err}");
    }
}

#[test]
fn inverse_of_zero_and_single_pair() {
    let g = Grid::new(2, 16, 4.0).unwrap();
    let ops = SpectralOps::new(&g);
    let zero = ops.inverse(&SpectralScalar::zeros(&g)).unwrap();
    assert!(zero.values().iter().all(|&v| v == 0.0));

    // f_hat(+-e1) = L^d / 2 gives cos(2 pi x1 / L)
    let mut fh = SpectralScalar::zeros(&g);
    let vol = g.volume();
    fh.set_mode([1, 0, 0], c(vol / 2.0, 0.0));
    fh.set_mode([-1, 0, 0], c(vol / 2.0, 0.0));
    let f = ops.inverse(&fh).unwrap();
    let expect = ScalarField::from_fn(&g, |x| (2.0 * PI * x[0] / 4.0).cos());
    assert!(max_abs_diff(f.values(), expect.values()) < 1e-13);
}

#[test]
fn roundtrip_random_hermitian_spectrum() {
    let g = Grid::new(2, 16, 6.0).unwrap();
    let ops = SpectralOps::new(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let raw: Vec<Complex64> = (0..g.len())
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    // Hermitian projection; Nyquist planes are self-conjugate
    let sym: Vec<Complex64> = (0..g.len())
        .map(|i| 0.5 * (raw[i] + raw[g.conjugate_index(i)].conj()))
        .collect();
    let fh = SpectralScalar::new(&g, sym).unwrap();
    let back = ops.forward(&ops.inverse(&fh).unwrap()).unwrap();
    let scale = fh.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max);
    for (a, b) in back.coeffs().iter().zip(fh.coeffs()) {
        assert!((a - b).norm() <= 1e-12 * scale);
    }
}

#[test]
fn rejects_non_finite_and_non_hermitian() {
    let g = Grid::new(2, 8, 1.0).unwrap();
    let mut values = vec![0.0; g.len()];
    values[5] = f64::NAN;
    assert!(ScalarField::new(&g, values).is_err());

    let mut fh = SpectralScalar::zeros(&g);
    fh.set_mode([1, 0, 0], c(1.0, 0.0));
    assert!(matches!(
        inverse_dft(&fh),
        Err(crate::Error::NotHermitian { .. })
    ));
}

#[test]
fn derivative_examples() {
    let g = Grid::new(2, 32, 3.0).unwrap();
    let ops = SpectralOps::new(&g);
    let l = g.box_length();

    let d = ops
        .derivative(&ops.forward(&ScalarField::from_fn(&g, |_| 2.5)).unwrap(), 1)
        .unwrap();
    assert!(d.coeffs().iter().all(|z| z.norm() == 0.0));

    let f = ScalarField::from_fn(&g, |x| (2.0 * PI * x[0] / l).sin());
    let df = ops
        .inverse(&ops.derivative(&ops.forward(&f).unwrap(), 0).unwrap())
        .unwrap();
    let expect = ScalarField::from_fn(&g, |x| 2.0 * PI / l * (2.0 * PI * x[0] / l).cos());
    assert!(max_abs_diff(df.values(), expect.values()) < 1e-12);

    assert!(matches!(
        ops.derivative(&SpectralScalar::zeros(&g), 2),
        Err(crate::Error::InvalidAxis { .. })
    ));
}

#[test]
fn laplacian_equals_divergence_of_gradient() {
    for (dim, n, l) in [(2, 64, 24.0), (3, 56, 24.0)] {
        let g = Grid::new(dim, n, l).unwrap();
        let ops = SpectralOps::new(&g);
        let fh = ops.forward(&gaussian(&g, 1.5)).unwrap();
        let lap = ops.inverse(&ops.laplacian(&fh).unwrap()).unwrap();
        let dg = ops
            .inverse(&ops.divergence(&ops.gradient(&fh).unwrap()).unwrap())
            .unwrap();
        let err = max_abs_diff(lap.values(), dg.values()) / lap.sup_norm();
        assert!(err <= 1e-11, "{dim}D: {err}");
    }
}

#[test]
fn seminorm_examples() {
    let g = Grid::new(2, 32, 7.0).unwrap();
    let ops = SpectralOps::new(&g);
    let l = g.box_length();
    let constant = ScalarField::from_fn(&g, |_| 3.0);
    for k in 1..4 {
        assert!(ops.sobolev_seminorm(&constant, k).unwrap() < 1e-12);
    }
    let f = ScalarField::from_fn(&g, |x| (2.0 * PI * x[0] / l).sin());
    let n0 = ops.sobolev_seminorm(&f, 0).unwrap();
    let n1 = ops.sobolev_seminorm(&f, 1).unwrap();
    assert!((n0 - l / 2f64.sqrt()).abs() < 1e-12 * n0);
    assert!((n1 - 2.0 * PI / l * l / 2f64.sqrt()).abs() < 1e-12 * n1);
}

#[test]
fn dealias_examples() {
    let g = Grid::new(2, 24, 1.0).unwrap();
    let ops = SpectralOps::new(&g);
    // support inside |j| <= N/3 = 8
    let mut inside = SpectralScalar::zeros(&g);
    inside.set_mode([8, -8, 0], c(1.0, 2.0));
    inside.set_mode([-8, 8, 0], c(1.0, -2.0));
    inside.set_mode([3, 1, 0], c(0.5, 0.0));
    assert_eq!(ops.dealias(&inside).unwrap(), inside);

    let mut nyq = SpectralScalar::zeros(&g);
    nyq.set_mode([-12, 0, 0], c(1.0, 0.0));
    assert!(ops
        .dealias(&nyq)
        .unwrap()
        .coeffs()
        .iter()
        .all(|z| z.norm() == 0.0));

    let fh = ops.forward(&random_field(&g, 5)).unwrap();
    let once = ops.dealias(&fh).unwrap();
    let twice = ops.dealias(&once).unwrap();
    assert_eq!(once, twice);
    assert!(once.mode([9, 0, 0]).norm() == 0.0);
}

#[test]
fn transforms_are_thread_count_independent() {
    let g = Grid::new(3, 16, 5.0).unwrap();
    let f = random_field(&g, 21);
    let ops = SpectralOps::new(&g);
    let a = ops.forward(&f).unwrap();
    let na = ops.seminorm(&a, 2);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let (b, nb) = pool.install(|| {
        let b = ops.forward(&f).unwrap();
        let nb = ops.seminorm(&b, 2);
        (b, nb)
    });
    assert_eq!(a, b);
    assert_eq!(na.to_bits(), nb.to_bits());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parseval_identity(seed in any::<u64>(), dim in 2usize..4, l in 0.5f64..50.0) {
        let n = if dim == 2 { 16 } else { 8 };
        let g = Grid::new(dim, n, l).unwrap();
        let f = random_field(&g, seed);
        let spectral = sobolev_seminorm(&f, 0).unwrap();
        let real = f.l2_norm();
        prop_assert!((spectral - real).abs() <= 1e-12 * real);
    }

    #[test]
    fn interpolation_inequality(seed in any::<u64>(), l in 1.0f64..100.0) {
        let g = Grid::new(2, 16, l).unwrap();
        let ops = SpectralOps::new(&g);
        let fh = ops.forward(&random_field(&g, seed)).unwrap();
        let (n0, n1, n2) = (ops.seminorm(&fh, 0), ops.seminorm(&fh, 1), ops.seminorm(&fh, 2));
        prop_assert!(n1 * n1 <= n0 * n2 + 1e-12 * (1.0 + n0 * n2));
    }

    #[test]
    fn mixed_derivatives_commute(seed in any::<u64>()) {
        let g = Grid::new(2, 16, 2.0).unwrap();
        let ops = SpectralOps::new(&g);
        let fh = ops.forward(&random_field(&g, seed)).unwrap();
        let m12 = ops.mixed_derivative(&fh, &[0, 1]).unwrap();
        let m21 = ops.mixed_derivative(&fh, &[1, 0]).unwrap();
        prop_assert_eq!(&m12, &m21);
        let d12 = ops.derivative(&ops.derivative(&fh, 0).unwrap(), 1).unwrap();
        let d21 = ops.derivative(&ops.derivative(&fh, 1).unwrap(), 0).unwrap();
        for ((a, b), m) in d12.coeffs().iter().zip(d21.coeffs()).zip(m12.coeffs()) {
            prop_assert!((a - b).norm() <= 4.0 * f64::EPSILON * m.norm());
        }
    }
}
