//! Spectral derivatives and Sobolev seminorms of a trigonometric field,
//! checked against their closed forms, plus a snapshot round trip.

use std::f64::consts::PI;

use chemodecay::spectral::{load_snapshot, save_snapshot, Grid, ScalarField, SpectralOps};

fn main() -> chemodecay::Result<()> {
    let grid = Grid::new(2, 64, 10.0)?;
    let ops = SpectralOps::new(&grid);
    let w = 2.0 * PI * 3.0 / grid.box_length();
    let f = ScalarField::from_fn(&grid, |x| (w * x[0]).sin() * (w * x[1]).cos());

    let fh = ops.forward(&f)?;
    let dx = ops.inverse(&ops.derivative(&fh, 0)?)?;
    let exact = ScalarField::from_fn(&grid, |x| w * (w * x[0]).cos() * (w * x[1]).cos());
    let err = dx
        .values()
        .iter()
        .zip(exact.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("max |d/dx f - exact| = {err:.2e}");

    // ||f||^2 = L^2 / 4 and each derivative multiplies by |xi| = sqrt(2) w
    let l0 = grid.box_length() / 2.0;
    for k in 0..4 {
        let expect = l0 * (2.0f64.sqrt() * w).powi(k as i32);
        println!(
            "k = {k}: |∇^k f| = {:.12} (closed form {expect:.12})",
            ops.seminorm(&fh, k)
        );
    }

    let path = std::env::temp_dir().join("chemodecay_example.field");
    let bytes = save_snapshot(&path, &f, 0.0, "f")?;
    let back = load_snapshot(&path)?;
    println!("snapshot: {bytes} bytes, identical = {}", back.field == f);
    std::fs::remove_file(path).ok();
    Ok(())
}
