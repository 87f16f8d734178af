//! A short nonlinear run with the exponential trapezoid scheme, printing
//! the recorded norms.

use chemodecay::integrator::{run, IntegratorConfig, Scheme};
use chemodecay::model::{make_initial, InitialDataSpec, ModelParams};
use chemodecay::spectral::{Grid, SpectralOps};

fn main() -> chemodecay::Result<()> {
    let grid = Grid::new(2, 64, 60.0)?;
    let ops = SpectralOps::new(&grid);
    let params = ModelParams::new(1.0, 1.0)?;
    let spec = InitialDataSpec::gaussian(0.2)
        .with_sigma(2.0)
        .with_chem(0.2, None);
    let initial = make_initial(&ops, &spec, &params)?;
    let cfg = IntegratorConfig::new(30.0)
        .with_dt(0.1)
        .with_scheme(Scheme::EtdTrap)
        .with_outputs(vec![1.0, 3.0, 10.0, 30.0]);
    let traj = run(&ops, &initial, &params, &cfg)?;
    println!("{} steps of {}", traj.steps, traj.dt);
    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>12}",
        "t", "|n|", "|v|", "sup|n|", "ln sup c"
    );
    for r in &traj.series.rows {
        println!(
            "{:>6.1} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4}",
            r.t, r.n[0], r.v[0], r.n_inf, r.log_c_inf
        );
    }
    Ok(())
}
