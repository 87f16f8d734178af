//! Linear evolution by the exact propagator and the full decay analysis
//! of the resulting series.

use chemodecay::analysis::{analyze, AnalysisConfig};
use chemodecay::integrator::{run_linear_direct, IntegratorConfig};
use chemodecay::model::{make_initial, InitialDataSpec, ModelParams};
use chemodecay::spectral::{Grid, SpectralOps};

fn main() -> chemodecay::Result<()> {
    let grid = Grid::new(2, 256, 200.0)?;
    let ops = SpectralOps::new(&grid);
    let params = ModelParams::default();
    let spec = InitialDataSpec::gaussian(0.01)
        .with_sigma(2f64.sqrt())
        .with_chem(0.01, None);
    let initial = make_initial(&ops, &spec, &params)?;
    let cfg = IntegratorConfig::new(400.0).with_dt(0.5);
    let series = run_linear_direct(&ops, &initial.state, &params, &cfg)?;
    let report = analyze(&series, &AnalysisConfig::default())?;
    print!("{}", report.to_text());
    Ok(())
}
