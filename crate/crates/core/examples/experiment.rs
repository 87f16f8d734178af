//! A bundled preset run through the batch pipeline: run directory,
//! manifest and SVG figures.

use chemodecay::cli::plot::plot_series;
use chemodecay::cli::{run_to_dir, ExperimentConfig};

fn main() -> chemodecay::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "smoke".into());
    let cfg = ExperimentConfig::preset(&name)?;
    let dir = std::env::temp_dir().join(format!("chemodecay-{name}"));
    let (outcome, manifest) = run_to_dir(&cfg, &dir)?;
    manifest.verify(&dir)?;
    for f in &manifest.files {
        println!("{:>8} bytes  {}", f.bytes, f.path);
    }
    let figs = plot_series(&outcome.trajectory.series, &cfg.analysis, &dir)?;
    println!(
        "{} figures, overall verdict {}",
        figs.len(),
        manifest.verdict.overall
    );
    println!("run directory: {}", dir.display());
    Ok(())
}
