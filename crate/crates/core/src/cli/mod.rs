//! Batch front end: experiment configs and presets, the run pipeline with
//! its manifest, oracle suites and plots.
//!
//! Exit codes: 0 when every check passes, 1 on a verdict failure, 2 on a
//! configuration or runtime error.

pub mod config;
pub mod oracle;
pub mod pipeline;
pub mod plot;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use config::{
    preset_names, ExperimentConfig, GridConfig, OutputConfig, ParamsConfig, CONFIG_SCHEMA, OUT_ENV,
};
pub use oracle::{Suite, SuiteResult};
pub use pipeline::{
    analysis_config_for, execute, run_to_dir, FileEntry, Outcome, RunManifest, VerdictSummary,
};

use crate::analysis::{analyze, NormSeries};
use crate::error::{Error, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "chemodecay",
    version,
    about = "Decay-rate experiments for the Cole-Hopf transformed chemotaxis system"
)]
pub struct Cli {
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Only print errors.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment and write its run directory.
    Run(RunArgs),
    /// Check the closed-form propagator against its oracles.
    Oracle {
        /// all, semigroup, law, projector or generator.
        #[arg(default_value = "all")]
        suite: String,
    },
    /// Draw SVG figures of a series CSV.
    Plot(SeriesArgs),
    /// Re-run the analysis on a series CSV.
    Analyze(SeriesArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Bundled preset, see `--preset help`.
    #[arg(long)]
    pub preset: Option<String>,
    /// Run directory (default: `$CHEMODECAY_OUT/<name>` or `runs/<name>`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Drop the nonlinear terms.
    #[arg(long)]
    pub linear_only: bool,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    pub series: PathBuf,
    /// Experiment config whose `[analysis]` table applies; defaults to a
    /// `config.toml` beside the series.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (plot: default beside the series; analyze: print only).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    let go = || match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    };
    if cli.threads == 0 {
        return go();
    }
    match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(pool) => pool.install(go),
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let say = |s: String| {
        if !cli.quiet {
            println!("{s}");
        }
    };
    match &cli.command {
        Command::Run(a) => cmd_run(a, &say),
        Command::Oracle { suite } => cmd_oracle(suite, &say),
        Command::Plot(a) => cmd_plot(a, &say),
        Command::Analyze(a) => cmd_analyze(a, &say),
    }
}

fn load_config(a: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match (&a.config, &a.preset) {
        (Some(p), _) => ExperimentConfig::load(p)?,
        (None, Some(name)) => ExperimentConfig::preset(name)?,
        (None, None) => {
            return Err(Error::config(
                "config",
                "run needs --config PATH or --preset NAME",
            ))
        }
    };
    if a.linear_only {
        cfg.integrator.linear_only = true;
    }
    Ok(cfg)
}

fn cmd_run(a: &RunArgs, say: &dyn Fn(String)) -> Result<i32> {
    let cfg = load_config(a)?;
    let dir = cfg.output_dir(a.out.as_deref());
    say(format!(
        "running {} (d = {}, N = {}, L = {}, eps = {}, u_bar = {}, T = {})",
        cfg.name,
        cfg.grid.dim,
        cfg.grid.n,
        cfg.grid.length,
        cfg.params.epsilon,
        cfg.params.u_bar,
        cfg.integrator.t_final
    ));
    let (outcome, manifest) = run_to_dir(&cfg, &dir)?;
    say(format!("steps = {}, dt = {}", manifest.steps, manifest.dt));
    for c in &outcome.report.checks {
        let slope = c
            .detail("slope")
            .map(|s| format!(" slope = {s}"))
            .unwrap_or_default();
        say(format!("  {:<16} {}{slope}", c.name, c.verdict));
    }
    say(format!("wrote {}", dir.display()));
    if let Some(f) = &manifest.failure {
        eprintln!("error: run stopped early: {f}");
        return Ok(EXIT_ERROR);
    }
    Ok(if outcome.report.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}

fn cmd_oracle(suite: &str, say: &dyn Fn(String)) -> Result<i32> {
    let mut ok = true;
    for s in Suite::parse(suite)? {
        let r = s.run()?;
        ok &= r.passed();
        say(r.to_string());
    }
    Ok(if ok { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_plot(a: &SeriesArgs, say: &dyn Fn(String)) -> Result<i32> {
    let series = NormSeries::load(&a.series)?;
    let (cfg, _) = analysis_config_for(&a.series, a.config.as_deref())?;
    let dir = match &a.out {
        Some(d) => d.clone(),
        None => a.series.parent().unwrap_or(Path::new(".")).to_path_buf(),
    };
    for p in plot::plot_series(&series, &cfg, &dir)? {
        say(format!("wrote {}", p.display()));
    }
    Ok(EXIT_PASS)
}

fn cmd_analyze(a: &SeriesArgs, say: &dyn Fn(String)) -> Result<i32> {
    let series = NormSeries::load(&a.series)?;
    let (cfg, _) = analysis_config_for(&a.series, a.config.as_deref())?;
    let report = analyze(&series, &cfg)?;
    let text = report.to_text();
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        let write = |name: &str, bytes: &[u8]| {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(|source| Error::Io { path, source })
        };
        write(pipeline::VERDICT_FILE, text.as_bytes())?;
        let mut res = Vec::new();
        report.write_residuals(&mut res).expect("writing to memory");
        write(pipeline::RESIDUALS_FILE, &res)?;
    }
    say(text.trim_end().to_string());
    Ok(if report.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}
