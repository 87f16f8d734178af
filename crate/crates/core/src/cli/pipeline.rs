use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::analysis::{analyze, AnalysisConfig, Report};
use crate::error::{Error, Result};
use crate::integrator::{run, Trajectory};
use crate::model::make_initial;
use crate::spectral::{save_snapshot, SpectralOps};

pub const MANIFEST_SCHEMA: &str = "chemodecay/manifest/v1";

pub const CONFIG_FILE: &str = "config.toml";
pub const SERIES_FILE: &str = "series.csv";
pub const VERDICT_FILE: &str = "verdict.txt";
pub const RESIDUALS_FILE: &str = "residuals.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub overall: String,
    pub checks: usize,
    pub failed: Vec<String>,
}

/// Record of one run directory. Paths are relative to the directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub name: String,
    pub version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub dt: f64,
    pub steps: usize,
    pub completed: bool,
    #[serde(default)]
    pub failure: Option<String>,
    pub verdict: VerdictSummary,
    pub files: Vec<FileEntry>,
    pub config: ExperimentConfig,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })
    }

    /// Checks that every listed file exists with the recorded length.
    pub fn verify(&self, dir: &Path) -> Result<()> {
        for f in &self.files {
            let path = dir.join(&f.path);
            let meta = fs::metadata(&path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            if meta.len() != f.bytes {
                return Err(Error::Parse {
                    path,
                    detail: format!("manifest records {} bytes, found {}", f.bytes, meta.len()),
                });
            }
        }
        Ok(())
    }
}

/// In-memory result of [`execute`].
#[derive(Clone, Debug)]
pub struct Outcome {
    pub trajectory: Trajectory,
    pub report: Report,
}

/// `make_initial`, `run`, `analyze`.
pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let ops = SpectralOps::new(&grid);
    let params = cfg.params()?;
    let initial = make_initial(&ops, &cfg.initial_spec(), &params)?;
    let trajectory = run(&ops, &initial, &params, &cfg.integrator)?;
    let report = analyze(&trajectory.series, &cfg.analysis)?;
    Ok(Outcome { trajectory, report })
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn write_file(dir: &Path, name: &str, bytes: &[u8], files: &mut Vec<FileEntry>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|source| Error::Io { path, source })?;
    files.push(FileEntry {
        path: name.to_string(),
        bytes: bytes.len() as u64,
    });
    Ok(())
}

/// Runs `cfg` and writes the run directory: config echo, series CSV,
/// verdict report, fit residuals, optional snapshots and the manifest.
pub fn run_to_dir(cfg: &ExperimentConfig, dir: &Path) -> Result<(Outcome, RunManifest)> {
    let started = unix_now();
    let outcome = execute(cfg)?;
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files = Vec::new();
    write_file(dir, CONFIG_FILE, cfg.to_toml().as_bytes(), &mut files)?;

    let traj = &outcome.trajectory;
    let mut csv = Vec::new();
    traj.series
        .write_csv(&mut csv)
        .map_err(|source| io_at(dir, SERIES_FILE, source))?;
    write_file(dir, SERIES_FILE, &csv, &mut files)?;
    write_file(
        dir,
        VERDICT_FILE,
        outcome.report.to_text().as_bytes(),
        &mut files,
    )?;
    let mut res = Vec::new();
    outcome
        .report
        .write_residuals(&mut res)
        .map_err(|source| io_at(dir, RESIDUALS_FILE, source))?;
    write_file(dir, RESIDUALS_FILE, &res, &mut files)?;

    if cfg.output.snapshots {
        let t = traj.final_state.time();
        let mut snap = |name: &str, field| -> Result<()> {
            let file = format!("{name}.field");
            let bytes = save_snapshot(&dir.join(&file), field, t, name)?;
            files.push(FileEntry { path: file, bytes });
            Ok(())
        };
        snap("n_final", traj.final_state.n())?;
        if let Some(ln_c) = &traj.final_ln_c {
            snap("ln_c_final", ln_c)?;
        }
    }

    let report = &outcome.report;
    let manifest = RunManifest {
        schema: MANIFEST_SCHEMA.to_string(),
        name: cfg.name.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix: started,
        finished_unix: unix_now(),
        dt: traj.dt,
        steps: traj.steps,
        completed: traj.completed(),
        failure: traj.failure.clone(),
        verdict: VerdictSummary {
            overall: if report.passed() { "pass" } else { "fail" }.to_string(),
            checks: report.checks.len(),
            failed: report
                .checks
                .iter()
                .filter(|c| c.verdict.is_failure())
                .map(|c| c.name.clone())
                .collect(),
        },
        files,
        config: cfg.clone(),
    };
    let text = toml::to_string(&manifest).expect("manifest serializes");
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, text).map_err(|source| Error::Io { path, source })?;
    Ok((outcome, manifest))
}

fn io_at(dir: &Path, name: &str, source: std::io::Error) -> Error {
    Error::Io {
        path: dir.join(name),
        source,
    }
}

/// Analysis settings for a series file: those of `--config` if given,
/// else those of a `config.toml` next to the series, else the defaults.
pub fn analysis_config_for(
    series: &Path,
    config: Option<&Path>,
) -> Result<(AnalysisConfig, Option<PathBuf>)> {
    if let Some(p) = config {
        return Ok((ExperimentConfig::load(p)?.analysis, Some(p.to_path_buf())));
    }
    let sibling = series.parent().unwrap_or(Path::new(".")).join(CONFIG_FILE);
    if sibling.is_file() {
        return Ok((ExperimentConfig::load(&sibling)?.analysis, Some(sibling)));
    }
    Ok((AnalysisConfig::default(), None))
}
