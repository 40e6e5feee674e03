//! Scenario runner for the rotating-saddle simulator.
//!
//! A run reads a [`config::ScenarioConfig`], sweeps its grid on a rayon pool
//! and writes one CSV per series plus `manifest.json`. Outputs depend only on
//! the config and the seed.

pub mod config;
pub mod error;
pub mod output;
pub mod scenario;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{Scenario, ScenarioConfig};
pub use error::RunError;
pub use scenario::Results;

/// Environment variable that overrides every other output directory.
pub const OUT_ENV: &str = "SADDLESIM_OUT";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; 0 uses the machine parallelism.
    pub threads: usize,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub struct RunSummary {
    pub scenario: Scenario,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub wall_time_s: f64,
}

/// `SADDLESIM_OUT`, then `--out`, then the config value.
pub fn output_dir(config: &ScenarioConfig, flag: Option<&Path>) -> PathBuf {
    if let Some(env) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(env);
    }
    flag.map_or_else(|| config.output.clone(), Path::to_path_buf)
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, RunError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| RunError::config("--threads", e))
}

fn load(path: &Path) -> Result<(ScenarioConfig, Vec<u8>), RunError> {
    let bytes = std::fs::read(path).map_err(|e| RunError::config("<file>", format!("{}: {e}", path.display())))?;
    Ok((ScenarioConfig::load(path)?, bytes))
}

fn manifest(
    scenario: &str,
    path: &Path,
    bytes: &[u8],
    config: &ScenarioConfig,
    pool: &rayon::ThreadPool,
    started: Instant,
    files: &[PathBuf],
) -> output::Manifest {
    output::Manifest {
        scenario: scenario.to_string(),
        schema_version: output::SCHEMA_VERSION,
        code_version: env!("CARGO_PKG_VERSION"),
        config_path: path.display().to_string(),
        config_sha256: output::sha256_hex(bytes),
        seed: config.seed,
        threads: pool.current_num_threads(),
        wall_time_s: started.elapsed().as_secs_f64(),
        files: files
            .iter()
            .filter_map(|f| f.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
    }
}

/// Loads, validates and runs the scenario at `path`.
pub fn run_file(path: &Path, options: &RunOptions) -> Result<RunSummary, RunError> {
    let started = Instant::now();
    let (mut config, bytes) = load(path)?;
    if let Some(seed) = options.seed {
        config.seed = seed;
    }
    let out_dir = output_dir(&config, options.out.as_deref());
    let pool = pool(options.threads)?;
    let (scenario, results) = pool.install(|| scenario::run(&config))?;
    let mut files = output::write_results(&out_dir, &results)?;
    let m = manifest(scenario.name(), path, &bytes, &config, &pool, started, &files);
    files.push(output::write_manifest(&out_dir, &m)?);
    Ok(RunSummary {
        scenario,
        out_dir,
        files,
        wall_time_s: m.wall_time_s,
    })
}

/// Writes the focal-plane intensity for every `I_L` of the config's sweep.
pub fn field_map_file(path: &Path, options: &RunOptions, theta: Option<f64>) -> Result<RunSummary, RunError> {
    let started = Instant::now();
    let (config, bytes) = load(path)?;
    let scenario = config.scenario()?;
    if config.sweep.laguerre_fractions.is_empty() {
        return Err(RunError::config("sweep.laguerre_fractions", "must not be empty"));
    }
    let fm = &config.field_map;
    if !(fm.extent > 0.0) || fm.radial_points < 2 || fm.angular_points == 0 {
        return Err(RunError::config("field_map", "extent must be positive, radial_points ≥ 2, angular_points ≥ 1"));
    }
    let out_dir = output_dir(&config, options.out.as_deref());
    output::create_dir(&out_dir)?;
    let theta = theta.unwrap_or(fm.theta);
    let mut files = Vec::new();
    for &il in &config.sweep.laguerre_fractions {
        let trap = config.setup(il, 0.0)?.trap;
        trap.validate().map_err(|e| RunError::config("sweep.laguerre_fractions", e))?;
        let name = format!("field_map_il{il:.2}.csv");
        files.push(output::write_field_map(&out_dir, &name, &trap, fm.extent, fm.radial_points, fm.angular_points, theta)?);
    }
    let pool = pool(1)?;
    let m = manifest("field-map", path, &bytes, &config, &pool, started, &files);
    files.push(output::write_manifest(&out_dir, &m)?);
    Ok(RunSummary {
        scenario,
        out_dir,
        files,
        wall_time_s: m.wall_time_s,
    })
}
