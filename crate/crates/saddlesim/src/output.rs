//! CSV series and the run manifest.
//!
//! Quadrature columns are in the dimensionless units of the reference tweezer
//! (vacuum covariance `I/2`). Diagnostics that cannot be evaluated for a
//! sample, such as purity of a covariance too large to resolve, are written
//! as `NaN`.

use std::fs;
use std::path::{Path, PathBuf};

use saddle_core::potential::field_intensity;
use saddle_core::GaussianState;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::RunError;
use crate::scenario::{EntanglePoint, MetrologyRun, RecoveryRun, Results, StabilityRow, TrajectoryRun};

/// Bumped whenever a column is added, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

pub const TRAJECTORY_HEADER: [&str; 19] = [
    "time", "mean_x", "mean_px", "mean_y", "mean_py", "cov_x_x", "cov_x_px", "cov_x_y", "cov_x_py", "cov_px_px",
    "cov_px_y", "cov_px_py", "cov_y_y", "cov_y_py", "cov_py_py", "purity", "log_neg", "dx_over_r", "dpx_over_pzpf",
];

pub const METROLOGY_HEADER: [&str; 6] = ["time", "qfim_xx", "qfim_xy", "qfim_yy", "min_force_x", "min_force_y"];

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub scenario: String,
    pub schema_version: u32,
    pub code_version: &'static str,
    pub config_path: String,
    pub config_sha256: String,
    pub seed: u64,
    pub threads: usize,
    pub wall_time_s: f64,
    pub files: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, RunError> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|source| RunError::Csv {
            path: path.to_path_buf(),
            source,
        })
}

/// Shortest round-trip representation; `NaN`, `inf` and `-inf` for the rest.
fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:e}")
    }
}

struct Table {
    path: PathBuf,
    writer: csv::Writer<fs::File>,
}

impl Table {
    fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self, RunError> {
        let path = dir.join(name);
        let mut t = Table {
            writer: csv_writer(&path)?,
            path,
        };
        t.row(header.iter().map(|s| s.to_string()))?;
        Ok(t)
    }

    fn row(&mut self, fields: impl IntoIterator<Item = String>) -> Result<(), RunError> {
        self.writer.write_record(fields).map_err(|source| RunError::Csv {
            path: self.path.clone(),
            source,
        })
    }

    fn finish(mut self) -> Result<PathBuf, RunError> {
        self.writer.flush().map_err(|source| RunError::Io {
            path: self.path.clone(),
            source,
        })?;
        Ok(self.path)
    }
}

fn tag(il: f64, ratio: f64) -> String {
    if ratio.is_nan() {
        format!("il{il:.2}")
    } else {
        format!("il{il:.2}_w{ratio:.2}")
    }
}

fn trajectory_row(s: &GaussianState, radius: f64, units: &saddle_core::units::QuadratureUnits) -> Vec<String> {
    let mut out = Vec::with_capacity(TRAJECTORY_HEADER.len());
    out.push(num(s.time));
    out.extend(s.mean.iter().map(|&v| num(v)));
    for i in 0..4 {
        for j in i..4 {
            out.push(num(s.cov[(i, j)]));
        }
    }
    out.push(num(s.purity().unwrap_or(f64::NAN)));
    out.push(num(s.log_negativity().unwrap_or(f64::NAN)));
    let sd = |i: usize| s.cov[(i, i)].max(0.0).sqrt();
    out.push(num(sd(0) * units.length[0] / radius));
    // Δp̃ = 1/√2 in the vacuum, so Δp / p_zpf = √2 Δp̃.
    out.push(num(sd(1) * std::f64::consts::SQRT_2));
    out
}

pub fn write_trajectory(dir: &Path, name: &str, run: &TrajectoryRun) -> Result<PathBuf, RunError> {
    let mut t = Table::create(dir, name, &TRAJECTORY_HEADER)?;
    for s in &run.samples {
        t.row(trajectory_row(s, run.radius, &run.units))?;
    }
    t.finish()
}

fn write_metrology(dir: &Path, name: &str, run: &MetrologyRun) -> Result<PathBuf, RunError> {
    let mut t = Table::create(dir, name, &METROLOGY_HEADER)?;
    for b in &run.bounds {
        t.row([
            num(b.time),
            num(b.qfim[(0, 0)]),
            num(b.qfim[(0, 1)]),
            num(b.qfim[(1, 1)]),
            num(b.min_force_x),
            num(b.min_force_y),
        ])?;
    }
    t.finish()
}

fn write_entangle_map(dir: &Path, points: &[EntanglePoint]) -> Result<PathBuf, RunError> {
    let mut t = Table::create(dir, "entangle_map.csv", &["i_l", "omega_ratio", "max_log_neg", "time_of_max"])?;
    for p in points {
        t.row([
            num(p.point.laguerre_fraction),
            num(p.point.omega_ratio),
            num(p.max_log_negativity),
            num(p.time_of_max),
        ])?;
    }
    t.finish()
}

fn write_recovery_summary(dir: &Path, runs: &[RecoveryRun]) -> Result<PathBuf, RunError> {
    let header = [
        "i_l",
        "omega_ratio",
        "displacement",
        "success",
        "settling_time",
        "final_energy",
        "steady_energy",
        "final_abs_x_over_r",
    ];
    let mut t = Table::create(dir, "recovery_summary.csv", &header)?;
    for r in runs {
        let tr = &r.trajectory;
        let last = tr.samples.last().map_or(f64::NAN, |s| s.mean[0].abs() * tr.units.length[0] / tr.radius);
        t.row([
            num(tr.point.laguerre_fraction),
            num(tr.point.omega_ratio),
            num(r.displacement),
            r.report.success.to_string(),
            num(r.report.settling_time.unwrap_or(f64::NAN)),
            num(r.report.final_energy),
            num(r.report.steady_energy),
            num(last),
        ])?;
    }
    t.finish()
}

fn write_stability(dir: &Path, rows: &[StabilityRow]) -> Result<PathBuf, RunError> {
    let header = [
        "i_l",
        "omega_ratio",
        "omega0",
        "trap_depth",
        "char_length",
        "beating_frequency",
        "stable",
    ];
    let mut t = Table::create(dir, "stability_scan.csv", &header)?;
    for r in rows {
        t.row([
            num(r.point.laguerre_fraction),
            num(r.point.omega_ratio),
            num(r.omega0),
            num(r.trap_depth),
            num(r.char_length),
            num(r.beating_frequency),
            r.stable.to_string(),
        ])?;
    }
    t.finish()
}

pub fn create_dir(dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(|source| RunError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Writes every series of `results` into `dir` and returns the paths.
pub fn write_results(dir: &Path, results: &Results) -> Result<Vec<PathBuf>, RunError> {
    create_dir(dir)?;
    let mut files = Vec::new();
    match results {
        Results::Trajectories(runs) => {
            for r in runs {
                let name = format!("trajectory_{}.csv", tag(r.point.laguerre_fraction, r.point.omega_ratio));
                files.push(write_trajectory(dir, &name, r)?);
            }
        }
        Results::EntangleMap(points) => files.push(write_entangle_map(dir, points)?),
        Results::Metrology(runs) => {
            for r in runs {
                let t = tag(r.trajectory.point.laguerre_fraction, r.trajectory.point.omega_ratio);
                files.push(write_trajectory(dir, &format!("trajectory_{t}.csv"), &r.trajectory)?);
                files.push(write_metrology(dir, &format!("metrology_{t}.csv"), r)?);
            }
        }
        Results::Recovery(runs) => {
            for r in runs {
                let t = tag(r.trajectory.point.laguerre_fraction, r.trajectory.point.omega_ratio);
                files.push(write_trajectory(dir, &format!("recovery_{t}.csv"), &r.trajectory)?);
            }
            files.push(write_recovery_summary(dir, runs)?);
        }
        Results::Stability(rows) => files.push(write_stability(dir, rows)?),
    }
    Ok(files)
}

/// Intensity on a polar grid `r ∈ [0, extent·w₀]`, `φ ∈ [0, 2π)` in the focal plane.
pub fn write_field_map(
    dir: &Path,
    name: &str,
    trap: &saddle_core::TrapConfig,
    extent: f64,
    radial: usize,
    angular: usize,
    theta: f64,
) -> Result<PathBuf, RunError> {
    let mut t = Table::create(dir, name, &["r", "phi", "intensity"])?;
    let r_max = extent * trap.waist;
    let nr = radial.max(2);
    for i in 0..nr {
        let r = r_max * i as f64 / (nr - 1) as f64;
        for j in 0..angular.max(1) {
            let phi = std::f64::consts::TAU * j as f64 / angular.max(1) as f64;
            t.row([num(r), num(phi), num(field_intensity(r, phi, 0.0, theta, trap))])?;
        }
    }
    t.finish()
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<PathBuf, RunError> {
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|source| RunError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}
