//! Executes a [`RunConfig`], writing its artifacts and a `manifest.json`.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{parse_config, Command, ConfigError, RunConfig};
use crate::dynamics::ae_validity;
use crate::experiments::{
    decay_study, n_scaling, run_dynamics_experiment, scan_one_photon, scan_two_photon,
    write_scaling_csv,
};
use crate::propagator::{max_intermediate_population, train_propagator, train_transients};
use crate::state::{Level, StateVector, FIVE_STATE_LABELS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Model(#[from] crate::Error),

    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Model(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }

    fn kind(&self) -> &'static str {
        if self.exit_code() == EXIT_NUMERICAL {
            "numerical"
        } else {
            "config"
        }
    }

    /// Machine-readable form printed on stderr by the binary.
    pub fn to_json(&self) -> Value {
        json!({ "error": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() })
    }
}

/// One written artifact.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

/// What [`execute`] wrote, plus a command-specific summary.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub output_dir: PathBuf,
    pub artifacts: Vec<Artifact>,
    pub summary: Value,
    pub wall_time_seconds: f64,
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn write(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
    ) -> Result<(), RunError> {
        let path = self.dir.join(name);
        let io_err = |source| RunError::Io {
            path: path.clone(),
            source,
        };
        let mut w = BufWriter::new(File::create(&path).map_err(io_err)?);
        f(&mut w).and_then(|_| w.flush()).map_err(io_err)?;
        self.files.push(name.to_string());
        Ok(())
    }
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Runs the configured command, writing into `config.output`.
pub fn execute(config: &RunConfig) -> Result<RunReport, RunError> {
    let start = Instant::now();
    fs::create_dir_all(&config.output).map_err(|source| RunError::Io {
        path: config.output.clone(),
        source,
    })?;
    let mut out = Outputs {
        dir: config.output.clone(),
        files: Vec::new(),
    };
    let summary = match config.command {
        Command::Design => design(config, &mut out)?,
        Command::Evolve => evolve(config, &mut out)?,
        Command::Train => train(config, &mut out)?,
        Command::ScanDetuning => detuning_scan(config, &mut out)?,
        Command::ScanTwoPhoton => two_photon_scan(config, &mut out)?,
        Command::NScaling => scaling(config, &mut out)?,
    };

    let artifacts = out
        .files
        .iter()
        .map(|name| {
            let path = out.dir.join(name);
            let io_err = |source| RunError::Io {
                path: path.clone(),
                source,
            };
            Ok(Artifact {
                file: name.clone(),
                sha256: sha256_file(&path).map_err(io_err)?,
                bytes: fs::metadata(&path).map_err(io_err)?.len(),
            })
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    let report = RunReport {
        command: config.command.name().to_string(),
        output_dir: config.output.clone(),
        artifacts,
        summary,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "versions": {
            "package": env!("CARGO_PKG_VERSION"),
            "manifest_format": 1,
        },
        "command": report.command,
        "config": config,
        "artifacts": report.artifacts,
        "summary": report.summary,
        "wall_time_seconds": report.wall_time_seconds,
    });
    let path = config.output.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|source| RunError::Io { path, source })?;
    Ok(report)
}

fn design(config: &RunConfig, out: &mut Outputs) -> Result<Value, RunError> {
    let system = config.experiment().system()?;
    let train = system.schedule.train();
    out.write("schedule.csv", |w| {
        system.schedule.write_csv(config.samples, w)
    })?;
    let margins = ae_validity(&system.schedule, &system.detuning);
    Ok(json!({
        "mixing_angles": train.mixing_angles(),
        "centers": train.centers(),
        "window": train.window(),
        "peak_effective_rabi": train.peak_effective_rabi(),
        "amplitude_a": train.amplitude_a(),
        "amplitude_b": train.amplitude_b(),
        "stretched_width": train.stretched_width(),
        "ae_margins": margins,
        "ae_verdict": margins.verdict(),
    }))
}

fn labelled(values: &[f64]) -> Value {
    FIVE_STATE_LABELS
        .iter()
        .zip(values)
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

fn evolve(config: &RunConfig, out: &mut Outputs) -> Result<Value, RunError> {
    let exp = config.experiment();
    let system = exp.system()?;
    let result = run_dynamics_experiment(&exp)?;
    out.write("trajectory.csv", |w| result.write_csv(w))?;
    let margins = ae_validity(&system.schedule, &system.detuning);
    Ok(json!({
        "final_populations": labelled(&result.final_populations),
        "max_populations": labelled(&result.max_transients),
        "predicted_max_P_g2": max_intermediate_population(config.n_pairs, config.target_angle),
        "norm_loss": result.norm_loss,
        "max_norm_deviation": result.max_norm_deviation,
        "dt": result.dt,
        "steps": result.steps,
        "ae_margins": margins,
        "ae_verdict": margins.verdict(),
    }))
}

fn train(config: &RunConfig, out: &mut Outputs) -> Result<Value, RunError> {
    let t = config.train_params().build()?;
    let angles = t.mixing_angles();
    let u = train_propagator(angles, config.step_area)?;
    let evo = train_transients(
        angles,
        config.step_area,
        &StateVector::basis(3, Level::G1)?,
        401,
    )?;
    let matrix: Vec<Vec<[f64; 2]>> = (0..3)
        .map(|r| (0..3).map(|c| [u.get(r, c).re, u.get(r, c).im]).collect())
        .collect();
    let probabilities: Vec<Vec<f64>> = (0..3)
        .map(|r| (0..3).map(|c| u.probability(r, c)).collect())
        .collect();
    let doc = json!({
        "basis": ["g1", "g2", "g3"],
        "n_pairs": config.n_pairs,
        "target_angle": config.target_angle,
        "step_area": config.step_area,
        "mixing_angles": angles,
        "propagator": matrix,
        "probabilities": probabilities,
        "unitarity_defect": u.unitarity_defect(),
        "predicted_max_P_g2": max_intermediate_population(config.n_pairs, config.target_angle),
        "evolution": evo,
    });
    out.write("train.json", |w| {
        serde_json::to_writer_pretty(&mut *w, &doc)?;
        writeln!(w)
    })?;
    Ok(json!({
        "final_populations": evo.final_populations,
        "max_P_g2": evo.max_intermediate,
        "unitarity_defect": u.unitarity_defect(),
    }))
}

fn detuning_scan(config: &RunConfig, out: &mut Outputs) -> Result<Value, RunError> {
    let exp = config.experiment();
    let (a1, a2) = config.axes();
    if exp.decay.is_closed() {
        let grid = scan_one_photon(&a1, &a2, &exp, config.workers)?;
        out.write("scan_detuning.csv", |w| grid.write_csv(w))?;
        out.write("scan_detuning.errors.log", |w| grid.write_error_log(w))?;
        Ok(
            json!({ "cells": grid.values.len(), "failed_cells": grid.errors.len(), "max": grid.max() }),
        )
    } else {
        let study = decay_study(&a1, &a2, &exp, exp.decay, config.workers)?;
        out.write("scan_detuning.csv", |w| study.write_csv(w))?;
        out.write("scan_detuning.errors.log", |w| study.write_error_log(w))?;
        Ok(json!({
            "cells": study.decayed.values.len(),
            "failed_cells": study.decayed.errors.len() + study.control.errors.len(),
            "max_decayed": study.decayed.max(),
            "max_control": study.control.max(),
            "cells_decayed_above_control": study.violations().len(),
        }))
    }
}

fn two_photon_scan(config: &RunConfig, out: &mut Outputs) -> Result<Value, RunError> {
    let exp = config.experiment();
    let (a1, a2) = config.axes();
    let grid = scan_two_photon(&a1, &a2, &exp, config.workers)?;
    out.write("scan_two_photon.csv", |w| grid.write_csv(w))?;
    out.write("scan_two_photon.errors.log", |w| grid.write_error_log(w))?;
    Ok(json!({ "cells": grid.values.len(), "failed_cells": grid.errors.len(), "max": grid.max() }))
}

fn scaling(config: &RunConfig, out: &mut Outputs) -> Result<Value, RunError> {
    let rows = n_scaling(
        config.max_pairs,
        config.target_angle,
        &config.experiment(),
        config.workers,
    )?;
    out.write("n_scaling.csv", |w| write_scaling_csv(&rows, w))?;
    let worst = rows
        .iter()
        .map(|r| (r.measured - r.predicted).abs() / r.predicted)
        .fold(0.0, f64::max);
    Ok(json!({ "rows": rows.len(), "max_relative_deviation": worst }))
}

/// Entry point of the `coincident` binary: parses `args`, runs, prints the
/// manifest path on success or an error JSON on stderr, and returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match parse_config(args) {
        Ok(c) => c,
        Err(ConfigError::Usage(text)) => {
            // Help and version requests are not errors.
            let is_info = !text.starts_with("error");
            if is_info {
                print!("{text}");
                return EXIT_OK;
            }
            eprint!("{text}");
            let err = RunError::Config(ConfigError::Usage(text));
            eprintln!("{}", err.to_json());
            return EXIT_CONFIG;
        }
        Err(e) => {
            let err = RunError::Config(e);
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match execute(&config) {
        Ok(report) => {
            println!("{}", report.output_dir.join(MANIFEST_FILE).display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
