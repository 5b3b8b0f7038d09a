//! Run configuration: command-line flags and an optional TOML file of flat
//! `key = value` pairs. Flags override file values.
//!
//! Physical quantities are given in units built on the pulse width `T`
//! (`width`, default 1): detunings and decay rates in `1/T`, `dt` and
//! `spacing` in `T`.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{DecayConfig, DEFAULT_SAMPLES};
use crate::experiments::{Axis, ExperimentConfig};
use crate::pulse::{PulseTrainParams, DEFAULT_SPACING_IN_STRETCHED_WIDTHS};
use crate::state::DetuningConfig;

/// Reference one-photon detuning, in `1/T`.
pub const DEFAULT_DETUNING: f64 = 300.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    /// Usage errors and help text produced by the argument parser.
    #[error("{0}")]
    Usage(String),

    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },

    #[error("missing `{field}`: {message}")]
    Missing { field: String, message: String },

    #[error("cannot read config file {path}: {message}")]
    File { path: String, message: String },

    #[error("config file {path}: {message}")]
    Parse { path: String, message: String },
}

impl ConfigError {
    fn invalid(field: &str, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Export the synthesized pulse schedule.
    Design,
    /// Integrate the five-state system.
    Evolve,
    /// Evaluate the analytic train propagator.
    Train,
    /// Scan the one-photon detunings (paired with a closed-system control when decay is set).
    ScanDetuning,
    /// Scan the two-photon detunings.
    ScanTwoPhoton,
    /// Compare the intermediate-state maximum with its analytic value for N = 1..max_pairs.
    NScaling,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Design => "design",
            Command::Evolve => "evolve",
            Command::Train => "train",
            Command::ScanDetuning => "scan-detuning",
            Command::ScanTwoPhoton => "scan-two-photon",
            Command::NScaling => "n-scaling",
        }
    }
}

/// Parsed mixing-target angle: a number of radians or an expression such as `pi/8` or `3*pi/16`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AngleSpec {
    Radians(f64),
    Expr(String),
}

impl AngleSpec {
    pub fn radians(&self) -> Result<f64, ConfigError> {
        match self {
            AngleSpec::Radians(v) => Ok(*v),
            AngleSpec::Expr(s) => parse_angle(s),
        }
    }
}

/// Parses `0.39`, `pi/8`, `3*pi/16`, `3pi/16` or `pi`.
pub fn parse_angle(text: &str) -> Result<f64, ConfigError> {
    let bad = || {
        ConfigError::invalid(
            "target_angle",
            format!("cannot parse `{text}`; use radians or a form like `pi/8`"),
        )
    };
    let s: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (s.as_str(), 1.0),
    };
    let factor = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some(f) => f.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
        None => return Err(bad()),
    };
    Ok(factor * PI / den)
}

fn parse_axis(text: &str) -> Result<AxisSpec, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected MIN:MAX:POINTS, got `{text}`"));
    }
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
    Ok(AxisSpec {
        min: num(parts[0])?,
        max: num(parts[1])?,
        points: parts[2]
            .trim()
            .parse()
            .map_err(|e| format!("`{}`: {e}", parts[2]))?,
    })
}

/// Grid axis in units of `1/T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

/// Every setting that may appear in a config file or as a flag; all optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    /// Subcommand; only read from files (the command line names it positionally).
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,

    /// Number of pulse pairs N.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_pairs: Option<usize>,

    /// Target angle in radians or as `pi/8`; π/4 is full transfer.
    #[arg(long, value_parser = |s: &str| Ok::<_, String>(AngleSpec::Expr(s.to_string())))]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_angle: Option<AngleSpec>,

    /// One-photon detuning Δ₁ in 1/T.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta1: Option<f64>,

    /// One-photon detuning Δ₂ in 1/T.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta2: Option<f64>,

    /// ζ = Δ₁/Δ₂; combine with at most one of Δ₁, Δ₂.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,

    /// Two-photon detuning δ₁ in 1/T.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub small_delta1: Option<f64>,

    /// Two-photon detuning δ₂ in 1/T.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub small_delta2: Option<f64>,

    /// Decay rate of e1 in 1/T.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_e1: Option<f64>,

    /// Decay rate of g2 in 1/T.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_g2: Option<f64>,

    /// Decay rate of e2 in 1/T.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_e2: Option<f64>,

    /// Pulse width T (sets the unit system).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,

    /// Integration step in T; default: largest step with dt·‖H‖ < 0.1, at most 1e-3.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,

    /// Separation of step centers in T; default 6·√2.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,

    /// rms pulse area per step in radians; default 2π.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_area: Option<f64>,

    /// Stored samples per trajectory or schedule.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,

    /// Output directory.
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,

    /// Worker threads for scans; default: one per CPU.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,

    /// Largest N for n-scaling.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_pairs: Option<usize>,

    /// First scan axis as MIN:MAX:POINTS in 1/T.
    #[arg(long, value_parser = parse_axis, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis1: Option<AxisSpec>,

    /// Second scan axis as MIN:MAX:POINTS in 1/T.
    #[arg(long, value_parser = parse_axis, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis2: Option<AxisSpec>,
}

impl RawConfig {
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::File {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    /// Values of `self` take precedence over `base`.
    pub fn overriding(self, base: RawConfig) -> RawConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RawConfig { $($f: self.$f.or(base.$f)),* } };
        }
        pick!(
            command,
            n_pairs,
            target_angle,
            delta1,
            delta2,
            zeta,
            small_delta1,
            small_delta2,
            gamma_e1,
            gamma_g2,
            gamma_e2,
            width,
            dt,
            spacing,
            step_area,
            samples,
            output,
            workers,
            max_pairs,
            axis1,
            axis2
        )
    }
}

/// A validated configuration with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub n_pairs: usize,
    pub target_angle: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub small_delta1: f64,
    pub small_delta2: f64,
    pub gamma_e1: f64,
    pub gamma_g2: f64,
    pub gamma_e2: f64,
    pub width: f64,
    pub dt: Option<f64>,
    pub spacing: f64,
    pub step_area: f64,
    pub samples: usize,
    pub output: PathBuf,
    pub workers: Option<usize>,
    pub max_pairs: usize,
    pub axis1: AxisSpec,
    pub axis2: AxisSpec,
}

fn finite(field: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::invalid(field, format!("{v} is not finite")))
    }
}

fn positive(field: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::invalid(field, format!("{v} must be > 0")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::invalid(field, format!("{v} must be >= 0")))
    }
}

impl RunConfig {
    /// Fills defaults and validates. `command` must be known either from `raw` or from `command`.
    pub fn resolve(raw: RawConfig, command: Option<Command>) -> Result<Self, ConfigError> {
        let command = command
            .or(raw.command)
            .ok_or_else(|| ConfigError::Missing {
                field: "command".into(),
                message: "one of design, evolve, train, scan-detuning, scan-two-photon, n-scaling"
                    .into(),
            })?;

        let n_pairs = raw.n_pairs.unwrap_or(5);
        if n_pairs == 0 {
            return Err(ConfigError::invalid(
                "n_pairs",
                "0 is out of range; accepted: integer >= 1",
            ));
        }
        let target_angle = match &raw.target_angle {
            Some(a) => a.radians()?,
            None => FRAC_PI_4,
        };
        if !(target_angle > 0.0 && target_angle <= FRAC_PI_4 * (1.0 + 1e-12)) {
            return Err(ConfigError::invalid(
                "target_angle",
                format!("{target_angle} is out of range; accepted: (0, π/4] radians"),
            ));
        }
        let target_angle = target_angle.min(FRAC_PI_4);

        let (delta1, delta2) = match (raw.delta1, raw.delta2, raw.zeta) {
            (Some(_), Some(_), Some(_)) => {
                return Err(ConfigError::invalid(
                    "zeta",
                    "ζ and both Δ₁, Δ₂ were given; supply either (delta1, delta2) or zeta with at most one detuning",
                ))
            }
            (d1, d2, Some(z)) => {
                let z = positive("zeta", z)?;
                match (d1, d2) {
                    (Some(d1), None) => (d1, d1 / z),
                    (None, Some(d2)) => (z * d2, d2),
                    _ => (z * DEFAULT_DETUNING, DEFAULT_DETUNING),
                }
            }
            (d1, d2, None) => (
                d1.unwrap_or(DEFAULT_DETUNING),
                d2.unwrap_or(DEFAULT_DETUNING),
            ),
        };
        finite("delta1", delta1)?;
        finite("delta2", delta2)?;
        if delta1 == 0.0 || delta2 == 0.0 {
            return Err(ConfigError::invalid(
                "delta1/delta2",
                "one-photon detunings must be nonzero; accepted: both > 0 or both < 0",
            ));
        }
        if delta1.signum() != delta2.signum() {
            return Err(ConfigError::invalid(
                "delta1/delta2",
                format!("Δ₁ = {delta1} and Δ₂ = {delta2} have opposite signs; accepted: both > 0 or both < 0"),
            ));
        }

        let width = positive("width", raw.width.unwrap_or(1.0))?;
        let dt = raw.dt.map(|v| positive("dt", v)).transpose()?;
        let spacing = positive(
            "spacing",
            raw.spacing
                .unwrap_or(DEFAULT_SPACING_IN_STRETCHED_WIDTHS * SQRT_2),
        )?;
        if spacing < 5.0 * SQRT_2 * (1.0 - 1e-12) {
            return Err(ConfigError::invalid(
                "spacing",
                format!("{spacing} is out of range; accepted: >= 5·√2 ≈ 7.071 (units of T)"),
            ));
        }
        let step_area = positive("step_area", raw.step_area.unwrap_or(2.0 * PI))?;
        let samples = raw.samples.unwrap_or(DEFAULT_SAMPLES);
        if samples < 2 {
            return Err(ConfigError::invalid(
                "samples",
                format!("{samples}; accepted: integer >= 2"),
            ));
        }
        let workers = raw.workers;
        if workers == Some(0) {
            return Err(ConfigError::invalid("workers", "0; accepted: integer >= 1"));
        }
        let max_pairs = raw.max_pairs.unwrap_or(10);
        if max_pairs == 0 {
            return Err(ConfigError::invalid(
                "max_pairs",
                "0; accepted: integer >= 1",
            ));
        }

        let (default1, default2) = match command {
            Command::ScanTwoPhoton => (
                AxisSpec {
                    min: -1.0,
                    max: 1.0,
                    points: 41,
                },
                AxisSpec {
                    min: -1.0,
                    max: 1.0,
                    points: 41,
                },
            ),
            _ => (
                AxisSpec {
                    min: 100.0,
                    max: 600.0,
                    points: 41,
                },
                AxisSpec {
                    min: 100.0,
                    max: 600.0,
                    points: 41,
                },
            ),
        };
        let axis1 = check_axis("axis1", raw.axis1.unwrap_or(default1))?;
        let axis2 = check_axis("axis2", raw.axis2.unwrap_or(default2))?;
        if command == Command::ScanDetuning {
            for (name, a) in [("axis1", axis1), ("axis2", axis2)] {
                if a.min <= 0.0 && a.max >= 0.0 || a.min.signum() != axis1.min.signum() {
                    return Err(ConfigError::invalid(
                        name,
                        "one-photon axes must exclude 0 and share one sign; accepted: e.g. 100:600:41",
                    ));
                }
            }
        }

        Ok(RunConfig {
            command,
            n_pairs,
            target_angle,
            delta1,
            delta2,
            small_delta1: finite("small_delta1", raw.small_delta1.unwrap_or(0.0))?,
            small_delta2: finite("small_delta2", raw.small_delta2.unwrap_or(0.0))?,
            gamma_e1: non_negative("gamma_e1", raw.gamma_e1.unwrap_or(0.0))?,
            gamma_g2: non_negative("gamma_g2", raw.gamma_g2.unwrap_or(0.0))?,
            gamma_e2: non_negative("gamma_e2", raw.gamma_e2.unwrap_or(0.0))?,
            width,
            dt,
            spacing,
            step_area,
            samples,
            output: raw.output.unwrap_or_else(|| PathBuf::from("out")),
            workers,
            max_pairs,
            axis1,
            axis2,
        })
    }

    /// The flat key/value form accepted by config files.
    pub fn to_raw(&self) -> RawConfig {
        RawConfig {
            command: Some(self.command),
            n_pairs: Some(self.n_pairs),
            target_angle: Some(AngleSpec::Radians(self.target_angle)),
            delta1: Some(self.delta1),
            delta2: Some(self.delta2),
            zeta: None,
            small_delta1: Some(self.small_delta1),
            small_delta2: Some(self.small_delta2),
            gamma_e1: Some(self.gamma_e1),
            gamma_g2: Some(self.gamma_g2),
            gamma_e2: Some(self.gamma_e2),
            width: Some(self.width),
            dt: self.dt,
            spacing: Some(self.spacing),
            step_area: Some(self.step_area),
            samples: Some(self.samples),
            output: Some(self.output.clone()),
            workers: self.workers,
            max_pairs: Some(self.max_pairs),
            axis1: Some(self.axis1),
            axis2: Some(self.axis2),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_raw()).expect("flat config always serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Self::resolve(RawConfig::from_toml_str(text, "<string>")?, None)
    }

    pub fn zeta(&self) -> f64 {
        self.delta1 / self.delta2
    }

    /// Absolute-unit detunings.
    pub fn detuning(&self) -> DetuningConfig {
        DetuningConfig::new(self.delta1 / self.width, self.delta2 / self.width).with_two_photon(
            self.small_delta1 / self.width,
            self.small_delta2 / self.width,
        )
    }

    pub fn decay(&self) -> DecayConfig {
        DecayConfig {
            gamma_e1: self.gamma_e1 / self.width,
            gamma_g2: self.gamma_g2 / self.width,
            gamma_e2: self.gamma_e2 / self.width,
        }
    }

    pub fn train_params(&self) -> PulseTrainParams {
        PulseTrainParams {
            n_pairs: self.n_pairs,
            target_angle: self.target_angle,
            detuning: self.detuning(),
            width: self.width,
            spacing: Some(self.spacing * self.width),
            step_area: self.step_area,
        }
    }

    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            train: self.train_params(),
            decay: self.decay(),
            dt: self.dt.map(|d| d * self.width),
            samples: self.samples,
        }
    }

    /// Scan axes in absolute units, named after the scanned quantity.
    pub fn axes(&self) -> (Axis, Axis) {
        let (n1, n2) = match self.command {
            Command::ScanTwoPhoton => ("small_delta1", "small_delta2"),
            _ => ("delta1", "delta2"),
        };
        let mk = |name: &str, a: AxisSpec| {
            Axis::new(name, a.min / self.width, a.max / self.width, a.points)
        };
        (mk(n1, self.axis1), mk(n2, self.axis2))
    }
}

fn check_axis(field: &str, a: AxisSpec) -> Result<AxisSpec, ConfigError> {
    if !(a.min.is_finite() && a.max.is_finite() && a.min <= a.max && a.points >= 1) {
        return Err(ConfigError::invalid(
            field,
            format!(
                "{}:{}:{} is invalid; accepted: finite MIN <= MAX and POINTS >= 1",
                a.min, a.max, a.points
            ),
        ));
    }
    Ok(a)
}

/// Command-line interface of the `coincident` binary.
#[derive(Debug, Parser)]
#[command(
    name = "coincident",
    version,
    about = "Coincident pulse trains in a five-state chain"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Export the synthesized pulse schedule as CSV.
    Design(CliArgs),
    /// Integrate the five-state system and export the trajectory.
    Evolve(CliArgs),
    /// Evaluate the analytic train propagator (JSON).
    Train(CliArgs),
    /// Scan final P_g3 over (Δ₁, Δ₂).
    ScanDetuning(CliArgs),
    /// Scan final P_g3 over (δ₁, δ₂).
    ScanTwoPhoton(CliArgs),
    /// Intermediate-state maximum versus N.
    NScaling(CliArgs),
}

#[derive(Debug, Args)]
pub struct CliArgs {
    /// TOML file of `key = value` settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub raw: RawConfig,
}

impl CliCommand {
    fn split(self) -> (Command, CliArgs) {
        match self {
            CliCommand::Design(a) => (Command::Design, a),
            CliCommand::Evolve(a) => (Command::Evolve, a),
            CliCommand::Train(a) => (Command::Train, a),
            CliCommand::ScanDetuning(a) => (Command::ScanDetuning, a),
            CliCommand::ScanTwoPhoton(a) => (Command::ScanTwoPhoton, a),
            CliCommand::NScaling(a) => (Command::NScaling, a),
        }
    }
}

/// Parses arguments (program name first) and an optional config file into a [`RunConfig`].
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, ConfigError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| ConfigError::Usage(e.render().to_string()))?;
    let (command, args) = cli.command.split();
    let file = match &args.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    if let Some(c) = file.command {
        if c != command {
            return Err(ConfigError::invalid(
                "command",
                format!(
                    "config file is for `{}` but `{}` was requested",
                    c.name(),
                    command.name()
                ),
            ));
        }
    }
    RunConfig::resolve(args.raw.overriding(file), Some(command))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(args: &[&str]) -> Result<RunConfig, ConfigError> {
        parse_config(std::iter::once("coincident").chain(args.iter().copied()))
    }

    #[test]
    fn empty_evolve_uses_reference_defaults() {
        let cfg = parse(&["evolve"]).unwrap();
        assert_eq!(cfg.command, Command::Evolve);
        assert_eq!(cfg.n_pairs, 5);
        assert_eq!((cfg.delta1, cfg.delta2), (300.0, 300.0));
        assert_eq!(cfg.zeta(), 1.0);
        assert_eq!(cfg.width, 1.0);
        assert_eq!(cfg.target_angle, FRAC_PI_4);
        assert_eq!(cfg.dt, None);
        assert!((cfg.spacing - 6.0 * SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn zero_pairs_is_rejected_by_name() {
        let err = parse(&["evolve", "--n-pairs", "0"]).unwrap_err();
        assert!(
            matches!(&err, ConfigError::Invalid { field, .. } if field == "n_pairs"),
            "{err}"
        );
        assert!(err.to_string().contains(">= 1"));
    }

    #[test]
    fn zeta_redundancy_rule() {
        let err = parse(&[
            "evolve", "--zeta", "0.8", "--delta1", "240", "--delta2", "300",
        ])
        .unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { field, .. } if field == "zeta"));
        let cfg = parse(&["evolve", "--zeta", "0.8"]).unwrap();
        assert!((cfg.delta1 - 240.0).abs() < 1e-12 && cfg.delta2 == 300.0);
        let cfg = parse(&["evolve", "--zeta", "1.2", "--delta1", "360"]).unwrap();
        assert!((cfg.delta2 - 300.0).abs() < 1e-12);
    }

    #[test]
    fn angle_expressions() {
        assert!((parse_angle("pi/8").unwrap() - PI / 8.0).abs() < 1e-15);
        assert!((parse_angle("3*pi/16").unwrap() - 3.0 * PI / 16.0).abs() < 1e-15);
        assert!((parse_angle("3pi / 16").unwrap() - 3.0 * PI / 16.0).abs() < 1e-15);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("tau/3").is_err());
        let cfg = parse(&["train", "--target-angle", "pi/12"]).unwrap();
        assert!((cfg.target_angle - PI / 12.0).abs() < 1e-15);
        assert!(parse(&["train", "--target-angle", "pi/2"]).is_err());
    }

    #[test]
    fn file_values_and_flag_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "n_pairs = 3\ndelta1 = 250.0\ntarget_angle = \"pi/8\"\n",
        )
        .unwrap();
        let p = path.to_str().unwrap();
        let cfg = parse(&["evolve", "--config", p, "--n-pairs", "7"]).unwrap();
        assert_eq!(cfg.n_pairs, 7);
        assert_eq!(cfg.delta1, 250.0);
        assert!((cfg.target_angle - PI / 8.0).abs() < 1e-15);

        std::fs::write(&path, "n_pairs = 3\nbogus = 1\n").unwrap();
        let err = parse(&["evolve", "--config", p]).unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }));
        assert!(err.to_string().contains("bogus"));

        std::fs::write(&path, "command = \"train\"\n").unwrap();
        assert!(parse(&["evolve", "--config", p]).is_err());
        assert!(parse(&["evolve", "--config", "/nonexistent/x.toml"]).is_err());
    }

    #[test]
    fn range_errors_name_fields() {
        for (args, field) in [
            (vec!["evolve", "--width=-1"], "width"),
            (vec!["evolve", "--dt", "0"], "dt"),
            (vec!["evolve", "--gamma-g2=-0.1"], "gamma_g2"),
            (vec!["evolve", "--spacing", "2"], "spacing"),
            (
                vec!["evolve", "--delta1", "300", "--delta2", "-300"],
                "delta1/delta2",
            ),
            (vec!["scan-detuning", "--axis1", "-100:100:5"], "axis1"),
            (vec!["evolve", "--samples", "1"], "samples"),
        ] {
            match parse(&args) {
                Err(ConfigError::Invalid { field: f, .. }) => assert_eq!(f, field, "{args:?}"),
                other => panic!("{args:?}: {other:?}"),
            }
        }
        assert!(matches!(
            parse(&["evolve", "--axis1", "1:2"]),
            Err(ConfigError::Usage(_))
        ));
        assert!(matches!(parse(&["frobnicate"]), Err(ConfigError::Usage(_))));
    }

    #[test]
    fn scan_defaults_depend_on_command() {
        let cfg = parse(&["scan-two-photon"]).unwrap();
        assert_eq!(
            cfg.axis1,
            AxisSpec {
                min: -1.0,
                max: 1.0,
                points: 41
            }
        );
        let (a1, a2) = cfg.axes();
        assert_eq!(
            (a1.name.as_str(), a2.name.as_str()),
            ("small_delta1", "small_delta2")
        );
        let cfg = parse(&["scan-detuning", "--axis2", "200:400:3"]).unwrap();
        assert_eq!(
            cfg.axis1,
            AxisSpec {
                min: 100.0,
                max: 600.0,
                points: 41
            }
        );
        assert_eq!(
            cfg.axis2,
            AxisSpec {
                min: 200.0,
                max: 400.0,
                points: 3
            }
        );
    }

    #[test]
    fn width_rescales_physical_units() {
        let cfg = parse(&["evolve", "--width", "2", "--dt", "0.001"]).unwrap();
        let exp = cfg.experiment();
        assert_eq!(exp.train.detuning.delta1, 150.0);
        assert_eq!(exp.dt, Some(0.002));
        assert!((exp.train.spacing.unwrap() - 12.0 * SQRT_2).abs() < 1e-12);
    }

    fn command_strategy() -> impl Strategy<Value = Command> {
        prop_oneof![
            Just(Command::Design),
            Just(Command::Evolve),
            Just(Command::Train),
            Just(Command::ScanDetuning),
            Just(Command::ScanTwoPhoton),
            Just(Command::NScaling),
        ]
    }

    proptest! {
        #[test]
        fn toml_round_trip(
            command in command_strategy(),
            n_pairs in 1usize..40,
            target in 0.01f64..FRAC_PI_4,
            delta2 in 10.0f64..1000.0,
            zeta in 0.2f64..5.0,
            small in -2.0f64..2.0,
            gamma in 0.0f64..1.0,
            width in 0.1f64..10.0,
            dt in proptest::option::of(1e-5f64..1e-2),
            workers in proptest::option::of(1usize..16),
            points in 1usize..60,
        ) {
            let raw = RawConfig {
                command: Some(command),
                n_pairs: Some(n_pairs),
                target_angle: Some(AngleSpec::Radians(target)),
                delta2: Some(delta2),
                zeta: Some(zeta),
                small_delta1: Some(small),
                small_delta2: Some(-small),
                gamma_g2: Some(gamma),
                width: Some(width),
                dt,
                workers,
                axis2: Some(AxisSpec { min: 150.0, max: 450.0, points }),
                ..Default::default()
            };
            let cfg = RunConfig::resolve(raw, None).unwrap();
            let again = RunConfig::from_toml(&cfg.to_toml()).unwrap();
            prop_assert_eq!(again, cfg);
        }
    }
}
