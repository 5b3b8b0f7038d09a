//! Named experiments: population dynamics of a designed train, detuning
//! scans with and without decay, and the `N`-scaling of the intermediate
//! transient.
//!
//! Scan cells are independent runs. They are evaluated on a rayon pool and
//! gathered by grid index, so results do not depend on the worker count or
//! on evaluation order.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    integrate, suggest_time_step, DecayConfig, FullSystem, SimulationResult, DEFAULT_MAX_DT,
    DEFAULT_SAMPLES,
};
use crate::error::{Error, Result};
use crate::propagator::max_intermediate_population;
use crate::pulse::{PulseTrainParams, RabiSchedule};
use crate::state::{Level, StateVector};

/// Everything needed to run the five-state system for one designed train.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub train: PulseTrainParams,
    pub decay: DecayConfig,
    /// Fixed integration step; `None` picks the largest step allowed by the
    /// `dt·‖H‖` bound, capped at `10⁻³·T`.
    pub dt: Option<f64>,
    pub samples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            train: PulseTrainParams::default(),
            decay: DecayConfig::none(),
            dt: None,
            samples: DEFAULT_SAMPLES,
        }
    }
}

impl ExperimentConfig {
    pub fn system(&self) -> Result<FullSystem> {
        let schedule = RabiSchedule::new(self.train.build()?);
        FullSystem::new(schedule, self.train.detuning, self.decay)
    }

    /// Step that [`run_dynamics_experiment`] will use for `system`.
    pub fn resolve_dt(&self, system: &FullSystem) -> f64 {
        self.dt.unwrap_or_else(|| {
            suggest_time_step(
                system,
                system.schedule.window(),
                DEFAULT_MAX_DT * self.train.width,
            )
        })
    }
}

/// Five-state trajectory of the designed train, starting in `g1`.
pub fn run_dynamics_experiment(config: &ExperimentConfig) -> Result<SimulationResult> {
    let system = config.system()?;
    let dt = config.resolve_dt(&system);
    let initial = StateVector::basis(5, Level::G1)?;
    integrate(
        &initial,
        &system,
        system.schedule.window(),
        dt,
        config.samples,
    )
}

/// A linear grid axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(name: impl Into<String>, min: f64, max: f64, points: usize) -> Self {
        Self {
            name: name.into(),
            min,
            max,
            points,
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.points <= 1 {
            self.min
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.points - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.points == 0 || !self.min.is_finite() || !self.max.is_finite() || self.max < self.min
        {
            return Err(Error::InvalidParameter {
                name: "axis",
                value: self.points as f64,
                expected: "finite bounds with min <= max and at least one point",
            });
        }
        Ok(())
    }

    /// `[100, 600]/T` with 41 points.
    pub fn default_one_photon(name: &str, width: f64) -> Self {
        Self::new(name, 100.0 / width, 600.0 / width, 41)
    }

    /// `[−1, 1]/T` with 41 points.
    pub fn default_two_photon(name: &str, width: f64) -> Self {
        Self::new(name, -1.0 / width, 1.0 / width, 41)
    }
}

/// Failure of one grid cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellError {
    pub i: usize,
    pub j: usize,
    pub message: String,
}

/// A dense `points₁ × points₂` grid of one observable. Failed cells hold NaN.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanGrid {
    pub axis1: Axis,
    pub axis2: Axis,
    pub observable: String,
    /// Row-major: `values[i * axis2.points + j]`.
    pub values: Vec<f64>,
    pub errors: Vec<CellError>,
}

impl ScanGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.axis2.points + j]
    }

    /// Largest finite value.
    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the cell whose axis values are closest to `(x, y)`.
    pub fn nearest(&self, x: f64, y: f64) -> (usize, usize) {
        let closest = |axis: &Axis, v: f64| {
            (0..axis.points)
                .min_by(|&a, &b| {
                    (axis.value(a) - v)
                        .abs()
                        .total_cmp(&(axis.value(b) - v).abs())
                })
                .unwrap_or(0)
        };
        (closest(&self.axis1, x), closest(&self.axis2, y))
    }

    /// Cells on the outer boundary of the grid.
    pub fn boundary(&self) -> Vec<(usize, usize)> {
        let (n1, n2) = (self.axis1.points, self.axis2.points);
        (0..n1)
            .flat_map(|i| (0..n2).map(move |j| (i, j)))
            .filter(|&(i, j)| i == 0 || j == 0 || i + 1 == n1 || j + 1 == n2)
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        write_grids_csv(&[self], out)
    }

    pub fn write_error_log<W: Write>(&self, mut out: W) -> io::Result<()> {
        for e in &self.errors {
            writeln!(out, "{},{},{},{}", self.observable, e.i, e.j, e.message)?;
        }
        Ok(())
    }
}

/// Writes grids that share both axes side by side in long format:
/// comment lines with axis metadata, a column header, then one row per cell.
pub fn write_grids_csv<W: Write>(grids: &[&ScanGrid], mut out: W) -> io::Result<()> {
    let Some(first) = grids.first() else {
        return Ok(());
    };
    let (a1, a2) = (&first.axis1, &first.axis2);
    let observables: Vec<&str> = grids.iter().map(|g| g.observable.as_str()).collect();
    writeln!(out, "# observable={}", observables.join(";"))?;
    writeln!(
        out,
        "# axis1={},min={},max={},points={}",
        a1.name, a1.min, a1.max, a1.points
    )?;
    writeln!(
        out,
        "# axis2={},min={},max={},points={}",
        a2.name, a2.min, a2.max, a2.points
    )?;
    writeln!(out, "{},{},{}", a1.name, a2.name, observables.join(","))?;
    for i in 0..a1.points {
        for j in 0..a2.points {
            write!(out, "{:?},{:?}", a1.value(i), a2.value(j))?;
            for g in grids {
                write!(out, ",{:?}", g.get(i, j))?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

fn final_target_population(config: &ExperimentConfig) -> Result<f64> {
    let mut config = config.clone();
    config.samples = 2;
    Ok(run_dynamics_experiment(&config)?.final_populations[Level::G3.index()])
}

fn run_on_pool<T, F>(workers: Option<usize>, job: F) -> T
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match workers {
        Some(n) => match rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
        {
            Ok(pool) => pool.install(job),
            Err(_) => job(),
        },
        None => job(),
    }
}

/// Evaluates `final P_g3` on every cell; `configure` maps axis values to a run.
fn scan<F>(
    axis1: &Axis,
    axis2: &Axis,
    observable: &str,
    workers: Option<usize>,
    configure: F,
) -> Result<ScanGrid>
where
    F: Fn(f64, f64) -> ExperimentConfig + Sync,
{
    axis1.validate()?;
    axis2.validate()?;
    let n2 = axis2.points;
    let cells = axis1.points * n2;
    let outcomes: Vec<std::result::Result<f64, String>> = run_on_pool(workers, || {
        (0..cells)
            .into_par_iter()
            .map(|idx| {
                let cfg = configure(axis1.value(idx / n2), axis2.value(idx % n2));
                final_target_population(&cfg).map_err(|e| e.to_string())
            })
            .collect()
    });
    let mut values = Vec::with_capacity(cells);
    let mut errors = Vec::new();
    for (idx, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(v) => values.push(v),
            Err(message) => {
                values.push(f64::NAN);
                errors.push(CellError {
                    i: idx / n2,
                    j: idx % n2,
                    message,
                });
            }
        }
    }
    Ok(ScanGrid {
        axis1: axis1.clone(),
        axis2: axis2.clone(),
        observable: observable.to_string(),
        values,
        errors,
    })
}

/// Final `P_g3` over a grid of one-photon detunings `(Δ₁, Δ₂)`; `ζ` follows each cell.
pub fn scan_one_photon(
    delta1: &Axis,
    delta2: &Axis,
    base: &ExperimentConfig,
    workers: Option<usize>,
) -> Result<ScanGrid> {
    scan(delta1, delta2, "final_P_g3", workers, |d1, d2| {
        let mut cfg = base.clone();
        cfg.train.detuning.delta1 = d1;
        cfg.train.detuning.delta2 = d2;
        cfg
    })
}

/// A decayed one-photon scan paired with its closed-system control.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayStudy {
    pub decayed: ScanGrid,
    pub control: ScanGrid,
}

impl DecayStudy {
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        write_grids_csv(&[&self.decayed, &self.control], out)
    }

    pub fn write_error_log<W: Write>(&self, mut out: W) -> io::Result<()> {
        self.decayed.write_error_log(&mut out)?;
        self.control.write_error_log(&mut out)
    }

    /// Cells where the decayed value exceeds the control.
    pub fn violations(&self) -> Vec<(usize, usize)> {
        let n2 = self.control.axis2.points;
        self.decayed
            .values
            .iter()
            .zip(&self.control.values)
            .enumerate()
            .filter(|(_, (d, c))| d > c)
            .map(|(idx, _)| (idx / n2, idx % n2))
            .collect()
    }
}

/// Runs the one-photon scan with `decay` and again without it.
pub fn decay_study(
    delta1: &Axis,
    delta2: &Axis,
    base: &ExperimentConfig,
    decay: DecayConfig,
    workers: Option<usize>,
) -> Result<DecayStudy> {
    decay.validate()?;
    let mut decayed_cfg = base.clone();
    decayed_cfg.decay = decay;
    let mut control_cfg = base.clone();
    control_cfg.decay = DecayConfig::none();
    let mut decayed = scan_one_photon(delta1, delta2, &decayed_cfg, workers)?;
    decayed.observable = "final_P_g3_decayed".into();
    let mut control = scan_one_photon(delta1, delta2, &control_cfg, workers)?;
    control.observable = "final_P_g3_control".into();
    Ok(DecayStudy { decayed, control })
}

/// Final `P_g3` over a grid of two-photon detunings `(δ₁, δ₂)` with the
/// pulses of `base` unchanged.
pub fn scan_two_photon(
    small_delta1: &Axis,
    small_delta2: &Axis,
    base: &ExperimentConfig,
    workers: Option<usize>,
) -> Result<ScanGrid> {
    scan(
        small_delta1,
        small_delta2,
        "final_P_g3",
        workers,
        |d1, d2| {
            let mut cfg = base.clone();
            cfg.train.detuning.small_delta1 = d1;
            cfg.train.detuning.small_delta2 = d2;
            cfg
        },
    )
}

/// One row of the `N`-scaling table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n_pairs: usize,
    /// `sin²(θ/N)`.
    pub predicted: f64,
    /// Largest `P_g2` of the five-state run.
    pub measured: f64,
    pub final_target: f64,
}

/// Predicted and measured intermediate-state maxima for `N = 1..=max_pairs`.
pub fn n_scaling(
    max_pairs: usize,
    target_angle: f64,
    base: &ExperimentConfig,
    workers: Option<usize>,
) -> Result<Vec<ScalingRow>> {
    if max_pairs == 0 {
        return Err(Error::InvalidParameter {
            name: "max_pairs",
            value: 0.0,
            expected: "an integer >= 1",
        });
    }
    run_on_pool(workers, || {
        (1..=max_pairs)
            .into_par_iter()
            .map(|n| {
                let mut cfg = base.clone();
                cfg.train.n_pairs = n;
                cfg.train.target_angle = target_angle;
                cfg.samples = 2;
                let res = run_dynamics_experiment(&cfg)?;
                Ok(ScalingRow {
                    n_pairs: n,
                    predicted: max_intermediate_population(n, target_angle),
                    measured: res.max_transients[Level::G2.index()],
                    final_target: res.final_populations[Level::G3.index()],
                })
            })
            .collect()
    })
}

/// Writes `n_pairs,predicted,measured,final_P_g3`.
pub fn write_scaling_csv<W: Write>(rows: &[ScalingRow], mut out: W) -> io::Result<()> {
    writeln!(out, "n_pairs,predicted,measured,final_P_g3")?;
    for r in rows {
        writeln!(
            out,
            "{},{:?},{:?},{:?}",
            r.n_pairs, r.predicted, r.measured, r.final_target
        )?;
    }
    Ok(())
}
