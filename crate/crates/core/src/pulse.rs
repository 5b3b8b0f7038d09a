//! Pulse-train design.
//!
//! A train of `N` steps drives the reduced `g1 ↔ g2 ↔ g3` system with
//! Gaussian two-photon couplings `Ω₀ sinφ_k e^{-(t-τ_k)²/T²}` and
//! `Ω₀ cosφ_k e^{-(t-τ_k)²/T²}`. The four physical fields that produce those
//! couplings after adiabatic elimination share a single Gaussian profile of
//! width `T̃ = √2·T` per step and differ only in amplitude:
//!
//! ```text
//! Ω₁ : Ω₂ : Ω₃ : Ω₄ = 1 : sinφ_k : ζ^{-1/2}·cosφ_k : ζ^{-1/2}
//! ```
//!
//! Samplers assign every time `t` to the step with the nearest center, so
//! the amplitude constraint `Ω₁ = √ζ·Ω₄ = √(Ω₂² + ζΩ₃²)` holds exactly at
//! every instant.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::state::DetuningConfig;

/// Default separation between step centers, in units of `T̃`.
pub const DEFAULT_SPACING_IN_STRETCHED_WIDTHS: f64 = 6.0;

/// Smallest accepted separation between step centers, in units of `T̃`.
pub const MIN_SPACING_IN_STRETCHED_WIDTHS: f64 = 5.0;

/// Half-width of the simulation window beyond the outermost centers, in units of `T̃`.
pub const WINDOW_MARGIN_IN_STRETCHED_WIDTHS: f64 = 5.0;

/// Mixing angles `φ_k = (2k−1)·θ/N`, `k = 1..=N`.
///
/// `θ = π/4` gives complete transfer `g1 → g3`, `θ = π/8` an equal
/// superposition of `g1` and `g3`, and `θ = π/12` a 3:1 split.
pub fn mixing_angles(n_pairs: usize, target_angle: f64) -> Result<Vec<f64>> {
    if n_pairs == 0 {
        return Err(Error::InvalidParameter {
            name: "n_pairs",
            value: 0.0,
            expected: "an integer >= 1",
        });
    }
    if !(target_angle > 0.0 && target_angle <= FRAC_PI_4 * (1.0 + 1e-15)) {
        return Err(Error::InvalidParameter {
            name: "target_angle",
            value: target_angle,
            expected: "a value in (0, π/4]",
        });
    }
    let n = n_pairs as f64;
    Ok((1..=n_pairs)
        .map(|k| (2 * k - 1) as f64 * target_angle / n)
        .collect())
}

/// Inputs of a pulse train. `Default` reproduces the reference full-transfer
/// setting: five steps, `Δ₁ = Δ₂ = 300/T`, `T = 1`, rms area `2π` per step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseTrainParams {
    pub n_pairs: usize,
    pub target_angle: f64,
    pub detuning: DetuningConfig,
    /// Gaussian width `T` of the effective couplings.
    pub width: f64,
    /// Separation of consecutive step centers; `None` means `6·T̃`.
    pub spacing: Option<f64>,
    /// rms pulse area of each step.
    pub step_area: f64,
}

impl Default for PulseTrainParams {
    fn default() -> Self {
        Self {
            n_pairs: 5,
            target_angle: FRAC_PI_4,
            detuning: DetuningConfig::symmetric(300.0),
            width: 1.0,
            spacing: None,
            step_area: 2.0 * PI,
        }
    }
}

impl PulseTrainParams {
    pub fn build(&self) -> Result<PulseTrain> {
        PulseTrain::new(self)
    }
}

/// A fully designed train of coincident pulses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PulseTrain {
    n_pairs: usize,
    target_angle: f64,
    mixing_angles: Vec<f64>,
    #[serde(skip)]
    angle_trig: Vec<(f64, f64)>,
    width: f64,
    stretched_width: f64,
    spacing: f64,
    centers: Vec<f64>,
    step_area: f64,
    peak_effective_rabi: f64,
    amplitude_a: f64,
    amplitude_b: f64,
    detuning: DetuningConfig,
}

impl PulseTrain {
    pub fn new(params: &PulseTrainParams) -> Result<Self> {
        let mixing_angles = mixing_angles(params.n_pairs, params.target_angle)?;
        let width = ensure_finite("width", params.width)?;
        if width <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "width",
                value: width,
                expected: "a positive duration",
            });
        }
        let step_area = ensure_finite("step_area", params.step_area)?;
        if step_area <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "step_area",
                value: step_area,
                expected: "a positive area",
            });
        }
        let det = params.detuning;
        det.validate()?;
        let stretched_width = SQRT_2 * width;
        let spacing = params
            .spacing
            .unwrap_or(DEFAULT_SPACING_IN_STRETCHED_WIDTHS * stretched_width);
        ensure_finite("spacing", spacing)?;
        if spacing < MIN_SPACING_IN_STRETCHED_WIDTHS * stretched_width * (1.0 - 1e-12) {
            return Err(Error::InvalidParameter {
                name: "spacing",
                value: spacing,
                expected: "a separation of at least 5·√2·T between step centers",
            });
        }

        // ∫ Ω₀ e^{-t²/T²} dt = Ω₀ √π T
        let peak_effective_rabi = step_area / (PI.sqrt() * width);
        if det.delta1 == 0.0 || det.delta2 == 0.0 {
            return Err(Error::ZeroDetuning {
                delta1: det.delta1,
                delta2: det.delta2,
            });
        }
        // Both detunings negative is accepted: amplitudes then use |Δ| and
        // the effective couplings change sign together.
        if det.delta1.signum() != det.delta2.signum() {
            return Err(Error::SynthesisSign {
                delta1: det.delta1,
                delta2: det.delta2,
                omega0: peak_effective_rabi,
            });
        }
        let amplitude_a = (2.0 * det.delta1.abs() * peak_effective_rabi).sqrt();
        let amplitude_b = (2.0 * det.delta2.abs() * peak_effective_rabi).sqrt();
        let centers = (0..params.n_pairs).map(|k| k as f64 * spacing).collect();

        Ok(Self {
            n_pairs: params.n_pairs,
            target_angle: params.target_angle,
            angle_trig: mixing_angles.iter().map(|p| p.sin_cos()).collect(),
            mixing_angles,
            width,
            stretched_width,
            spacing,
            centers,
            step_area,
            peak_effective_rabi,
            amplitude_a,
            amplitude_b,
            detuning: det,
        })
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn target_angle(&self) -> f64 {
        self.target_angle
    }

    pub fn mixing_angles(&self) -> &[f64] {
        &self.mixing_angles
    }

    /// `T`.
    pub fn width(&self) -> f64 {
        self.width
    }

    /// `T̃ = √2·T`.
    pub fn stretched_width(&self) -> f64 {
        self.stretched_width
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Step centers `τ_k`.
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn step_area(&self) -> f64 {
        self.step_area
    }

    /// `Ω₀`.
    pub fn peak_effective_rabi(&self) -> f64 {
        self.peak_effective_rabi
    }

    /// `Ω̃_a = √(2|Δ₁|Ω₀)`.
    pub fn amplitude_a(&self) -> f64 {
        self.amplitude_a
    }

    /// `Ω̃_b = √(2|Δ₂|Ω₀)`.
    pub fn amplitude_b(&self) -> f64 {
        self.amplitude_b
    }

    pub fn detuning(&self) -> &DetuningConfig {
        &self.detuning
    }

    /// Simulation window `[τ₁ − 5T̃, τ_N + 5T̃]`.
    pub fn window(&self) -> (f64, f64) {
        let margin = WINDOW_MARGIN_IN_STRETCHED_WIDTHS * self.stretched_width;
        (
            self.centers[0] - margin,
            self.centers[self.n_pairs - 1] + margin,
        )
    }

    /// Time interval attributed to step `k` (bounded by the midpoints to its neighbours).
    pub fn step_window(&self, k: usize) -> Result<(f64, f64)> {
        self.check_step(k)?;
        let tau = self.centers[k - 1];
        Ok((tau - 0.5 * self.spacing, tau + 0.5 * self.spacing))
    }

    /// Step whose center is nearest to `t` (1-based).
    pub fn step_at(&self, t: f64) -> usize {
        let rel = ((t - self.centers[0]) / self.spacing).round();
        if rel.is_nan() || rel < 0.0 {
            1
        } else {
            (rel as usize + 1).min(self.n_pairs)
        }
    }

    fn check_step(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n_pairs {
            Err(Error::StepIndex {
                k,
                n_pairs: self.n_pairs,
            })
        } else {
            Ok(())
        }
    }

    /// `e^{-(t-τ_k)²/T̃²}`; squaring it gives the effective profile `e^{-(t-τ_k)²/T²}`.
    #[inline]
    fn physical_profile(&self, k: usize, t: f64) -> f64 {
        let x = (t - self.centers[k - 1]) / self.stretched_width;
        (-x * x).exp()
    }

    #[inline]
    fn physical_unchecked(&self, k: usize, t: f64) -> [f64; 4] {
        let g = self.physical_profile(k, t);
        let (s, c) = self.angle_trig[k - 1];
        let a = self.amplitude_a * g;
        let b = self.amplitude_b * g;
        [a, a * s, b * c, b]
    }

    #[inline]
    fn effective_unchecked(&self, k: usize, t: f64) -> [f64; 2] {
        let x = (t - self.centers[k - 1]) / self.width;
        let f = self.peak_effective_rabi * (-x * x).exp();
        let (s, c) = self.angle_trig[k - 1];
        [f * s, f * c]
    }
}

/// Designed two-photon couplings `(Ω̃_{e1}, Ω̃_{e2})` of step `k` at time `t`.
pub fn gaussian_effective_envelopes(train: &PulseTrain, k: usize, t: f64) -> Result<(f64, f64)> {
    train.check_step(k)?;
    let [e1, e2] = train.effective_unchecked(k, t);
    Ok((e1, e2))
}

/// Physical Rabi frequencies `(Ω̃₁, Ω̃₂, Ω̃₃, Ω̃₄)` of step `k` at time `t`.
///
/// Amplitudes are positive; the signs produced by adiabatic elimination are
/// carried by the effective couplings instead.
pub fn synthesize_physical_pulses(train: &PulseTrain, k: usize, t: f64) -> Result<[f64; 4]> {
    train.check_step(k)?;
    Ok(train.physical_unchecked(k, t))
}

/// Two-photon couplings produced by `Ω₂`, `Ω₃` when `Ω₁` and `Ω₄` obey the
/// Stark-shift-equalizing constraint:
///
/// ```text
/// Ω_{e1} = −Ω₂ √(Ω₂² + ζΩ₃²) / (2Δ₁)
/// Ω_{e2} = −Ω₃ √(Ω₃² + Ω₂²/ζ) / (2Δ₂)
/// ```
pub fn effective_from_physical(
    omega2: f64,
    omega3: f64,
    det: &DetuningConfig,
) -> Result<(f64, f64)> {
    det.require_nonzero()?;
    let zeta = det.zeta();
    if zeta <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "zeta",
            value: zeta,
            expected: "Δ₁ and Δ₂ of the same sign",
        });
    }
    let e1 = -omega2 * (omega2 * omega2 + zeta * omega3 * omega3).sqrt() / (2.0 * det.delta1);
    let e2 = -omega3 * (omega3 * omega3 + omega2 * omega2 / zeta).sqrt() / (2.0 * det.delta2);
    Ok((e1, e2))
}

/// Closed-form sampler of the four physical and the two designed effective
/// Rabi frequencies of a [`PulseTrain`].
#[derive(Clone, Debug, PartialEq)]
pub struct RabiSchedule {
    train: PulseTrain,
}

/// One row of an exported schedule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScheduleSample {
    pub t: f64,
    pub physical: [f64; 4],
    pub effective: [f64; 2],
}

impl RabiSchedule {
    pub fn new(train: PulseTrain) -> Self {
        Self { train }
    }

    pub fn train(&self) -> &PulseTrain {
        &self.train
    }

    pub fn window(&self) -> (f64, f64) {
        self.train.window()
    }

    /// `(Ω̃₁, Ω̃₂, Ω̃₃, Ω̃₄)` at `t`.
    #[inline]
    pub fn physical(&self, t: f64) -> [f64; 4] {
        self.train.physical_unchecked(self.train.step_at(t), t)
    }

    /// Designed `(Ω̃_{e1}, Ω̃_{e2})` at `t`.
    #[inline]
    pub fn effective(&self, t: f64) -> [f64; 2] {
        self.train.effective_unchecked(self.train.step_at(t), t)
    }

    /// Effective couplings obtained from the physical pulses at `t`, sign included.
    pub fn effective_from_fields(&self, t: f64) -> Result<(f64, f64)> {
        let [_, o2, o3, _] = self.physical(t);
        effective_from_physical(o2, o3, &self.train.detuning)
    }

    /// `samples` equally spaced points over the simulation window, endpoints included.
    pub fn sample(&self, samples: usize) -> Vec<ScheduleSample> {
        let (t0, t1) = self.window();
        let n = samples.max(2);
        (0..n)
            .map(|i| {
                let t = t0 + (t1 - t0) * i as f64 / (n - 1) as f64;
                ScheduleSample {
                    t,
                    physical: self.physical(t),
                    effective: self.effective(t),
                }
            })
            .collect()
    }

    /// Writes `t,omega1,omega2,omega3,omega4,omega_e1,omega_e2`, one row per sample.
    pub fn write_csv<W: Write>(&self, samples: usize, mut out: W) -> io::Result<()> {
        writeln!(out, "t,omega1,omega2,omega3,omega4,omega_e1,omega_e2")?;
        for s in self.sample(samples) {
            let [o1, o2, o3, o4] = s.physical;
            let [e1, e2] = s.effective;
            writeln!(
                out,
                "{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
                s.t, o1, o2, o3, o4, e1, e2
            )?;
        }
        Ok(())
    }
}
