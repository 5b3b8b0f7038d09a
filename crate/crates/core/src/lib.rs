//! Coincident pulse trains for five-state chainwise systems.
//!
//! A chain `g1 – e1 – g2 – e2 – g3` driven by four fields `Ω₁…Ω₄` with large
//! one-photon detunings `Δ₁, Δ₂` behaves, after adiabatic elimination of the
//! excited states, like a resonant three-level Λ system on the ground states
//! with effective couplings `Ω_e1 = −Ω₁Ω₂/(2Δ₁)` and `Ω_e2 = −Ω₃Ω₄/(2Δ₂)`.
//! A train of `N` coincident Gaussian pulse pairs with mixing angles
//! `φ_k = (2k−1)θ/N` and rms area `2π` per pair then maps `g1` onto
//! `cos θ·g1 − sin θ·g3` while keeping `P_g2 ≤ sin²(θ/N)`.
//!
//! Modules, from the bottom up:
//!
//! * [`state`] — basis, state vectors, detunings, the five-state Hamiltonian, the dark state.
//! * [`pulse`] — mixing angles, Gaussian envelopes, synthesis of the four physical pulses.
//! * [`propagator`] — closed-form step and train propagators of the reduced system.
//! * [`dynamics`] — RK4 integration of the full and effective systems, decay, validity checks.
//! * [`experiments`] — detuning scans, the decay study and `N` scaling.
//! * [`config`] / [`run`] — configuration and the artifact-writing driver behind the `coincident` binary.
//!
//! # Conventions
//!
//! * Basis order everywhere is `(g1, e1, g2, e2, g3)`; reduced vectors are `(g1, g2, g3)`; ħ = 1.
//! * The Hamiltonian is `H = ½·M − (i/2)·diag(0, Γ_e1, Γ_g2, Γ_e2, 0)` with `M` the real
//!   tridiagonal matrix of couplings `Ω_k` and doubled detunings. Two-photon detunings
//!   enter as cumulative energies: `2δ₁` on `g2`, `2(Δ₂+δ₁)` on `e2`, `2(δ₁+δ₂)` on `g3`.
//! * The physical pulses have width `√2·T` so that the products `Ω₁Ω₂` and `Ω₃Ω₄` are
//!   Gaussians of width `T`. Their amplitudes need `Δ₁·Ω₀ > 0` and `Δ₂·Ω₀ > 0`
//!   (both detunings of one sign).
//! * Between step centers, schedule samplers use the pulses of the nearest step, so
//!   `Ω_e1(t)/Ω_e2(t) = tan φ_k` holds exactly at every time.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod propagator;
pub mod pulse;
pub mod run;
pub mod state;

pub use config::{parse_config, Command, ConfigError, RunConfig};
pub use dynamics::{integrate, DecayConfig, FullSystem, SimulationResult};
pub use error::{Error, Result};
pub use experiments::{run_dynamics_experiment, ExperimentConfig};
pub use propagator::{step_propagator, train_propagator};
pub use pulse::{mixing_angles, PulseTrain, PulseTrainParams, RabiSchedule};
pub use run::{execute, run_cli};
pub use state::{DetuningConfig, Level, StateVector};
