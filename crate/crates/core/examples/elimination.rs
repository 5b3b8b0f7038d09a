//! Adiabatic elimination of the excited states: dark state, effective
//! three-state Hamiltonian with equalized Stark shifts, validity margins, and
//! five-state versus effective dynamics.
//!
//! ```text
//! cargo run --release --example elimination
//! ```

use std::f64::consts::{FRAC_PI_4, PI};

use coincident_pulses::dynamics::{
    ae_validity, common_stark_shift, effective_hamiltonian, integrate, remove_global_phase,
    suggest_time_step, EffectiveSystem, DEFAULT_MAX_DT,
};
use coincident_pulses::experiments::{run_dynamics_experiment, ExperimentConfig};
use coincident_pulses::propagator::train_propagator;
use coincident_pulses::state::{dark_state, populations, Level, StateVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v = dark_state(1.0, 2.0, 3.0, 4.0)?;
    let p: Vec<String> = populations(&v).iter().map(|x| format!("{x:.4}")).collect();
    println!(
        "dark state populations for Ω = (1, 2, 3, 4): [{}]",
        p.join(", ")
    );

    let cfg = ExperimentConfig::default();
    let system = cfg.system()?;
    let schedule = &system.schedule;
    let det = system.detuning;
    let tau = schedule.train().centers()[2];
    let h = effective_hamiltonian(schedule.physical(tau), &det)?;
    println!(
        "\neffective H at τ₃: diagonal ({:.5}, {:.5}, {:.5}), couplings ({:.5}, {:.5})",
        h.get(0, 0).re,
        h.get(1, 1).re,
        h.get(2, 2).re,
        h.get(0, 1).re,
        h.get(1, 2).re
    );
    println!(
        "common Stark shift −Ω₁²/(4Δ₁) = {:.5}",
        common_stark_shift(schedule, tau)
    );
    let margins = ae_validity(schedule, &det);
    println!(
        "AE margins min|Δ₁|/√(Ω₁²+Ω₂²) = {:.2}, min|Δ₂|/√(Ω₃²+Ω₄²) = {:.2} → {:?}",
        margins.first,
        margins.second,
        margins.verdict()
    );

    let effective = EffectiveSystem::new(schedule.clone(), det)?;
    let window = schedule.window();
    let dt = suggest_time_step(&effective, window, DEFAULT_MAX_DT);
    let reduced = integrate(
        &StateVector::basis(3, Level::G1)?,
        &effective,
        window,
        dt,
        4000,
    )?;
    let full = run_dynamics_experiment(&cfg)?;
    let ground = full.final_state.ground_manifold();
    println!("\n           P_g1       P_g2       P_g3");
    println!(
        "five-state {:.3e}  {:.3e}  {:.6}",
        ground[0].norm_sqr(),
        ground[1].norm_sqr(),
        ground[2].norm_sqr()
    );
    let r = &reduced.final_populations;
    println!("effective  {:.3e}  {:.3e}  {:.6}", r[0], r[1], r[2]);

    // Stripping the common Stark phase leaves the amplitudes of the resonant
    // Λ system, which the closed-form train propagator predicts.
    let stripped = remove_global_phase(&reduced.times, &reduced.amplitudes, |t| {
        common_stark_shift(schedule, t)
    })?;
    let last = stripped.last().expect("samples");
    let u = train_propagator(schedule.train().mixing_angles(), 2.0 * PI)?;
    println!(
        "\nc_g3 after phase removal {:+.5}, analytic U₃₁ = {:+.5} (θ = {:.4})",
        last[2],
        u.get(2, 0),
        FRAC_PI_4
    );
    Ok(())
}
