//! Coherent superpositions of g1 and g3: target angles π/8 (equal split) and
//! π/12 (3:1 split), analytic and five-state.
//!
//! ```text
//! cargo run --release --example superposition
//! ```

use std::f64::consts::PI;

use coincident_pulses::experiments::{run_dynamics_experiment, ExperimentConfig};
use coincident_pulses::propagator::{max_intermediate_population, train_propagator};
use coincident_pulses::pulse::mixing_angles;
use coincident_pulses::state::Level;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("target    analytic (P_g1, P_g3)    five-state (P_g1, P_g3)   max P_g2 (sin²(θ/N))");
    for (label, theta) in [("π/8 ", PI / 8.0), ("π/12", PI / 12.0)] {
        let u = train_propagator(&mixing_angles(5, theta)?, 2.0 * PI)?;
        let mut cfg = ExperimentConfig::default();
        cfg.train.target_angle = theta;
        let res = run_dynamics_experiment(&cfg)?;
        println!(
            "{label}      ({:.4}, {:.4})         ({:.4}, {:.4})          {:.5} ({:.5})",
            u.probability(0, 0),
            u.probability(2, 0),
            res.final_populations[Level::G1.index()],
            res.final_populations[Level::G3.index()],
            res.max_transients[Level::G2.index()],
            max_intermediate_population(5, theta),
        );
        // The relative sign of the g1 and g3 amplitudes after the train.
        let c1 = res.final_state[Level::G1.index()];
        let c3 = res.final_state[Level::G3.index()];
        println!("          c_g3/c_g1 = {:+.4}", c3 / c1);
    }
    Ok(())
}
