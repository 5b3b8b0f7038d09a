//! Closed-form propagation of the reduced g1–g2–g3 system: step and train
//! propagators, within-step transients, and the 1/N² law of the g2 maximum.
//!
//! ```text
//! cargo run --release --example analytic_train
//! ```

use std::f64::consts::{FRAC_PI_4, PI};

use coincident_pulses::propagator::{
    max_intermediate_population, step_propagator, train_propagator, train_transients,
};
use coincident_pulses::pulse::mixing_angles;
use coincident_pulses::state::{Level, StateVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let u = step_propagator(FRAC_PI_4, 2.0 * PI).matrix;
    println!("U(π/4, 2π):");
    for r in 0..3 {
        let row: Vec<String> = (0..3).map(|c| format!("{:+.3}", u.get(r, c))).collect();
        println!("  [{}]", row.join(", "));
    }

    let angles = mixing_angles(5, FRAC_PI_4)?;
    let train = train_propagator(&angles, 2.0 * PI)?;
    println!(
        "\nN = 5 train: |U₃₁|² = {:.15}, unitarity defect {:.1e}",
        train.probability(2, 0),
        train.unitarity_defect()
    );

    let evo = train_transients(&angles, 2.0 * PI, &StateVector::basis(3, Level::G1)?, 401)?;
    println!("\n k   φ_k/π    max P_g2 in step   populations after step");
    for s in &evo.steps {
        println!(
            "{:2}   {:.3}    {:.6}           ({:.4}, {:.4}, {:.4})",
            s.step,
            s.mixing_angle / PI,
            s.max_populations[1],
            s.final_populations[0],
            s.final_populations[1],
            s.final_populations[2]
        );
    }

    println!(
        "\n  N   sin²(π/4N)   N²·sin²(π/4N)   (π/4)² = {:.6}",
        FRAC_PI_4 * FRAC_PI_4
    );
    for n in [1, 2, 5, 10, 20, 50] {
        let p = max_intermediate_population(n, FRAC_PI_4);
        println!("{n:3}   {p:.6}     {:.6}", p * (n * n) as f64);
    }
    Ok(())
}
