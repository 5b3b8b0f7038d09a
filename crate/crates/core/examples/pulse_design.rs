//! Designs a five-pair train and prints its parameters and the four
//! coincident physical pulses at each step center.
//!
//! ```text
//! cargo run --release --example pulse_design [schedule.csv]
//! ```
//!
//! With a path argument the sampled schedule is also written as CSV.

use std::fs::File;
use std::io::BufWriter;

use coincident_pulses::propagator::rms_pulse_area;
use coincident_pulses::pulse::{synthesize_physical_pulses, PulseTrainParams, RabiSchedule};
use coincident_pulses::state::DetuningConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = PulseTrainParams {
        n_pairs: 5,
        detuning: DetuningConfig::symmetric(300.0),
        ..Default::default()
    };
    let train = params.build()?;
    println!("N = {}, ζ = {}", train.n_pairs(), train.detuning().zeta());
    println!(
        "Ω₀ = {:.6}/T (2√π = {:.6})",
        train.peak_effective_rabi(),
        2.0 * std::f64::consts::PI.sqrt()
    );
    println!(
        "Ω̃_a = {:.4}/T, Ω̃_b = {:.4}/T",
        train.amplitude_a(),
        train.amplitude_b()
    );
    println!(
        "T̃ = {:.4}T, spacing = {:.4}T, window = {:?}",
        train.stretched_width(),
        train.spacing(),
        train.window()
    );

    let schedule = RabiSchedule::new(train.clone());
    println!("\n k   φ_k/π     Ω̃₁        Ω̃₂        Ω̃₃        Ω̃₄      rms area/π");
    for k in 1..=train.n_pairs() {
        let tau = train.centers()[k - 1];
        let [o1, o2, o3, o4] = synthesize_physical_pulses(&train, k, tau)?;
        let area = rms_pulse_area(&schedule, k)?;
        println!(
            "{k:2}  {:.4}  {o1:8.4}  {o2:8.4}  {o3:8.4}  {o4:8.4}   {:.6}",
            train.mixing_angles()[k - 1] / std::f64::consts::PI,
            area / std::f64::consts::PI
        );
    }

    if let Some(path) = std::env::args().nth(1) {
        schedule.write_csv(2000, BufWriter::new(File::create(&path)?))?;
        println!("\nschedule written to {path}");
    }
    Ok(())
}
