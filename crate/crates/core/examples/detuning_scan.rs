//! Transfer efficiency over one-photon detunings (Δ₁, Δ₂), with decay of
//! e1, g2, e2 and the closed-system control.
//!
//! ```text
//! cargo run --release --example detuning_scan [points] [out.csv]
//! ```
//!
//! Defaults to a coarse 11×11 grid over [100, 600]/T; 41 reproduces the full study.

use std::fs::File;
use std::io::BufWriter;

use coincident_pulses::dynamics::DecayConfig;
use coincident_pulses::experiments::{decay_study, Axis, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let points: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(11);
    let d1 = Axis::new("delta1", 100.0, 600.0, points);
    let d2 = Axis::new("delta2", 100.0, 600.0, points);
    let decay = DecayConfig::new(0.1, 0.01, 0.1)?;
    let study = decay_study(&d1, &d2, &ExperimentConfig::default(), decay, None)?;

    println!("final P_g3 with decay (rows Δ₁, columns Δ₂):");
    print!("{:>7}", "");
    for j in 0..d2.points {
        print!("{:>7.0}", d2.value(j));
    }
    println!();
    for i in 0..d1.points {
        print!("{:>7.0}", d1.value(i));
        for j in 0..d2.points {
            print!("{:>7.3}", study.decayed.get(i, j));
        }
        println!();
    }
    println!(
        "\ngrid max: decayed {:.4}, closed {:.4}; cells where decay helps: {}",
        study.decayed.max(),
        study.control.max(),
        study.violations().len()
    );

    if let Some(path) = std::env::args().nth(2) {
        study.write_csv(BufWriter::new(File::create(&path)?))?;
        println!("grid written to {path}");
    }
    Ok(())
}
