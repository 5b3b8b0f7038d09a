//! Largest g2 population of the five-state run against sin²(π/4N).
//!
//! ```text
//! cargo run --release --example n_scaling [max_pairs]
//! ```

use std::f64::consts::FRAC_PI_4;

use coincident_pulses::experiments::{n_scaling, write_scaling_csv, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let max_pairs: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(10);
    let rows = n_scaling(max_pairs, FRAC_PI_4, &ExperimentConfig::default(), None)?;
    println!(" N   predicted   measured   final P_g3   N²·measured");
    for r in &rows {
        println!(
            "{:2}   {:.5}     {:.5}    {:.5}      {:.4}",
            r.n_pairs,
            r.predicted,
            r.measured,
            r.final_target,
            r.measured * (r.n_pairs * r.n_pairs) as f64
        );
    }
    for pair in rows.windows(2).filter(|w| w[1].n_pairs == 2 * w[0].n_pairs) {
        println!(
            "ratio N={} / N={}: {:.3}",
            pair[0].n_pairs,
            pair[1].n_pairs,
            pair[0].measured / pair[1].measured
        );
    }
    if rows.len() >= 10 {
        println!(
            "ratio N=5 / N=10: {:.3}",
            rows[4].measured / rows[9].measured
        );
    }
    let mut csv = Vec::new();
    write_scaling_csv(&rows, &mut csv)?;
    println!("\n{}", String::from_utf8(csv)?);
    Ok(())
}
