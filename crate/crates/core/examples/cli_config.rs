//! Drives the same configuration layer and runner as the `coincident` binary:
//! parses flags over a TOML file, runs `train` and prints the manifest.
//!
//! ```text
//! cargo run --release --example cli_config
//! ```

use coincident_pulses::config::parse_config;
use coincident_pulses::run::execute;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("coincident-example");
    std::fs::create_dir_all(&dir)?;
    let file = dir.join("run.toml");
    std::fs::write(
        &file,
        "n_pairs = 5\ntarget_angle = \"pi/8\"\ndelta1 = 300.0\ndelta2 = 300.0\n",
    )?;

    let out = dir.join("train");
    let config = parse_config([
        "coincident",
        "train",
        "--config",
        file.to_str().unwrap(),
        "--n-pairs",
        "4",
        "--output",
        out.to_str().unwrap(),
    ])?;
    println!("resolved configuration:\n{}", config.to_toml());

    let report = execute(&config)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
