//! Builds a run from a JSON document and writes the CSV trace to stdout.
//!
//! `cargo run --example experiment_config -- configs/scenario_b.json`

use std::path::PathBuf;

use shrinking_projection::algorithm::run;
use shrinking_projection::cli::{write_csv, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/configs/scenario_b.json"
            ))
        });
    let doc = ExperimentConfig::load(&path)?;
    let config = doc.build()?;
    let out = run(&config)?;
    write_csv(&out.trace, config.maps.len(), &mut std::io::stdout().lock())?;
    eprintln!("converged: {}, final {:?}", out.converged, out.final_point);
    Ok(())
}
