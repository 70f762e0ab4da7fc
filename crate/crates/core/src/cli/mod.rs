//! Configuration-driven runs and randomized invariant checks, shared by the
//! `shrinkproj` binary and the tests.

mod checks;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algorithm::{run, StepDiagnostics};
use crate::error::{Error, Result};

pub use checks::{cmd_check, run_suite, CheckLine, Suite, SuiteReport};
pub use config::{
    BifunctionSpec, ExperimentConfig, Format, HalfSpaceSpec, MapSpec, OutputSpec, SetSpec,
    WeightsSpec,
};

/// Exit status of `run`: converged.
pub const EXIT_CONVERGED: i32 = 0;
/// Exit status for any error.
pub const EXIT_ERROR: i32 = 1;
/// Exit status of `run`: `max_outer` reached first.
pub const EXIT_NOT_CONVERGED: i32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub converged: bool,
    #[serde(rename = "final")]
    pub final_point: Vec<f64>,
    pub iterations: usize,
}

/// Writes one row per step: `n, step_norm, phi_to_x0, phi_next_to_u,
/// fix_residual_1..m, ep_res, inner_iters, cut_count`, with reals printed to
/// 17 significant digits.
pub fn write_csv(
    trace: &[StepDiagnostics],
    maps: usize,
    out: &mut impl Write,
) -> std::io::Result<()> {
    let mut header = vec![
        "n".to_owned(),
        "step_norm".into(),
        "phi_to_x0".into(),
        "phi_next_to_u".into(),
    ];
    header.extend((1..=maps).map(|i| format!("fix_residual_{i}")));
    header.extend(["ep_res".into(), "inner_iters".into(), "cut_count".into()]);
    writeln!(out, "{}", header.join(","))?;
    for s in trace {
        let mut row = vec![
            s.n.to_string(),
            format!("{:.16e}", s.step_norm),
            format!("{:.16e}", s.phi_to_x0),
            format!("{:.16e}", s.phi_next_to_u),
        ];
        row.extend(s.fix_residuals.iter().map(|v| format!("{v:.16e}")));
        row.push(format!("{:.16e}", s.ep_res));
        row.push(s.inner_iters.to_string());
        row.push(s.cut_count.to_string());
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// The full trace as a JSON array of step records.
pub fn write_json(trace: &[StepDiagnostics], out: &mut impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, trace).map_err(|e| Error::Config(e.to_string()))?;
    writeln!(out).map_err(io_err)
}

pub fn read_json_trace(text: &str) -> Result<Vec<StepDiagnostics>> {
    serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

fn io_err(e: std::io::Error) -> Error {
    Error::Config(format!("I/O: {e}"))
}

/// `<out>.summary.json`.
pub fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".summary.json");
    PathBuf::from(name)
}

/// Runs the experiment at `config_path`, writes the trace and its summary,
/// and returns the process exit status. `out` and `format` override the
/// document's `output` section.
pub fn cmd_run(config_path: &Path, out: Option<&Path>, format: Option<Format>) -> i32 {
    match try_run(config_path, out, format) {
        Ok(summary) if summary.converged => EXIT_CONVERGED,
        Ok(_) => EXIT_NOT_CONVERGED,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn try_run(config_path: &Path, out: Option<&Path>, format: Option<Format>) -> Result<Summary> {
    let doc = ExperimentConfig::load(config_path)?;
    let out = out
        .map(Path::to_path_buf)
        .or_else(|| doc.output.path.clone())
        .ok_or_else(|| Error::Config("no output path given (`--out` or `output.path`)".into()))?;
    let format = format.or(doc.output.format).unwrap_or_default();
    let config = doc.build()?;

    let outcome = run(&config)?;
    let summary = Summary {
        converged: outcome.converged,
        final_point: outcome.final_point,
        iterations: outcome.iterations,
    };
    log::info!(
        "{} after {} iterations",
        if summary.converged {
            "converged"
        } else {
            "stopped"
        },
        summary.iterations
    );

    let mut file = std::io::BufWriter::new(std::fs::File::create(&out).map_err(io_err)?);
    match format {
        Format::Csv => write_csv(&outcome.trace, config.maps.len(), &mut file).map_err(io_err)?,
        Format::Json => write_json(&outcome.trace, &mut file)?,
    }
    file.flush().map_err(io_err)?;

    let text = serde_json::to_string(&summary).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(summary_path(&out), format!("{text}\n")).map_err(io_err)?;
    println!("{text}");
    Ok(summary)
}
