//! Step-by-step iteration with per-step diagnostics, then a trace audit.

use shrinking_projection::algorithm::{step, verify_trace, AlgorithmConfig, IterationState};
use shrinking_projection::convex::{BoxBounds, Polyhedron};
use shrinking_projection::mappings::MultivaluedMap;
use shrinking_projection::space::{LpSpace, Primal};
use shrinking_projection::Result;

fn main() -> Result<()> {
    let center = Primal::new([1.0, -1.0]);
    let maps = vec![
        MultivaluedMap::segment_contraction(center.clone(), 0.5)?,
        MultivaluedMap::segment_contraction(center.clone(), 0.8)?,
    ];
    let c = Polyhedron::from_box(BoxBounds::cube(2, 10.0)?);
    let config = AlgorithmConfig::new(LpSpace::new(2, 3.0)?, c, maps, Primal::new([6.0, 4.0]));

    let mut state = IterationState::new(&config)?;
    println!(
        "{:>3} {:>12} {:>12} {:>5}  x_(n+1)",
        "n", "step", "φ(x, x0)", "cuts"
    );
    for _ in 0..25 {
        step(&mut state, &config)?;
        let s = state.trace.last().expect("one record per step");
        println!(
            "{:>3} {:>12.4e} {:>12.6} {:>5}  {:?}",
            s.n, s.step_norm, s.phi_to_x0, s.cut_count, s.x_next
        );
    }

    let report = verify_trace(&state.trace, &config, Some(&center))?;
    for check in &report.checks {
        println!(
            "{:<20} {} (worst {:+.1e})",
            check.name,
            if check.passed { "ok" } else { "FAILED" },
            check.worst
        );
    }
    Ok(())
}
