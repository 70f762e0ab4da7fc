//! Two segment maps sharing a center, run in ℓ_p for p ≠ 2. The iterates
//! approach the common fixed point.

use std::time::Instant;

use shrinking_projection::algorithm::{run, AlgorithmConfig};
use shrinking_projection::convex::{BoxBounds, Polyhedron};
use shrinking_projection::mappings::MultivaluedMap;
use shrinking_projection::space::{LpSpace, Primal};
use shrinking_projection::Result;

fn main() -> Result<()> {
    let center = Primal::new([1.0, -1.0]);
    for p in [1.5, 3.0, 4.0] {
        let maps = vec![
            MultivaluedMap::segment_contraction(center.clone(), 0.7)?,
            MultivaluedMap::segment_contraction(center.clone(), 0.9)?,
        ];
        let c = Polyhedron::from_box(BoxBounds::cube(2, 10.0)?);
        let mut config =
            AlgorithmConfig::new(LpSpace::new(2, p)?, c, maps, Primal::new([5.0, 3.0]));
        config.max_outer = 2000;
        let started = Instant::now();
        let out = run(&config)?;
        let err = out
            .final_point
            .iter()
            .zip(center.coords())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "p = {p}: {} iterations, converged {}, max error {err:.2e}, {:.1?}",
            out.iterations,
            out.converged,
            started.elapsed()
        );
    }
    Ok(())
}
