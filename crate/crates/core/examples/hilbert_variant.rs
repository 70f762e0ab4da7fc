//! In ℓ_2 the general iteration and the simplified Hilbert-space iteration
//! produce the same iterates.

use shrinking_projection::algorithm::{run, trace_distance, AlgorithmConfig, Variant};
use shrinking_projection::convex::{BoxBounds, Polyhedron};
use shrinking_projection::mappings::MultivaluedMap;
use shrinking_projection::space::{LpSpace, Primal};
use shrinking_projection::Result;

fn main() -> Result<()> {
    let maps = vec![
        MultivaluedMap::segment_contraction(Primal::zeros(2), 0.5)?,
        MultivaluedMap::segment_contraction(Primal::zeros(2), 0.9)?,
    ];
    let c = Polyhedron::from_box(BoxBounds::cube(2, 10.0)?);
    let mut banach = AlgorithmConfig::new(LpSpace::hilbert(2)?, c, maps, Primal::new([5.0, 3.0]));
    banach.max_outer = 500;
    let mut hilbert = banach.clone();
    hilbert.variant = Variant::Hilbert;

    let a = run(&banach)?;
    let b = run(&hilbert)?;
    println!("general: {:?} after {} steps", a.final_point, a.iterations);
    println!("hilbert: {:?} after {} steps", b.final_point, b.iterations);
    println!(
        "largest iterate gap: {:e}",
        trace_distance(&a.trace, &b.trace)
    );
    Ok(())
}
