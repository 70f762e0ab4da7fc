//! The map catalog: images, best-approximation selections and the
//! admissibility check, including a map that fails it.

use nalgebra::DMatrix;
use shrinking_projection::convex::{BoxBounds, HalfSpace, Polyhedron, SolverSettings};
use shrinking_projection::mappings::{check_rqne, MultivaluedMap};
use shrinking_projection::space::{Dual, LpSpace, Primal};
use shrinking_projection::Result;

fn main() -> Result<()> {
    let settings = SolverSettings::default();
    let space = LpSpace::new(2, 3.0)?;
    let x = Primal::new([4.0, -2.0]);

    let segment = MultivaluedMap::segment_contraction(Primal::new([1.0, 1.0]), 0.6)?;
    println!("segment image: {:?}", segment.image(&space, &x, &settings)?);
    println!(
        "nearest point: {:?}",
        segment.evaluate_pt(&space, &x, &settings)?.coords()
    );

    let k = Polyhedron::with_halfspaces(
        BoxBounds::cube(2, 5.0)?,
        vec![HalfSpace::new(Dual::new([1.0, 1.0]), 0.0)?],
        &settings,
    )?;
    let projection = MultivaluedMap::projection(k);
    println!(
        "projection: {:?}",
        projection.evaluate_pt(&space, &x, &settings)?.coords()
    );

    let hilbert = LpSpace::hilbert(2)?;
    let rotation = DMatrix::from_row_slice(2, 2, &[0.0, -0.5, 0.5, 0.0]);
    let affine = MultivaluedMap::affine(&hilbert, rotation, vec![0.0, 0.0], Primal::zeros(2))?;
    println!(
        "affine: {:?}",
        affine.evaluate_pt(&hilbert, &x, &settings)?.coords()
    );

    for (name, map) in [
        ("segment", segment),
        ("projection", projection),
        (
            "expanding 1.2",
            MultivaluedMap::segment_contraction_unchecked(Primal::zeros(2), 1.2),
        ),
    ] {
        let report = check_rqne(&space, &map, 1000, 7, &settings)?;
        println!("{name:>14}: worst violation {:+.3e}", report.max_violation);
        if let Some(w) = report.witness {
            println!(
                "{:>14}  at x = {:?}, p = {:?}",
                "",
                w.x.coords(),
                w.p.coords()
            );
        }
    }
    Ok(())
}
