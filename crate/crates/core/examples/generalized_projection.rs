//! Generalized projection onto a polytope for several exponents, with the
//! variational certificate and the Euclidean projection for comparison.

use shrinking_projection::convex::{
    euclidean_project, generalized_projection, BoxBounds, HalfSpace, Polyhedron, SolverSettings,
};
use shrinking_projection::space::{Dual, LpSpace, Primal};
use shrinking_projection::Result;

fn main() -> Result<()> {
    let settings = SolverSettings::default();
    let cut = HalfSpace::new(Dual::new([1.0, 2.0]), 1.0)?;
    let poly = Polyhedron::with_halfspaces(BoxBounds::cube(2, 3.0)?, vec![cut], &settings)?;
    let x = Primal::new([2.5, 2.0]);

    println!(
        "euclidean: {:?}",
        euclidean_project(&poly, &x, &settings)?.coords()
    );
    for p in [1.5, 2.0, 3.0, 4.0] {
        let space = LpSpace::new(2, p)?;
        let gp = generalized_projection(&space, &poly, &x, &settings)?;
        println!(
            "p = {p}: {:?}  certificate {:+.2e}  ({} iterations)",
            gp.point.coords(),
            gp.certificate,
            gp.iterations
        );
    }
    Ok(())
}
