//! The equilibrium resolvent for each bifunction family.

use nalgebra::DMatrix;
use shrinking_projection::convex::{BoxBounds, Polyhedron, SolverSettings};
use shrinking_projection::equilibrium::{resolvent, Bifunction};
use shrinking_projection::space::{Dual, LpSpace, Primal};
use shrinking_projection::Result;

fn main() -> Result<()> {
    let settings = SolverSettings::default();
    let c = Polyhedron::from_box(BoxBounds::cube(2, 10.0)?);
    let v = Primal::new([3.0, 3.0]);

    let cost = Bifunction::convex_cost(DMatrix::identity(2, 2) * 2.0, Dual::zeros(2))?;
    // Skew part makes this a genuine variational inequality, not a gradient.
    let vi = Bifunction::monotone_operator(
        DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -2.0, 1.0]),
        Dual::new([-1.0, 0.0]),
    )?;

    for p in [2.0, 4.0] {
        let space = LpSpace::new(2, p)?;
        for (name, f) in [
            ("zero", Bifunction::Zero),
            ("cost", cost.clone()),
            ("vi", vi.clone()),
        ] {
            let res = resolvent(&space, &c, &f, 1.0, &v, &settings)?;
            println!(
                "p = {p} {name:>4}: S_r v = {:?}  certificate {:+.1e}",
                res.u.coords(),
                res.residual
            );
        }
    }
    Ok(())
}
