//! A run with an active equilibrium constraint: the common solution set is
//! the intersection of the fixed set and the equilibrium set.

use nalgebra::DMatrix;
use shrinking_projection::algorithm::{run, AlgorithmConfig};
use shrinking_projection::convex::{BoxBounds, Polyhedron};
use shrinking_projection::equilibrium::{ep_residual, Bifunction};
use shrinking_projection::mappings::MultivaluedMap;
use shrinking_projection::space::{Dual, LpSpace, Primal};
use shrinking_projection::Result;

fn main() -> Result<()> {
    let c = Polyhedron::from_box(BoxBounds::cube(2, 2.0)?);
    let maps = vec![MultivaluedMap::segment_contraction(Primal::zeros(2), 0.8)?];
    let mut config = AlgorithmConfig::new(
        LpSpace::hilbert(2)?,
        c.clone(),
        maps,
        Primal::new([1.5, -1.0]),
    );
    config.f = Bifunction::convex_cost(DMatrix::identity(2, 2) * 2.0, Dual::zeros(2))?;

    let out = run(&config)?;
    for s in out.trace.iter().step_by(10) {
        println!("n = {:>3}  u = {:?}  ep_res = {:+.2e}", s.n, s.u, s.ep_res);
    }
    let last = Primal::new(out.final_point.clone());
    println!(
        "final {:?} after {} steps, ep_res {:+.2e}",
        out.final_point,
        out.iterations,
        ep_residual(&c, &config.f, &last)?
    );
    Ok(())
}
