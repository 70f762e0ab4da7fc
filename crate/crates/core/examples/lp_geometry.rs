//! Duality map, Lyapunov functional and set distances in ℓ_p.

use shrinking_projection::space::{LpSpace, PointSet, Primal};
use shrinking_projection::Result;

fn main() -> Result<()> {
    let x = Primal::new([3.0, -1.0]);
    let y = Primal::new([0.5, 2.0]);
    for p in [1.5, 2.0, 4.0] {
        let space = LpSpace::new(2, p)?;
        let jx = space.duality_map(&x)?;
        println!("p = {p}");
        println!("  ‖x‖ = {:.6}, J x = {:?}", space.norm(&x)?, jx.coords());
        println!(
            "  ⟨x, Jx⟩ = {:.6}, ‖Jx‖_* = {:.6}",
            space.pairing(&x, &jx)?,
            space.dual_norm(&jx)?
        );
        println!("  J⁻¹(Jx) = {:?}", space.inverse_duality_map(&jx)?.coords());
        println!(
            "  φ(x, y) = {:.6}, φ(y, x) = {:.6}",
            space.phi(&x, &y)?,
            space.phi(&y, &x)?
        );
    }

    let space = LpSpace::hilbert(2)?;
    let a = PointSet::segment(Primal::new([0.0, 0.0]), Primal::new([1.0, 0.0]))?;
    let b = PointSet::segment(Primal::new([1.0, 1.0]), Primal::new([2.0, 1.0]))?;
    let h = space.hausdorff(&a, &b)?;
    let phi = space.capital_phi(&a, &b)?;
    println!(
        "H(A, B) = {:.9} (±{:.0e}), Φ(A, B) = {:.9}",
        h.value, h.resolution, phi.value
    );
    Ok(())
}
