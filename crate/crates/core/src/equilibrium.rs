//! Equilibrium bifunctions and the resolvent
//!
//! ```text
//! S_r v = { u ∈ C : F(u, y) + (1/r)⟨y − u, Ju − Jv⟩ ≥ 0  ∀ y ∈ C }.
//! ```
//!
//! Each [`Bifunction`] family satisfies F(x,x) = 0, monotonicity, upper
//! hemicontinuity and convexity in the second argument by construction, and
//! each comes with a solver whose output can be certified on sample points.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convex::{
    euclidean_project, generalized_projection, generalized_projection_from, minimize_convex,
    project_raw, FnObjective, Polyhedron, SolverSettings,
};
use crate::error::{check_dim, Error, Result};
use crate::space::{Dual, LpSpace, Primal};
use crate::vecops;

/// Samples used by [`ep_residual`] and [`resolvent`] certificates.
pub const CERTIFICATE_SAMPLES: usize = 100;

/// `f(y) = ½⟨y, Qy⟩ + ⟨c, y⟩` with `Q` symmetric positive semidefinite;
/// the bifunction is `F(x, y) = f(y) − f(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexCost {
    q: DMatrix<f64>,
    c: Dual,
}

/// `F(x, y) = ⟨Ax + b, y − x⟩` with `⟨Az, z⟩ ≥ 0` for all `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneOperator {
    a: DMatrix<f64>,
    b: Dual,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Bifunction {
    Zero,
    ConvexCost(ConvexCost),
    MonotoneOperator(MonotoneOperator),
}

fn check_square(m: &DMatrix<f64>, dim: usize, name: &'static str) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::invalid(
            name,
            format!("expected {dim}x{dim}, got {}x{}", m.nrows(), m.ncols()),
        ));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(name, "entries must be finite"));
    }
    Ok(())
}

fn min_eigenvalue_of_symmetric_part(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

impl ConvexCost {
    pub fn new(q: DMatrix<f64>, c: Dual) -> Result<Self> {
        check_square(&q, c.dim(), "Q")?;
        let scale = 1.0 + q.amax();
        if (&q - q.transpose()).amax() > 1e-12 * scale {
            return Err(Error::invalid("Q", "must be symmetric"));
        }
        if min_eigenvalue_of_symmetric_part(&q) < -1e-12 * scale {
            return Err(Error::invalid("Q", "must be positive semidefinite"));
        }
        Ok(Self { q, c })
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn c(&self) -> &Dual {
        &self.c
    }

    pub fn cost(&self, y: &[f64]) -> f64 {
        let yv = DVector::from_column_slice(y);
        0.5 * yv.dot(&(&self.q * &yv)) + vecops::dot(self.c.coords(), y)
    }

    pub fn gradient(&self, y: &[f64]) -> Vec<f64> {
        let g = &self.q * DVector::from_column_slice(y);
        g.iter().zip(self.c.coords()).map(|(a, b)| a + b).collect()
    }
}

impl MonotoneOperator {
    pub fn new(a: DMatrix<f64>, b: Dual) -> Result<Self> {
        check_square(&a, b.dim(), "A")?;
        if min_eigenvalue_of_symmetric_part(&a) < -1e-12 * (1.0 + a.amax()) {
            return Err(Error::invalid("A", "must satisfy <Az, z> >= 0"));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &Dual {
        &self.b
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let ax = &self.a * DVector::from_column_slice(x);
        ax.iter().zip(self.b.coords()).map(|(a, b)| a + b).collect()
    }

    /// Operator norm `‖A‖₂`.
    fn lipschitz(&self) -> f64 {
        self.a.clone().svd(false, false).singular_values.max()
    }
}

impl Bifunction {
    pub fn convex_cost(q: DMatrix<f64>, c: Dual) -> Result<Self> {
        ConvexCost::new(q, c).map(Bifunction::ConvexCost)
    }

    pub fn monotone_operator(a: DMatrix<f64>, b: Dual) -> Result<Self> {
        MonotoneOperator::new(a, b).map(Bifunction::MonotoneOperator)
    }

    /// Dimension fixed by the data, `None` for [`Bifunction::Zero`].
    pub fn dim(&self) -> Option<usize> {
        match self {
            Bifunction::Zero => None,
            Bifunction::ConvexCost(cc) => Some(cc.c.dim()),
            Bifunction::MonotoneOperator(mo) => Some(mo.b.dim()),
        }
    }

    /// `F(x, y)`.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Bifunction::Zero => 0.0,
            Bifunction::ConvexCost(cc) => cc.cost(y) - cc.cost(x),
            Bifunction::MonotoneOperator(mo) => vecops::dot(&mo.apply(x), &vecops::sub(y, x)),
        }
    }

    fn check_space(&self, space: &LpSpace) -> Result<()> {
        match self.dim() {
            Some(d) => check_dim(space.dim(), d),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolventResult {
    pub u: Primal,
    /// Smallest value of `F(u,y) + (1/r)⟨y − u, Ju − Jv⟩` over the certificate
    /// points.
    pub residual: f64,
    pub inner_iters: usize,
}

/// `S_r v` over `c`, certified on the witness, the vertices (d ≤ 4) and
/// [`CERTIFICATE_SAMPLES`] random members of `c`.
pub fn resolvent(
    space: &LpSpace,
    c: &Polyhedron,
    f: &Bifunction,
    r: f64,
    v: &Primal,
    settings: &SolverSettings,
) -> Result<ResolventResult> {
    let points = c.certificate_points(CERTIFICATE_SAMPLES, settings.seed, settings)?;
    resolvent_certified(space, c, f, r, v, settings, &points)
}

/// [`resolvent`] with the inner solver started at `start` instead of the
/// Euclidean projection of `v`.
pub fn resolvent_from(
    space: &LpSpace,
    c: &Polyhedron,
    f: &Bifunction,
    r: f64,
    v: &Primal,
    start: &Primal,
    settings: &SolverSettings,
) -> Result<ResolventResult> {
    let points = c.certificate_points(CERTIFICATE_SAMPLES, settings.seed, settings)?;
    solve(space, c, f, r, v, Some(start), settings, &points)
}

/// [`resolvent`] with caller-supplied certificate points.
pub fn resolvent_certified(
    space: &LpSpace,
    c: &Polyhedron,
    f: &Bifunction,
    r: f64,
    v: &Primal,
    settings: &SolverSettings,
    points: &[Vec<f64>],
) -> Result<ResolventResult> {
    solve(space, c, f, r, v, None, settings, points)
}

#[allow(clippy::too_many_arguments)]
fn solve(
    space: &LpSpace,
    c: &Polyhedron,
    f: &Bifunction,
    r: f64,
    v: &Primal,
    start: Option<&Primal>,
    settings: &SolverSettings,
    points: &[Vec<f64>],
) -> Result<ResolventResult> {
    check_dim(space.dim(), c.dim())?;
    check_dim(space.dim(), v.dim())?;
    if let Some(s) = start {
        check_dim(space.dim(), s.dim())?;
    }
    f.check_space(space)?;
    settings.validate()?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid("r", format!("must be positive, got {r}")));
    }

    let (u, inner_iters) = match f {
        Bifunction::Zero => {
            let gp = match start {
                Some(s) => generalized_projection_from(space, c, v, s, settings)?,
                None => generalized_projection(space, c, v, settings)?,
            };
            (gp.point, gp.iterations)
        }
        Bifunction::ConvexCost(cc) => {
            // argmin f(y) + (1/r)(½‖y‖² − ⟨y, Jv⟩); the 1/r scaling makes the
            // solver's first-order bound the certificate bound.
            let jv = space.j(v.coords());
            let objective = FnObjective {
                value: |y: &[f64]| {
                    let n = space.norm_raw(y);
                    cc.cost(y) + (0.5 * n * n - vecops::dot(y, &jv)) / r
                },
                gradient: |y: &[f64]| {
                    let jy = space.j(y);
                    cc.gradient(y)
                        .iter()
                        .zip(jy.iter().zip(&jv))
                        .map(|(g, (a, b))| g + (a - b) / r)
                        .collect()
                },
            };
            let start = match start {
                Some(s) => s.clone(),
                None => euclidean_project(c, v, settings)?,
            };
            let m = minimize_convex(&objective, c, settings, &start)?;
            (m.point, m.iterations)
        }
        Bifunction::MonotoneOperator(mo) => solve_monotone_vi(space, c, mo, r, v, start, settings)?,
    };

    let residual = resolvent_residual(space, f, r, v, &u, points);
    let bound = -10.0 * settings.tol;
    if residual < bound {
        return Err(Error::CertificateFailure { residual, bound });
    }
    Ok(ResolventResult {
        u,
        residual,
        inner_iters,
    })
}

/// `min_y F(u,y) + (1/r)⟨y − u, Ju − Jv⟩` over `points`.
pub fn resolvent_residual(
    space: &LpSpace,
    f: &Bifunction,
    r: f64,
    v: &Primal,
    u: &Primal,
    points: &[Vec<f64>],
) -> f64 {
    let dj = vecops::sub(&space.j(u.coords()), &space.j(v.coords()));
    points
        .iter()
        .map(|y| f.eval(u.coords(), y) + vecops::dot(&vecops::sub(y, u.coords()), &dj) / r)
        .fold(f64::INFINITY, f64::min)
}

/// Extragradient iteration on `G(u) = Au + b + (1/r)(Ju − Jv)` with projected
/// steps, started at `1 / (‖A‖₂ + L_J / r)` and shrunk whenever the local
/// Lipschitz test fails.
fn solve_monotone_vi(
    space: &LpSpace,
    c: &Polyhedron,
    mo: &MonotoneOperator,
    r: f64,
    v: &Primal,
    start: Option<&Primal>,
    settings: &SolverSettings,
) -> Result<(Primal, usize)> {
    let jv = space.j(v.coords());
    let op = |u: &[f64]| -> Vec<f64> {
        let ju = space.j(u);
        mo.apply(u)
            .iter()
            .zip(ju.iter().zip(&jv))
            .map(|(a, (x, y))| a + (x - y) / r)
            .collect()
    };
    let project = |z: &[f64]| project_raw(c.bounds(), c.halfspaces(), z, settings);
    let diam = c.bounds().diameter();

    let mut step = 1.0 / (mo.lipschitz() + duality_lipschitz(space, c, settings.seed) / r);
    let mut u = project(start.unwrap_or(v).coords())?;
    let mut best = (f64::INFINITY, u.clone());
    for iter in 0..settings.max_iter {
        let g = op(&u);
        let natural: Vec<f64> = u.iter().zip(&g).map(|(a, b)| a - b).collect();
        let residual = vecops::dist2(&u, &project(&natural)?);
        if residual < best.0 {
            best = (residual, u.clone());
        }
        if residual * (1.0 + diam + vecops::norm2(&g)) <= settings.tol {
            return Ok((Primal::from_raw(u), iter));
        }
        loop {
            let trial: Vec<f64> = u.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let mid = project(&trial)?;
            let moved = vecops::dist2(&mid, &u);
            if moved == 0.0 {
                return Ok((Primal::from_raw(u), iter));
            }
            let g_mid = op(&mid);
            if step * vecops::dist2(&g_mid, &g) <= 0.9 * moved {
                let corrected: Vec<f64> = u.iter().zip(&g_mid).map(|(a, b)| a - step * b).collect();
                u = project(&corrected)?;
                break;
            }
            step *= settings.ls_shrink;
            if step < 1e-30 {
                return Err(Error::SolverFailure {
                    iterate: best.1,
                    residual: best.0,
                    iterations: iter,
                });
            }
        }
    }
    Err(Error::SolverFailure {
        iterate: best.1,
        residual: best.0,
        iterations: settings.max_iter,
    })
}

/// Sampled Euclidean Lipschitz estimate of `J` on the bounding box, doubled.
fn duality_lipschitz(space: &LpSpace, c: &Polyhedron, seed: u64) -> f64 {
    if space.is_hilbert() {
        return 1.0;
    }
    let b = c.bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut draw = || -> Vec<f64> {
        b.lower()
            .iter()
            .zip(b.upper())
            .map(|(&l, &u)| if l < u { rng.gen_range(l..=u) } else { l })
            .collect()
    };
    let mut best: f64 = 1.0;
    for _ in 0..64 {
        let (x, y) = (draw(), draw());
        let dx = vecops::dist2(&x, &y);
        if dx > 0.0 {
            best = best.max(vecops::dist2(&space.j(&x), &space.j(&y)) / dx);
        }
    }
    2.0 * best
}

/// `min_y F(u, y)` over the witness, vertices (d ≤ 4) and
/// [`CERTIFICATE_SAMPLES`] members of `c`; `≥ −tol` means `u` solves the
/// equilibrium problem to tolerance.
pub fn ep_residual(c: &Polyhedron, f: &Bifunction, u: &Primal) -> Result<f64> {
    let settings = SolverSettings::default();
    let points = c.certificate_points(CERTIFICATE_SAMPLES, settings.seed, &settings)?;
    ep_residual_at(c, f, u, &points)
}

/// [`ep_residual`] over caller-supplied points.
pub fn ep_residual_at(
    c: &Polyhedron,
    f: &Bifunction,
    u: &Primal,
    points: &[Vec<f64>],
) -> Result<f64> {
    check_dim(c.dim(), u.dim())?;
    if let Some(d) = f.dim() {
        check_dim(c.dim(), d)?;
    }
    let violation = c.max_violation(u.coords());
    if violation > 1e-9 {
        return Err(Error::Infeasible { violation });
    }
    Ok(points
        .iter()
        .map(|y| f.eval(u.coords(), y))
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::BoxBounds;

    fn settings() -> SolverSettings {
        SolverSettings::default()
    }

    fn scaled_identity(d: usize, s: f64) -> DMatrix<f64> {
        DMatrix::identity(d, d) * s
    }

    #[test]
    fn construction_checks() {
        assert!(Bifunction::convex_cost(scaled_identity(2, -1.0), Dual::zeros(2)).is_err());
        assert!(Bifunction::convex_cost(scaled_identity(3, 1.0), Dual::zeros(2)).is_err());
        let skew = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!(Bifunction::convex_cost(skew.clone(), Dual::zeros(2)).is_err());
        // A skew operator is monotone (⟨Az, z⟩ = 0).
        assert!(Bifunction::monotone_operator(skew, Dual::zeros(2)).is_ok());
        assert!(Bifunction::monotone_operator(scaled_identity(2, -0.1), Dual::zeros(2)).is_err());
    }

    #[test]
    fn bifunction_axioms_on_points() {
        let cc = Bifunction::convex_cost(scaled_identity(2, 2.0), Dual::new([0.5, -1.0])).unwrap();
        let mo = Bifunction::monotone_operator(
            DMatrix::from_row_slice(2, 2, &[2.0, 1.0, -1.0, 1.0]),
            Dual::new([0.1, 0.2]),
        )
        .unwrap();
        let (x, y) = ([0.3, -1.2], [2.0, 0.7]);
        for f in [&Bifunction::Zero, &cc, &mo] {
            assert_eq!(f.eval(&x, &x), 0.0);
            assert!(f.eval(&x, &y) + f.eval(&y, &x) <= 1e-12);
        }
    }

    #[test]
    fn zero_resolvent_is_generalized_projection() {
        let space = LpSpace::new(2, 3.0).unwrap();
        let c = Polyhedron::from_box(BoxBounds::cube(2, 1.0).unwrap());
        let v = Primal::new([2.0, -0.4]);
        let s = resolvent(&space, &c, &Bifunction::Zero, 0.7, &v, &settings()).unwrap();
        let gp = generalized_projection(&space, &c, &v, &settings()).unwrap();
        assert!(vecops::dist2(s.u.coords(), gp.point.coords()) < 1e-12);
        assert!(s.residual >= -10.0 * settings().tol);
    }

    #[test]
    fn convex_cost_closed_form() {
        // Stationarity 2ru + u − v = 0 gives u = v / (1 + 2r).
        let space = LpSpace::hilbert(2).unwrap();
        let c = Polyhedron::from_box(BoxBounds::cube(2, 1e3).unwrap());
        let f = Bifunction::convex_cost(scaled_identity(2, 2.0), Dual::zeros(2)).unwrap();
        let s = resolvent(&space, &c, &f, 1.0, &Primal::new([3.0, 3.0]), &settings()).unwrap();
        assert!(
            vecops::dist2(s.u.coords(), &[1.0, 1.0]) <= 1e-8,
            "{:?}",
            s.u
        );
    }

    #[test]
    fn monotone_operator_one_dimensional_vi() {
        // u + u − 4 = 0 → u = 2, clamped to 1 by C = [−1, 1].
        let space = LpSpace::hilbert(1).unwrap();
        let c = Polyhedron::from_box(BoxBounds::cube(1, 1.0).unwrap());
        let f = Bifunction::monotone_operator(scaled_identity(1, 1.0), Dual::zeros(1)).unwrap();
        let s = resolvent(&space, &c, &f, 1.0, &Primal::new([4.0]), &settings()).unwrap();
        assert!((s.u.coords()[0] - 1.0).abs() < 1e-12, "{:?}", s.u);
    }

    #[test]
    fn monotone_operator_interior_solution_p3() {
        let space = LpSpace::new(2, 3.0).unwrap();
        let c = Polyhedron::from_box(BoxBounds::cube(2, 5.0).unwrap());
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, -0.5, 1.0]);
        let f = Bifunction::monotone_operator(a, Dual::new([0.2, -0.3])).unwrap();
        let v = Primal::new([1.0, 2.0]);
        let s = resolvent(&space, &c, &f, 0.5, &v, &settings()).unwrap();
        // Interior solution: the operator itself vanishes.
        let mo = match &f {
            Bifunction::MonotoneOperator(mo) => mo,
            _ => unreachable!(),
        };
        let g: Vec<f64> = mo
            .apply(s.u.coords())
            .iter()
            .zip(space.j(s.u.coords()).iter().zip(space.j(v.coords())))
            .map(|(a, (x, y))| a + (x - y) / 0.5)
            .collect();
        assert!(vecops::norm2(&g) < 1e-8, "{g:?}");
    }

    #[test]
    fn rejects_nonpositive_r() {
        let space = LpSpace::hilbert(1).unwrap();
        let c = Polyhedron::from_box(BoxBounds::cube(1, 1.0).unwrap());
        let err = resolvent(
            &space,
            &c,
            &Bifunction::Zero,
            0.0,
            &Primal::new([0.0]),
            &settings(),
        );
        assert!(matches!(
            err,
            Err(Error::InvalidParameter { name: "r", .. })
        ));
    }

    #[test]
    fn ep_residual_examples() {
        let c = Polyhedron::from_box(BoxBounds::cube(3, 1.0).unwrap());
        assert_eq!(
            ep_residual(&c, &Bifunction::Zero, &Primal::new([0.2, 0.1, -0.5])).unwrap(),
            0.0
        );
        let f = Bifunction::convex_cost(scaled_identity(3, 2.0), Dual::zeros(3)).unwrap();
        assert_eq!(ep_residual(&c, &f, &Primal::zeros(3)).unwrap(), 0.0);
        // The witness y = 0 gives f(0) − f(1,1,1) = −3.
        let r = ep_residual(&c, &f, &Primal::new([1.0, 1.0, 1.0])).unwrap();
        assert!(r <= -3.0 + 1e-12, "{r}");
        assert!(matches!(
            ep_residual(&c, &f, &Primal::new([2.0, 0.0, 0.0])),
            Err(Error::Infeasible { .. })
        ));
    }
}
