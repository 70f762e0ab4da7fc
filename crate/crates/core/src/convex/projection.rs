use super::{euclidean_project, minimize_convex, FnObjective, Polyhedron, SolverSettings};
use crate::error::{check_dim, Result};
use crate::space::{LpSpace, Primal};
use crate::vecops;

/// Result of `Π_C x` with its variational certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedProjection {
    pub point: Primal,
    /// `min_y ⟨x̄ − y, Jx − Jx̄⟩` over the witness and sampled members `y`;
    /// nonnegative at the exact projection.
    pub certificate: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// `Π_C x = argmin_{y∈C} φ(y, x)`, solved as `min ‖y‖² − 2⟨y, Jx⟩` from the
/// Euclidean projection of `x`.
pub fn generalized_projection(
    space: &LpSpace,
    poly: &Polyhedron,
    x: &Primal,
    settings: &SolverSettings,
) -> Result<GeneralizedProjection> {
    check_dim(space.dim(), poly.dim())?;
    check_dim(space.dim(), x.dim())?;
    let start = euclidean_project(poly, x, settings)?;
    generalized_projection_from(space, poly, x, &start, settings)
}

/// As [`generalized_projection`], warm-started at `start`.
pub fn generalized_projection_from(
    space: &LpSpace,
    poly: &Polyhedron,
    x: &Primal,
    start: &Primal,
    settings: &SolverSettings,
) -> Result<GeneralizedProjection> {
    check_dim(space.dim(), poly.dim())?;
    check_dim(space.dim(), x.dim())?;
    check_dim(space.dim(), start.dim())?;

    let (point, iterations, residual) = if poly.max_violation(x.coords()) <= 0.0 {
        (x.clone(), 0, 0.0)
    } else {
        let jx = space.j(x.coords());
        let objective = FnObjective {
            value: |y: &[f64]| {
                let n = space.norm_raw(y);
                n * n - 2.0 * vecops::dot(y, &jx)
            },
            gradient: |y: &[f64]| {
                space
                    .j(y)
                    .iter()
                    .zip(&jx)
                    .map(|(a, b)| 2.0 * (a - b))
                    .collect()
            },
        };
        let m = minimize_convex(&objective, poly, settings, start)?;
        (m.point, m.iterations, m.residual)
    };

    let mut points = vec![poly.witness().coords().to_vec()];
    points.extend(poly.sample_points(settings.certificate_samples, settings.seed, settings)?);
    let certificate = projection_certificate(space, x, &point, &points);
    Ok(GeneralizedProjection {
        point,
        certificate,
        iterations,
        residual,
    })
}

/// `min_y ⟨x̄ − y, Jx − Jx̄⟩`: nonnegative over every member `y` exactly when
/// `x̄ = Π_C x`.
pub fn projection_certificate(
    space: &LpSpace,
    x: &Primal,
    xbar: &Primal,
    points: &[Vec<f64>],
) -> f64 {
    let jx = space.j(x.coords());
    let jxbar = space.j(xbar.coords());
    let dj = vecops::sub(&jx, &jxbar);
    points
        .iter()
        .map(|y| vecops::dot(&vecops::sub(xbar.coords(), y), &dj))
        .fold(f64::INFINITY, f64::min)
}
