//! Projected gradient descent with Barzilai–Borwein trial steps and
//! backtracking on the quadratic upper model.

use super::{project_raw, Polyhedron, SolverSettings};
use crate::error::{check_dim, Error, Result};
use crate::space::Primal;
use crate::vecops;

/// Differentiable convex scalar field.
pub trait Objective {
    fn value(&self, y: &[f64]) -> f64;
    fn gradient(&self, y: &[f64]) -> Vec<f64>;
}

/// Objective assembled from two closures.
pub struct FnObjective<V, G> {
    pub value: V,
    pub gradient: G,
}

impl<V, G> Objective for FnObjective<V, G>
where
    V: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    fn value(&self, y: &[f64]) -> f64 {
        (self.value)(y)
    }

    fn gradient(&self, y: &[f64]) -> Vec<f64> {
        (self.gradient)(y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimizer {
    pub point: Primal,
    /// Unit-step gradient mapping norm `‖y − P(y − ∇f(y))‖₂` at `point`.
    pub residual: f64,
    pub iterations: usize,
}

/// Minimizes `objective` over `poly` starting from `start` (projected first if
/// infeasible).
///
/// Stops once `residual · (1 + diam + ‖∇f‖₂) ≤ tol`, where `diam` is the box
/// diagonal, and a projected step of the current Barzilai–Borwein length
/// would move `y` by at most `tol`. The first bounds `⟨∇f(y), z − y⟩ ≥ −tol`
/// for every feasible `z`, which is the form every certificate downstream
/// checks. The second matters where the objective is nearly flat (`‖·‖_p²`
/// for `p > 2` near a zero coordinate): there the unit-step residual is tiny
/// long before `y` settles, while the BB length, an inverse curvature, is
/// large.
pub fn minimize_convex(
    objective: &impl Objective,
    poly: &Polyhedron,
    settings: &SolverSettings,
    start: &Primal,
) -> Result<Minimizer> {
    check_dim(poly.dim(), start.dim())?;
    settings.validate()?;
    let project = |z: &[f64]| project_raw(poly.bounds(), poly.halfspaces(), z, settings);
    let diam = poly.bounds().diameter();

    let mut y = project(start.coords())?;
    let mut f = objective.value(&y);
    let mut g = objective.gradient(&y);
    let mut step = 1.0;
    let mut best = (f64::INFINITY, y.clone());

    for iter in 0..settings.max_iter {
        let trial: Vec<f64> = y.iter().zip(&g).map(|(yi, gi)| yi - gi).collect();
        let residual = vecops::dist2(&y, &project(&trial)?);
        if residual < best.0 {
            best = (residual, y.clone());
        }
        let settled = residual * (1.0 + diam + vecops::norm2(&g)) <= settings.tol
            && (step <= 1.0 || {
                let trial: Vec<f64> = y.iter().zip(&g).map(|(yi, gi)| yi - step * gi).collect();
                vecops::dist2(&y, &project(&trial)?) <= settings.tol
            });
        if settled {
            return Ok(Minimizer {
                point: Primal::from_raw(y),
                residual,
                iterations: iter,
            });
        }

        let (next, f_next) = loop {
            let trial: Vec<f64> = y.iter().zip(&g).map(|(yi, gi)| yi - step * gi).collect();
            let cand = project(&trial)?;
            let d = vecops::sub(&cand, &y);
            let dd = vecops::dot(&d, &d);
            if dd == 0.0 {
                // A fixed point of the projected step is stationary.
                return Ok(Minimizer {
                    point: Primal::from_raw(y),
                    residual,
                    iterations: iter,
                });
            }
            let f_cand = objective.value(&cand);
            let model = f + vecops::dot(&g, &d) + dd / (2.0 * step);
            if f_cand <= model + 4.0 * f64::EPSILON * f.abs() {
                break (cand, f_cand);
            }
            step *= settings.ls_shrink;
            if step < 1e-30 {
                return Err(Error::SolverFailure {
                    iterate: best.1,
                    residual: best.0,
                    iterations: iter,
                });
            }
        };

        let g_next = objective.gradient(&next);
        let s = vecops::sub(&next, &y);
        let r = vecops::sub(&g_next, &g);
        let sr = vecops::dot(&s, &r);
        step = if sr > 0.0 {
            (vecops::dot(&s, &s) / sr).clamp(1e-12, 1e12)
        } else {
            (step * 2.0).min(1e12)
        };
        y = next;
        f = f_next;
        g = g_next;
    }
    Err(Error::SolverFailure {
        iterate: best.1,
        residual: best.0,
        iterations: settings.max_iter,
    })
}
