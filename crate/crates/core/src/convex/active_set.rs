//! Exact Euclidean projection onto `box ∩ ⋂ halfspaces` by a dual active-set
//! method (Goldfarb–Idnani with identity Hessian).
//!
//! Starting from the unconstrained minimizer `x`, the most violated
//! constraint is brought into the active set while dual feasibility is kept;
//! constraints whose multiplier reaches zero on the way are dropped. Each
//! constraint is handled in a finite number of moves, and the cost does not
//! grow with how many nearly parallel cuts the set carries.

use nalgebra::{DMatrix, DVector};

use super::{BoxBounds, HalfSpace, Polyhedron, SolverSettings};
use crate::error::{check_dim, Error, Result};
use crate::space::Primal;
use crate::vecops;

/// 2-norm nearest point of `poly` to `x`.
pub fn euclidean_project(
    poly: &Polyhedron,
    x: &Primal,
    settings: &SolverSettings,
) -> Result<Primal> {
    check_dim(poly.dim(), x.dim())?;
    settings.validate()?;
    project_raw(poly.bounds(), poly.halfspaces(), x.coords(), settings).map(Primal::from_raw)
}

/// Unit-normal constraint `⟨a, z⟩ ≤ b`.
struct Row {
    a: Vec<f64>,
    b: f64,
}

impl Row {
    fn slack(&self, z: &[f64]) -> f64 {
        vecops::dot(&self.a, z) - self.b
    }
}

fn rows(bounds: &BoxBounds, halfspaces: &[HalfSpace]) -> Vec<Row> {
    let d = bounds.dim();
    let mut out = Vec::with_capacity(2 * d + halfspaces.len());
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        out.push(Row {
            a: e.clone(),
            b: bounds.upper()[i],
        });
        e[i] = -1.0;
        out.push(Row {
            a: e,
            b: -bounds.lower()[i],
        });
    }
    for h in halfspaces {
        let n = vecops::norm2(h.normal().coords());
        if n > 0.0 {
            out.push(Row {
                a: h.normal().coords().iter().map(|c| c / n).collect(),
                b: h.offset() / n,
            });
        }
    }
    out
}

pub(crate) fn project_raw(
    bounds: &BoxBounds,
    halfspaces: &[HalfSpace],
    x: &[f64],
    settings: &SolverSettings,
) -> Result<Vec<f64>> {
    check_dim(bounds.dim(), x.len())?;
    for h in halfspaces {
        check_dim(bounds.dim(), h.dim())?;
    }
    if bounds.violation(x) <= 0.0 && halfspaces.iter().all(|h| h.violation(x) <= 0.0) {
        return Ok(x.to_vec());
    }
    let rows = rows(bounds, halfspaces);
    let feas_tol = 1e-13 * (1.0 + vecops::max_abs(x) + bounds.diameter());

    let mut z = x.to_vec();
    let mut active: Vec<usize> = Vec::new();
    let mut lambda: Vec<f64> = Vec::new();
    let mut moves = 0;

    while let Some((p, mut s)) = rows
        .iter()
        .enumerate()
        .filter(|(i, _)| !active.contains(i))
        .map(|(i, r)| (i, r.slack(&z)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
    {
        if s <= feas_tol {
            break;
        }
        let g = &rows[p].a;
        let mut lambda_p = 0.0;
        loop {
            moves += 1;
            if moves > settings.max_iter {
                return Err(Error::SolverFailure {
                    iterate: z,
                    residual: s,
                    iterations: moves,
                });
            }
            let (r, dz) = directions(&rows, &active, g);
            let curvature = vecops::dot(&dz, &dz);
            let full = if curvature > 1e-28 {
                s / curvature
            } else {
                f64::INFINITY
            };
            let mut partial = f64::INFINITY;
            let mut blocking = None;
            for (j, (&rj, &lj)) in r.iter().zip(&lambda).enumerate() {
                if rj > 0.0 && lj / rj < partial {
                    partial = lj / rj;
                    blocking = Some(j);
                }
            }
            let t = full.min(partial);
            if !t.is_finite() {
                // No primal move and no multiplier to trade against: the
                // constraint cannot be met together with the active ones.
                return Err(Error::EmptySet { violation: s });
            }
            if full.is_finite() {
                vecops::axpy(t, &dz, &mut z);
            }
            for (lj, rj) in lambda.iter_mut().zip(&r) {
                *lj = (*lj - t * rj).max(0.0);
            }
            lambda_p += t;
            if full <= partial {
                active.push(p);
                lambda.push(lambda_p);
                break;
            }
            let j = blocking.expect("partial step has a blocking constraint");
            active.remove(j);
            lambda.remove(j);
            s = rows[p].slack(&z);
            if s <= feas_tol {
                active.push(p);
                lambda.push(lambda_p);
                break;
            }
        }
    }
    bounds.clamp(&mut z);
    Ok(z)
}

/// Dual direction `r = (N Nᵀ)⁺ N g` and primal direction `−(g − Nᵀ r)` for the
/// active rows `N`.
fn directions(rows: &[Row], active: &[usize], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let d = g.len();
    if active.is_empty() {
        return (Vec::new(), g.iter().map(|v| -v).collect());
    }
    let n = DMatrix::from_fn(active.len(), d, |i, j| rows[active[i]].a[j]);
    let gv = DVector::from_column_slice(g);
    let gram = &n * n.transpose();
    let r = match gram.clone().cholesky() {
        Some(ch) => ch.solve(&(&n * &gv)),
        None => {
            gram.pseudo_inverse(1e-12)
                .expect("tolerance is nonnegative")
                * (&n * &gv)
        }
    };
    let dz = n.transpose() * &r - gv;
    (r.iter().copied().collect(), dz.iter().copied().collect())
}
