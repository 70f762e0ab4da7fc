//! Euclidean projection onto `box ∩ ⋂ halfspaces` by Dykstra's algorithm.
//!
//! Kept as an independent cross-check of the active-set kernel. Dykstra's
//! cyclic projections run on a working set of half-spaces (those
//! violated so far); the result is then polished by solving the KKT system of
//! the constraints Dykstra left active. Half-spaces outside the working set
//! that the result still violates are added and the solve repeats. Since the
//! final point is the projection onto a superset and lies in the full set, it
//! is the projection onto the full set.

use nalgebra::DMatrix;

use super::{BoxBounds, HalfSpace, Polyhedron, SolverSettings};
use crate::error::{check_dim, Error, Result};
use crate::space::Primal;
use crate::vecops;

/// 2-norm nearest point of `poly` to `x`, by Dykstra's algorithm.
pub fn dykstra_project(poly: &Polyhedron, x: &Primal, settings: &SolverSettings) -> Result<Primal> {
    check_dim(poly.dim(), x.dim())?;
    settings.validate()?;
    dykstra_raw(poly.bounds(), poly.halfspaces(), x.coords(), settings).map(Primal::from_raw)
}

/// Unit-normal copy of a half-space.
struct Plane {
    a: Vec<f64>,
    b: f64,
}

impl Plane {
    fn slack(&self, z: &[f64]) -> f64 {
        vecops::dot(&self.a, z) - self.b
    }
}

fn plane(h: &HalfSpace) -> Option<Plane> {
    let n = vecops::norm2(h.normal().coords());
    (n > 0.0).then(|| Plane {
        a: h.normal().coords().iter().map(|c| c / n).collect(),
        b: h.offset() / n,
    })
}

fn dykstra_raw(
    bounds: &BoxBounds,
    halfspaces: &[HalfSpace],
    x: &[f64],
    settings: &SolverSettings,
) -> Result<Vec<f64>> {
    check_dim(bounds.dim(), x.len())?;
    let inside =
        |z: &[f64]| bounds.violation(z) <= 0.0 && halfspaces.iter().all(|h| h.violation(z) <= 0.0);
    if inside(x) {
        return Ok(x.to_vec());
    }
    let feas_tol = 1e-12 * (1.0 + vecops::max_abs(x));
    let mut working: Vec<usize> = (0..halfspaces.len())
        .filter(|&i| halfspaces[i].violation(x) > 0.0)
        .collect();
    loop {
        let planes: Vec<Plane> = working
            .iter()
            .filter_map(|&i| plane(&halfspaces[i]))
            .collect();
        let z = if planes.is_empty() {
            let mut z = x.to_vec();
            bounds.clamp(&mut z);
            z
        } else {
            let run = dykstra(bounds, &planes, x, settings);
            match polish(bounds, &planes, x, &run.point, feas_tol) {
                Some(z) => z,
                None if run.converged => run.point,
                None => {
                    return Err(Error::SolverFailure {
                        iterate: run.point,
                        residual: run.residual,
                        iterations: run.cycles,
                    })
                }
            }
        };
        let missing: Vec<usize> = (0..halfspaces.len())
            .filter(|i| !working.contains(i) && halfspaces[*i].violation(&z) > feas_tol)
            .collect();
        if missing.is_empty() {
            return Ok(z);
        }
        working.extend(missing);
    }
}

struct DykstraRun {
    point: Vec<f64>,
    converged: bool,
    residual: f64,
    cycles: usize,
}

fn dykstra(
    bounds: &BoxBounds,
    planes: &[Plane],
    x: &[f64],
    settings: &SolverSettings,
) -> DykstraRun {
    let d = x.len();
    let tol = settings.tol * 1e-2;
    let mut z = x.to_vec();
    let mut box_corr = vec![0.0; d];
    let mut corr = vec![vec![0.0; d]; planes.len()];
    let mut y = vec![0.0; d];
    let mut residual = f64::INFINITY;
    for cycle in 1..=settings.max_iter {
        let mut change = 0.0;

        for i in 0..d {
            y[i] = z[i] + box_corr[i];
        }
        let mut next = y.clone();
        bounds.clamp(&mut next);
        for i in 0..d {
            let c = y[i] - next[i];
            change += (c - box_corr[i]).powi(2) + (next[i] - z[i]).powi(2);
            box_corr[i] = c;
        }
        z.copy_from_slice(&next);

        for (pl, ci) in planes.iter().zip(corr.iter_mut()) {
            for i in 0..d {
                y[i] = z[i] + ci[i];
            }
            let s = pl.slack(&y);
            for i in 0..d {
                let zi = if s > 0.0 { y[i] - s * pl.a[i] } else { y[i] };
                let c = y[i] - zi;
                change += (c - ci[i]).powi(2) + (zi - z[i]).powi(2);
                ci[i] = c;
                z[i] = zi;
            }
        }

        residual = change.sqrt();
        if residual <= tol {
            return DykstraRun {
                point: z,
                converged: true,
                residual,
                cycles: cycle,
            };
        }
    }
    DykstraRun {
        point: z,
        converged: false,
        residual,
        cycles: settings.max_iter,
    }
}

/// Exact projection onto the constraints active at `z`, accepted only when
/// its KKT conditions hold.
fn polish(
    bounds: &BoxBounds,
    planes: &[Plane],
    x: &[f64],
    z: &[f64],
    feas_tol: f64,
) -> Option<Vec<f64>> {
    let d = x.len();
    let act_tol = 1e-7 * (1.0 + vecops::max_abs(x));
    let (lo, hi) = (bounds.lower(), bounds.upper());

    let mut fixed: Vec<Option<f64>> = vec![None; d];
    for i in 0..d {
        if (z[i] - lo[i]).abs() <= act_tol {
            fixed[i] = Some(lo[i]);
        } else if (hi[i] - z[i]).abs() <= act_tol {
            fixed[i] = Some(hi[i]);
        }
    }
    let active: Vec<&Plane> = planes
        .iter()
        .filter(|p| p.slack(z).abs() <= act_tol)
        .collect();
    let free: Vec<usize> = (0..d).filter(|&i| fixed[i].is_none()).collect();

    let mut c: Vec<f64> = (0..d).map(|i| fixed[i].unwrap_or(x[i])).collect();
    let mut lambda = vec![0.0; active.len()];
    if !active.is_empty() {
        if free.is_empty() {
            return None;
        }
        let k = active.len();
        let af = DMatrix::from_fn(k, free.len(), |r, j| active[r].a[free[j]]);
        // Right-hand side after moving the fixed coordinates over.
        let rhs = nalgebra::DVector::from_fn(k, |r, _| {
            let p = active[r];
            let fixed_part: f64 = (0..d).filter_map(|i| fixed[i].map(|v| p.a[i] * v)).sum();
            let free_part: f64 = free.iter().map(|&i| p.a[i] * x[i]).sum();
            free_part - (p.b - fixed_part)
        });
        let gram = &af * af.transpose();
        let pinv = gram.pseudo_inverse(1e-13).ok()?;
        let lam = pinv * rhs;
        let shift = af.transpose() * &lam;
        for (j, &i) in free.iter().enumerate() {
            c[i] = x[i] - shift[j];
        }
        lambda = lam.iter().copied().collect();
    }

    let lam_scale = 1.0 + lambda.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    if lambda.iter().any(|&l| l < -1e-12 * lam_scale) {
        return None;
    }
    for (p, &l) in active.iter().zip(&lambda) {
        let s = p.slack(&c);
        if s > feas_tol || (l > 1e-12 * lam_scale && s.abs() > feas_tol) {
            return None;
        }
    }
    for p in planes {
        if p.slack(&c) > feas_tol {
            return None;
        }
    }
    for i in 0..d {
        match fixed[i] {
            Some(v) => {
                let push: f64 = active.iter().zip(&lambda).map(|(p, l)| p.a[i] * l).sum();
                let mu = x[i] - v - push;
                let sign = if v == hi[i] && v != lo[i] { 1.0 } else { -1.0 };
                // Degenerate boxes (lo == hi) accept either sign.
                if lo[i] != hi[i] && sign * mu < -1e-12 * (1.0 + mu.abs()) {
                    return None;
                }
            }
            None => {
                if c[i] < lo[i] - feas_tol || c[i] > hi[i] + feas_tol {
                    return None;
                }
                c[i] = c[i].clamp(lo[i], hi[i]);
            }
        }
    }
    Some(c)
}
