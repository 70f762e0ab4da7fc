//! Polyhedral feasible sets, the inner convex minimizer and the generalized
//! projection `Π_C x = argmin_{y∈C} φ(y, x)`.

mod active_set;
mod dykstra;
mod polyhedron;
mod projection;
mod solver;

pub use active_set::euclidean_project;
pub use dykstra::dykstra_project;
pub use polyhedron::{BoxBounds, HalfSpace, Polyhedron, WITNESS_TOL};
pub use projection::{
    generalized_projection, generalized_projection_from, projection_certificate,
    GeneralizedProjection,
};
pub use solver::{minimize_convex, FnObjective, Minimizer, Objective};

pub(crate) use active_set::project_raw;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances shared by every inner solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    /// First-order residual target.
    pub tol: f64,
    pub max_iter: usize,
    /// Backtracking factor in (0, 1).
    pub ls_shrink: f64,
    /// Random feasible points drawn for each variational certificate.
    pub certificate_samples: usize,
    /// Seed for certificate sampling.
    pub seed: u64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 100_000,
            ls_shrink: 0.5,
            certificate_samples: 100,
            seed: 0,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::invalid("tol", "must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter", "must be at least 1"));
        }
        if !(self.ls_shrink > 0.0 && self.ls_shrink < 1.0) {
            return Err(Error::invalid("ls_shrink", "must lie in (0, 1)"));
        }
        Ok(())
    }
}
