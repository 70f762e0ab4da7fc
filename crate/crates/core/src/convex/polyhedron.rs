use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{project_raw, SolverSettings};
use crate::error::{check_dim, Error, Result};
use crate::space::{Dual, Primal};
use crate::vecops;

/// Constraint tolerance a stored witness must meet.
pub const WITNESS_TOL: f64 = 1e-12;

/// Planes beyond which vertex enumeration is skipped.
const MAX_VERTEX_PLANES: usize = 24;

/// `{z : ⟨z, a⟩ ≤ b}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    normal: Dual,
    offset: f64,
}

impl HalfSpace {
    /// A zero normal is only accepted with `b ≥ 0` (the vacuous constraint).
    pub fn new(normal: Dual, offset: f64) -> Result<Self> {
        if !offset.is_finite() {
            return Err(Error::invalid("b", "offset must be finite"));
        }
        if normal.coords().iter().all(|&c| c == 0.0) && offset < 0.0 {
            return Err(Error::EmptySet { violation: -offset });
        }
        Ok(Self { normal, offset })
    }

    pub fn vacuous(dim: usize) -> Self {
        Self {
            normal: Dual::zeros(dim),
            offset: 0.0,
        }
    }

    pub fn normal(&self) -> &Dual {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    pub fn is_vacuous(&self) -> bool {
        self.normal.coords().iter().all(|&c| c == 0.0)
    }

    /// `⟨z, a⟩ − b`.
    pub fn slack(&self, z: &[f64]) -> f64 {
        vecops::dot(z, self.normal.coords()) - self.offset
    }

    /// Signed Euclidean distance past the boundary; nonpositive inside.
    pub fn violation(&self, z: &[f64]) -> f64 {
        let n = vecops::norm2(self.normal.coords());
        if n == 0.0 {
            -self.offset
        } else {
            self.slack(z) / n
        }
    }

    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        self.violation(z) <= tol
    }
}

/// Per-coordinate bounds `lower ≤ z ≤ upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::invalid("box", "dimension must be at least 1"));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !l.is_finite() || !u.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            if l > u {
                return Err(Error::invalid("box", format!("lower > upper at {i}")));
            }
        }
        Ok(Self { lower, upper })
    }

    /// `[-radius, radius]^dim`.
    pub fn cube(dim: usize, radius: f64) -> Result<Self> {
        Self::new(vec![-radius; dim], vec![radius; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect()
    }

    /// Euclidean length of the box diagonal.
    pub fn diameter(&self) -> f64 {
        vecops::dist2(&self.lower, &self.upper)
    }

    pub fn clamp(&self, z: &mut [f64]) {
        for ((zi, l), u) in z.iter_mut().zip(&self.lower).zip(&self.upper) {
            *zi = zi.clamp(*l, *u);
        }
    }

    pub fn violation(&self, z: &[f64]) -> f64 {
        z.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .map(|((zi, l), u)| (l - zi).max(zi - u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..1usize << d)
            .map(|mask| {
                (0..d)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            self.upper[i]
                        } else {
                            self.lower[i]
                        }
                    })
                    .collect()
            })
            .collect()
    }

    fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| if l < u { rng.gen_range(l..=u) } else { l })
            .collect()
    }
}

/// Bounded polyhedron `box ∩ ⋂ halfspaces` with a certified member.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    bounds: BoxBounds,
    halfspaces: Vec<HalfSpace>,
    witness: Primal,
}

impl Polyhedron {
    /// Fails unless `witness` meets every constraint to [`WITNESS_TOL`].
    pub fn new(bounds: BoxBounds, halfspaces: Vec<HalfSpace>, witness: Primal) -> Result<Self> {
        check_dim(bounds.dim(), witness.dim())?;
        for h in &halfspaces {
            check_dim(bounds.dim(), h.dim())?;
        }
        let poly = Self {
            bounds,
            halfspaces,
            witness,
        };
        let violation = poly.max_violation(poly.witness.coords());
        if violation > WITNESS_TOL {
            return Err(Error::EmptySet { violation });
        }
        Ok(poly)
    }

    pub fn from_box(bounds: BoxBounds) -> Self {
        let witness = Primal::from_raw(bounds.center());
        Self {
            bounds,
            halfspaces: Vec::new(),
            witness,
        }
    }

    /// Builds the polyhedron and searches for a witness starting from the box
    /// center.
    pub fn with_halfspaces(
        bounds: BoxBounds,
        halfspaces: Vec<HalfSpace>,
        settings: &SolverSettings,
    ) -> Result<Self> {
        let base = Self::from_box(bounds);
        let center = base.witness.coords().to_vec();
        let mut poly = base;
        for h in &halfspaces {
            check_dim(poly.dim(), h.dim())?;
        }
        poly.halfspaces = halfspaces;
        poly.witness = poly.find_witness(&[&center], settings)?;
        Ok(poly)
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn bounds(&self) -> &BoxBounds {
        &self.bounds
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn witness(&self) -> &Primal {
        &self.witness
    }

    /// Largest constraint violation of `z`, measured as Euclidean distance;
    /// nonpositive means feasible.
    pub fn max_violation(&self, z: &[f64]) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.violation(z))
            .fold(self.bounds.violation(z), f64::max)
    }

    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        self.max_violation(z) <= tol
    }

    /// `self ∩ cut`, with the witness taken from the current witness, one of
    /// the `hints`, or a projection of the current witness onto the new set.
    pub fn with_cut(
        &self,
        cut: HalfSpace,
        hints: &[&[f64]],
        settings: &SolverSettings,
    ) -> Result<Polyhedron> {
        check_dim(self.dim(), cut.dim())?;
        let mut next = self.clone();
        next.halfspaces.push(cut);
        let mut candidates: Vec<&[f64]> = vec![self.witness.coords()];
        candidates.extend_from_slice(hints);
        next.witness = next.find_witness(&candidates, settings)?;
        Ok(next)
    }

    fn find_witness(&self, candidates: &[&[f64]], settings: &SolverSettings) -> Result<Primal> {
        for c in candidates {
            check_dim(self.dim(), c.len())?;
            if self.max_violation(c) <= WITNESS_TOL {
                return Ok(Primal::from_raw(c.to_vec()));
            }
        }
        let start = candidates.first().copied().unwrap_or(self.witness.coords());
        let mut z = match project_raw(&self.bounds, &self.halfspaces, start, settings) {
            Ok(z) => z,
            // Dykstra cannot settle when the constraints have no common point.
            Err(Error::SolverFailure { iterate, .. }) => {
                return Err(Error::EmptySet {
                    violation: self.max_violation(&iterate),
                })
            }
            Err(e) => return Err(e),
        };
        self.push_inside(&mut z);
        let violation = self.max_violation(&z);
        if violation > WITNESS_TOL {
            return Err(Error::EmptySet { violation });
        }
        Ok(Primal::from_raw(z))
    }

    /// Cyclic projections with a small inward margin, to turn a nearly
    /// feasible point into one that meets [`WITNESS_TOL`].
    fn push_inside(&self, z: &mut [f64]) {
        for _ in 0..100 {
            if self.max_violation(z) <= 0.0 {
                return;
            }
            for h in &self.halfspaces {
                let a = h.normal.coords();
                let n = vecops::norm2(a);
                if n == 0.0 {
                    continue;
                }
                let margin = 1e-14 * (1.0 + h.offset.abs() / n);
                let over = h.slack(z) / n + margin;
                if over > 0.0 {
                    vecops::axpy(-over / n, a, z);
                }
            }
            self.bounds.clamp(z);
        }
    }

    /// Vertices of the polytope for `d ≤ 4` and at most 24 bounding planes;
    /// `None` otherwise.
    pub fn vertices(&self) -> Option<Vec<Vec<f64>>> {
        let d = self.dim();
        let active: Vec<&HalfSpace> = self.halfspaces.iter().filter(|h| !h.is_vacuous()).collect();
        if d > 4 || 2 * d + active.len() > MAX_VERTEX_PLANES {
            return None;
        }
        if active.is_empty() {
            return Some(self.bounds.vertices());
        }
        let mut planes: Vec<(Vec<f64>, f64)> = Vec::with_capacity(2 * d + active.len());
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            planes.push((e.clone(), self.bounds.lower[i]));
            planes.push((e, self.bounds.upper[i]));
        }
        for h in active {
            planes.push((h.normal.coords().to_vec(), h.offset));
        }
        let mut out: Vec<Vec<f64>> = Vec::new();
        for combo in combinations(planes.len(), d) {
            let a = DMatrix::from_fn(d, d, |r, c| planes[combo[r]].0[c]);
            let b = DVector::from_fn(d, |r, _| planes[combo[r]].1);
            let Some(sol) = a.lu().solve(&b) else {
                continue;
            };
            let v: Vec<f64> = sol.iter().copied().collect();
            if v.iter().all(|c| c.is_finite())
                && self.max_violation(&v) <= 1e-9
                && !out.iter().any(|w| vecops::dist2(w, &v) <= 1e-9)
            {
                out.push(v);
            }
        }
        Some(out)
    }

    /// Uniform box samples projected onto the polyhedron.
    pub fn sample_points(
        &self,
        count: usize,
        seed: u64,
        settings: &SolverSettings,
    ) -> Result<Vec<Vec<f64>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let z = self.bounds.sample(&mut rng);
                if self.halfspaces.is_empty() {
                    Ok(z)
                } else {
                    project_raw(&self.bounds, &self.halfspaces, &z, settings)
                }
            })
            .collect()
    }

    /// Test points standing in for "all y in the set": the witness, the
    /// vertices when cheap to enumerate, and `samples` random members.
    pub fn certificate_points(
        &self,
        samples: usize,
        seed: u64,
        settings: &SolverSettings,
    ) -> Result<Vec<Vec<f64>>> {
        let mut pts = vec![self.witness.coords().to_vec()];
        if let Some(vs) = self.vertices() {
            pts.extend(vs);
        }
        pts.extend(self.sample_points(samples, seed, settings)?);
        Ok(pts)
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
