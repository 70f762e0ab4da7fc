//! Geometry of finite-dimensional ℓ_p spaces.
//!
//! Everything in the crate is measured through [`LpSpace`]: the p-norm on
//! primal vectors, the q-norm on dual vectors (1/p + 1/q = 1), the normalized
//! duality mapping `J`, the Lyapunov functional
//!
//! ```text
//! φ(x, y) = ‖x‖² − 2⟨x, Jy⟩ + ‖y‖²
//! ```
//!
//! and its two-sided set extension `Φ`, next to the Hausdorff metric.
//!
//! Primal and dual vectors are distinct types so the pairing `⟨x, f⟩` can only
//! be formed between a [`Primal`] and a [`Dual`].

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::vecops;

macro_rules! coord_vector {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
        pub struct $name(Vec<f64>);

        impl $name {
            /// Panics if any coordinate is NaN or infinite; use
            /// [`Self::try_new`] for untrusted input.
            pub fn new(coords: impl Into<Vec<f64>>) -> Self {
                match Self::try_new(coords) {
                    Ok(v) => v,
                    Err(e) => panic!("{}: {e}", stringify!($name)),
                }
            }

            pub fn try_new(coords: impl Into<Vec<f64>>) -> Result<Self> {
                let coords = coords.into();
                if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
                    return Err(Error::NonFinite { index });
                }
                Ok(Self(coords))
            }

            pub fn zeros(dim: usize) -> Self {
                Self(vec![0.0; dim])
            }

            pub fn dim(&self) -> usize {
                self.0.len()
            }

            pub fn coords(&self) -> &[f64] {
                &self.0
            }

            pub fn into_coords(self) -> Vec<f64> {
                self.0
            }

            pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
                debug_assert!(coords.iter().all(|c| c.is_finite()), "non-finite coordinates");
                Self(coords)
            }
        }

        impl TryFrom<Vec<f64>> for $name {
            type Error = Error;

            fn try_from(coords: Vec<f64>) -> Result<Self> {
                Self::try_new(coords)
            }
        }

        impl From<$name> for Vec<f64> {
            fn from(v: $name) -> Vec<f64> {
                v.0
            }
        }

        impl AsRef<[f64]> for $name {
            fn as_ref(&self) -> &[f64] {
                &self.0
            }
        }
    };
}

coord_vector!(
    /// Element of the primal space E = ℓ_p^d.
    Primal
);
coord_vector!(
    /// Element of the dual space E* = ℓ_q^d.
    Dual
);

/// ℝ^d with the p-norm, 1 < p < ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpSpace {
    dim: usize,
    p: f64,
    q: f64,
}

impl LpSpace {
    pub fn new(dim: usize, p: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "must be at least 1"));
        }
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::invalid("p", format!("need 1 < p < inf, got {p}")));
        }
        Ok(Self {
            dim,
            p,
            q: p / (p - 1.0),
        })
    }

    pub fn hilbert(dim: usize) -> Result<Self> {
        Self::new(dim, 2.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Dual exponent, always `p / (p - 1)`.
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn is_hilbert(&self) -> bool {
        self.p == 2.0
    }

    pub fn norm(&self, x: &Primal) -> Result<f64> {
        check_dim(self.dim, x.dim())?;
        Ok(lp_norm(x.coords(), self.p))
    }

    pub fn dual_norm(&self, f: &Dual) -> Result<f64> {
        check_dim(self.dim, f.dim())?;
        Ok(lp_norm(f.coords(), self.q))
    }

    /// The duality pairing ⟨x, f⟩.
    pub fn pairing(&self, x: &Primal, f: &Dual) -> Result<f64> {
        check_dim(self.dim, x.dim())?;
        check_dim(self.dim, f.dim())?;
        Ok(vecops::dot(x.coords(), f.coords()))
    }

    /// `Jx = ‖x‖_p^{2−p} (|x_i|^{p−1} sign x_i)_i`, the gradient of ½‖·‖_p².
    pub fn duality_map(&self, x: &Primal) -> Result<Dual> {
        check_dim(self.dim, x.dim())?;
        Ok(Dual::from_raw(self.j(x.coords())))
    }

    /// `J⁻¹`, which is the duality map of ℓ_q applied to a dual vector.
    pub fn inverse_duality_map(&self, f: &Dual) -> Result<Primal> {
        check_dim(self.dim, f.dim())?;
        Ok(Primal::from_raw(self.j_inv(f.coords())))
    }

    /// Lyapunov functional φ(x, y).
    pub fn phi(&self, x: &Primal, y: &Primal) -> Result<f64> {
        check_dim(self.dim, x.dim())?;
        check_dim(self.dim, y.dim())?;
        Ok(self.phi_raw(x.coords(), y.coords()))
    }

    /// Two-sided composite of φ over image sets:
    /// `max{ sup_{q∈B} inf_{y∈A} φ(y,q), sup_{y∈A} inf_{q∈B} φ(y,q) }`.
    pub fn capital_phi(&self, a: &PointSet, b: &PointSet) -> Result<Estimate> {
        check_dim(self.dim, a.dim())?;
        check_dim(self.dim, b.dim())?;
        let phi = |y: &[f64], q: &[f64]| self.phi_raw(y, q);
        Ok(two_sided(a, b, phi))
    }

    /// Hausdorff distance in the p-norm.
    pub fn hausdorff(&self, a: &PointSet, b: &PointSet) -> Result<Estimate> {
        check_dim(self.dim, a.dim())?;
        check_dim(self.dim, b.dim())?;
        let dist = |x: &[f64], y: &[f64]| lp_norm(&vecops::sub(x, y), self.p);
        Ok(two_sided(a, b, dist))
    }

    pub(crate) fn norm_raw(&self, x: &[f64]) -> f64 {
        lp_norm(x, self.p)
    }

    /// `‖x‖²`, exact sum of squares when `p = 2`.
    pub(crate) fn norm_sq_raw(&self, x: &[f64]) -> f64 {
        if self.is_hilbert() {
            return vecops::dot(x, x);
        }
        let n = lp_norm(x, self.p);
        n * n
    }

    pub(crate) fn j(&self, x: &[f64]) -> Vec<f64> {
        power_duality(x, self.p)
    }

    pub(crate) fn j_inv(&self, f: &[f64]) -> Vec<f64> {
        power_duality(f, self.q)
    }

    pub(crate) fn phi_raw(&self, x: &[f64], y: &[f64]) -> f64 {
        if x == y {
            return 0.0;
        }
        if self.is_hilbert() {
            return x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        }
        let nx = lp_norm(x, self.p);
        let ny = lp_norm(y, self.p);
        let value = nx * nx - 2.0 * vecops::dot(x, &self.j(y)) + ny * ny;
        // The formula is nonnegative; only rounding can push it below zero.
        value.max(0.0)
    }
}

/// `(Σ|x_i|^r)^{1/r}`, scaled by the largest magnitude to avoid overflow.
pub(crate) fn lp_norm(x: &[f64], r: f64) -> f64 {
    let m = vecops::max_abs(x);
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = x.iter().map(|c| (c.abs() / m).powf(r)).sum();
    m * s.powf(1.0 / r)
}

/// Duality map of ℓ_r: `‖x‖_r^{2−r} (|x_i|^{r−1} sign x_i)_i`.
fn power_duality(x: &[f64], r: f64) -> Vec<f64> {
    let m = vecops::max_abs(x);
    if m == 0.0 {
        return vec![0.0; x.len()];
    }
    if r == 2.0 {
        return x.to_vec();
    }
    // With s = x / m: J x = m · ‖s‖^{2−r} · |s_i|^{r−1} sign s_i.
    let s: Vec<f64> = x.iter().map(|c| c / m).collect();
    let ns = lp_norm(&s, r);
    let scale = m * ns.powf(2.0 - r);
    s.iter()
        .map(|si| scale * si.abs().powf(r - 1.0).copysign(*si))
        .collect()
}

/// Nonempty image set of a multivalued mapping.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSet {
    Singleton(Primal),
    /// Closed segment `[a, b]`.
    Segment(Primal, Primal),
    FiniteList(Vec<Primal>),
}

impl PointSet {
    pub fn singleton(v: Primal) -> Self {
        PointSet::Singleton(v)
    }

    /// Collapses to a singleton when the endpoints coincide.
    pub fn segment(a: Primal, b: Primal) -> Result<Self> {
        check_dim(a.dim(), b.dim())?;
        if a == b {
            Ok(PointSet::Singleton(a))
        } else {
            Ok(PointSet::Segment(a, b))
        }
    }

    pub fn finite_list(mut points: Vec<Primal>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::invalid("points", "a point set must be nonempty"));
        };
        let dim = first.dim();
        for p in &points {
            check_dim(dim, p.dim())?;
        }
        if points.len() == 1 {
            return Ok(PointSet::Singleton(points.remove(0)));
        }
        Ok(PointSet::FiniteList(points))
    }

    pub fn dim(&self) -> usize {
        match self {
            PointSet::Singleton(v) | PointSet::Segment(v, _) => v.dim(),
            PointSet::FiniteList(vs) => vs[0].dim(),
        }
    }

    /// Euclidean distance from `z` to the set is at most `tol`.
    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        match self {
            PointSet::Singleton(v) => vecops::dist2(v.coords(), z) <= tol,
            PointSet::FiniteList(vs) => vs.iter().any(|v| vecops::dist2(v.coords(), z) <= tol),
            PointSet::Segment(a, b) => {
                let ab = vecops::sub(b.coords(), a.coords());
                let az = vecops::sub(z, a.coords());
                let t = (vecops::dot(&az, &ab) / vecops::dot(&ab, &ab)).clamp(0.0, 1.0);
                let closest = segment_point(a.coords(), b.coords(), t);
                vecops::dist2(&closest, z) <= tol
            }
        }
    }

    /// The point at parameter `t ∈ [0, 1]` for segments; list entry
    /// `⌊t·len⌋` otherwise. Used for sampling image elements.
    pub fn point_at(&self, t: f64) -> Primal {
        let t = t.clamp(0.0, 1.0);
        match self {
            PointSet::Singleton(v) => v.clone(),
            PointSet::Segment(a, b) => Primal::from_raw(segment_point(a.coords(), b.coords(), t)),
            PointSet::FiniteList(vs) => {
                let i = ((t * vs.len() as f64) as usize).min(vs.len() - 1);
                vs[i].clone()
            }
        }
    }
}

fn segment_point(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(ai, bi)| ai + t * (bi - ai)).collect()
}

/// A sup/inf value together with the parameter resolution it was computed at
/// (zero when exact).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub resolution: f64,
}

/// Grid points used along a segment before golden-section refinement.
pub const SEGMENT_GRID: usize = 1024;
/// Parameter bracket at which golden-section refinement stops.
pub const SEGMENT_TOL: f64 = 1e-8;

#[derive(Clone, Copy)]
enum Sense {
    Min,
    Max,
}

fn two_sided(a: &PointSet, b: &PointSet, f: impl Fn(&[f64], &[f64]) -> f64 + Copy) -> Estimate {
    // sup_{q∈B} inf_{y∈A} f(y, q)
    let (left, r1) = extremum(b, Sense::Max, |q| extremum(a, Sense::Min, |y| f(y, q)).0);
    // sup_{y∈A} inf_{q∈B} f(y, q)
    let (right, r2) = extremum(a, Sense::Max, |y| extremum(b, Sense::Min, |q| f(y, q)).0);
    Estimate {
        value: left.max(right).max(0.0),
        resolution: r1.max(r2),
    }
}

fn extremum(set: &PointSet, sense: Sense, f: impl Fn(&[f64]) -> f64) -> (f64, f64) {
    let better = |a: f64, b: f64| match sense {
        Sense::Min => a < b,
        Sense::Max => a > b,
    };
    match set {
        PointSet::Singleton(v) => (f(v.coords()), 0.0),
        PointSet::FiniteList(vs) => {
            let mut best = f(vs[0].coords());
            for v in &vs[1..] {
                let val = f(v.coords());
                if better(val, best) {
                    best = val;
                }
            }
            (best, 0.0)
        }
        PointSet::Segment(a, b) => {
            let (a, b) = (a.coords(), b.coords());
            let g = |t: f64| f(&segment_point(a, b, t));
            let last = (SEGMENT_GRID - 1) as f64;
            let mut best_k = 0;
            let mut best = g(0.0);
            for k in 1..SEGMENT_GRID {
                let val = g(k as f64 / last);
                if better(val, best) {
                    best = val;
                    best_k = k;
                }
            }
            let lo = best_k.saturating_sub(1) as f64 / last;
            let hi = (best_k + 1).min(SEGMENT_GRID - 1) as f64 / last;
            let (t, val) = golden_section(lo, hi, |t| match sense {
                Sense::Min => g(t),
                Sense::Max => -g(t),
            });
            let val = match sense {
                Sense::Min => val,
                Sense::Max => -val,
            };
            debug_assert!((0.0..=1.0).contains(&t));
            if better(val, best) {
                best = val;
            }
            (best, SEGMENT_TOL)
        }
    }
}

/// Minimizes `g` on `[lo, hi]` assuming unimodality inside the bracket.
fn golden_section(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut gc = g(c);
    let mut gd = g(d);
    while hi - lo > SEGMENT_TOL {
        if gc < gd {
            hi = d;
            d = c;
            gd = gc;
            c = hi - inv_phi * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + inv_phi * (hi - lo);
            gd = g(d);
        }
    }
    let t = 0.5 * (lo + hi);
    let gt = g(t);
    [(c, gc), (d, gd), (t, gt)]
        .into_iter()
        .fold((t, gt), |acc, cand| if cand.1 < acc.1 { cand } else { acc })
}
