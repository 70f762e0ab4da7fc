//! Multivalued mappings with computable images, the best-approximation
//! operator `P_T x = {y ∈ Tx : ‖x − y‖ = dist(x, Tx)}`, and a sampled check
//! of relative quasi-nonexpansiveness.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convex::{generalized_projection, Polyhedron, SolverSettings};
use crate::error::{check_dim, Error, Result};
use crate::space::{LpSpace, PointSet, Primal};

/// Half-width of the cube around the fixed set from which `check_rqne` draws.
pub const SAMPLE_RADIUS: f64 = 10.0;

/// Which element of `Tx` the iteration uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectFrom {
    /// The nearest point of `Tx` to `x`.
    #[default]
    Pt,
    /// The midpoint of a segment image (the image point for single-valued maps).
    ImageMidpoint,
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Segment {
        center: Primal,
        beta: f64,
    },
    Projection {
        k: Polyhedron,
    },
    Affine {
        m: DMatrix<f64>,
        t: Vec<f64>,
        fixed_point: Primal,
    },
}

/// A mapping `T` with a declared nonempty fixed set.
#[derive(Debug, Clone, PartialEq)]
pub struct MultivaluedMap {
    kind: Kind,
    select_from: SelectFrom,
}

/// Declared subset of `F(T)` used for sampling fixed points.
#[derive(Debug, Clone, PartialEq)]
pub enum FixedSet {
    Point(Primal),
    Polyhedron(Polyhedron),
}

impl FixedSet {
    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        match self {
            FixedSet::Point(p) => crate::vecops::dist2(p.coords(), z) <= tol,
            FixedSet::Polyhedron(k) => k.contains(z, tol),
        }
    }

    /// A representative fixed point.
    pub fn anchor(&self) -> &Primal {
        match self {
            FixedSet::Point(p) => p,
            FixedSet::Polyhedron(k) => k.witness(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RqneWitness {
    pub x: Primal,
    pub p: Primal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RqneReport {
    /// `max Φ(P_T p, P_T x) − φ(p, x)` over the draws; positive is a violation.
    pub max_violation: f64,
    /// The worst draw, present when `max_violation > 0`.
    pub witness: Option<RqneWitness>,
}

impl MultivaluedMap {
    /// `Tx = [c, c + β(x − c)]` with `β ∈ (0, 1]`.
    pub fn segment_contraction(center: Primal, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::invalid(
                "beta",
                format!("must lie in (0, 1], got {beta}"),
            ));
        }
        Ok(Self::segment_contraction_unchecked(center, beta))
    }

    /// Skips the bound on `beta`. A factor above 1 expands away from the
    /// center, so the result is not in the admissible class; meant for
    /// exercising the violation detectors.
    pub fn segment_contraction_unchecked(center: Primal, beta: f64) -> Self {
        Self {
            kind: Kind::Segment { center, beta },
            select_from: SelectFrom::Pt,
        }
    }

    /// `Tx = {Π_K x}` with fixed set `K`.
    pub fn projection(k: Polyhedron) -> Self {
        Self {
            kind: Kind::Projection { k },
            select_from: SelectFrom::Pt,
        }
    }

    /// `Tx = {Mx + t}`. Admitted only if `fixed_point` is fixed and
    /// `φ(p, Mx + t) ≤ φ(p, x)` holds on 1000 sampled `x`.
    pub fn affine(
        space: &LpSpace,
        m: DMatrix<f64>,
        t: Vec<f64>,
        fixed_point: Primal,
    ) -> Result<Self> {
        let d = space.dim();
        check_dim(d, fixed_point.dim())?;
        check_dim(d, t.len())?;
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::invalid(
                "M",
                format!("expected {d}x{d}, got {}x{}", m.nrows(), m.ncols()),
            ));
        }
        if m.iter().chain(&t).any(|v| !v.is_finite()) {
            return Err(Error::invalid("M", "entries must be finite"));
        }
        let mp = &m * DVector::from_column_slice(fixed_point.coords());
        let moved: Vec<f64> = mp.iter().zip(&t).map(|(a, b)| a + b).collect();
        let gap = crate::vecops::dist2(&moved, fixed_point.coords());
        if gap > 1e-10 * (1.0 + crate::vecops::max_abs(fixed_point.coords())) {
            return Err(Error::invalid(
                "fixed_point",
                format!("is moved by {gap:e}"),
            ));
        }
        let map = Self {
            kind: Kind::Affine { m, t, fixed_point },
            select_from: SelectFrom::Pt,
        };
        let report = check_rqne(space, &map, 1000, 0, &SolverSettings::default())?;
        if report.max_violation > 1e-9 {
            return Err(Error::invalid(
                "M",
                format!(
                    "not relatively quasi-nonexpansive (violation {:e})",
                    report.max_violation
                ),
            ));
        }
        Ok(map)
    }

    pub fn with_selection(mut self, select_from: SelectFrom) -> Self {
        self.select_from = select_from;
        self
    }

    pub fn selection(&self) -> SelectFrom {
        self.select_from
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::Segment { center, .. } => center.dim(),
            Kind::Projection { k } => k.dim(),
            Kind::Affine { t, .. } => t.len(),
        }
    }

    /// Every image is a single point.
    pub fn is_single_valued(&self) -> bool {
        !matches!(self.kind, Kind::Segment { .. })
    }

    /// For segment maps with `β = 1`, `F(T)` is the whole space; the declared
    /// set is `{c}`, which is all the iteration needs.
    pub fn fixed_set(&self) -> FixedSet {
        match &self.kind {
            Kind::Segment { center, .. } => FixedSet::Point(center.clone()),
            Kind::Projection { k } => FixedSet::Polyhedron(k.clone()),
            Kind::Affine { fixed_point, .. } => FixedSet::Point(fixed_point.clone()),
        }
    }

    fn apply_affine(&self, x: &[f64]) -> Vec<f64> {
        // Written as p + M(x − p), which equals Mx + t and maps p to itself
        // without rounding.
        let Kind::Affine { m, fixed_point, .. } = &self.kind else {
            unreachable!()
        };
        let p = fixed_point.coords();
        let dx = DVector::from_iterator(x.len(), x.iter().zip(p).map(|(a, b)| a - b));
        (m * dx).iter().zip(p).map(|(a, b)| a + b).collect()
    }

    fn segment_point(center: &Primal, s: f64, x: &[f64]) -> Primal {
        Primal::from_raw(
            center
                .coords()
                .iter()
                .zip(x)
                .map(|(c, xi)| c + s * (xi - c))
                .collect(),
        )
    }

    /// `Tx`.
    pub fn image(
        &self,
        space: &LpSpace,
        x: &Primal,
        settings: &SolverSettings,
    ) -> Result<PointSet> {
        check_dim(self.dim(), x.dim())?;
        match &self.kind {
            Kind::Segment { center, beta } => PointSet::segment(
                center.clone(),
                Self::segment_point(center, *beta, x.coords()),
            ),
            _ => Ok(PointSet::singleton(self.evaluate_pt(space, x, settings)?)),
        }
    }

    /// The nearest point of `Tx` to `x`. On a segment map the distance from
    /// `c + s(x − c)` to `x` is `(1 − s)‖x − c‖`, minimized at `s = β`.
    pub fn evaluate_pt(
        &self,
        space: &LpSpace,
        x: &Primal,
        settings: &SolverSettings,
    ) -> Result<Primal> {
        check_dim(self.dim(), x.dim())?;
        match &self.kind {
            Kind::Segment { center, beta } => Ok(Self::segment_point(center, *beta, x.coords())),
            Kind::Projection { k } => Ok(generalized_projection(space, k, x, settings)?.point),
            Kind::Affine { .. } => Ok(Primal::from_raw(self.apply_affine(x.coords()))),
        }
    }

    /// The element of `Tx` chosen by the configured [`SelectFrom`] rule.
    pub fn select(&self, space: &LpSpace, x: &Primal, settings: &SolverSettings) -> Result<Primal> {
        match (&self.kind, self.select_from) {
            (Kind::Segment { center, beta }, SelectFrom::ImageMidpoint) => {
                check_dim(self.dim(), x.dim())?;
                Ok(Self::segment_point(center, 0.5 * beta, x.coords()))
            }
            _ => self.evaluate_pt(space, x, settings),
        }
    }

    /// `‖x − P_T x‖`.
    pub fn fix_residual(
        &self,
        space: &LpSpace,
        x: &Primal,
        settings: &SolverSettings,
    ) -> Result<f64> {
        let z = self.evaluate_pt(space, x, settings)?;
        let diff: Vec<f64> = x
            .coords()
            .iter()
            .zip(z.coords())
            .map(|(a, b)| a - b)
            .collect();
        Ok(space.norm_raw(&diff))
    }
}

fn draw_fixed_point(
    fixed: &FixedSet,
    rng: &mut ChaCha8Rng,
    settings: &SolverSettings,
) -> Result<Primal> {
    match fixed {
        FixedSet::Point(p) => Ok(p.clone()),
        FixedSet::Polyhedron(k) => {
            let seed = rng.gen();
            let mut pts = k.sample_points(1, seed, settings)?;
            Ok(Primal::from_raw(pts.remove(0)))
        }
    }
}

/// Samples `x` from the cube of half-width [`SAMPLE_RADIUS`] around the fixed
/// set's anchor and `p` from the declared fixed set, and reports the largest
/// `Φ(P_T p, P_T x) − φ(p, x)`.
pub fn check_rqne(
    space: &LpSpace,
    map: &MultivaluedMap,
    samples: usize,
    seed: u64,
    settings: &SolverSettings,
) -> Result<RqneReport> {
    if samples == 0 {
        return Err(Error::invalid("samples", "must be ≥ 1"));
    }
    check_dim(space.dim(), map.dim())?;
    let fixed = map.fixed_set();
    let anchor = fixed.anchor().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for _ in 0..samples {
        let x = Primal::from_raw(
            anchor
                .coords()
                .iter()
                .map(|a| a + rng.gen_range(-SAMPLE_RADIUS..=SAMPLE_RADIUS))
                .collect(),
        );
        let p = draw_fixed_point(&fixed, &mut rng, settings)?;
        let tx = PointSet::singleton(map.evaluate_pt(space, &x, settings)?);
        let tp = PointSet::singleton(map.evaluate_pt(space, &p, settings)?);
        let lhs = space.capital_phi(&tp, &tx)?.value;
        let gap = lhs - space.phi(&p, &x)?;
        if gap > worst {
            worst = gap;
            witness = Some(RqneWitness { x, p });
        }
    }
    Ok(RqneReport {
        max_violation: worst,
        witness: if worst > 0.0 { witness } else { None },
    })
}
