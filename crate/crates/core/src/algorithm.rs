//! The shrinking projection iteration.
//!
//! ```text
//! z_{n,i} ∈ P_{T_i} x_n
//! y_n     = J⁻¹(a_{n,0} J x_n + Σ a_{n,i} J z_{n,i})
//! u_n     = S_{r_n} y_n
//! C_{n+1} = { z ∈ C_n : φ(z, u_n) ≤ φ(z, x_n) }
//! x_{n+1} = Π_{C_{n+1}} x_0
//! ```
//!
//! Each `C_{n+1}` is `C_n` plus one half-space, since the quadratic terms in
//! `φ(z, u_n) ≤ φ(z, x_n)` cancel.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::convex::{
    euclidean_project, generalized_projection_from, HalfSpace, Polyhedron, SolverSettings,
};
use crate::equilibrium::{ep_residual_at, resolvent_certified, Bifunction, CERTIFICATE_SAMPLES};
use crate::error::{check_dim, Error, Result};
use crate::mappings::MultivaluedMap;
use crate::space::{Dual, LpSpace, Primal};
use crate::vecops;

type WeightFn = Arc<dyn Fn(usize) -> Vec<f64> + Send + Sync>;
type StepFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// `n ↦ (a_{n,0}, …, a_{n,m})`, renormalized to sum to 1 at every step.
#[derive(Clone)]
pub enum WeightSchedule {
    /// `a_0` on `x_n`, `(1 − a_0)/m` on each map.
    Uniform {
        a0: f64,
    },
    Constant(Vec<f64>),
    /// Arbitrary schedule; every step must satisfy `a_{n,0} a_{n,i} ≥ w_min`.
    Custom {
        weights: WeightFn,
        w_min: f64,
    },
}

/// `n ↦ r_n`.
#[derive(Clone)]
pub enum RSchedule {
    Constant(f64),
    /// Every step must satisfy `r_n ≥ r_min > 0`.
    Custom {
        r: StepFn,
        r_min: f64,
    },
}

impl fmt::Debug for WeightSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSchedule::Uniform { a0 } => f.debug_struct("Uniform").field("a0", a0).finish(),
            WeightSchedule::Constant(w) => f.debug_tuple("Constant").field(w).finish(),
            WeightSchedule::Custom { w_min, .. } => f
                .debug_struct("Custom")
                .field("w_min", w_min)
                .finish_non_exhaustive(),
        }
    }
}

impl fmt::Debug for RSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RSchedule::Constant(r) => f.debug_tuple("Constant").field(r).finish(),
            RSchedule::Custom { r_min, .. } => f
                .debug_struct("Custom")
                .field("r_min", r_min)
                .finish_non_exhaustive(),
        }
    }
}

impl Default for WeightSchedule {
    fn default() -> Self {
        WeightSchedule::Uniform { a0: 0.5 }
    }
}

impl Default for RSchedule {
    fn default() -> Self {
        RSchedule::Constant(1.0)
    }
}

/// Normalizes `w` to sum to 1. Returns the original sum.
pub fn normalize_weights(w: &mut [f64]) -> Result<f64> {
    if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::invalid("weights", "must be finite and nonnegative"));
    }
    let sum: f64 = w.iter().sum();
    if sum <= 0.0 {
        return Err(Error::invalid("weights", "must not all be zero"));
    }
    if sum != 1.0 {
        w.iter_mut().for_each(|v| *v /= sum);
    }
    Ok(sum)
}

impl WeightSchedule {
    /// The normalized weights at step `n` for `m` maps.
    pub fn at(&self, n: usize, m: usize) -> Result<Vec<f64>> {
        let (mut w, w_min) = match self {
            WeightSchedule::Uniform { a0 } => {
                if !(*a0 > 0.0 && *a0 < 1.0) {
                    return Err(Error::invalid(
                        "a0",
                        format!("must lie in (0, 1), got {a0}"),
                    ));
                }
                let mut w = vec![(1.0 - a0) / m as f64; m + 1];
                w[0] = *a0;
                (w, 0.0)
            }
            WeightSchedule::Constant(w) => (w.clone(), 0.0),
            WeightSchedule::Custom { weights, w_min } => (weights(n), *w_min),
        };
        if w.len() != m + 1 {
            return Err(Error::invalid(
                "weights",
                format!(
                    "expected {} entries (one for x_n, one per map), got {}",
                    m + 1,
                    w.len()
                ),
            ));
        }
        normalize_weights(&mut w)?;
        let worst = w[1..]
            .iter()
            .map(|a| w[0] * a)
            .fold(f64::INFINITY, f64::min);
        if !(worst > 0.0 && worst >= w_min) {
            return Err(Error::invalid(
                "weights",
                format!("a_0 a_i = {worst:e} at step {n} violates the lower bound {w_min:e}"),
            ));
        }
        Ok(w)
    }
}

impl RSchedule {
    pub fn at(&self, n: usize) -> Result<f64> {
        let (r, r_min) = match self {
            RSchedule::Constant(r) => (*r, 0.0),
            RSchedule::Custom { r, r_min } => (r(n), *r_min),
        };
        if !(r > 0.0 && r.is_finite() && r >= r_min) {
            return Err(Error::invalid(
                "r",
                format!("r_{n} = {r} must be positive and at least {r_min}"),
            ));
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `z_{n,i} = P_{T_i} x_n`.
    #[default]
    MultivaluedPt,
    /// `z_{n,i}` from each map's configured selection rule.
    MultivaluedDirect,
    /// Every map must be single-valued.
    SingleValued,
    /// `p = 2` only: linear combinations and Euclidean projections in place
    /// of the duality map and generalized projections.
    Hilbert,
}

#[derive(Debug, Clone)]
pub struct AlgorithmConfig {
    pub space: LpSpace,
    pub c: Polyhedron,
    pub maps: Vec<MultivaluedMap>,
    pub f: Bifunction,
    pub weights: WeightSchedule,
    pub r: RSchedule,
    pub x0: Primal,
    pub stop_tol: f64,
    pub max_outer: usize,
    pub variant: Variant,
    pub settings: SolverSettings,
    /// Record `y_n` in the diagnostics.
    pub log_y: bool,
}

impl AlgorithmConfig {
    /// Defaults: `F = 0`, `a_0 = ½`, `r_n = 1`, `stop_tol = 1e-8`,
    /// `max_outer = 1000`.
    pub fn new(space: LpSpace, c: Polyhedron, maps: Vec<MultivaluedMap>, x0: Primal) -> Self {
        Self {
            space,
            c,
            maps,
            f: Bifunction::Zero,
            weights: WeightSchedule::default(),
            r: RSchedule::default(),
            x0,
            stop_tol: 1e-8,
            max_outer: 1000,
            variant: Variant::default(),
            settings: SolverSettings::default(),
            log_y: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.space.dim();
        check_dim(d, self.c.dim())?;
        check_dim(d, self.x0.dim())?;
        if let Some(fd) = self.f.dim() {
            check_dim(d, fd)?;
        }
        if self.maps.is_empty() {
            return Err(Error::invalid("maps", "at least one map is required"));
        }
        for m in &self.maps {
            check_dim(d, m.dim())?;
        }
        let violation = self.c.max_violation(self.x0.coords());
        if violation > crate::convex::WITNESS_TOL {
            return Err(Error::invalid(
                "x0",
                format!("must lie in C (violation {violation:e})"),
            ));
        }
        if !(self.stop_tol > 0.0 && self.stop_tol.is_finite()) {
            return Err(Error::invalid("stop_tol", "must be positive"));
        }
        if self.max_outer == 0 {
            return Err(Error::invalid("max_outer", "must be at least 1"));
        }
        self.settings.validate()?;
        match self.variant {
            Variant::Hilbert if !self.space.is_hilbert() => {
                return Err(Error::invalid(
                    "variant",
                    "the Hilbert variant requires p = 2",
                ));
            }
            Variant::SingleValued if self.maps.iter().any(|m| !m.is_single_valued()) => {
                return Err(Error::invalid(
                    "variant",
                    "single_valued requires single-valued maps",
                ));
            }
            _ => {}
        }
        self.weights.at(0, self.maps.len())?;
        self.r.at(0)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub n: usize,
    /// `‖x_{n+1} − x_n‖`.
    pub step_norm: f64,
    /// `φ(x_n, x_0)`.
    pub phi_to_x0: f64,
    /// `φ(x_{n+1}, u_n)`.
    pub phi_next_to_u: f64,
    /// `φ(x_{n+1}, x_n)`.
    pub phi_next_to_x: f64,
    /// `‖x_n − P_{T_i} x_n‖` per map.
    pub fix_residuals: Vec<f64>,
    /// `min_y F(u_n, y)` over the certificate points of `C`.
    pub ep_res: f64,
    /// Inner solver iterations for the resolvent and the projection.
    pub inner_iters: usize,
    pub cut_count: usize,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub x_next: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
}

/// `{z : φ(z, u) ≤ φ(z, x)} = {z : ⟨z, Jx − Ju⟩ ≤ (‖x‖² − ‖u‖²)/2}`; vacuous
/// when `x = u`.
pub fn halfspace_from_pair(space: &LpSpace, x: &Primal, u: &Primal) -> Result<HalfSpace> {
    check_dim(space.dim(), x.dim())?;
    check_dim(space.dim(), u.dim())?;
    if x == u {
        return Ok(HalfSpace::vacuous(space.dim()));
    }
    let a = vecops::sub(&space.j(x.coords()), &space.j(u.coords()));
    let b = 0.5 * (space.norm_sq_raw(x.coords()) - space.norm_sq_raw(u.coords()));
    if a.iter().all(|v| *v == 0.0) {
        // J is injective, so this only happens through underflow.
        return HalfSpace::new(Dual::from_raw(a), b.max(0.0));
    }
    HalfSpace::new(Dual::from_raw(a), b)
}

/// `x_n` and `C_n` together with the history that produced them.
#[derive(Debug, Clone)]
pub struct IterationState {
    pub n: usize,
    pub x: Primal,
    pub cuts: Vec<HalfSpace>,
    pub cn: Polyhedron,
    pub trace: Vec<StepDiagnostics>,
    c_points: Vec<Vec<f64>>,
}

impl IterationState {
    pub fn new(config: &AlgorithmConfig) -> Result<Self> {
        config.validate()?;
        let c_points = config.c.certificate_points(
            CERTIFICATE_SAMPLES,
            config.settings.seed,
            &config.settings,
        )?;
        Ok(Self {
            n: 0,
            x: config.x0.clone(),
            cuts: Vec::new(),
            cn: config.c.clone(),
            trace: Vec::new(),
            c_points,
        })
    }
}

/// Advances `state` by one iteration. On error `state` is left unchanged and
/// the error carries the step index.
pub fn step(state: &mut IterationState, config: &AlgorithmConfig) -> Result<()> {
    let n = state.n;
    let (next, diag) = compute_step(state, config).map_err(|e| e.at_step(n))?;
    state.cuts.push(next.1);
    state.cn = next.0;
    state.x = Primal::from_raw(diag.x_next.clone());
    state.trace.push(diag);
    state.n += 1;
    Ok(())
}

fn compute_step(
    state: &IterationState,
    config: &AlgorithmConfig,
) -> Result<((Polyhedron, HalfSpace), StepDiagnostics)> {
    let space = &config.space;
    let settings = &config.settings;
    let hilbert = config.variant == Variant::Hilbert;
    let n = state.n;
    let x = &state.x;
    let m = config.maps.len();
    let w = config.weights.at(n, m)?;
    let r = config.r.at(n)?;

    let mut fix_residuals = Vec::with_capacity(m);
    let mut zs = Vec::with_capacity(m);
    for map in &config.maps {
        let pt = map.evaluate_pt(space, x, settings)?;
        fix_residuals.push(space.norm_raw(&vecops::sub(x.coords(), pt.coords())));
        zs.push(match config.variant {
            Variant::MultivaluedDirect => map.select(space, x, settings)?,
            _ => pt,
        });
    }

    let y = if hilbert {
        let mut y: Vec<f64> = x.coords().iter().map(|v| w[0] * v).collect();
        for (wi, z) in w[1..].iter().zip(&zs) {
            vecops::axpy(*wi, z.coords(), &mut y);
        }
        y
    } else {
        let mut jy: Vec<f64> = space.j(x.coords()).iter().map(|v| w[0] * v).collect();
        for (wi, z) in w[1..].iter().zip(&zs) {
            vecops::axpy(*wi, &space.j(z.coords()), &mut jy);
        }
        space.j_inv(&jy)
    };
    let y = Primal::from_raw(y);

    let (u, resolvent_iters) = if hilbert && config.f == Bifunction::Zero {
        (euclidean_project(&config.c, &y, settings)?, 0)
    } else {
        let res = resolvent_certified(
            space,
            &config.c,
            &config.f,
            r,
            &y,
            settings,
            &state.c_points,
        )?;
        (res.u, res.inner_iters)
    };

    let cut = if hilbert {
        hilbert_halfspace(x, &u)?
    } else {
        halfspace_from_pair(space, x, &u)?
    };
    let cn = state
        .cn
        .with_cut(cut.clone(), &[x.coords(), u.coords()], settings)?;
    let (x_next, proj_iters) = if hilbert {
        (euclidean_project(&cn, &config.x0, settings)?, 0)
    } else {
        let start = euclidean_project(&cn, &config.x0, settings)?;
        let gp = generalized_projection_from(space, &cn, &config.x0, &start, settings)?;
        (gp.point, gp.iterations)
    };

    let diag = StepDiagnostics {
        n,
        step_norm: space.norm_raw(&vecops::sub(x_next.coords(), x.coords())),
        phi_to_x0: space.phi_raw(x.coords(), config.x0.coords()),
        phi_next_to_u: space.phi_raw(x_next.coords(), u.coords()),
        phi_next_to_x: space.phi_raw(x_next.coords(), x.coords()),
        fix_residuals,
        ep_res: ep_residual_at(&config.c, &config.f, &u, &state.c_points)?,
        inner_iters: resolvent_iters + proj_iters,
        cut_count: state.cuts.len() + 1,
        x: x.coords().to_vec(),
        u: u.into_coords(),
        x_next: x_next.into_coords(),
        y: config.log_y.then(|| y.into_coords()),
    };
    Ok(((cn, cut), diag))
}

/// `{z : ⟨z, x − u⟩ ≤ (‖x‖₂² − ‖u‖₂²)/2}`, the perpendicular bisector cut.
fn hilbert_halfspace(x: &Primal, u: &Primal) -> Result<HalfSpace> {
    if x == u {
        return Ok(HalfSpace::vacuous(x.dim()));
    }
    let a = vecops::sub(x.coords(), u.coords());
    let b = 0.5 * (vecops::dot(x.coords(), x.coords()) - vecops::dot(u.coords(), u.coords()));
    HalfSpace::new(Dual::from_raw(a), b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    #[serde(rename = "final")]
    pub final_point: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub trace: Vec<StepDiagnostics>,
}

/// Iterates until `‖x_{n+1} − x_n‖ ≤ stop_tol` or `max_outer` steps.
pub fn run(config: &AlgorithmConfig) -> Result<RunOutcome> {
    let mut state = IterationState::new(config)?;
    let mut converged = false;
    while state.n < config.max_outer {
        step(&mut state, config)?;
        let last = state.trace.last().expect("a step was just taken");
        log::debug!(
            "n={} step={:.3e} phi_to_x0={:.6e} cuts={}",
            last.n,
            last.step_norm,
            last.phi_to_x0,
            last.cut_count
        );
        if last.step_norm <= config.stop_tol {
            converged = true;
            break;
        }
    }
    Ok(RunOutcome {
        final_point: state.x.into_coords(),
        converged,
        iterations: state.n,
        trace: state.trace,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Worst margin seen; positive means violated by that much.
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceReport {
    pub checks: Vec<TraceCheck>,
}

impl TraceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&TraceCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn verdict(name: &'static str, worst: f64) -> TraceCheck {
    TraceCheck {
        name,
        passed: worst <= 0.0,
        worst,
    }
}

/// Checks a trace against the iteration's structural guarantees, rebuilding
/// the cuts from the recorded `(x_n, u_n)`:
///
/// * `monotone`: `φ(x_n, x_0)` nondecreasing up to `10·tol`;
/// * `cut_order`: `φ(x_{n+1}, u_n) ≤ φ(x_{n+1}, x_n) + 10·tol`;
/// * `nesting`: every cut holds at every later iterate within `10·tol`;
/// * `solution_retained`: `known` satisfies every cut within `10·tol`;
/// * `terminal_residuals`: when the last step met `stop_tol`, fix residuals
///   are at most `100·stop_tol` and `ep_res ≥ −100·stop_tol`.
pub fn verify_trace(
    trace: &[StepDiagnostics],
    config: &AlgorithmConfig,
    known: Option<&Primal>,
) -> Result<TraceReport> {
    if trace.is_empty() {
        return Err(Error::invalid("trace", "must be nonempty"));
    }
    let space = &config.space;
    let slack = 10.0 * config.settings.tol;

    let monotone = trace
        .windows(2)
        .map(|w| w[0].phi_to_x0 - w[1].phi_to_x0 - slack)
        .fold(f64::NEG_INFINITY, f64::max);
    let cut_order = trace
        .iter()
        .map(|s| s.phi_next_to_u - s.phi_next_to_x - slack)
        .fold(f64::NEG_INFINITY, f64::max);

    let cuts = trace
        .iter()
        .map(|s| {
            let x = Primal::try_new(s.x.clone())?;
            let u = Primal::try_new(s.u.clone())?;
            if config.variant == Variant::Hilbert {
                hilbert_halfspace(&x, &u)
            } else {
                halfspace_from_pair(space, &x, &u)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut nesting = f64::NEG_INFINITY;
    for (k, cut) in cuts.iter().enumerate() {
        for later in &trace[k..] {
            nesting = nesting.max(cut.slack(&later.x_next) - slack);
        }
    }

    let mut checks = vec![
        verdict("monotone", monotone.max(-slack)),
        verdict("cut_order", cut_order),
        verdict("nesting", nesting),
    ];
    if let Some(u_star) = known {
        check_dim(space.dim(), u_star.dim())?;
        let worst = cuts
            .iter()
            .map(|c| c.slack(u_star.coords()) - slack)
            .fold(f64::NEG_INFINITY, f64::max);
        checks.push(verdict("solution_retained", worst));
    }
    let last = trace.last().expect("nonempty");
    if last.step_norm <= config.stop_tol {
        let bound = 100.0 * config.stop_tol;
        let fix = last.fix_residuals.iter().copied().fold(0.0, f64::max);
        checks.push(verdict(
            "terminal_residuals",
            (fix - bound).max(-last.ep_res - bound),
        ));
    }
    Ok(TraceReport { checks })
}

/// Largest Euclidean gap between matching `x_{n+1}` and `u_n` of two traces
/// over their common prefix.
pub fn trace_distance(a: &[StepDiagnostics], b: &[StepDiagnostics]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(s, t)| vecops::dist2(&s.x_next, &t.x_next).max(vecops::dist2(&s.u, &t.u)))
        .fold(0.0, f64::max)
}
