//! Randomized invariant suites behind `shrinkproj check`.
//!
//! Every check reduces to an excess `lhs − rhs − slack`; it passes when the
//! worst excess over all instances is `≤ 0`.

use std::fmt;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algorithm::{
    halfspace_from_pair, run, trace_distance, verify_trace, AlgorithmConfig, Variant,
};
use crate::convex::{
    euclidean_project, generalized_projection, minimize_convex, BoxBounds, FnObjective, HalfSpace,
    Polyhedron, SolverSettings,
};
use crate::equilibrium::{ep_residual, resolvent, resolvent_from, Bifunction};
use crate::error::{Error, Result};
use crate::mappings::{check_rqne, MultivaluedMap};
use crate::space::{Dual, LpSpace, PointSet, Primal};
use crate::vecops;

const EXPONENTS: [f64; 4] = [1.5, 2.0, 3.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Space,
    Convex,
    Equilibrium,
    Mappings,
    Algorithm,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Suite::Space => "space",
            Suite::Convex => "convex",
            Suite::Equilibrium => "equilibrium",
            Suite::Mappings => "mappings",
            Suite::Algorithm => "algorithm",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: &'static str,
    /// Largest `lhs − rhs − slack` seen.
    pub worst: f64,
    pub instances: usize,
    /// Description of the worst instance when the check failed.
    pub witness: Option<String>,
}

impl CheckLine {
    pub fn passed(&self) -> bool {
        self.instances > 0 && self.worst <= 0.0
    }
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{tag}] {:<28} worst excess {:+.3e} over {} instances",
            self.name, self.worst, self.instances
        )?;
        if let (false, Some(w)) = (self.passed(), &self.witness) {
            write!(f, "\n       witness: {w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub lines: Vec<CheckLine>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(CheckLine::passed)
    }

    pub fn line(&self, name: &str) -> Option<&CheckLine> {
        self.lines.iter().find(|l| l.name == name)
    }
}

/// Accumulates checks in first-seen order.
#[derive(Default)]
struct Tally {
    lines: Vec<CheckLine>,
}

impl Tally {
    fn record(&mut self, name: &'static str, excess: f64, witness: impl FnOnce() -> String) {
        let excess = if excess.is_nan() {
            f64::INFINITY
        } else {
            excess
        };
        let line = match self.lines.iter_mut().find(|l| l.name == name) {
            Some(l) => l,
            None => {
                self.lines.push(CheckLine {
                    name,
                    worst: f64::NEG_INFINITY,
                    instances: 0,
                    witness: None,
                });
                self.lines.last_mut().expect("just pushed")
            }
        };
        line.instances += 1;
        if excess > line.worst {
            line.worst = excess;
            if excess > 0.0 {
                line.witness = Some(witness());
            }
        }
    }
}

/// Runs `suite` and prints one line per invariant; returns 0 iff all pass.
pub fn cmd_check(suite: Suite, seed: u64, samples: usize, broken_fixture: bool) -> i32 {
    match run_suite(suite, seed, samples, broken_fixture) {
        Ok(report) => {
            println!("suite {suite} (seed {seed}, {samples} samples)");
            for line in &report.lines {
                println!("{line}");
            }
            if report.passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// `broken_fixture` adds a segment map with factor 1.2 to the mappings and
/// algorithm suites; it violates the admissibility condition by design.
pub fn run_suite(
    suite: Suite,
    seed: u64,
    samples: usize,
    broken_fixture: bool,
) -> Result<SuiteReport> {
    if samples == 0 {
        return Err(Error::invalid("samples", "samples must be ≥ 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::default();
    let settings = SolverSettings::default();
    match suite {
        Suite::Space => space_suite(&mut rng, samples, &mut tally)?,
        Suite::Convex => convex_suite(&mut rng, samples, &settings, &mut tally)?,
        Suite::Equilibrium => equilibrium_suite(&mut rng, samples, &settings, &mut tally)?,
        Suite::Mappings => {
            mappings_suite(&mut rng, samples, broken_fixture, &settings, &mut tally)?
        }
        Suite::Algorithm => algorithm_suite(&mut rng, samples, broken_fixture, &mut tally)?,
    }
    Ok(SuiteReport {
        suite,
        lines: tally.lines,
    })
}

fn random_space(rng: &mut ChaCha8Rng, max_dim: usize) -> LpSpace {
    let d = rng.gen_range(1..=max_dim);
    let p = *EXPONENTS.choose(rng).expect("nonempty");
    LpSpace::new(d, p).expect("valid exponent")
}

fn random_vec(rng: &mut ChaCha8Rng, d: usize, r: f64) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-r..=r)).collect()
}

/// A box of random half-width with up to three cuts, all containing the
/// origin.
fn random_polytope(rng: &mut ChaCha8Rng, d: usize) -> Result<Polyhedron> {
    let bounds = BoxBounds::cube(d, rng.gen_range(1.0..5.0))?;
    let hs = (0..rng.gen_range(0..=3))
        .map(|_| {
            let mut a = random_vec(rng, d, 1.0);
            if a.iter().all(|v| *v == 0.0) {
                a[0] = 1.0;
            }
            HalfSpace::new(Dual::new(a), rng.gen_range(0.05..2.0))
        })
        .collect::<Result<Vec<_>>>()?;
    Polyhedron::new(bounds, hs, Primal::zeros(d))
}

fn show(v: &[f64]) -> String {
    format!("{v:?}")
}

fn space_suite(rng: &mut ChaCha8Rng, samples: usize, tally: &mut Tally) -> Result<()> {
    for i in 0..samples {
        let space = random_space(rng, 4);
        let d = space.dim();
        let x = random_vec(rng, d, 5.0);
        let y = random_vec(rng, d, 5.0);
        let (nx, ny) = (space.norm_raw(&x), space.norm_raw(&y));
        let phi = space.phi_raw(&x, &y);
        let ctx = || format!("p={} x={} y={}", space.p(), show(&x), show(&y));

        let scale = (nx + ny).powi(2);
        tally.record(
            "phi_bounds",
            ((ny - nx).powi(2) - phi).max(phi - (nx + ny).powi(2)) - 1e-12 * (1.0 + scale),
            ctx,
        );
        tally.record("phi_self_zero", space.phi_raw(&x, &x), ctx);
        if x != y {
            tally.record(
                "phi_positive_off_diagonal",
                if phi > 0.0 { -phi } else { 1.0 },
                ctx,
            );
        }

        let jx = space.j(&x);
        let n2 = nx * nx;
        if n2 > 0.0 {
            tally.record(
                "duality_pairing",
                (vecops::dot(&x, &jx) - n2).abs() / n2 - 1e-10,
                ctx,
            );
            let dual_norm = crate::space::lp_norm(&jx, space.q());
            tally.record("duality_norm", (dual_norm - nx).abs() / nx - 1e-10, ctx);
            let back = space.j_inv(&jx);
            tally.record(
                "inverse_duality",
                vecops::dist2(&back, &x) / vecops::norm2(&x) - 1e-10,
                ctx,
            );
        }

        if x.iter().all(|v| v.abs() >= 1e-3) {
            let h = 1e-6;
            let half_sq = |z: &[f64]| 0.5 * space.norm_raw(z).powi(2);
            let mut worst: f64 = 0.0;
            for k in 0..d {
                let mut plus = x.clone();
                let mut minus = x.clone();
                plus[k] += h;
                minus[k] -= h;
                let fd = (half_sq(&plus) - half_sq(&minus)) / (2.0 * h);
                worst = worst.max((fd - jx[k]).abs());
            }
            tally.record("duality_finite_difference", worst - 1e-5 * (1.0 + nx), ctx);
        }

        let k = rng.gen_range(2..=4);
        let pts: Vec<Vec<f64>> = (0..k).map(|_| random_vec(rng, d, 5.0)).collect();
        let mut w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= s);
        let mut combo = vec![0.0; d];
        let mut rhs = 0.0;
        for (wi, pi) in w.iter().zip(&pts) {
            vecops::axpy(*wi, pi, &mut combo);
            rhs += wi * space.norm_raw(pi).powi(2);
        }
        tally.record(
            "convexity_without_modulus",
            space.norm_raw(&combo).powi(2) - rhs - 1e-12 * (1.0 + rhs),
            ctx,
        );

        // Segment sup/inf is the expensive part; a tenth of the draws suffice.
        if i % 10 == 0 {
            let hilbert = LpSpace::hilbert(d)?;
            let a =
                PointSet::segment(Primal::new(x.clone()), Primal::new(random_vec(rng, d, 5.0)))?;
            let b = if rng.gen_bool(0.5) {
                PointSet::singleton(Primal::new(y.clone()))
            } else {
                PointSet::segment(Primal::new(y.clone()), Primal::new(random_vec(rng, d, 5.0)))?
            };
            let phi_ab = hilbert.capital_phi(&a, &b)?.value;
            let h = hilbert.hausdorff(&a, &b)?.value;
            tally.record(
                "hilbert_phi_is_hausdorff_squared",
                (phi_ab - h * h).abs() - 1e-6 * (1.0 + h * h),
                || format!("A={a:?} B={b:?}"),
            );
        }
    }
    Ok(())
}

fn convex_suite(
    rng: &mut ChaCha8Rng,
    samples: usize,
    settings: &SolverSettings,
    tally: &mut Tally,
) -> Result<()> {
    let tol = settings.tol;
    for _ in 0..samples {
        let space = random_space(rng, 3);
        let d = space.dim();
        let poly = random_polytope(rng, d)?;
        let x = Primal::new(random_vec(rng, d, 8.0));
        let gp = generalized_projection(&space, &poly, &x, settings)?;
        let xbar = gp.point.coords();
        let ctx = || format!("p={} x={:?} poly={:?}", space.p(), x.coords(), poly);

        tally.record(
            "projection_feasible",
            poly.max_violation(xbar) - 10.0 * tol,
            ctx,
        );
        let ys = poly.sample_points(100, rng.gen(), settings)?;
        let jx = space.j(x.coords());
        let jbar = space.j(xbar);
        let dj = vecops::sub(&jx, &jbar);
        let mut cert = f64::INFINITY;
        let mut three_point = f64::NEG_INFINITY;
        for y in &ys {
            cert = cert.min(vecops::dot(&vecops::sub(xbar, y), &dj));
            three_point = three_point.max(
                space.phi_raw(y, xbar) + space.phi_raw(xbar, x.coords())
                    - space.phi_raw(y, x.coords()),
            );
        }
        tally.record("variational_characterization", -cert - 10.0 * tol, ctx);
        tally.record("three_point_inequality", three_point - 10.0 * tol, ctx);

        let again = generalized_projection(&space, &poly, &gp.point, settings)?;
        tally.record(
            "idempotence",
            vecops::dist2(again.point.coords(), xbar) - 10.0 * tol,
            ctx,
        );

        let hilbert = LpSpace::hilbert(d)?;
        let gh = generalized_projection(&hilbert, &poly, &x, settings)?;
        let eh = euclidean_project(&poly, &x, settings)?;
        tally.record(
            "hilbert_matches_euclidean",
            vecops::dist2(gh.point.coords(), eh.coords()) - 10.0 * tol,
            ctx,
        );
    }
    Ok(())
}

/// A random bifunction of each family, with strongly monotone data so that
/// equilibrium points can be computed to tolerance.
fn random_bifunction(rng: &mut ChaCha8Rng, d: usize) -> Result<Bifunction> {
    let b = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    let psd = b.transpose() * &b + DMatrix::identity(d, d) * 0.1;
    Ok(match rng.gen_range(0..3) {
        0 => Bifunction::Zero,
        1 => Bifunction::convex_cost(psd, Dual::new(random_vec(rng, d, 1.0)))?,
        _ => {
            let skew = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
            let skew = &skew - skew.transpose();
            Bifunction::monotone_operator(psd + skew, Dual::new(random_vec(rng, d, 1.0)))?
        }
    })
}

/// A point of `EP(F)`: any member of `C` for the zero bifunction, the
/// minimizer of the cost, or a fixed point of the resolvent otherwise.
fn equilibrium_point(
    space: &LpSpace,
    c: &Polyhedron,
    f: &Bifunction,
    settings: &SolverSettings,
) -> Result<Primal> {
    match f {
        Bifunction::Zero => Ok(c.witness().clone()),
        Bifunction::ConvexCost(cc) => {
            let obj = FnObjective {
                value: |y: &[f64]| cc.cost(y),
                gradient: |y: &[f64]| cc.gradient(y),
            };
            Ok(minimize_convex(&obj, c, settings, c.witness())?.point)
        }
        Bifunction::MonotoneOperator(_) => {
            let mut q = c.witness().clone();
            for _ in 0..2000 {
                let next = resolvent(space, c, f, 1.0, &q, settings)?.u;
                let moved = vecops::dist2(next.coords(), q.coords());
                q = next;
                if moved <= settings.tol {
                    break;
                }
            }
            Ok(q)
        }
    }
}

fn equilibrium_suite(
    rng: &mut ChaCha8Rng,
    samples: usize,
    settings: &SolverSettings,
    tally: &mut Tally,
) -> Result<()> {
    let tol = settings.tol;
    for _ in 0..samples {
        let space = random_space(rng, 3);
        let d = space.dim();
        let c = random_polytope(rng, d)?;
        let f = random_bifunction(rng, d)?;
        let r = rng.gen_range(0.5..2.0);
        let x = Primal::new(random_vec(rng, d, 5.0));
        let y = Primal::new(random_vec(rng, d, 5.0));
        let ctx = || {
            format!(
                "p={} r={r} F={f:?} x={:?} y={:?}",
                space.p(),
                x.coords(),
                y.coords()
            )
        };

        tally.record(
            "bifunction_vanishes_on_diagonal",
            f.eval(x.coords(), x.coords()).abs(),
            ctx,
        );
        let mono = f.eval(x.coords(), y.coords()) + f.eval(y.coords(), x.coords());
        tally.record(
            "bifunction_monotone",
            mono - 1e-12 * (1.0 + mono.abs()),
            ctx,
        );

        let sx = resolvent(&space, &c, &f, r, &x, settings)?.u;
        let sy = resolvent(&space, &c, &f, r, &y, settings)?.u;
        let ds = vecops::sub(sx.coords(), sy.coords());
        let lhs = vecops::dot(
            &ds,
            &vecops::sub(&space.j(sx.coords()), &space.j(sy.coords())),
        );
        let rhs = vecops::dot(
            &ds,
            &vecops::sub(&space.j(x.coords()), &space.j(y.coords())),
        );
        tally.record("firm_nonexpansiveness", lhs - rhs - 10.0 * tol, ctx);

        let other_start = Primal::new(c.sample_points(1, rng.gen(), settings)?.remove(0));
        let sx2 = resolvent_from(&space, &c, &f, r, &x, &other_start, settings)?.u;
        tally.record(
            "single_valued",
            vecops::dist2(sx.coords(), sx2.coords()) - 100.0 * tol,
            ctx,
        );

        let q = equilibrium_point(&space, &c, &f, settings)?;
        let ep = ep_residual(&c, &f, &q)?;
        let sq = resolvent(&space, &c, &f, r, &q, settings)?.u;
        let moved = vecops::dist2(sq.coords(), q.coords());
        if ep >= -tol {
            let gap = space.phi_raw(q.coords(), sx.coords())
                + space.phi_raw(sx.coords(), x.coords())
                - space.phi_raw(q.coords(), x.coords());
            tally.record("resolvent_inequality", gap - 100.0 * tol, ctx);
            tally.record("equilibria_are_fixed", moved - 100.0 * tol, ctx);
        }
        if moved <= 100.0 * tol {
            // At u = S_r q the resolvent condition gives
            // F(u, y) ≥ −tol − (1/r)⟨y − u, Ju − Jq⟩ for all y in C.
            let dj = vecops::dist2(&space.j(sq.coords()), &space.j(q.coords()));
            let bound = 10.0 * tol + c.bounds().diameter() * dj / r;
            tally.record(
                "fixed_points_are_equilibria",
                -ep_residual(&c, &f, &sq)? - bound,
                ctx,
            );
        }
    }
    Ok(())
}

fn random_map(rng: &mut ChaCha8Rng, space: &LpSpace) -> Result<MultivaluedMap> {
    let d = space.dim();
    match rng.gen_range(0..3) {
        0 => MultivaluedMap::segment_contraction(
            Primal::new(random_vec(rng, d, 3.0)),
            rng.gen_range(0.05..=1.0),
        ),
        1 => {
            let k = random_polytope(rng, d)?;
            // Shift the polytope so the fixed set is not always around 0.
            let shift = random_vec(rng, d, 2.0);
            let lower: Vec<f64> = k
                .bounds()
                .lower()
                .iter()
                .zip(&shift)
                .map(|(a, b)| a + b)
                .collect();
            let upper: Vec<f64> = k
                .bounds()
                .upper()
                .iter()
                .zip(&shift)
                .map(|(a, b)| a + b)
                .collect();
            let hs = k
                .halfspaces()
                .iter()
                .map(|h| {
                    HalfSpace::new(
                        h.normal().clone(),
                        h.offset() + vecops::dot(h.normal().coords(), &shift),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let shifted = Polyhedron::new(BoxBounds::new(lower, upper)?, hs, Primal::new(shift))?;
            Ok(MultivaluedMap::projection(shifted))
        }
        _ if space.is_hilbert() => {
            // Scaled rotation about a random point.
            let s = rng.gen_range(0.1..1.0);
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let m = DMatrix::from_fn(d, d, |i, j| {
                let rot = match (i, j) {
                    (0, 0) | (1, 1) => theta.cos(),
                    (0, 1) => -theta.sin(),
                    (1, 0) => theta.sin(),
                    _ if i == j => 1.0,
                    _ => 0.0,
                };
                s * rot
            });
            let p = random_vec(rng, d, 3.0);
            let mp = &m * nalgebra::DVector::from_column_slice(&p);
            let t: Vec<f64> = p.iter().zip(mp.iter()).map(|(a, b)| a - b).collect();
            MultivaluedMap::affine(space, m, t, Primal::new(p))
        }
        _ => MultivaluedMap::segment_contraction(
            Primal::new(random_vec(rng, d, 3.0)),
            rng.gen_range(0.05..=1.0),
        )
        .map(|m| m.with_selection(crate::mappings::SelectFrom::ImageMidpoint)),
    }
}

fn mappings_suite(
    rng: &mut ChaCha8Rng,
    samples: usize,
    broken_fixture: bool,
    settings: &SolverSettings,
    tally: &mut Tally,
) -> Result<()> {
    let draws_per_map = 10;
    let maps = samples.div_ceil(draws_per_map);
    for _ in 0..maps {
        let space = random_space(rng, 3);
        let map = random_map(rng, &space)?;
        let report = check_rqne(&space, &map, draws_per_map, rng.gen(), settings)?;
        tally.record(
            "relative_quasi_nonexpansive",
            report.max_violation - 1e-9,
            || format!("{map:?} witness={:?}", report.witness),
        );

        let x = Primal::new(random_vec(rng, space.dim(), 8.0));
        let ctx = || format!("p={} {map:?} x={:?}", space.p(), x.coords());
        let z = map.evaluate_pt(&space, &x, settings)?;
        let image = map.image(&space, &x, settings)?;
        tally.record(
            "best_approximation_in_image",
            if image.contains(z.coords(), 1e-12) {
                -1.0
            } else {
                1.0
            },
            ctx,
        );
        let dz = space.norm_raw(&vecops::sub(x.coords(), z.coords()));
        let nearest = (0..100)
            .map(|_| {
                let y = image.point_at(rng.gen());
                space.norm_raw(&vecops::sub(x.coords(), y.coords()))
            })
            .fold(f64::INFINITY, f64::min);
        tally.record(
            "best_approximation_nearest",
            dz - nearest - 1e-12 * (1.0 + dz),
            ctx,
        );

        let fixed = map.fixed_set();
        let p = fixed.anchor().clone();
        let exact_member = match &fixed {
            crate::mappings::FixedSet::Polyhedron(k) => k.max_violation(p.coords()) <= 0.0,
            crate::mappings::FixedSet::Point(_) => true,
        };
        if exact_member {
            let tp = map.evaluate_pt(&space, &p, settings)?;
            tally.record(
                "fixed_points_fixed",
                vecops::dist2(tp.coords(), p.coords()),
                ctx,
            );
        }
    }
    if broken_fixture {
        let space = LpSpace::hilbert(2)?;
        let broken = MultivaluedMap::segment_contraction_unchecked(Primal::zeros(2), 1.2);
        let report = check_rqne(&space, &broken, samples, rng.gen(), settings)?;
        tally.record(
            "broken_fixture_rejected_by_rqne",
            report.max_violation - 1e-9,
            || {
                let w = report
                    .witness
                    .as_ref()
                    .expect("positive violation has a witness");
                format!("factor 1.2 at x={:?}, p={:?}", w.x.coords(), w.p.coords())
            },
        );
    }
    Ok(())
}

fn algorithm_suite(
    rng: &mut ChaCha8Rng,
    samples: usize,
    broken_fixture: bool,
    tally: &mut Tally,
) -> Result<()> {
    for _ in 0..samples {
        let space = random_space(rng, 3);
        let d = space.dim();
        let x = Primal::new(random_vec(rng, d, 5.0));
        let u = Primal::new(random_vec(rng, d, 5.0));
        let z = random_vec(rng, d, 10.0);
        let h = halfspace_from_pair(&space, &x, &u)?;
        let gap = space.phi_raw(&z, u.coords()) - space.phi_raw(&z, x.coords());
        tally.record(
            "cut_matches_phi_comparison",
            (2.0 * h.slack(&z) - gap).abs() - 1e-9 * (1.0 + gap.abs()),
            || {
                format!(
                    "p={} x={:?} u={:?} z={z:?}",
                    space.p(),
                    x.coords(),
                    u.coords()
                )
            },
        );
    }

    let runs = samples.div_ceil(200).min(10);
    for _ in 0..runs {
        let space = random_space(rng, 3);
        let d = space.dim();
        let center = Primal::new(random_vec(rng, d, 2.0));
        let maps = vec![
            MultivaluedMap::segment_contraction(center.clone(), rng.gen_range(0.3..0.95))?,
            MultivaluedMap::segment_contraction(center.clone(), rng.gen_range(0.3..0.95))?,
        ];
        let c = Polyhedron::from_box(BoxBounds::cube(d, 6.0)?);
        let x0 = Primal::new(random_vec(rng, d, 5.0));
        let mut config = AlgorithmConfig::new(space, c, maps, x0);
        config.max_outer = 200;
        config.stop_tol = 1e-7;
        let out = run(&config)?;
        let report = verify_trace(&out.trace, &config, Some(&center))?;
        for check in report.checks {
            tally.record(check.name, check.worst, || {
                format!("p={} center={:?}", space.p(), center.coords())
            });
        }
        if space.is_hilbert() {
            let mut hilbert = config.clone();
            hilbert.variant = Variant::Hilbert;
            let other = run(&hilbert)?;
            tally.record(
                "hilbert_variant_agrees",
                trace_distance(&out.trace, &other.trace) - 10.0 * config.settings.tol,
                || format!("center={:?}", center.coords()),
            );
        }
    }

    if broken_fixture {
        let space = LpSpace::hilbert(2)?;
        let center = Primal::new([1.0, -1.0]);
        let maps = vec![MultivaluedMap::segment_contraction_unchecked(
            center.clone(),
            1.2,
        )];
        let c = Polyhedron::from_box(BoxBounds::cube(2, 10.0)?);
        let mut config = AlgorithmConfig::new(space, c, maps, Primal::new([3.0, 2.0]));
        config.max_outer = 20;
        let out = run(&config)?;
        let report = verify_trace(&out.trace, &config, Some(&center))?;
        let retained = report
            .check("solution_retained")
            .expect("known solution given");
        tally.record("broken_fixture_solution_retained", retained.worst, || {
            format!("factor 1.2 about {:?}", center.coords())
        });
    }
    Ok(())
}
