use proptest::prelude::*;

use shrinking_projection::algorithm::{halfspace_from_pair, normalize_weights};
use shrinking_projection::convex::{
    euclidean_project, generalized_projection, projection_certificate, BoxBounds, HalfSpace,
    Polyhedron, SolverSettings,
};
use shrinking_projection::equilibrium::{resolvent, Bifunction};
use shrinking_projection::space::{Dual, LpSpace, Primal};

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.5), Just(2.0), Just(3.0), Just(4.0), 1.1f64..6.0]
}

fn vector(d: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-r..r, d)
}

/// Dimension, exponent and two points.
fn pair() -> impl Strategy<Value = (LpSpace, Vec<f64>, Vec<f64>)> {
    (1usize..=4, exponent()).prop_flat_map(|(d, p)| {
        (
            Just(LpSpace::new(d, p).unwrap()),
            vector(d, 10.0),
            vector(d, 10.0),
        )
    })
}

/// A box with one cut through a neighbourhood of the origin, plus a point.
fn polytope() -> impl Strategy<Value = (LpSpace, Polyhedron, Vec<f64>)> {
    (1usize..=3, exponent()).prop_flat_map(|(d, p)| {
        (
            Just(LpSpace::new(d, p).unwrap()),
            0.5f64..5.0,
            vector(d, 1.0),
            0.0f64..2.0,
            vector(d, 8.0),
        )
            .prop_filter("nonzero normal", |(_, _, a, _, _)| {
                a.iter().any(|v| v.abs() > 1e-3)
            })
            .prop_map(|(space, radius, a, b, x)| {
                let d = space.dim();
                let cut = HalfSpace::new(Dual::new(a), b).unwrap();
                let poly = Polyhedron::new(
                    BoxBounds::cube(d, radius).unwrap(),
                    vec![cut],
                    Primal::zeros(d),
                )
                .unwrap();
                (space, poly, x)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn phi_is_squeezed_by_norms((space, x, y) in pair()) {
        let (x, y) = (Primal::new(x), Primal::new(y));
        let phi = space.phi(&x, &y).unwrap();
        let (nx, ny) = (space.norm(&x).unwrap(), space.norm(&y).unwrap());
        let slack = 1e-12 * (1.0 + (nx + ny).powi(2));
        prop_assert!((nx - ny).powi(2) <= phi + slack);
        prop_assert!(phi <= (nx + ny).powi(2) + slack);
    }

    #[test]
    fn duality_map_inverts((space, x, _y) in pair()) {
        let x = Primal::new(x);
        let jx = space.duality_map(&x).unwrap();
        let back = space.inverse_duality_map(&jx).unwrap();
        let scale = 1.0 + space.norm(&x).unwrap();
        for (a, b) in back.coords().iter().zip(x.coords()) {
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }
        let n2 = space.norm(&x).unwrap().powi(2);
        prop_assert!((space.pairing(&x, &jx).unwrap() - n2).abs() <= 1e-10 * (1.0 + n2));
    }

    #[test]
    fn cut_encodes_phi_comparison((space, x, u) in pair(), z in vector(4, 20.0)) {
        let z = &z[..space.dim()];
        let h = halfspace_from_pair(&space, &Primal::new(x.clone()), &Primal::new(u.clone())).unwrap();
        let z = Primal::new(z.to_vec());
        let gap = space.phi(&z, &Primal::new(u)).unwrap() - space.phi(&z, &Primal::new(x)).unwrap();
        prop_assert!((2.0 * h.slack(z.coords()) - gap).abs() <= 1e-9 * (1.0 + gap.abs()));
    }

    #[test]
    fn projection_is_feasible_certified_and_idempotent((space, poly, x) in polytope()) {
        let settings = SolverSettings::default();
        let x = Primal::new(x);
        let gp = generalized_projection(&space, &poly, &x, &settings).unwrap();
        prop_assert!(poly.max_violation(gp.point.coords()) <= 1e-9);
        prop_assert!(gp.certificate >= -10.0 * settings.tol, "certificate {}", gp.certificate);

        let points = poly.sample_points(50, 3, &settings).unwrap();
        prop_assert!(projection_certificate(&space, &x, &gp.point, &points) >= -10.0 * settings.tol);

        let again = generalized_projection(&space, &poly, &gp.point, &settings).unwrap();
        prop_assert_eq!(again.point, gp.point);
    }

    #[test]
    fn hilbert_projection_is_euclidean((_space, poly, x) in polytope()) {
        let settings = SolverSettings::default();
        let hilbert = LpSpace::hilbert(poly.dim()).unwrap();
        let x = Primal::new(x);
        let g = generalized_projection(&hilbert, &poly, &x, &settings).unwrap().point;
        let e = euclidean_project(&poly, &x, &settings).unwrap();
        for (a, b) in g.coords().iter().zip(e.coords()) {
            prop_assert!((a - b).abs() <= 10.0 * settings.tol);
        }
    }

    #[test]
    fn zero_bifunction_resolvent_is_projection((space, poly, x) in polytope(), r in 0.1f64..10.0) {
        let settings = SolverSettings::default();
        let x = Primal::new(x);
        let s = resolvent(&space, &poly, &Bifunction::Zero, r, &x, &settings).unwrap();
        let g = generalized_projection(&space, &poly, &x, &settings).unwrap();
        for (a, b) in s.u.coords().iter().zip(g.point.coords()) {
            prop_assert!((a - b).abs() <= 1e-7);
        }
    }

    #[test]
    fn normalized_weights_sum_to_one(mut w in proptest::collection::vec(0.01f64..10.0, 1..8)) {
        let before: f64 = w.iter().sum();
        let sum = normalize_weights(&mut w).unwrap();
        prop_assert!((sum - before).abs() <= 1e-12 * before);
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
}
