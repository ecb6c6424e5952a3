use proptest::prelude::*;

use projmed_core::classifier::{classify, vertex_objective_table, Coverage};
use projmed_core::io::{format_points, parse_points};
use projmed_core::objective::{evaluate, riemannian_gradient, tau_combination, Metric, WeightedPointSet};
use projmed_core::projective::{
    is_big, normalize_signs, random_triangle, sine_distance, triangle_from_angles, AngleTriple, TriangleConstraint,
    UnitVector, DEFAULT_ANGLE_TOL,
};
use projmed_core::solver::{solve, vertex_residual, SolverConfig, SolverStatus};

fn unit(dim: usize) -> impl Strategy<Value = UnitVector> {
    prop::collection::vec(-1.0f64..1.0, dim).prop_filter_map("zero vector", |v| UnitVector::normalize(v).ok())
}

fn point_set(max_n: usize) -> impl Strategy<Value = WeightedPointSet> {
    (2usize..=5).prop_flat_map(move |dim| {
        (1..=max_n).prop_flat_map(move |n| {
            (prop::collection::vec(unit(dim), n), prop::collection::vec(0.1f64..4.0, n))
                .prop_map(|(p, w)| WeightedPointSet::new(p, w).unwrap())
        })
    })
}

/// A point set together with a probe point of the same dimension.
fn probed(max_n: usize) -> impl Strategy<Value = (WeightedPointSet, UnitVector)> {
    point_set(max_n).prop_flat_map(|ps| {
        let d = ps.dim();
        (Just(ps), unit(d))
    })
}

fn flip(v: &UnitVector, yes: bool) -> UnitVector {
    if yes {
        v.neg()
    } else {
        v.clone()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sine_distance_is_a_projective_semimetric(a in unit(4), b in unit(4), c in unit(4)) {
        let d = |x: &UnitVector, y: &UnitVector| sine_distance(x, y).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &b), d(&a.neg(), &b));
        prop_assert!(d(&a, &a) == 0.0);
        prop_assert!((0.0..=1.0).contains(&d(&a, &b)));
        prop_assert!(d(&a, &b) <= d(&a, &c) + d(&b, &c) + 1e-15);
    }

    #[test]
    fn objective_is_even((ps, p) in probed(6)) {
        for m in [Metric::Sine, Metric::Angular] {
            let j = evaluate(&ps, &p, m).unwrap();
            let jn = evaluate(&ps, &p.neg(), m).unwrap();
            prop_assert!((j - jn).abs() <= 1e-12 * (1.0 + j));
            prop_assert!(j >= 0.0 && j <= ps.total_weight() * 2.0);
        }
    }

    #[test]
    fn gradient_is_tangent_and_matches_tau_combination((ps, p) in probed(6)) {
        prop_assume!(ps.points().iter().all(|v| v.dot(&p).abs() < 0.999));
        let g = riemannian_gradient(&ps, &p).unwrap();
        let along: f64 = g.direction.iter().zip(p.as_slice()).map(|(a, b)| a * b).sum();
        prop_assert!(along.abs() <= 1e-12 * (1.0 + g.norm()));
        let t = tau_combination(&ps, &p).unwrap();
        for (gi, ti) in g.direction.iter().zip(&t) {
            prop_assert!((gi + ti).abs() <= 1e-10 * (1.0 + g.norm()));
        }
    }

    #[test]
    fn classification_ignores_signs_and_order(seed in any::<u64>(), flips in any::<[bool; 3]>()) {
        let t = random_triangle(seed, TriangleConstraint::Any).unwrap();
        let lines = [flip(t.a(), flips[0]), flip(t.c(), flips[1]), flip(t.b(), flips[2])];
        let u = normalize_signs(lines).unwrap();
        prop_assert_eq!(is_big(&t), is_big(&u));
        let (s, r) = (classify(&t, DEFAULT_ANGLE_TOL).unwrap(), classify(&u, DEFAULT_ANGLE_TOL).unwrap());
        prop_assert_eq!(s.coverage, r.coverage);
        let vs: Vec<f64> = s.members.iter().map(|m| m.value).collect();
        let vr: Vec<f64> = r.members.iter().map(|m| m.value).collect();
        prop_assert_eq!(vs.len(), vr.len());
        for (x, y) in vs.iter().zip(&vr) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn covered_solution_values_are_vertex_optimal(seed in any::<u64>()) {
        let t = random_triangle(seed, TriangleConstraint::Any).unwrap();
        let ss = classify(&t, DEFAULT_ANGLE_TOL).unwrap();
        prop_assume!(ss.coverage != Coverage::NotCovered);
        let best = vertex_objective_table(&t).into_iter().fold(f64::INFINITY, f64::min);
        for m in &ss.members {
            prop_assert!(m.value <= best + 1e-9);
        }
    }

    #[test]
    fn points_file_round_trips(pts in prop::collection::vec(unit(3), 1..8)) {
        let back = parse_points(&format_points(&pts)).unwrap();
        prop_assert_eq!(back.len(), pts.len());
        for (a, b) in pts.iter().zip(&back) {
            prop_assert!(a.projectively_eq(b));
        }
    }

    #[test]
    fn equilateral_realizable_below_ninety(phi in 1.0f64..89.9) {
        prop_assert!(triangle_from_angles(&AngleTriple::from_degrees(phi, phi, phi).unwrap()).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solver_never_loses_to_data_points(ps in point_set(5), seed in 0u64..1000) {
        let cfg = SolverConfig { seed, restarts: 6, ..SolverConfig::default() };
        let r = solve(&ps, &cfg).unwrap();
        for v in ps.points() {
            prop_assert!(r.value <= evaluate(&ps, v, Metric::Sine).unwrap() + 1e-9);
        }
        prop_assert!((evaluate(&ps, &r.minimizer, Metric::Sine).unwrap() - r.value).abs() < 1e-12);
        if let SolverStatus::Vertex(i) = r.status {
            prop_assert!(r.minimizer.projectively_eq(&ps.points()[i]));
            prop_assert!(vertex_residual(&ps, i, Metric::Sine) <= r.residual + 1e-12);
        }
    }

    #[test]
    fn solver_is_deterministic(ps in point_set(4), seed in 0u64..1000) {
        let cfg = SolverConfig { seed, restarts: 4, ..SolverConfig::default() };
        prop_assert_eq!(solve(&ps, &cfg).unwrap(), solve(&ps, &cfg).unwrap());
    }
}
