//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use projmed_core::classifier::{classify, vertex_objective_table, Label};
use projmed_core::lemma_lab::{
    verify_chain_identities, verify_discriminant_signs, verify_ideal_membership, verify_ideal_membership_exact,
    verify_reduced_minima, IdentityReport,
};
use projmed_core::objective::{evaluate, riemannian_gradient, Metric, WeightedPointSet};
use projmed_core::oracle::{build_grid, certified_min_on, oracle_agrees, DEFAULT_REFINE};
use projmed_core::projective::{
    centroid, is_big, random_triangle, sine_distance, triangle_from_angles, Angle, AngleTriple, TriangleConstraint,
    UnitVector, DEFAULT_ANGLE_TOL,
};

const GRID: usize = 100_000;
const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> UnitVector {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(u) = UnitVector::normalize(v) {
            return u;
        }
    }
}

fn line_gap(p: &UnitVector, q: &UnitVector) -> f64 {
    p.dot(q).abs().min(1.0).acos()
}

fn equilateral_phase() -> Outcome {
    let grid = build_grid(GRID).unwrap();
    let reach = 2.0 * grid.covering_radius().0;
    let mut fails = Vec::new();
    for phi in [50.0, 55.0, 59.0, 60.0, 61.0, 65.0, 80.0] {
        let t = triangle_from_angles(&AngleTriple::from_degrees(phi, phi, phi).unwrap()).unwrap();
        let ps = WeightedPointSet::triangle(&t);
        let cb = certified_min_on(&ps, &grid, DEFAULT_REFINE).unwrap();
        let ss = classify(&t, DEFAULT_ANGLE_TOL).unwrap();
        let e = centroid(&t).unwrap();
        let j_e = evaluate(&ps, &e, Metric::Sine).unwrap();
        let j_v = vertex_objective_table(&t);
        let near_e = line_gap(&cb.argmin_cell, &e) <= reach;
        let near_v = t.vertices().iter().any(|v| line_gap(&cb.argmin_cell, v) <= reach);
        let agrees = oracle_agrees(&ss, &cb, Angle(reach));
        let ok = if phi < 60.0 {
            near_e && !near_v && ss.labels() == vec![Label::E] && cb.contains(j_e, 1e-12)
        } else if phi > 60.0 {
            near_v && !near_e && ss.labels() == vec![Label::A, Label::B, Label::C] && cb.contains(j_v[0], 1e-12)
        } else {
            let r3 = 3f64.sqrt();
            ss.labels().len() == 4
                && (j_e - r3).abs() <= 1e-9
                && j_v.iter().all(|j| (j - r3).abs() <= 1e-9)
                && cb.contains(r3, 1e-12)
        };
        if !(ok && agrees) {
            fails.push(format!("phi={phi}"));
        }
    }
    outcome(fails.is_empty(), format!("7 angles, failures: {fails:?}"))
}

fn large_smallest_angle() -> Outcome {
    let grid = build_grid(GRID).unwrap();
    let geo = Angle(2.0 * grid.covering_radius().0);
    let min = TriangleConstraint::MinAngle(Angle::from_degrees(60.5));
    let mut fails = 0;
    for k in 0..300 {
        let t = random_triangle(SEED + k, min).unwrap();
        let ss = classify(&t, DEFAULT_ANGLE_TOL).unwrap();
        let cb = certified_min_on(&WeightedPointSet::triangle(&t), &grid, DEFAULT_REFINE).unwrap();
        if !ss.is_covered() || !oracle_agrees(&ss, &cb, geo) {
            fails += 1;
        }
    }
    outcome(fails == 0, format!("300 triangles, {fails} disagreements"))
}

fn big_triangles() -> Outcome {
    let grid = build_grid(GRID).unwrap();
    let reach = 2.0 * grid.covering_radius().0;
    let mut far = 0;
    let mut sum_fail = 0;
    for k in 0..300 {
        let t = random_triangle(SEED + 10_000 + k, TriangleConstraint::Big).unwrap();
        assert!(is_big(&t));
        let cb = certified_min_on(&WeightedPointSet::triangle(&t), &grid, DEFAULT_REFINE).unwrap();
        if !t.vertices().iter().any(|v| line_gap(&cb.argmin_cell, v) <= reach) {
            far += 1;
        }
        if !(t.phi_ab().0 + t.phi_ac().0 + t.phi_bc().0 > PI) {
            sum_fail += 1;
        }
    }
    outcome(far + sum_fail == 0, format!("300 triangles, {far} minimizers off-vertex, {sum_fail} angle sums <= pi"))
}

fn summarize(reports: &[IdentityReport]) -> (bool, usize, f64) {
    let bad = reports.iter().filter(|r| !r.passed()).count();
    let worst = reports.iter().map(|r| r.max_rel_residual).fold(0.0, f64::max);
    (bad == 0, reports.len(), worst)
}

fn identity_suite() -> Outcome {
    let mut all = verify_ideal_membership(SEED, 1000).unwrap();
    all.extend(verify_ideal_membership_exact(SEED, 1000).unwrap());
    all.extend(verify_chain_identities(SEED, 1000).unwrap());
    let (ok_id, n_id, worst) = summarize(&all);
    let signs = verify_discriminant_signs(SEED, 100).unwrap();
    let (ok_sign, n_sign, _) = summarize(&signs);
    outcome(
        ok_id && ok_sign && worst < 1e-9,
        format!("{n_id} identity reports (max rel residual {worst:.2e}), {n_sign} sign reports"),
    )
}

fn gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 1000 {
        let dim = rng.gen_range(2..=5);
        let n = rng.gen_range(1..=6);
        let pts: Vec<UnitVector> = (0..n).map(|_| random_unit(&mut rng, dim)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..3.0)).collect();
        let p = random_unit(&mut rng, dim);
        // Stay away from the kinks on the data lines.
        if pts.iter().any(|v| v.dot(&p).abs() > 0.995) {
            continue;
        }
        let ps = WeightedPointSet::new(pts, w).unwrap();
        let g = riemannian_gradient(&ps, &p).unwrap();
        for i in 0..dim {
            // Orthonormal tangent frame by projecting coordinate axes.
            let mut e: Vec<f64> = (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect();
            let pi = p.as_slice()[i];
            for (ej, pj) in e.iter_mut().zip(p.as_slice()) {
                *ej -= pi * pj;
            }
            let en = e.iter().map(|x| x * x).sum::<f64>().sqrt();
            if en < 1e-8 {
                continue;
            }
            let e: Vec<f64> = e.iter().map(|x| x / en).collect();
            let at = |t: f64| {
                let q: Vec<f64> = p.as_slice().iter().zip(&e).map(|(a, b)| t.cos() * a + t.sin() * b).collect();
                evaluate(&ps, &UnitVector::normalize(q).unwrap(), Metric::Sine).unwrap()
            };
            let d = (at(h) - at(-h)) / (2.0 * h);
            let gd: f64 = g.direction.iter().zip(&e).map(|(a, b)| a * b).sum();
            let scale = g.norm().max(1e-3);
            worst = worst.max((d - gd).abs() / scale);
        }
        done += 1;
    }
    outcome(worst < 1e-6, format!("1000 instances, worst relative error {worst:.2e}"))
}

fn reduced_minima() -> Outcome {
    let reports = verify_reduced_minima(SEED, 50).unwrap();
    let (ok, n, _) = summarize(&reports);
    let trials: Vec<usize> = reports.iter().map(|r| r.trials).collect();
    outcome(ok, format!("{n} reports, trials {trials:?}"))
}

fn triangle_inequality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let d = |a: &UnitVector, b: &UnitVector| sine_distance(a, b).unwrap();
    let mut violated = 0;
    for _ in 0..10_000 {
        let dim = rng.gen_range(2..=5);
        let v: Vec<UnitVector> = (0..3).map(|_| random_unit(&mut rng, dim)).collect();
        if d(&v[0], &v[1]) > d(&v[0], &v[2]) + d(&v[1], &v[2]) {
            violated += 1;
        }
    }
    let mut eq_fail = 0;
    let mut strict_fail = 0;
    for k in 0..1000 {
        let dim = rng.gen_range(2..=5);
        let v1 = random_unit(&mut rng, dim);
        let v2 = loop {
            let c = random_unit(&mut rng, dim);
            if line_gap(&v1, &c) > 0.3 {
                break c;
            }
        };
        let base = if k % 2 == 0 { &v1 } else { &v2 };
        for v3 in [base.clone(), base.neg()] {
            if d(&v1, &v2) != d(&v1, &v3) + d(&v2, &v3) {
                eq_fail += 1;
            }
        }
        let eps = 10f64.powf(rng.gen_range(-3.0..-1.0));
        let u = random_unit(&mut rng, dim);
        let q: Vec<f64> = base.as_slice().iter().zip(u.as_slice()).map(|(a, b)| a + eps * b).collect();
        let v3 = UnitVector::normalize(q).unwrap();
        if line_gap(&v3, base) > 1e-9 && !(d(&v1, &v2) < d(&v1, &v3) + d(&v2, &v3)) {
            strict_fail += 1;
        }
    }
    outcome(
        violated + eq_fail + strict_fail == 0,
        format!(
            "{violated} violations in 1e4 triples, {eq_fail} equality misses, {strict_fail} non-strict perturbations"
        ),
    )
}

fn determinism(elapsed: Duration) -> Outcome {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_projmed"))
            .args(["verify", "--suite", "all", "--seed", "1", "--trials", "200"])
            .output()
            .expect("binary runs");
        (out.status.code(), out.stdout)
    };
    let (c1, o1) = run();
    let (c2, o2) = run();
    let same = o1 == o2 && !o1.is_empty();
    outcome(
        same && c1 == Some(0) && c2 == Some(0),
        format!("identical={same} exit={c1:?}/{c2:?} ({} bytes), run so far {:.1}s", o1.len(), elapsed.as_secs_f64()),
    )
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(&str, Outcome, Duration)> = Vec::new();
    let mut timed = |name: &'static str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        results.push((name, o, t.elapsed()));
    };
    timed("1 equilateral phase transition", &equilateral_phase);
    timed("2 smallest angle >= 60.5 deg", &large_smallest_angle);
    timed("3 big triangles", &big_triangles);
    timed("4 polynomial identity suite", &identity_suite);
    timed("5 gradient vs finite differences", &gradient_check);
    timed("6 reduced-objective minima", &reduced_minima);
    timed("7 triangle inequality", &triangle_inequality);
    let before = start.elapsed();
    timed("8 determinism", &|| determinism(before));

    let total = start.elapsed();
    let mut all = true;
    for (name, o, dt) in &results {
        let mut pass = o.pass;
        if name.starts_with('1') && *dt >= Duration::from_secs(30) {
            pass = false;
        }
        if name.starts_with('8') && total >= Duration::from_secs(300) {
            pass = false;
        }
        all &= pass;
        println!("{} {:<36} {:>7.2}s  {}", if pass { "PASS" } else { "FAIL" }, name, dt.as_secs_f64(), o.detail);
    }
    println!("total {:.1}s", total.as_secs_f64());
    if !all {
        std::process::exit(1);
    }
}
