//! Sampled lemma checks. Each trial draws one configuration satisfying a
//! lemma's hypotheses and records the margin of its conclusion.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;

use super::constructions::{b_prime_c_prime_defect, g, GeneralFrame, IsoscelesFrame};
use super::{trial_rng, IdentityReport};
use crate::error::Result;
use crate::objective::{evaluate, evaluate_raw, tau_combination, Metric, WeightedPointSet};
use crate::oracle::{build_grid, certified_min_on, SphereGrid};
use crate::projective::{
    centroid, cross, dot, is_big, line_angle, norm, random_triangle, sine_dist, Angle, TriangleConstraint, UnitVector,
};

/// Grid size and refinement rounds of the oracle used inside the suites.
pub(crate) const SUITE_GRID: usize = 20_000;
pub(crate) const SUITE_REFINE: usize = 8;

/// Rounding allowance for predicates evaluated at exactly known points.
const EXACT_TOL: f64 = 1e-12;

#[derive(Clone, Copy)]
enum Kind {
    /// Holds iff `margin >= -tol`.
    AtLeast(f64),
    /// Holds iff `margin > 0`.
    Positive,
    /// Holds iff `|residual| <= tol`.
    Residual(f64),
}

struct Check {
    name: &'static str,
    kind: Kind,
}

const fn at_least(name: &'static str, tol: f64) -> Check {
    Check { name, kind: Kind::AtLeast(tol) }
}

const fn positive(name: &'static str) -> Check {
    Check { name, kind: Kind::Positive }
}

const fn residual(name: &'static str, tol: f64) -> Check {
    Check { name, kind: Kind::Residual(tol) }
}

/// Per-trial observations, indexed like the suite's check list.
struct Recorder<'a> {
    checks: &'a [Check],
    slots: Vec<IdentityReport>,
}

impl<'a> Recorder<'a> {
    fn new(checks: &'a [Check]) -> Self {
        let slots = checks
            .iter()
            .map(|c| {
                let tol = match c.kind {
                    Kind::AtLeast(t) | Kind::Residual(t) => t,
                    Kind::Positive => 0.0,
                };
                IdentityReport::empty(c.name, tol)
            })
            .collect();
        Recorder { checks, slots }
    }

    fn index(&self, name: &str) -> usize {
        self.checks.iter().position(|c| c.name == name).unwrap_or_else(|| panic!("unknown check {name}"))
    }

    /// Records a margin (predicate checks) or a residual (residual checks).
    fn put(&mut self, name: &str, value: f64) {
        let k = self.index(name);
        let (abs, bad) = match self.checks[k].kind {
            Kind::AtLeast(tol) => ((-value).max(0.0), !(value >= -tol)),
            Kind::Positive => ((-value).max(0.0), !(value > 0.0)),
            Kind::Residual(tol) => (value.abs(), !(value.abs() <= tol)),
        };
        self.slots[k].record(abs, abs, bad);
    }

    fn merge(mut self, others: Vec<Vec<IdentityReport>>) -> Vec<IdentityReport> {
        for o in others {
            for (s, r) in self.slots.iter_mut().zip(&o) {
                s.merge(r);
            }
        }
        self.slots
    }
}

fn run<F>(checks: &[Check], seed: u64, tag: u64, trials: usize, body: F) -> Result<Vec<IdentityReport>>
where
    F: Fn(&mut ChaCha8Rng, u64, &mut Recorder) -> Result<()> + Sync,
{
    let per_trial: Vec<Vec<IdentityReport>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, tag, i);
            let mut rec = Recorder::new(checks);
            body(&mut rng, super::trial_seed(seed, tag ^ 0xFF, i), &mut rec)?;
            Ok(rec.slots)
        })
        .collect::<Result<_>>()?;
    Ok(Recorder::new(checks).merge(per_trial))
}

fn suite_grid() -> Result<Arc<SphereGrid>> {
    build_grid(SUITE_GRID)
}

fn gaussian_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-8 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

fn unit3(v: [f64; 3]) -> [f64; 3] {
    let n = norm(&v);
    [v[0] / n, v[1] / n, v[2] / n]
}

fn arr3(v: &UnitVector) -> [f64; 3] {
    let s = v.as_slice();
    [s[0], s[1], s[2]]
}

fn sine_sum(points: &[[f64; 3]], p: &[f64]) -> f64 {
    points.iter().map(|v| sine_dist(v, p)).sum()
}

const S2_CHECKS: [Check; 9] = [
    at_least("triangle inequality", EXACT_TOL),
    residual("triangle inequality equality at v3 = +-v1, +-v2", 0.0),
    positive("triangle inequality strict near v1"),
    at_least("distance to vertices (oracle minimizer)", 0.0),
    at_least("projection product (oracle minimizer)", 0.0),
    at_least("normal sign agreement (oracle minimizer)", 0.0),
    at_least("common sign of inner products (oracle minimizer)", 0.0),
    at_least("centroid attains certified minimum (phi < 60)", EXACT_TOL),
    residual("zero gradient at interior minimizer", EXACT_TOL),
];

fn with_slack(checks: &[Check], slack: f64) -> Vec<Check> {
    checks
        .iter()
        .map(|c| match c.kind {
            Kind::AtLeast(0.0) => at_least(c.name, slack),
            kind => Check { name: c.name, kind },
        })
        .collect()
}

/// Triangle inequality, first properties of minimizers and stationarity.
pub(super) fn section2(seed: u64, trials: usize) -> Result<Vec<IdentityReport>> {
    let grid = suite_grid()?;
    let slack = 3.0 * grid.covering_radius().0;
    let checks = with_slack(&S2_CHECKS, slack);
    run(&checks, seed, 20, trials, |rng, tseed, rec| {
        let v1 = gaussian_unit(rng, 3);
        let v2 = gaussian_unit(rng, 3);
        let v3 = gaussian_unit(rng, 3);
        let d = |x: &[f64], y: &[f64]| sine_dist(x, y);
        rec.put("triangle inequality", d(&v1, &v3) + d(&v2, &v3) - d(&v1, &v2));

        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let base = if rng.gen::<bool>() { &v1 } else { &v2 };
        let w: Vec<f64> = base.iter().map(|x| sign * x).collect();
        rec.put("triangle inequality equality at v3 = +-v1, +-v2", d(&v1, &w) + d(&v2, &w) - d(&v1, &v2));

        if line_angle(&v1, &v2) >= 0.3 {
            let eps = 10f64.powf(rng.gen_range(-3.0..-1.0));
            let r = gaussian_unit(rng, 3);
            let pert: Vec<f64> = v1.iter().zip(&r).map(|(a, b)| a + eps * b).collect();
            let n = norm(&pert);
            let q: Vec<f64> = pert.iter().map(|x| x / n).collect();
            rec.put("triangle inequality strict near v1", d(&v1, &q) + d(&v2, &q) - d(&v1, &v2));
        }

        let t = random_triangle(tseed, TriangleConstraint::Any)?;
        let ps = WeightedPointSet::triangle(&t);
        let cb = certified_min_on(&ps, &grid, SUITE_REFINE)?;
        let p = arr3(&cb.argmin_cell);
        let vs = [arr3(t.a()), arr3(t.b()), arr3(t.c())];
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    rec.put("distance to vertices (oracle minimizer)", d(&vs[i], &vs[j]) - d(&vs[i], &p));
                }
            }
        }
        for k in 0..3 {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            let n = unit3(cross(&vs[i], &vs[j]));
            let c = vs[k];
            let q = dot(&p, &n);
            let c_perp = dot(&c, &n) * q;
            let c_h = dot(&c, &p) - c_perp;
            rec.put("projection product (oracle minimizer)", c_h * c_perp);
            rec.put("normal sign agreement (oracle minimizer)", dot(&c, &p) * dot(&c, &n) * q);
        }
        let dots = [dot(&vs[0], &vs[1]), dot(&vs[0], &vs[2]), dot(&vs[1], &vs[2])];
        if dots.iter().all(|&x| x > 0.0) {
            let x: Vec<f64> = vs.iter().map(|v| dot(v, &p)).collect();
            let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            rec.put("common sign of inner products (oracle minimizer)", lo.max(-hi));
        }

        let phi = Angle::from_degrees(rng.gen_range(30.0..58.0));
        let te = random_triangle(tseed ^ 0x5A5A, TriangleConstraint::Equilateral(phi))?;
        let pe = WeightedPointSet::triangle(&te);
        let e = centroid(&te)?;
        let cbe = certified_min_on(&pe, &grid, SUITE_REFINE)?;
        rec.put("centroid attains certified minimum (phi < 60)", cbe.upper - evaluate(&pe, &e, Metric::Sine)?);
        rec.put("zero gradient at interior minimizer", norm(&tau_combination(&pe, &e)?));
        Ok(())
    })
}

const S3_CHECKS: [Check; 5] = [
    positive("angle sum exceeds pi"),
    at_least("closest vertex has a.p > 1/sqrt(2)", 0.0),
    at_least("representatives with b.c <= 0", 0.0),
    at_least("oracle minimizer at a vertex", 0.0),
    at_least("best vertex attains certified minimum", EXACT_TOL),
];

/// Big triangles.
pub(super) fn section3(seed: u64, trials: usize) -> Result<Vec<IdentityReport>> {
    let grid = suite_grid()?;
    let slack = 3.0 * grid.covering_radius().0;
    let checks = with_slack(&S3_CHECKS, slack);
    run(&checks, seed, 30, trials, |_rng, tseed, rec| {
        let t = random_triangle(tseed, TriangleConstraint::Big)?;
        debug_assert!(is_big(&t));
        rec.put("angle sum exceeds pi", t.phi_ab().0 + t.phi_ac().0 + t.phi_bc().0 - PI);

        let ps = WeightedPointSet::triangle(&t);
        let cb = certified_min_on(&ps, &grid, SUITE_REFINE)?;
        let p = arr3(&cb.argmin_cell);
        let mut vs = [arr3(t.a()), arr3(t.b()), arr3(t.c())];
        for v in vs.iter_mut() {
            if dot(v, &p) < 0.0 {
                *v = [-v[0], -v[1], -v[2]];
            }
        }
        let k = (0..3).max_by(|&i, &j| dot(&vs[i], &p).total_cmp(&dot(&vs[j], &p))).expect("three vertices");
        rec.put("closest vertex has a.p > 1/sqrt(2)", dot(&vs[k], &p) - FRAC_1_SQRT_2);

        let (b, c) = (vs[(k + 1) % 3], vs[(k + 2) % 3]);
        let free_sign = dot(&b, &p) <= slack || dot(&c, &p) <= slack;
        rec.put("representatives with b.c <= 0", if free_sign { 0.0 } else { -dot(&b, &c) });

        let nearest = vs.iter().map(|v| line_angle(v, &p)).fold(f64::INFINITY, f64::min);
        rec.put("oracle minimizer at a vertex", slack - nearest);

        let best = vs.iter().map(|v| evaluate_raw(&ps, v, Metric::Sine)).fold(f64::INFINITY, f64::min);
        rec.put("best vertex attains certified minimum", cb.upper - best);
        Ok(())
    })
}

const S5_CHECKS: [Check; 17] = [
    residual("c* is equiangular to a and b", 1e-10),
    at_least("0 <= beta* <= beta", EXACT_TOL),
    residual("symmetry J(Mv) = J(v)", 1e-14),
    at_least("p_z, a.p, b.p, c.p >= 0", EXACT_TOL),
    positive("slope p_x sin(alpha) - p_y cos(alpha) > 0"),
    residual("f(beta') = 0", EXACT_TOL),
    positive("f strictly ascending"),
    at_least("g.p >= g.a >= 0 on [beta', beta]", EXACT_TOL),
    positive("descending inner products"),
    positive("tangent ratio inequality"),
    positive("derivative inequality"),
    at_least("difference inequality", EXACT_TOL),
    residual("difference equality when beta_p = beta", EXACT_TOL),
    positive("cos^2(chi) < 1/2"),
    at_least("J'' <= -sqrt(3)/2 + sqrt(2)/2 on [0, phi_ACp]", EXACT_TOL),
    residual("J'' matches finite differences", 1e-6),
    positive("J(p) > J(a) for isosceles triangles"),
];

/// Uniform `ψ` in `[lo + f·w, hi - f·w]`, `w = hi - lo`.
fn inner(rng: &mut ChaCha8Rng, lo: f64, hi: f64, f: f64) -> f64 {
    let w = hi - lo;
    rng.gen_range((lo + f * w)..=(hi - f * w))
}

/// `p = normalize(λ1 a + λ2 c + λ3 e_x)` with `c.p >= c.a` and `p != a`; one
/// trial in eight draws `p` on the arc from `a` to `c`.
fn sample_isosceles_p(rng: &mut ChaCha8Rng, f: &IsoscelesFrame) -> [f64; 3] {
    let (a, c) = (f.a(), f.c());
    let on_arc = rng.gen_ratio(1, 8);
    loop {
        let l: [f64; 3] = std::array::from_fn(|_| rng.sample::<f64, _>(Exp1));
        let l3 = if on_arc { 0.0 } else { l[2] };
        let p = unit3(std::array::from_fn(|i| l[0] * a[i] + l[1] * c[i] + if i == 0 { l3 } else { 0.0 }));
        if dot(&c, &p) >= dot(&c, &a) && line_angle(&p, &a) > 1e-6 {
            return p;
        }
    }
}

/// Isosceles triangles `60° <= φ_AB < φ_AC = φ_BC < 90°`.
pub(super) fn section5(seed: u64, trials: usize) -> Result<Vec<IdentityReport>> {
    let bound = -(3f64.sqrt()) / 2.0 + FRAC_1_SQRT_2;
    run(&S5_CHECKS, seed, 50, trials, |rng, _tseed, rec| {
        let base = rng.gen_range(60f64..85.0);
        let legs = inner(rng, base, 89.5, 1e-3);
        let f = IsoscelesFrame::new(Angle::from_degrees(base), Angle::from_degrees(legs))?;
        let (a, b, c) = (f.a(), f.b(), f.c());
        let (sa, ca) = f.alpha.sin_cos();
        let j = |pts: &[[f64; 3]], q: &[f64]| sine_sum(pts, q);

        let cs = f.c_star();
        let cab = Angle::from_degrees(base).cos();
        rec.put("c* is equiangular to a and b", (dot(&a, &cs) - cab).abs().max((dot(&b, &cs) - cab).abs()));
        rec.put("0 <= beta* <= beta", f.beta_star.min(f.beta - f.beta_star));

        let v = gaussian_unit(rng, 3);
        let mv = [v[0], -v[1], v[2]];
        rec.put("symmetry J(Mv) = J(v)", j(&[a, b, c], &mv) - j(&[a, b, c], &v));

        let p = sample_isosceles_p(rng, &f);
        rec.put("p_z, a.p, b.p, c.p >= 0", p[2].min(dot(&a, &p)).min(dot(&b, &p)).min(dot(&c, &p)));
        let slope = p[0] * sa - p[1] * ca;
        rec.put("slope p_x sin(alpha) - p_y cos(alpha) > 0", slope);

        let ff = |psi: f64| slope * psi.sin() - p[2] * sa * psi.cos();
        let beta_prime = f.beta_prime(&p);
        rec.put("f(beta') = 0", ff(beta_prime));
        let psi = rng.gen_range(0.0..FRAC_PI_2);
        rec.put("f strictly ascending", slope * psi.cos() + p[2] * sa * psi.sin());

        let psi = if f.beta > beta_prime { rng.gen_range(beta_prime..=f.beta) } else { f.beta };
        let gp = dot(&g(psi), &p);
        let ga = dot(&g(psi), &a);
        rec.put("g.p >= g.a >= 0 on [beta', beta]", (gp - ga).min(ga).min(f.beta - beta_prime));

        if f.beta - beta_prime > 1e-6 {
            let psi = inner(rng, beta_prime, f.beta, 0.01);
            let (s, co) = psi.sin_cos();
            let gp = dot(&g(psi), &p);
            let ga = dot(&g(psi), &a);
            let dgp = -p[0] * s + p[2] * co;
            let dga = -ca * s;
            rec.put("descending inner products", (-dgp).min(-dga).min(-sa * dgp + p[1] * dga));
            let lhs = -dgp / (1.0 - gp * gp).sqrt();
            let rhs = -dga / (1.0 - ga * ga).sqrt();
            rec.put("tangent ratio inequality", (lhs - rhs).min(rhs));
            let dp = -gp * dgp / (1.0 - gp * gp).sqrt();
            let da = -ga * dga / (1.0 - ga * ga).sqrt();
            rec.put("derivative inequality", dp - da);
        }

        let beta_p = f.beta_p(&p);
        let cp = g(beta_p);
        let diff_p = j(&[a, b, c], &p) - j(&[a, b, cp], &p);
        let diff_a = j(&[a, b, c], &a) - j(&[a, b, cp], &a);
        if (f.beta - beta_p).abs() <= 1e-12 {
            rec.put("difference equality when beta_p = beta", diff_p - diff_a);
        } else {
            rec.put("difference inequality", diff_p - diff_a);
        }

        // frame with a, c_p spanning the first two axes
        let acp = dot(&a, &cp);
        let dvec = unit3(std::array::from_fn(|i| cp[i] - acp * a[i]));
        let cos_chi2 = dot(&a, &b).powi(2) + dot(&dvec, &b).powi(2);
        rec.put("cos^2(chi) < 1/2", 0.5 - cos_chi2);
        if beta_p > f.beta_star + 1e-9 {
            let phi = acp.clamp(-1.0, 1.0).acos();
            let theta = dot(&dvec, &b).atan2(dot(&a, &b));
            let k = cos_chi2;
            let jd = |delta: f64| {
                let q: [f64; 3] = std::array::from_fn(|i| delta.cos() * a[i] + delta.sin() * dvec[i]);
                j(&[a, b, cp], &q)
            };
            let delta = rng.gen_range(0.0..=phi);
            let u = theta - delta;
            let h = (1.0 - k * u.cos().powi(2)).sqrt();
            let second = -delta.sin() - (phi - delta).sin() - k * u.sin().powi(2) / h.powi(3) + k * u.cos().powi(2) / h;
            rec.put("J'' <= -sqrt(3)/2 + sqrt(2)/2 on [0, phi_ACp]", bound - second);
            let step = 1e-4;
            let fd = (jd(delta + step) - 2.0 * jd(delta) + jd(delta - step)) / (step * step);
            rec.put("J'' matches finite differences", fd - second);
        }

        rec.put("J(p) > J(a) for isosceles triangles", j(&[a, b, c], &p) - j(&[a, b, c], &a));
        Ok(())
    })
}

const S6_CHECKS: [Check; 7] = [
    residual("b', c' inner products", 1e-10),
    positive("alpha/2 < alpha' < alpha < 2pi/3, cos(alpha') < 1/2"),
    at_least("0 <= theta <= alpha", EXACT_TOL),
    at_least("A, B attain the certified minimum of ABC'", EXACT_TOL),
    at_least("A, B' attain the certified minimum of AB'C", EXACT_TOL),
    positive("replacement point is strictly closer to p"),
    positive("J(p) > J(a) for general triangles"),
];

/// `p` with `a.p, b.p, c.p >= 0` on the same side of each edge plane as the
/// opposite vertex.
fn sample_general_p(rng: &mut ChaCha8Rng, f: &GeneralFrame) -> Option<[f64; 3]> {
    let (a, b, c) = (f.a(), f.b(), f.c());
    let nab = cross(&a, &b);
    let nca = cross(&c, &a);
    let nbc = cross(&b, &c);
    for _ in 0..100_000 {
        let v = gaussian_unit(rng, 3);
        let p = [v[0], v[1], v[2].abs()];
        let ok = dot(&b, &p) >= 0.0
            && dot(&c, &p) >= 0.0
            && dot(&nab, &c) * dot(&nab, &p) >= 0.0
            && dot(&nca, &b) * dot(&nca, &p) >= 0.0
            && dot(&nbc, &a) * dot(&nbc, &p) >= 0.0
            && line_angle(&p, &a) > 1e-6;
        if ok {
            return Some(p);
        }
    }
    None
}

/// General triangles `60° <= φ_AB <= φ_AC < φ_BC < 90°`.
pub(super) fn section6(seed: u64, trials: usize) -> Result<Vec<IdentityReport>> {
    let grid = suite_grid()?;
    run(&S6_CHECKS, seed, 60, trials, |rng, _tseed, rec| {
        let f = loop {
            let ab = rng.gen_range(60f64..80.0);
            let ac = rng.gen_range(ab..85.0);
            let bc = inner(rng, ac, 89.5, 1e-3);
            if let Ok(f) = GeneralFrame::new(Angle::from_degrees(ab), Angle::from_degrees(ac), Angle::from_degrees(bc))
            {
                break f;
            }
        };
        rec.put("b', c' inner products", b_prime_c_prime_defect(&f));
        let (al, alp) = (f.alpha, f.alpha_prime);
        rec.put(
            "alpha/2 < alpha' < alpha < 2pi/3, cos(alpha') < 1/2",
            (alp - al / 2.0).min(al - alp).min(2.0 * PI / 3.0 - al).min(0.5 - alp.cos()),
        );

        let (a, b, c, bp, cp) = (f.a(), f.b(), f.c(), f.b_prime(), f.c_prime());
        let uni = |pts: [[f64; 3]; 3]| {
            WeightedPointSet::uniform(pts.iter().map(|v| UnitVector::normalize(v.to_vec())).collect::<Result<_>>()?)
        };
        let abc1 = uni([a, b, cp])?;
        let cb = certified_min_on(&abc1, &grid, SUITE_REFINE)?;
        let worst = evaluate_raw(&abc1, &a, Metric::Sine).max(evaluate_raw(&abc1, &b, Metric::Sine));
        rec.put("A, B attain the certified minimum of ABC'", cb.upper - worst);
        let ab1c = uni([a, bp, c])?;
        let cb = certified_min_on(&ab1c, &grid, SUITE_REFINE)?;
        let worst = evaluate_raw(&ab1c, &a, Metric::Sine).max(evaluate_raw(&ab1c, &bp, Metric::Sine));
        rec.put("A, B' attain the certified minimum of AB'C", cb.upper - worst);

        if let Some(p) = sample_general_p(rng, &f) {
            let theta = p[1].atan2(p[0]);
            rec.put("0 <= theta <= alpha", theta.min(al - theta));
            if theta <= alp {
                rec.put("replacement point is strictly closer to p", dot(&cp, &p) - dot(&c, &p));
            }
            if theta >= al - alp {
                rec.put("replacement point is strictly closer to p", dot(&bp, &p) - dot(&b, &p));
            }
            rec.put("J(p) > J(a) for general triangles", sine_sum(&[a, b, c], &p) - sine_sum(&[a, b, c], &a));
        }
        Ok(())
    })
}
