//! Multi-start Riemannian gradient descent for weighted point sets on S^{D-1}.
//!
//! Each run steps `p <- normalize(p - η ∇J(p))` with Armijo backtracking and
//! ends when the stationarity residual drops below `grad_tol`, or when `p`
//! comes within [`ABSORB_RADIUS`] of a data line. The data lines are also
//! scored directly, because the objective has a cone-shaped kink there and
//! they are often the minimizers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{classify, Label};
use crate::error::{Error, Result};
use crate::objective::{evaluate_raw, gradient_raw, Metric, WeightedPointSet, POLE_TOL};
use crate::projective::{dot, line_angle, ProjectiveTriangle, UnitVector, DEFAULT_ANGLE_TOL};

/// Runs ending this close (in angle) to a data line snap onto it.
pub const ABSORB_RADIUS: f64 = 1e-6;
/// Sign patterns are enumerated over at most this many leading points.
const MAX_SIGN_POINTS: usize = 8;
const MAX_BACKTRACKS: usize = 80;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub step_shrink: f64,
    pub armijo_c: f64,
    pub restarts: usize,
    pub seed: u64,
    pub metric: Metric,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 5000,
            grad_tol: 1e-9,
            step_shrink: 0.5,
            armijo_c: 1e-4,
            restarts: 16,
            seed: 0,
            metric: Metric::Sine,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::OutOfRange(what.to_string()));
        if self.max_iters < 1 {
            return bad("max_iters must be at least 1");
        }
        if self.restarts < 1 {
            return bad("restarts must be at least 1");
        }
        if !(self.grad_tol > 0.0) {
            return bad("grad_tol must be positive");
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return bad("step_shrink must lie in (0, 1)");
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad("armijo_c must lie in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverStatus {
    /// Stationary point away from the data lines.
    Interior,
    /// The data line with this index.
    Vertex(usize),
    MaxIters,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iter: usize,
    pub value: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    pub minimizer: UnitVector,
    pub value: f64,
    /// Gradient norm for interior points; at a vertex, how far the smooth
    /// part's gradient exceeds the kink's weight (0 means stationary).
    pub residual: f64,
    pub status: SolverStatus,
    pub trace: Vec<TraceEntry>,
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn normalized(v: Vec<f64>) -> Option<Vec<f64>> {
    let n = norm(&v);
    (n > 1e-300 && n.is_finite()).then(|| v.into_iter().map(|x| x / n).collect())
}

/// First-order optimality measure at data point `i`.
///
/// Near `v_i` the terms on that line behave like `w |p - v_i|`, whose
/// subdifferential is the tangent ball of radius `w`; `v_i` is stationary
/// when the remaining terms' gradient fits in that ball.
pub fn vertex_residual(ps: &WeightedPointSet, i: usize, metric: Metric) -> f64 {
    let p = ps.points()[i].as_slice();
    let mut kink = 0.0;
    let mut rest_pts = Vec::new();
    let mut rest_w = Vec::new();
    for (v, &w) in ps.points().iter().zip(ps.weights()) {
        if dot(v.as_slice(), p).abs() > 1.0 - POLE_TOL {
            kink += w;
        } else {
            rest_pts.push(v.clone());
            rest_w.push(w);
        }
    }
    if rest_pts.is_empty() {
        return 0.0;
    }
    let rest = WeightedPointSet::new(rest_pts, rest_w).expect("subset of a valid set");
    match gradient_raw(&rest, p, metric) {
        Ok(g) => (norm(&g) - kink).max(0.0),
        Err(_) => f64::INFINITY,
    }
}

fn nearest_line(ps: &WeightedPointSet, p: &[f64]) -> (usize, f64) {
    ps.points().iter().enumerate().map(|(i, v)| (i, line_angle(v.as_slice(), p))).fold((0, f64::INFINITY), |a, b| {
        if b.1 < a.1 {
            b
        } else {
            a
        }
    })
}

struct Run {
    point: Vec<f64>,
    value: f64,
    residual: f64,
    status: SolverStatus,
    trace: Vec<TraceEntry>,
}

fn absorbed(ps: &WeightedPointSet, i: usize, metric: Metric, trace: Vec<TraceEntry>) -> Run {
    let point = ps.points()[i].as_slice().to_vec();
    Run {
        value: evaluate_raw(ps, &point, metric),
        residual: vertex_residual(ps, i, metric),
        status: SolverStatus::Vertex(i),
        point,
        trace,
    }
}

fn descend(ps: &WeightedPointSet, start: Vec<f64>, cfg: &SolverConfig) -> Run {
    let metric = cfg.metric;
    let mut p = start;
    let mut value = evaluate_raw(ps, &p, metric);
    let mut trace = Vec::new();
    let mut eta = 1.0;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    for iter in 0..=cfg.max_iters {
        let (near, angle) = nearest_line(ps, &p);
        if angle < ABSORB_RADIUS {
            return absorbed(ps, near, metric, trace);
        }
        let g = match gradient_raw(ps, &p, metric) {
            Ok(g) => g,
            Err(_) => return absorbed(ps, near, metric, trace),
        };
        let residual = norm(&g);
        trace.push(TraceEntry { iter, value, residual });
        if residual <= cfg.grad_tol {
            return Run { point: p, value, residual, status: SolverStatus::Interior, trace };
        }
        if iter == cfg.max_iters {
            break;
        }

        // Barzilai-Borwein guess, safeguarded by Armijo backtracking.
        if let Some((p0, g0)) = &prev {
            let s: Vec<f64> = p.iter().zip(p0).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = g.iter().zip(g0).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            eta = if sy > 0.0 { (dot(&s, &s) / sy).min(1e3) } else { (2.0 * eta).min(1.0) };
        }
        let mut accepted = None;
        let mut fallback: Option<(Vec<f64>, f64)> = None;
        for _ in 0..MAX_BACKTRACKS {
            let cand: Vec<f64> = p.iter().zip(&g).map(|(pi, gi)| pi - eta * gi).collect();
            if let Some(q) = normalized(cand) {
                let vq = evaluate_raw(ps, &q, metric);
                if vq <= value - cfg.armijo_c * eta * residual * residual {
                    accepted = Some((q, vq));
                    break;
                }
                // near the optimum the sufficient-decrease test drowns in rounding
                if vq <= value && fallback.is_none() {
                    fallback = Some((q, vq));
                }
            }
            eta *= cfg.step_shrink;
        }
        let Some((q, vq)) = accepted.or(fallback) else {
            return Run { point: p, value, residual, status: SolverStatus::MaxIters, trace };
        };
        prev = Some((p, g));
        p = q;
        value = vq;
    }
    let residual = trace.last().map_or(f64::INFINITY, |t| t.residual);
    Run { point: p, value, residual, status: SolverStatus::MaxIters, trace }
}

/// Deterministic starting points: normalized weighted sums over sign patterns
/// of the leading points, then seeded uniform points, `restarts` in total.
fn starting_points(ps: &WeightedPointSet, cfg: &SolverConfig) -> Vec<Vec<f64>> {
    let dim = ps.dim();
    let k = ps.len().min(MAX_SIGN_POINTS);
    let mut starts = Vec::with_capacity(cfg.restarts);
    for mask in 0u32..(1 << (k - 1)) {
        if starts.len() == cfg.restarts {
            return starts;
        }
        let mut s = vec![0.0; dim];
        for (i, (v, w)) in ps.points().iter().zip(ps.weights()).enumerate() {
            let sign = if i >= 1 && i < k && mask & (1 << (i - 1)) != 0 { -1.0 } else { 1.0 };
            for (si, vi) in s.iter_mut().zip(v.as_slice()) {
                *si += sign * w * vi;
            }
        }
        if let Some(s) = normalized(s) {
            starts.push(s);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    while starts.len() < cfg.restarts {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        if let Some(v) = normalized(v) {
            starts.push(v);
        }
    }
    starts
}

/// Global minimization of `J(p) = Σ w_i d(v_i, p)` on the sphere.
///
/// Returns the best of the data points (scored directly) and `restarts`
/// descent runs. Ties go to the earliest candidate: data points in order,
/// then runs in start order. Fails only on an invalid configuration.
pub fn solve(ps: &WeightedPointSet, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let metric = cfg.metric;
    let mut best = (0..ps.len())
        .map(|i| absorbed(ps, i, metric, Vec::new()))
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("point sets are non-empty");
    let runs: Vec<Run> = starting_points(ps, cfg).into_par_iter().map(|s| descend(ps, s, cfg)).collect();
    for run in runs {
        if run.value < best.value {
            best = run;
        }
    }
    if best.trace.is_empty() {
        best.trace.push(TraceEntry { iter: 0, value: best.value, residual: best.residual });
    }
    Ok(SolverResult {
        minimizer: UnitVector::from_unit_unchecked(best.point),
        value: best.value,
        residual: best.residual,
        status: best.status,
        trace: best.trace,
    })
}

/// Solves the three-point problem, using the closed-form classification when
/// it applies (sine metric only) and [`solve`] otherwise.
///
/// Vertex indices refer to the sorted labels `A, B, C = 0, 1, 2`.
pub fn solve_triangle(t: &ProjectiveTriangle, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let ps = WeightedPointSet::triangle(t);
    if cfg.metric == Metric::Sine {
        let ss = classify(t, DEFAULT_ANGLE_TOL)?;
        if let Some(m) = ss.members.first() {
            let (status, residual) = match m.label {
                Label::A | Label::B | Label::C => {
                    let i = m.label.vertex_index().expect("vertex label");
                    (SolverStatus::Vertex(i), vertex_residual(&ps, i, Metric::Sine))
                }
                _ => {
                    let g = gradient_raw(&ps, m.point.as_slice(), Metric::Sine)?;
                    (SolverStatus::Interior, norm(&g))
                }
            };
            return Ok(SolverResult {
                minimizer: m.point.clone(),
                value: m.value,
                residual,
                status,
                trace: vec![TraceEntry { iter: 0, value: m.value, residual }],
            });
        }
    }
    solve(&ps, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::{triangle_from_angles, AngleTriple};

    fn tri(x: f64, y: f64, z: f64) -> ProjectiveTriangle {
        triangle_from_angles(&AngleTriple::from_degrees(x, y, z).unwrap()).unwrap()
    }

    fn centroid_value(phi_deg: f64) -> f64 {
        let z = phi_deg.to_radians().cos();
        3.0 * (1.0 - (1.0 + 2.0 * z).powi(2) / (3.0 + 6.0 * z)).sqrt()
    }

    #[test]
    fn equilateral_fifty_converges_to_centroid() {
        let t = tri(50.0, 50.0, 50.0);
        let r = solve(&WeightedPointSet::triangle(&t), &SolverConfig::default()).unwrap();
        let e = crate::projective::centroid(&t).unwrap();
        assert_eq!(r.status, SolverStatus::Interior);
        assert!(line_angle(r.minimizer.as_slice(), e.as_slice()) < 1e-6);
        assert!((r.value - centroid_value(50.0)).abs() < 1e-12);
        assert!(r.residual <= 1e-9);
    }

    #[test]
    fn orthonormal_basis_gives_a_vertex() {
        let ps = WeightedPointSet::uniform((0..3).map(|i| UnitVector::basis(3, i)).collect()).unwrap();
        let r = solve(&ps, &SolverConfig::default()).unwrap();
        assert!(matches!(r.status, SolverStatus::Vertex(_)));
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn weighted_pair_prefers_heavier_point() {
        let a = UnitVector::from3(1.0, 0.0, 0.0).unwrap();
        let b = UnitVector::from3(0.5, 3f64.sqrt() / 2.0, 0.0).unwrap();
        let ps = WeightedPointSet::new(vec![a.clone(), b], vec![2.0, 1.0]).unwrap();
        let r = solve(&ps, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolverStatus::Vertex(0));
        assert!(r.minimizer.projectively_eq(&a));
        assert!((r.value - 60f64.to_radians().sin()).abs() < 1e-12);
    }

    #[test]
    fn triangle_delegates_to_classifier() {
        let r = solve_triangle(&tri(65.0, 70.0, 80.0), &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolverStatus::Vertex(0));
        let s = |d: f64| d.to_radians().sin();
        assert!((r.value - (s(65.0) + s(70.0))).abs() < 1e-12);

        let r = solve_triangle(&tri(60.0, 60.0, 60.0), &SolverConfig::default()).unwrap();
        assert!((r.value - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn value_matches_evaluation_and_trace_is_monotone() {
        let t = tri(50.0, 55.0, 58.0);
        let ps = WeightedPointSet::triangle(&t);
        let cfg = SolverConfig::default();
        let r = solve_triangle(&t, &cfg).unwrap();
        let direct = evaluate_raw(&ps, r.minimizer.as_slice(), Metric::Sine);
        assert!((r.value - direct).abs() <= 1e-12);
        assert!(r.trace.windows(2).all(|w| w[1].value <= w[0].value));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let t = tri(50.0, 55.0, 58.0);
        let ps = WeightedPointSet::triangle(&t);
        let cfg = SolverConfig { seed: 11, ..Default::default() };
        assert_eq!(solve(&ps, &cfg).unwrap(), solve(&ps, &cfg).unwrap());
    }

    #[test]
    fn vertex_residual_detects_stationarity() {
        // a heavy point dominates: its vertex is optimal and stationary
        let a = UnitVector::from3(1.0, 0.0, 0.0).unwrap();
        let b = UnitVector::from3(0.0, 1.0, 0.0).unwrap();
        let ps = WeightedPointSet::new(vec![a, b], vec![3.0, 1.0]).unwrap();
        assert_eq!(vertex_residual(&ps, 0, Metric::Sine), 0.0);
    }

    #[test]
    fn rejects_bad_config() {
        let ps = WeightedPointSet::uniform(vec![UnitVector::basis(3, 0)]).unwrap();
        for cfg in [
            SolverConfig { restarts: 0, ..Default::default() },
            SolverConfig { max_iters: 0, ..Default::default() },
            SolverConfig { step_shrink: 1.0, ..Default::default() },
        ] {
            assert!(solve(&ps, &cfg).is_err());
        }
    }

    #[test]
    fn single_point_has_zero_value() {
        let a = UnitVector::from3(0.2, 0.3, -0.9).unwrap();
        let ps = WeightedPointSet::uniform(vec![a.clone()]).unwrap();
        let r = solve(&ps, &SolverConfig::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.minimizer.projectively_eq(&a));
    }

    #[test]
    fn angular_metric_runs() {
        let t = tri(50.0, 55.0, 58.0);
        let ps = WeightedPointSet::triangle(&t);
        let cfg = SolverConfig { metric: Metric::Angular, ..Default::default() };
        let r = solve(&ps, &cfg).unwrap();
        let direct = evaluate_raw(&ps, r.minimizer.as_slice(), Metric::Angular);
        assert_eq!(r.value, direct);
    }
}
