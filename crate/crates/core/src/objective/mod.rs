//! The Steiner-Weber objective `J(p) = Σ w_i d(v_i, p)` on the sphere, its
//! Riemannian gradient and the first-order stationarity residual.

pub mod reduced;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projective::{dot, line_angle, sine_dist, wedge_norm, ProjectiveTriangle, UnitVector};

pub use reduced::{
    alpha_from_phi, equilateral_representatives, phi_from_alpha, reduced_j, reduced_point, u_quantity, u_sum_of_squares,
};

/// `|v.p|` above this means `p` sits on the line of `v`; the objective is not
/// differentiable there.
pub const POLE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// `sin` of the angle between the lines.
    #[default]
    Sine,
    /// The angle itself, `arccos |v.p|`.
    Angular,
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sine" => Ok(Metric::Sine),
            "angular" => Ok(Metric::Angular),
            other => Err(Error::OutOfRange(format!("unknown metric {other:?}"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Sine => "sine",
            Metric::Angular => "angular",
        })
    }
}

/// Data lines with positive weights, all of the same dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedPointSet {
    points: Vec<UnitVector>,
    weights: Vec<f64>,
}

impl WeightedPointSet {
    pub fn new(points: Vec<UnitVector>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidPointSet("at least one point is required".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidPointSet(format!("{} points but {} weights", points.len(), weights.len())));
        }
        let dim = points[0].dim();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { left: dim, right: p.dim() });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidPointSet(format!("weight {w} is not positive")));
        }
        Ok(WeightedPointSet { points, weights })
    }

    pub fn uniform(points: Vec<UnitVector>) -> Result<Self> {
        let n = points.len();
        Self::new(points, vec![1.0; n])
    }

    /// The three vertices of a triangle, in label order, with unit weights.
    pub fn triangle(t: &ProjectiveTriangle) -> Self {
        WeightedPointSet { points: t.vertices().into_iter().cloned().collect(), weights: vec![1.0; 3] }
    }

    pub fn points(&self) -> &[UnitVector] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    /// Lipschitz constant of the sine objective with respect to geodesic angle.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn check_dim(&self, p: &UnitVector) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: p.dim() });
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn evaluate_raw(ps: &WeightedPointSet, p: &[f64], metric: Metric) -> f64 {
    let dist: fn(&[f64], &[f64]) -> f64 = match metric {
        Metric::Sine => sine_dist,
        Metric::Angular => line_angle,
    };
    ps.points.iter().zip(&ps.weights).map(|(v, w)| w * dist(v.as_slice(), p)).sum()
}

pub fn evaluate(ps: &WeightedPointSet, p: &UnitVector, metric: Metric) -> Result<f64> {
    ps.check_dim(p)?;
    Ok(evaluate_raw(ps, p.as_slice(), metric))
}

/// A vector in the tangent space of the sphere at `base`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: UnitVector,
    pub direction: Vec<f64>,
}

impl TangentVector {
    pub fn norm(&self) -> f64 {
        dot(&self.direction, &self.direction).sqrt()
    }
}

/// `τ_p(x) = (I - pp^T) x / sqrt(1 - (p.x)^2)`, the unit tangent at `p` pointing towards `x`.
pub fn tau(p: &UnitVector, x: &UnitVector) -> Result<UnitVector> {
    if p.dim() != x.dim() {
        return Err(Error::DimensionMismatch { left: p.dim(), right: x.dim() });
    }
    let px = p.dot(x);
    if px.abs() > 1.0 - POLE_TOL {
        return Err(Error::PoleSingularity(px.abs()));
    }
    let s = wedge_norm(p.as_slice(), x.as_slice());
    let v = p.as_slice().iter().zip(x.as_slice()).map(|(pi, xi)| (xi - px * pi) / s).collect();
    UnitVector::normalize(v)
}

/// Euclidean gradient of the extension of `J` off the sphere, before projection.
fn ambient_gradient(ps: &WeightedPointSet, p: &[f64], metric: Metric) -> Result<Vec<f64>> {
    let mut g = vec![0.0; p.len()];
    for (v, w) in ps.points.iter().zip(&ps.weights) {
        let x = dot(v.as_slice(), p);
        if x.abs() > 1.0 - POLE_TOL {
            return Err(Error::PoleSingularity(x.abs()));
        }
        let s = wedge_norm(v.as_slice(), p);
        // d/dp sqrt(1 - (v.p)^2) = -(v.p) v / s
        // d/dp arccos |v.p|      = -sign(v.p) v / s   (0 at v.p = 0)
        let coef = match metric {
            Metric::Sine => -w * x / s,
            Metric::Angular => {
                if x == 0.0 {
                    0.0
                } else {
                    -w * x.signum() / s
                }
            }
        };
        for (gi, vi) in g.iter_mut().zip(v.as_slice()) {
            *gi += coef * vi;
        }
    }
    Ok(g)
}

pub(crate) fn gradient_raw(ps: &WeightedPointSet, p: &[f64], metric: Metric) -> Result<Vec<f64>> {
    let mut g = ambient_gradient(ps, p, metric)?;
    let r = dot(&g, p);
    for (gi, pi) in g.iter_mut().zip(p) {
        *gi -= r * pi;
    }
    Ok(g)
}

/// Riemannian gradient of the sine objective, `-(I - pp^T) Σ w_i (v_i.p) v_i / sqrt(1 - (v_i.p)^2)`.
pub fn riemannian_gradient(ps: &WeightedPointSet, p: &UnitVector) -> Result<TangentVector> {
    riemannian_gradient_with(ps, p, Metric::Sine)
}

/// Riemannian gradient for either metric. The angular variant uses the
/// subgradient 0 for terms with `v.p = 0`.
pub fn riemannian_gradient_with(ps: &WeightedPointSet, p: &UnitVector, metric: Metric) -> Result<TangentVector> {
    ps.check_dim(p)?;
    let direction = gradient_raw(ps, p.as_slice(), metric)?;
    Ok(TangentVector { base: p.clone(), direction })
}

/// Norm of the Riemannian gradient; it vanishes at minimizers off the data lines.
pub fn stationarity_residual(ps: &WeightedPointSet, p: &UnitVector) -> Result<f64> {
    Ok(riemannian_gradient(ps, p)?.norm())
}

/// `Σ w_i (v_i.p) τ_p(v_i)`; equal to minus the Riemannian gradient.
pub fn tau_combination(ps: &WeightedPointSet, p: &UnitVector) -> Result<Vec<f64>> {
    ps.check_dim(p)?;
    let mut out = vec![0.0; p.dim()];
    for (v, w) in ps.points.iter().zip(&ps.weights) {
        let t = tau(p, v)?;
        let x = v.dot(p);
        for (o, ti) in out.iter_mut().zip(t.as_slice()) {
            *o += w * x * ti;
        }
    }
    Ok(out)
}
