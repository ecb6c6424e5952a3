//! One-parameter reductions for the equilateral configuration.
//!
//! Three equiangular lines are written `a = μ(α,1,1)`, `b = μ(1,α,1)`,
//! `c = μ(1,1,α)` with `μ = (2+α²)^{-1/2}` and `α > 1`; their common angle
//! satisfies `cos φ = (1+2α)/(2+α²)`. Candidate points equidistant from `a`
//! and `b` are `p(w) = (1,1,w)/sqrt(2+w²)`, where `w = α` is the vertex `c` and
//! `w = 1` the centroid.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::projective::{Angle, UnitVector};

/// `φ = arccos((1+2α)/(2+α²))` for `α > 1`.
pub fn phi_from_alpha(alpha: f64) -> Result<Angle> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(Error::OutOfRange(format!("alpha = {alpha} must exceed 1")));
    }
    Ok(Angle(((1.0 + 2.0 * alpha) / (2.0 + alpha * alpha)).acos()))
}

/// Inverse of [`phi_from_alpha`]: the larger root `1/cos φ + sqrt(1/cos²φ + 1/cos φ - 2)`.
pub fn alpha_from_phi(phi: Angle) -> Result<f64> {
    if !(phi.0 > 0.0 && phi.0 < FRAC_PI_2) {
        return Err(Error::AngleOutOfRange(phi.0));
    }
    let s = 1.0 / phi.cos();
    Ok(s + (s * s + s - 2.0).max(0.0).sqrt())
}

/// `u = (2+w²)(2+α²) - (1+α+w)²`.
pub fn u_quantity(alpha: f64, w: f64) -> f64 {
    (2.0 + w * w) * (2.0 + alpha * alpha) - (1.0 + alpha + w).powi(2)
}

/// `(α-1)² + (w-1)² + (αw-1)²`, identical to [`u_quantity`] as a polynomial.
pub fn u_sum_of_squares(alpha: f64, w: f64) -> f64 {
    (alpha - 1.0).powi(2) + (w - 1.0).powi(2) + (alpha * w - 1.0).powi(2)
}

/// The sine objective of the α-parametrized equilateral triangle at `p(w)`:
/// `[2 u^{1/2} + √2 |α - w|] / [(2+w²)(2+α²)]^{1/2}`.
pub fn reduced_j(alpha: f64, w: f64) -> f64 {
    let u = u_sum_of_squares(alpha, w);
    (2.0 * u.sqrt() + std::f64::consts::SQRT_2 * (alpha - w).abs()) / ((2.0 + w * w) * (2.0 + alpha * alpha)).sqrt()
}

/// The representatives `μ(α,1,1), μ(1,α,1), μ(1,1,α)`.
pub fn equilateral_representatives(alpha: f64) -> Result<[UnitVector; 3]> {
    phi_from_alpha(alpha)?;
    Ok([
        UnitVector::normalize(vec![alpha, 1.0, 1.0])?,
        UnitVector::normalize(vec![1.0, alpha, 1.0])?,
        UnitVector::normalize(vec![1.0, 1.0, alpha])?,
    ])
}

/// `(1, 1, w)/sqrt(2 + w²)`.
pub fn reduced_point(w: f64) -> UnitVector {
    UnitVector::normalize(vec![1.0, 1.0, w]).expect("(1,1,w) is never zero")
}
