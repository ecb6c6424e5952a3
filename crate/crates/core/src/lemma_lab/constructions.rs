//! Auxiliary points used to reduce the general and isosceles cases to
//! configurations that are already understood.
//!
//! Every construction works in a fixed frame built from the triangle's angles,
//! so returned points are expressed in that frame, not in the coordinates of
//! the input triangle.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::projective::{det3, dot, Angle, ProjectiveTriangle, UnitVector};

/// Slack on angle hypotheses (radians).
pub const HYPOTHESIS_TOL: f64 = 1e-9;

const SIXTY: f64 = std::f64::consts::FRAC_PI_3;

/// `a = (cos α, sin α, 0)`, `b = (cos α, -sin α, 0)`, `c = g(β)` with
/// `g(ψ) = (cos ψ, 0, sin ψ)`, `2α = φ_AB` and `cos β = cos φ_AC / cos α`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsoscelesFrame {
    pub alpha: f64,
    pub beta: f64,
    pub beta_star: f64,
}

impl IsoscelesFrame {
    /// Frame for `φ_AB = base`, `φ_AC = φ_BC = legs`.
    ///
    /// Requires `60° <= base <= legs < 90°`.
    pub fn new(base: Angle, legs: Angle) -> Result<Self> {
        let tol = HYPOTHESIS_TOL;
        if base.0 < SIXTY - tol {
            return Err(Error::Hypothesis(format!("phi_AB = {base} is below 60 degrees")));
        }
        if base.0 > legs.0 + tol {
            return Err(Error::Hypothesis(format!("phi_AB = {base} exceeds phi_AC = {legs}")));
        }
        if legs.0 >= FRAC_PI_2 - tol {
            return Err(Error::Hypothesis(format!("phi_AC = {legs} must be below 90 degrees")));
        }
        let alpha = base.0 / 2.0;
        let beta = (legs.cos() / alpha.cos()).clamp(-1.0, 1.0).acos();
        let beta_star = (base.cos() / alpha.cos()).clamp(-1.0, 1.0).acos().min(beta);
        Ok(IsoscelesFrame { alpha, beta, beta_star })
    }

    /// Frame for a triangle with `φ_AC = φ_BC`.
    pub fn from_triangle(t: &ProjectiveTriangle) -> Result<Self> {
        let (ac, bc) = (t.phi_ac(), t.phi_bc());
        if (ac.0 - bc.0).abs() > HYPOTHESIS_TOL {
            return Err(Error::Hypothesis(format!("phi_AC = {ac} differs from phi_BC = {bc}")));
        }
        IsoscelesFrame::new(t.phi_ab(), Angle((ac.0 + bc.0) / 2.0))
    }

    pub fn a(&self) -> [f64; 3] {
        [self.alpha.cos(), self.alpha.sin(), 0.0]
    }

    pub fn b(&self) -> [f64; 3] {
        [self.alpha.cos(), -self.alpha.sin(), 0.0]
    }

    pub fn c(&self) -> [f64; 3] {
        g(self.beta)
    }

    pub fn c_star(&self) -> [f64; 3] {
        g(self.beta_star)
    }

    /// Barycentric-style coefficients of `p` in the cone over `(a, c, e_x)`.
    fn cone_coords(&self, p: &[f64]) -> [f64; 3] {
        let (a, c, e) = (self.a(), self.c(), [1.0, 0.0, 0.0]);
        let d = det3(&a, &c, &e);
        [det3(p, &c, &e) / d, det3(&a, p, &e) / d, det3(&a, &c, p) / d]
    }

    /// Whether `p` lies in the spherical triangle `(a, c, e_x)`.
    pub fn in_spherical_triangle(&self, p: &[f64]) -> bool {
        self.cone_coords(p).iter().all(|&l| l >= -1e-12)
    }

    /// Root of `f(ψ) = (p_x sin α - p_y cos α) sin ψ - p_z sin α cos ψ`: the
    /// point where the great circle through `a` and `p` meets the arc `c e_x`.
    pub fn beta_prime(&self, p: &[f64]) -> f64 {
        let (s, c) = self.alpha.sin_cos();
        (p[2] * s).atan2(p[0] * s - p[1] * c)
    }

    /// `β_p = max(β', β*)`; `β*` at `p = a`.
    pub fn beta_p(&self, p: &[f64]) -> f64 {
        if crate::projective::line_angle(p, &self.a()) < 1e-12 {
            return self.beta_star;
        }
        self.beta_prime(p).max(self.beta_star)
    }

    /// `c_p = g(β_p)` for `p` in the spherical triangle `(a, c, e_x)`.
    pub fn c_p(&self, p: &UnitVector) -> Result<UnitVector> {
        if p.dim() != 3 {
            return Err(Error::DimensionMismatch { left: p.dim(), right: 3 });
        }
        if !self.in_spherical_triangle(p.as_slice()) {
            return Err(Error::Hypothesis(format!("p = {p} is outside the triangle (a, c, e_x)")));
        }
        Ok(to_unit(g(self.beta_p(p.as_slice()))))
    }
}

/// `g(ψ) = (cos ψ, 0, sin ψ)`.
pub fn g(psi: f64) -> [f64; 3] {
    [psi.cos(), 0.0, psi.sin()]
}

fn to_unit(v: [f64; 3]) -> UnitVector {
    UnitVector::normalize(v.to_vec()).expect("frame vectors are unit")
}

/// `c* = (cos β*, 0, sin β*)` with `β* = arccos(cos φ_AB / cos α)`, in the
/// isosceles frame of `t`. It is equidistant from `a` and `b` at angle `φ_AB`.
pub fn construct_c_star(t: &ProjectiveTriangle) -> Result<UnitVector> {
    Ok(to_unit(IsoscelesFrame::from_triangle(t)?.c_star()))
}

/// `c_p` for `p` (given in the isosceles frame of `t`).
///
/// At `p = a` the great circle through `a` and `p` is undefined; `c*` is
/// returned.
pub fn construct_c_p(t: &ProjectiveTriangle, p: &UnitVector) -> Result<UnitVector> {
    IsoscelesFrame::from_triangle(t)?.c_p(p)
}

/// `a = (0,0,1)`, `b = (sin φ_AB, 0, cos φ_AB)`,
/// `c = (sin φ_AC cos α, sin φ_AC sin α, cos φ_AC)`, together with the
/// rotated copies `b'`, `c'` at azimuth `α'`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralFrame {
    pub phi_ab: f64,
    pub phi_ac: f64,
    pub phi_bc: f64,
    pub alpha: f64,
    pub alpha_prime: f64,
}

impl GeneralFrame {
    /// Requires `60° <= φ_AB <= φ_AC < φ_BC < 90°`.
    pub fn new(phi_ab: Angle, phi_ac: Angle, phi_bc: Angle) -> Result<Self> {
        let tol = HYPOTHESIS_TOL;
        let (ab, ac, bc) = (phi_ab.0, phi_ac.0, phi_bc.0);
        if ab < SIXTY - tol || ab > ac + tol || ac >= bc {
            return Err(Error::Hypothesis(format!(
                "need 60 <= phi_AB <= phi_AC < phi_BC, got {phi_ab}, {phi_ac}, {phi_bc}"
            )));
        }
        if bc >= FRAC_PI_2 - tol {
            return Err(Error::Hypothesis(format!("phi_BC = {phi_bc} makes the triangle big")));
        }
        let denom = ab.sin() * ac.sin();
        let cos_alpha = (bc.cos() - ab.cos() * ac.cos()) / denom;
        if !(cos_alpha.abs() < 1.0) {
            return Err(Error::Unrealizable(cos_alpha));
        }
        let cos_alpha_prime = (ac.cos() - ab.cos() * ac.cos()) / denom;
        Ok(GeneralFrame {
            phi_ab: ab,
            phi_ac: ac,
            phi_bc: bc,
            alpha: cos_alpha.acos(),
            alpha_prime: cos_alpha_prime.clamp(-1.0, 1.0).acos(),
        })
    }

    pub fn from_triangle(t: &ProjectiveTriangle) -> Result<Self> {
        GeneralFrame::new(t.phi_ab(), t.phi_ac(), t.phi_bc())
    }

    pub fn a(&self) -> [f64; 3] {
        [0.0, 0.0, 1.0]
    }

    pub fn b(&self) -> [f64; 3] {
        azimuth(self.phi_ab, 0.0)
    }

    pub fn c(&self) -> [f64; 3] {
        azimuth(self.phi_ac, self.alpha)
    }

    pub fn b_prime(&self) -> [f64; 3] {
        azimuth(self.phi_ab, self.alpha - self.alpha_prime)
    }

    pub fn c_prime(&self) -> [f64; 3] {
        azimuth(self.phi_ac, self.alpha_prime)
    }
}

/// `(sin φ cos θ, sin φ sin θ, cos φ)`.
pub fn azimuth(phi: f64, theta: f64) -> [f64; 3] {
    [phi.sin() * theta.cos(), phi.sin() * theta.sin(), phi.cos()]
}

/// `(b', c')` in the canonical frame of `t`: `a.c' = b.c' = b'.c = cos φ_AC`
/// and `a.b' = cos φ_AB`.
pub fn construct_b_prime_c_prime(t: &ProjectiveTriangle) -> Result<(UnitVector, UnitVector)> {
    let f = GeneralFrame::from_triangle(t)?;
    Ok((to_unit(f.b_prime()), to_unit(f.c_prime())))
}

/// Largest deviation of the four defining inner products of `b'`, `c'`.
pub fn b_prime_c_prime_defect(f: &GeneralFrame) -> f64 {
    let (a, b, c, bp, cp) = (f.a(), f.b(), f.c(), f.b_prime(), f.c_prime());
    let (cab, cac) = (f.phi_ab.cos(), f.phi_ac.cos());
    [dot(&a, &cp) - cac, dot(&b, &cp) - cac, dot(&bp, &c) - cac, dot(&a, &bp) - cab]
        .iter()
        .fold(0.0, |m: f64, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::{triangle_from_angles, AngleTriple};

    fn tri(x: f64, y: f64, z: f64) -> ProjectiveTriangle {
        triangle_from_angles(&AngleTriple::from_degrees(x, y, z).unwrap()).unwrap()
    }

    #[test]
    fn c_star_is_equiangular() {
        let f = IsoscelesFrame::from_triangle(&tri(70.0, 80.0, 80.0)).unwrap();
        let cs = construct_c_star(&tri(70.0, 80.0, 80.0)).unwrap();
        let c70 = 70f64.to_radians().cos();
        assert!((dot(&f.a(), cs.as_slice()) - c70).abs() < 1e-10);
        assert!((dot(&f.b(), cs.as_slice()) - c70).abs() < 1e-10);
        assert!(f.beta_star >= 0.0 && f.beta_star < f.beta);
        let c80 = 80f64.to_radians().cos();
        assert!((dot(&f.a(), &f.c()) - c80).abs() < 1e-12);
    }

    #[test]
    fn c_star_degenerate_and_rejected() {
        let f = IsoscelesFrame::new(Angle::from_degrees(70.0), Angle::from_degrees(70.0)).unwrap();
        assert!((f.beta_star - f.beta).abs() < 1e-12);
        assert!(IsoscelesFrame::new(Angle::from_degrees(70.0), Angle::RIGHT).is_err());
        assert!(IsoscelesFrame::new(Angle::from_degrees(50.0), Angle::from_degrees(70.0)).is_err());
        assert!(construct_c_star(&tri(65.0, 70.0, 80.0)).is_err());
    }

    #[test]
    fn c_p_conventions() {
        let t = tri(70.0, 80.0, 80.0);
        let f = IsoscelesFrame::from_triangle(&t).unwrap();
        let a = UnitVector::normalize(f.a().to_vec()).unwrap();
        let cp = construct_c_p(&t, &a).unwrap();
        assert!((dot(cp.as_slice(), &f.c_star()) - 1.0).abs() < 1e-15);

        // on arc(a, c): beta' = beta, so c_p = c and a, p, c_p are coplanar
        let (av, cv) = (f.a(), f.c());
        let p = UnitVector::normalize((0..3).map(|i| 0.6 * av[i] + 0.4 * cv[i]).collect()).unwrap();
        let cp = construct_c_p(&t, &p).unwrap();
        assert!(det3(&av, p.as_slice(), cp.as_slice()).abs() < 1e-10);
        assert!((f.beta_prime(p.as_slice()) - f.beta).abs() < 1e-12);

        // near e_x the intersection falls below beta*, so c_p = c*
        let p = UnitVector::normalize(vec![1.0, 0.05, 0.01]).unwrap();
        assert!(f.beta_prime(p.as_slice()) < f.beta_star);
        let cp = construct_c_p(&t, &p).unwrap();
        assert!((dot(cp.as_slice(), &f.c_star()) - 1.0).abs() < 1e-15);

        let outside = UnitVector::normalize(vec![0.0, 1.0, 0.0]).unwrap();
        assert!(construct_c_p(&t, &outside).is_err());
    }

    #[test]
    fn b_prime_c_prime_examples() {
        let f =
            GeneralFrame::new(Angle::from_degrees(65.0), Angle::from_degrees(70.0), Angle::from_degrees(80.0)).unwrap();
        assert!(b_prime_c_prime_defect(&f) < 1e-10);
        assert!(f.alpha_prime > f.alpha / 2.0 && f.alpha_prime < f.alpha);
        let (bp, cp) = construct_b_prime_c_prime(&tri(65.0, 70.0, 80.0)).unwrap();
        assert!((dot(&f.a(), cp.as_slice()) - 70f64.to_radians().cos()).abs() < 1e-10);
        assert!((dot(&f.a(), bp.as_slice()) - 65f64.to_radians().cos()).abs() < 1e-10);

        let f =
            GeneralFrame::new(Angle::from_degrees(60.0), Angle::from_degrees(60.0), Angle::from_degrees(70.0)).unwrap();
        assert!(f.alpha_prime > f.alpha / 2.0);

        let f =
            GeneralFrame::new(Angle::from_degrees(65.0), Angle::from_degrees(70.0), Angle(70f64.to_radians() + 1e-7))
                .unwrap();
        assert!((f.alpha - f.alpha_prime).abs() < 1e-5);

        assert!(
            GeneralFrame::new(Angle::from_degrees(65.0), Angle::from_degrees(70.0), Angle::from_degrees(70.0)).is_err()
        );
        assert!(construct_b_prime_c_prime(&tri(65.0, 80.0, 90.0)).is_err());
    }
}
