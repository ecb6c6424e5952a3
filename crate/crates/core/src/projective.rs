//! Points of real projective space represented by unit vectors, the sine and
//! angular metrics between them, and projective triangles in P².
//!
//! A projective point is a line through the origin; any of its two unit
//! representatives `±v` may be stored. All metrics here are invariant under
//! flipping either argument.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Norm tolerance for [`UnitVector`].
pub const UNIT_TOL: f64 = 1e-12;
/// `|det(a, b, c)|` below this is treated as collinear.
pub const COLLINEAR_TOL: f64 = 1e-10;
/// Two representatives describe the same line when `min(|p-q|, |p+q|)` is below this.
pub const PROJECTIVE_EQ_TOL: f64 = 1e-9;
/// Default tolerance (radians) for deciding that two angles are equal.
pub const DEFAULT_ANGLE_TOL: f64 = 1e-9;
/// Tolerance used by the CLI `--physical` flag for noisy inputs.
pub const PHYSICAL_ANGLE_TOL: f64 = 1e-6;
/// Inner products with magnitude below this count as zero when deciding bigness.
pub const ORTHOGONAL_TOL: f64 = 1e-12;

/// A point of the unit sphere S^{D-1}, used as a representative of a point of P^{D-1}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Accepts coordinates whose Euclidean norm is 1 within [`UNIT_TOL`].
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionTooSmall(coords.len()));
        }
        let norm = norm(&coords);
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit(norm));
        }
        Ok(UnitVector(coords))
    }

    /// Scales any non-zero finite vector onto the sphere.
    pub fn normalize(mut coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionTooSmall(coords.len()));
        }
        let n = norm(&coords);
        if !n.is_finite() || n == 0.0 {
            return Err(Error::ZeroVector);
        }
        coords.iter_mut().for_each(|x| *x /= n);
        Ok(UnitVector(coords))
    }

    pub(crate) fn from_unit_unchecked(coords: Vec<f64>) -> Self {
        debug_assert!((norm(&coords) - 1.0).abs() < 1e-9);
        UnitVector(coords)
    }

    pub fn from3(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::normalize(vec![x, y, z])
    }

    /// The `i`-th standard basis vector of R^dim.
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!(dim >= 2 && i < dim);
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        UnitVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn neg(&self) -> UnitVector {
        UnitVector(self.0.iter().map(|x| -x).collect())
    }

    /// Whether `self` and `other` represent the same projective point.
    pub fn projectively_eq(&self, other: &UnitVector) -> bool {
        self.dim() == other.dim() && projective_gap(&self.0, &other.0) < PROJECTIVE_EQ_TOL
    }

    /// Angle between the two vectors on the sphere, in `[0, pi]`.
    pub fn geodesic(&self, other: &UnitVector) -> f64 {
        sphere_angle(&self.0, &other.0)
    }

    /// Angle between the two lines, in `[0, pi/2]`.
    pub fn projective_angle(&self, other: &UnitVector) -> f64 {
        line_angle(&self.0, &other.0)
    }
}

impl TryFrom<Vec<f64>> for UnitVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        UnitVector::new(v)
    }
}

impl From<UnitVector> for Vec<f64> {
    fn from(v: UnitVector) -> Self {
        v.0
    }
}

impl fmt::Display for UnitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x:.9}")?;
        }
        write!(f, ")")
    }
}

// Raw slice helpers shared by the hot loops of the objective and the oracle.

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Norm of the bivector `a ∧ b`; for unit vectors this is `sin` of the angle
/// between them and it vanishes exactly when `b = ±a`.
#[inline]
pub(crate) fn wedge_norm(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() == 3 {
        let c = cross(&[a[0], a[1], a[2]], &[b[0], b[1], b[2]]);
        return (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    }
    let mut s = 0.0;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            let m = a[i] * b[j] - a[j] * b[i];
            s += m * m;
        }
    }
    s.sqrt()
}

#[inline]
pub(crate) fn sine_dist(a: &[f64], b: &[f64]) -> f64 {
    wedge_norm(a, b).min(1.0)
}

#[inline]
pub(crate) fn line_angle(a: &[f64], b: &[f64]) -> f64 {
    wedge_norm(a, b).atan2(dot(a, b).abs())
}

#[inline]
pub(crate) fn sphere_angle(a: &[f64], b: &[f64]) -> f64 {
    wedge_norm(a, b).atan2(dot(a, b))
}

pub(crate) fn projective_gap(a: &[f64], b: &[f64]) -> f64 {
    let minus: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let plus: f64 = a.iter().zip(b).map(|(x, y)| (x + y) * (x + y)).sum();
    minus.min(plus).sqrt()
}

#[inline]
pub(crate) fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn det3(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let ab = cross(&[a[0], a[1], a[2]], &[b[0], b[1], b[2]]);
    ab[0] * c[0] + ab[1] * c[1] + ab[2] * c[2]
}

fn check_dims(p: &UnitVector, q: &UnitVector) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { left: p.dim(), right: q.dim() });
    }
    Ok(())
}

/// Sine distance `sqrt(1 - (p.q)^2)`: the Euclidean distance from `p` to the line through `q`.
///
/// Computed as the norm of `p ∧ q`, which agrees with the closed form for unit
/// vectors and stays accurate for nearly coincident lines.
pub fn sine_distance(p: &UnitVector, q: &UnitVector) -> Result<f64> {
    check_dims(p, q)?;
    Ok(sine_dist(&p.0, &q.0))
}

/// Angular distance `arccos |p.q|` between the two lines.
pub fn angular_distance(p: &UnitVector, q: &UnitVector) -> Result<Angle> {
    check_dims(p, q)?;
    Ok(Angle(line_angle(&p.0, &q.0)))
}

/// An angle in radians.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(pub f64);

impl Angle {
    pub const RIGHT: Angle = Angle(FRAC_PI_2);

    pub fn from_degrees(deg: f64) -> Angle {
        Angle(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    /// Equality of angles up to `tol` radians.
    pub fn approx_eq(self, other: Angle, tol: f64) -> bool {
        (self.0 - other.0).abs() < tol
    }

    fn check_line_angle(self) -> Result<Self> {
        if !(self.0 > 0.0 && self.0 <= FRAC_PI_2 + 1e-15) {
            return Err(Error::AngleOutOfRange(self.0));
        }
        Ok(Angle(self.0.min(FRAC_PI_2)))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}°", self.degrees())
    }
}

/// Three line angles sorted ascending.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleTriple {
    pub smallest: Angle,
    pub middle: Angle,
    pub largest: Angle,
}

impl AngleTriple {
    /// Sorts the three angles; each must lie in `(0, pi/2]`.
    pub fn new(x: Angle, y: Angle, z: Angle) -> Result<Self> {
        let mut v = [x.check_line_angle()?, y.check_line_angle()?, z.check_line_angle()?];
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(AngleTriple { smallest: v[0], middle: v[1], largest: v[2] })
    }

    pub fn from_degrees(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Angle::from_degrees(x), Angle::from_degrees(y), Angle::from_degrees(z))
    }

    pub fn to_degrees(self) -> [f64; 3] {
        [self.smallest.degrees(), self.middle.degrees(), self.largest.degrees()]
    }

    pub fn is_equilateral(self, tol: f64) -> bool {
        self.smallest.approx_eq(self.largest, tol)
    }
}

/// Three non-collinear lines in R³ labelled so that `phi_ab <= phi_ac <= phi_bc`.
///
/// For triangles that are not big the stored representatives have pairwise
/// positive inner products. For big triangles `a` is kept and `b`, `c` are
/// flipped so that `a.b >= 0` and `a.c >= 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveTriangle {
    a: UnitVector,
    b: UnitVector,
    c: UnitVector,
    phi_ab: Angle,
    phi_ac: Angle,
    phi_bc: Angle,
    vertex_order: [usize; 3],
}

impl ProjectiveTriangle {
    pub fn a(&self) -> &UnitVector {
        &self.a
    }
    pub fn b(&self) -> &UnitVector {
        &self.b
    }
    pub fn c(&self) -> &UnitVector {
        &self.c
    }
    pub fn phi_ab(&self) -> Angle {
        self.phi_ab
    }
    pub fn phi_ac(&self) -> Angle {
        self.phi_ac
    }
    pub fn phi_bc(&self) -> Angle {
        self.phi_bc
    }

    /// `vertex_order()[k]` is the input index of the line labelled `A`, `B`, `C` for `k = 0, 1, 2`.
    pub fn vertex_order(&self) -> [usize; 3] {
        self.vertex_order
    }

    pub fn vertices(&self) -> [&UnitVector; 3] {
        [&self.a, &self.b, &self.c]
    }

    pub fn angles(&self) -> AngleTriple {
        AngleTriple { smallest: self.phi_ab, middle: self.phi_ac, largest: self.phi_bc }
    }

    /// `(a.b)(a.c)(b.c)`; its sign does not depend on the representatives.
    pub fn sign_product(&self) -> f64 {
        self.a.dot(&self.b) * self.a.dot(&self.c) * self.b.dot(&self.c)
    }
}

/// Labels three lines by their angles and picks representatives.
pub fn normalize_signs(lines: [UnitVector; 3]) -> Result<ProjectiveTriangle> {
    for l in &lines {
        if l.dim() != 3 {
            return Err(Error::DimensionMismatch { left: l.dim(), right: 3 });
        }
    }
    let det = det3(&lines[0].0, &lines[1].0, &lines[2].0);
    if det.abs() <= COLLINEAR_TOL {
        return Err(Error::Collinear(det.abs()));
    }
    // opposite[i] is the angle of the side not touching vertex i
    let opposite = [
        line_angle(&lines[1].0, &lines[2].0),
        line_angle(&lines[0].0, &lines[2].0),
        line_angle(&lines[0].0, &lines[1].0),
    ];
    // A faces the largest side, C the smallest; ties keep input order
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| opposite[j].total_cmp(&opposite[i]));
    let [ia, ib, ic] = order;

    let a = lines[ia].clone();
    let mut b = lines[ib].clone();
    let mut c = lines[ic].clone();
    if a.dot(&b) < 0.0 {
        b = b.neg();
    }
    if a.dot(&c) < 0.0 {
        c = c.neg();
    }
    Ok(ProjectiveTriangle {
        phi_ab: Angle(opposite[ic]),
        phi_ac: Angle(opposite[ib]),
        phi_bc: Angle(opposite[ia]),
        a,
        b,
        c,
        vertex_order: order,
    })
}

/// Big triangles satisfy `(a.b)(b.c)(a.c) <= 0`; a right angle counts as a zero factor.
pub fn is_big(t: &ProjectiveTriangle) -> bool {
    let ab = t.a.dot(&t.b);
    let ac = t.a.dot(&t.c);
    let bc = t.b.dot(&t.c);
    if ab.abs() <= ORTHOGONAL_TOL || ac.abs() <= ORTHOGONAL_TOL || bc.abs() <= ORTHOGONAL_TOL {
        return true;
    }
    ab * ac * bc <= 0.0
}

/// `cos` of the dihedral angle at `a` between the planes `(a, b)` and `(a, c)`.
pub fn dihedral_cos(angles: &AngleTriple) -> f64 {
    let (ab, ac, bc) = (angles.smallest, angles.middle, angles.largest);
    (bc.cos() - ab.cos() * ac.cos()) / (ab.sin() * ac.sin())
}

const REALIZABLE_TOL: f64 = 1e-12;

/// Builds the triangle `a = (0,0,1)`, `b = (sin φ_AB, 0, cos φ_AB)`,
/// `c = (sin φ_AC cos α, sin φ_AC sin α, cos φ_AC)` with the given angles.
///
/// All pairwise inner products of the result are non-negative, so the triangle
/// is big only when one of the angles is a right angle.
pub fn triangle_from_angles(angles: &AngleTriple) -> Result<ProjectiveTriangle> {
    let cos_alpha = dihedral_cos(angles);
    if !cos_alpha.is_finite() || cos_alpha.abs() > 1.0 + REALIZABLE_TOL {
        return Err(Error::Unrealizable(cos_alpha));
    }
    if cos_alpha.abs() >= 1.0 - REALIZABLE_TOL {
        return Err(Error::Degenerate(cos_alpha));
    }
    let alpha = cos_alpha.acos();
    let (ab, ac) = (angles.smallest, angles.middle);
    let a = vec![0.0, 0.0, 1.0];
    let b = vec![ab.sin(), 0.0, ab.cos()];
    let c = vec![ac.sin() * alpha.cos(), ac.sin() * alpha.sin(), ac.cos()];
    normalize_signs([UnitVector::normalize(a)?, UnitVector::normalize(b)?, UnitVector::normalize(c)?])
}

/// Normalized sum `(a+b+c)/|a+b+c|` of the stored representatives.
///
/// Fails for triangles whose representatives cannot all have non-negative
/// pairwise inner products.
pub fn centroid(t: &ProjectiveTriangle) -> Result<UnitVector> {
    if t.b.dot(&t.c) < -ORTHOGONAL_TOL {
        return Err(Error::BigTriangle);
    }
    let s: Vec<f64> = (0..3).map(|i| t.a.0[i] + t.b.0[i] + t.c.0[i]).collect();
    UnitVector::normalize(s)
}

/// Sampling constraints for [`random_triangle`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TriangleConstraint {
    Any,
    NonBig,
    Big,
    /// Sorted smallest angle at least this large.
    MinAngle(Angle),
    Equilateral(Angle),
    /// `phi_ab = base`, `phi_ac = phi_bc = legs`.
    Isosceles {
        base: Angle,
        legs: Angle,
    },
}

const MAX_REJECTIONS: usize = 100_000;

/// Uniformly distributed point on S².
pub(crate) fn random_sphere_point<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let theta: f64 = rng.gen_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * theta.cos(), r * theta.sin(), z]
}

/// Uniformly distributed rotation matrix (Shoemake's quaternion method).
pub(crate) fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> [[f64; 3]; 3] {
    let (u1, u2, u3): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
    let (s1, s2) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (w, x, y, z) = (
        s1 * (2.0 * PI * u2).sin(),
        s1 * (2.0 * PI * u2).cos(),
        s2 * (2.0 * PI * u3).sin(),
        s2 * (2.0 * PI * u3).cos(),
    );
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
        [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
        [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

pub(crate) fn rotate(m: &[[f64; 3]; 3], v: &UnitVector) -> UnitVector {
    let s = v.as_slice();
    let r = (0..3).map(|i| dot(&m[i], s)).collect();
    UnitVector::from_unit_unchecked(r)
}

fn random_lines(rng: &mut ChaCha8Rng) -> Result<ProjectiveTriangle> {
    let mk = |rng: &mut ChaCha8Rng| {
        let p = random_sphere_point(rng);
        UnitVector::from_unit_unchecked(p.to_vec())
    };
    let lines = [mk(rng), mk(rng), mk(rng)];
    normalize_signs(lines)
}

fn rotated_from_angles(rng: &mut ChaCha8Rng, angles: &AngleTriple) -> Result<ProjectiveTriangle> {
    let t = triangle_from_angles(angles)?;
    let m = random_rotation(rng);
    let lines = [rotate(&m, &t.a), rotate(&m, &t.b), rotate(&m, &t.c)];
    normalize_signs(lines)
}

/// Deterministic random triangle for the given seed and constraint.
///
/// Unconstrained vertices are uniform on the sphere; constrained variants use
/// rejection. Equilateral and isosceles shapes are built from their angles and
/// then rotated randomly.
pub fn random_triangle(seed: u64, constraint: TriangleConstraint) -> Result<ProjectiveTriangle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match constraint {
        TriangleConstraint::Equilateral(phi) => {
            let angles = AngleTriple::new(phi, phi, phi)?;
            return rotated_from_angles(&mut rng, &angles);
        }
        TriangleConstraint::Isosceles { base, legs } => {
            let angles = AngleTriple::new(base, legs, legs)?;
            return rotated_from_angles(&mut rng, &angles);
        }
        _ => {}
    }
    for _ in 0..MAX_REJECTIONS {
        let t = match random_lines(&mut rng) {
            Ok(t) => t,
            Err(Error::Collinear(_)) => continue,
            Err(e) => return Err(e),
        };
        let accept = match constraint {
            TriangleConstraint::Any => true,
            TriangleConstraint::NonBig => !is_big(&t),
            TriangleConstraint::Big => is_big(&t),
            TriangleConstraint::MinAngle(min) => t.phi_ab.0 >= min.0,
            _ => unreachable!(),
        };
        if accept {
            return Ok(t);
        }
    }
    Err(Error::Infeasible(MAX_REJECTIONS))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64, z: f64) -> UnitVector {
        UnitVector::from3(x, y, z).unwrap()
    }

    #[test]
    fn sine_distance_examples() {
        let e1 = v(1.0, 0.0, 0.0);
        assert_eq!(sine_distance(&e1, &e1).unwrap(), 0.0);
        assert_eq!(sine_distance(&e1, &v(0.0, 1.0, 0.0)).unwrap(), 1.0);
        let d = sine_distance(&e1, &v(0.5, 3f64.sqrt() / 2.0, 0.0)).unwrap();
        assert!((d - 0.866_025_403_784_438_6).abs() < 1e-15);
        assert_eq!(sine_distance(&e1, &e1.neg()).unwrap(), 0.0);
    }

    #[test]
    fn angular_distance_examples() {
        let e1 = v(1.0, 0.0, 0.0);
        assert_eq!(angular_distance(&e1, &e1).unwrap().0, 0.0);
        let r = angular_distance(&e1, &v(0.0, 0.0, 1.0)).unwrap().0;
        assert!((r - FRAC_PI_2).abs() < 1e-15);
        let r = angular_distance(&e1, &v(1.0, 1.0, 0.0)).unwrap().0;
        assert!((r - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let p = UnitVector::basis(3, 0);
        let q = UnitVector::basis(4, 0);
        assert_eq!(sine_distance(&p, &q), Err(Error::DimensionMismatch { left: 3, right: 4 }));
        assert!(angular_distance(&p, &q).is_err());
    }

    #[test]
    fn unit_vector_validation() {
        assert!(UnitVector::new(vec![1.0, 0.0]).is_ok());
        assert!(matches!(UnitVector::new(vec![1.0, 1.0]), Err(Error::NotUnit(_))));
        assert_eq!(UnitVector::normalize(vec![0.0, 0.0, 0.0]), Err(Error::ZeroVector));
        assert_eq!(UnitVector::new(vec![1.0]), Err(Error::DimensionTooSmall(1)));
    }

    #[test]
    fn projective_equality_ignores_sign() {
        let p = v(1.0, 2.0, 3.0);
        assert!(p.projectively_eq(&p.neg()));
        assert!(!p.projectively_eq(&v(1.0, 2.0, 3.1)));
    }

    #[test]
    fn orthonormal_basis_is_kept() {
        let t = normalize_signs([v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0), v(0.0, 0.0, 1.0)]).unwrap();
        assert_eq!(t.vertex_order(), [0, 1, 2]);
        assert_eq!(t.a().as_slice(), &[1.0, 0.0, 0.0]);
        for ang in [t.phi_ab(), t.phi_ac(), t.phi_bc()] {
            assert!((ang.degrees() - 90.0).abs() < 1e-12);
        }
        assert!(is_big(&t));
    }

    #[test]
    fn sign_flip_is_undone() {
        let t0 = triangle_from_angles(&AngleTriple::from_degrees(50.0, 55.0, 58.0).unwrap()).unwrap();
        let t = normalize_signs([t0.a().clone(), t0.b().neg(), t0.c().clone()]).unwrap();
        assert!(t.a().dot(t.b()) > 0.0 && t.a().dot(t.c()) > 0.0 && t.b().dot(t.c()) > 0.0);
    }

    #[test]
    fn collinear_lines_are_rejected() {
        let r = normalize_signs([v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0), v(1.0, 1.0, 0.0)]);
        assert!(matches!(r, Err(Error::Collinear(_))));
    }

    #[test]
    fn big_examples() {
        let eq80 = triangle_from_angles(&AngleTriple::from_degrees(80.0, 80.0, 80.0).unwrap()).unwrap();
        assert!(!is_big(&eq80));
        let t = normalize_signs([v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0), v(1.0, 1.0, 1.0)]).unwrap();
        assert!(is_big(&t));
    }

    #[test]
    fn triangle_from_angles_remeasures() {
        let angles = AngleTriple::from_degrees(65.0, 70.0, 80.0).unwrap();
        // closed form for the dihedral cosine, evaluated independently
        let (c65, c70, c80) = (65f64.to_radians().cos(), 70f64.to_radians().cos(), 80f64.to_radians().cos());
        let expect = (c80 - c65 * c70) / (65f64.to_radians().sin() * 70f64.to_radians().sin());
        assert!((dihedral_cos(&angles) - expect).abs() < 1e-15);
        assert!((expect - 0.03418).abs() < 1e-5);
        let t = triangle_from_angles(&angles).unwrap();
        assert!((t.a().projective_angle(t.b()).to_degrees() - 65.0).abs() < 1e-10);
        assert!((t.a().projective_angle(t.c()).to_degrees() - 70.0).abs() < 1e-10);
        assert!((t.b().projective_angle(t.c()).to_degrees() - 80.0).abs() < 1e-10);
    }

    #[test]
    fn unrealizable_angles() {
        let angles = AngleTriple::from_degrees(30.0, 40.0, 85.0).unwrap();
        match triangle_from_angles(&angles) {
            Err(Error::Unrealizable(c)) => assert!((c + 1.793).abs() < 1e-3),
            other => panic!("expected Unrealizable, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_angles() {
        // 30 + 40 = 70: the third line lies in the plane of the first two
        let angles = AngleTriple::from_degrees(30.0, 40.0, 70.0).unwrap();
        assert!(matches!(triangle_from_angles(&angles), Err(Error::Degenerate(_))));
    }

    #[test]
    fn angle_range_is_checked() {
        assert!(AngleTriple::from_degrees(0.0, 40.0, 70.0).is_err());
        assert!(AngleTriple::from_degrees(30.0, 40.0, 91.0).is_err());
        assert!(AngleTriple::from_degrees(90.0, 90.0, 90.0).is_ok());
    }

    #[test]
    fn right_angles_give_orthonormal_frame() {
        let t = triangle_from_angles(&AngleTriple::from_degrees(90.0, 90.0, 90.0).unwrap()).unwrap();
        assert!(is_big(&t));
        for (x, y) in [(t.a(), t.b()), (t.a(), t.c()), (t.b(), t.c())] {
            assert!(x.dot(y).abs() < 1e-15);
        }
    }

    #[test]
    fn centroid_examples() {
        let t = normalize_signs([v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0), v(0.0, 0.0, 1.0)]).unwrap();
        let e = centroid(&t).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!(e.as_slice().iter().all(|x| (x - s).abs() < 1e-15));

        // e.a = (1 + 2z)/sqrt(3 + 6z) with z = cos 60°
        let t = triangle_from_angles(&AngleTriple::from_degrees(60.0, 60.0, 60.0).unwrap()).unwrap();
        let e = centroid(&t).unwrap();
        for x in t.vertices() {
            assert!((e.dot(x) - 2.0 / 6f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn centroid_rejects_sign_ambiguous_triangles() {
        // a.b > 0, a.c > 0, b.c < 0 for every choice of representatives
        let t = normalize_signs([v(1.0, 0.0, 0.0), v(1.0, 1.0, 0.1), v(1.0, -1.2, 0.1)]).unwrap();
        assert!(t.sign_product() < 0.0);
        assert_eq!(centroid(&t), Err(Error::BigTriangle));
    }

    #[test]
    fn random_triangle_is_deterministic() {
        let t1 = random_triangle(3, TriangleConstraint::Any).unwrap();
        let t2 = random_triangle(3, TriangleConstraint::Any).unwrap();
        assert_eq!(t1, t2);
        assert_ne!(t1, random_triangle(4, TriangleConstraint::Any).unwrap());
    }

    #[test]
    fn random_triangle_constraints() {
        let t = random_triangle(1, TriangleConstraint::Equilateral(Angle::from_degrees(60.0))).unwrap();
        for ang in [t.phi_ab(), t.phi_ac(), t.phi_bc()] {
            assert!((ang.degrees() - 60.0).abs() < 1e-10);
        }
        let t = random_triangle(2, TriangleConstraint::MinAngle(Angle::from_degrees(60.0))).unwrap();
        assert!(t.phi_ab().degrees() >= 60.0);
        let t = random_triangle(7, TriangleConstraint::NonBig).unwrap();
        assert!(t.a().dot(t.b()) > 0.0 && t.a().dot(t.c()) > 0.0 && t.b().dot(t.c()) > 0.0);
        let t = random_triangle(
            5,
            TriangleConstraint::Isosceles { base: Angle::from_degrees(65.0), legs: Angle::from_degrees(80.0) },
        )
        .unwrap();
        assert!((t.phi_ab().degrees() - 65.0).abs() < 1e-10);
        assert!((t.phi_ac().degrees() - 80.0).abs() < 1e-10);
        assert!((t.phi_bc().degrees() - 80.0).abs() < 1e-10);
    }

    #[test]
    fn non_big_signs_match_enumeration() {
        // Among the four sign classes of (b, c) with a fixed, exactly one makes
        // all products positive whenever the sign product is positive.
        for seed in 0..50 {
            let t = random_triangle(seed, TriangleConstraint::Any).unwrap();
            let [a, b, c] = t.vertices();
            let mut positive = 0;
            for sb in [1.0, -1.0] {
                for sc in [1.0, -1.0] {
                    let (ab, ac, bc) = (sb * a.dot(b), sc * a.dot(c), sb * sc * b.dot(c));
                    if ab > 0.0 && ac > 0.0 && bc > 0.0 {
                        positive += 1;
                        assert!(sb == 1.0 && sc == 1.0);
                    }
                }
            }
            assert_eq!(positive, usize::from(!is_big(&t)));
        }
    }
}
