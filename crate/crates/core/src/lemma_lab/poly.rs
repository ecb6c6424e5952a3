//! Polynomials of the equilateral analysis, written once and evaluated over
//! `f64`, exact `i128`, and [`Mag`] (term magnitudes for relative residuals).

use std::ops::{Add, Mul, Sub};

/// The operations the polynomial formulas need.
pub trait Ring: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + From<i32> {}

impl<T> Ring for T where T: Copy + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + From<i32> {}

/// Evaluates a formula with every operation replaced by its magnitude bound:
/// `|a ± b| <= |a| + |b|`, `|ab| = |a||b|`. The result scales the rounding
/// error of the same formula evaluated in `f64`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Mag(pub f64);

impl Mag {
    pub fn of(x: f64) -> Mag {
        Mag(x.abs())
    }
}

impl Add for Mag {
    type Output = Mag;
    fn add(self, o: Mag) -> Mag {
        Mag(self.0 + o.0)
    }
}

impl Sub for Mag {
    type Output = Mag;
    // |x - y| <= |x| + |y|
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, o: Mag) -> Mag {
        Mag(self.0 + o.0)
    }
}

impl Mul for Mag {
    type Output = Mag;
    fn mul(self, o: Mag) -> Mag {
        Mag(self.0 * o.0)
    }
}

impl From<i32> for Mag {
    fn from(k: i32) -> Mag {
        Mag((k as f64).abs())
    }
}

fn k<T: Ring>(c: i32) -> T {
    T::from(c)
}

fn sq<T: Ring>(x: T) -> T {
    x * x
}

fn cube<T: Ring>(x: T) -> T {
    x * x * x
}

/// Variables in the order `X1, X2, X3, Y1, Y2, Y3, Z`.
pub type Point7<T> = [T; 7];

/// `F1, ..., F6` and `F = (1-Z)(Y1-Y2)(Y2-Y3)(Y3-Y1)(Y1+Y2+Y3)`.
pub fn f_system<T: Ring>(v: &Point7<T>) -> [T; 7] {
    let [x1, x2, x3, y1, y2, y3, z] = *v;
    let one = k::<T>(1);
    [
        x1 * y1 * y2 * y3 + x2 * y3 * (z - x1 * x2) + x3 * y2 * (z - x1 * x3),
        x1 * y3 * (z - x1 * x2) + x2 * y1 * y2 * y3 + x3 * y1 * (z - x2 * x3),
        x1 * y2 * (z - x1 * x3) + x2 * y1 * (z - x2 * x3) + x3 * y1 * y2 * y3,
        sq(x1) + sq(y1) - one,
        sq(x2) + sq(y2) - one,
        sq(x3) + sq(y3) - one,
        (one - z) * (y1 - y2) * (y2 - y3) * (y3 - y1) * (y1 + y2 + y3),
    ]
}

/// Coefficients of `F4, F5, F6` in `F'`.
fn g_terms<T: Ring>(v: &Point7<T>) -> [T; 3] {
    let [_, _, _, y1, y2, y3, z] = *v;
    let one = k::<T>(1);
    [
        cube(y2) * y3 * (z - one) + y2 * cube(y3) * (one - z),
        cube(y1) * y3 * (one - z) + y1 * cube(y3) * (z - one),
        cube(y1) * y2 * (z - one) + y1 * cube(y2) * (one - z),
    ]
}

/// `F' = F4 G4 + F5 G5 + F6 G6 + F`.
pub fn f_prime<T: Ring>(v: &Point7<T>) -> T {
    let f = f_system(v);
    let g = g_terms(v);
    f[3] * g[0] + f[4] * g[1] + f[5] * g[2] + f[6]
}

/// `F'''` with `F'' = (Z-1) F'''`.
pub fn f_triple<T: Ring>(v: &Point7<T>) -> T {
    let [x1, x2, x3, y1, y2, y3, _] = *v;
    (sq(x1) + sq(y1)) * y2 * y3 * (sq(x3) - sq(x2))
        + (sq(x2) + sq(y2)) * y1 * y3 * (sq(x1) - sq(x3))
        + (sq(x3) + sq(y3)) * y1 * y2 * (sq(x2) - sq(x1))
}

/// `F'' = (Z-1) F'''`, the reduction of `F'` by `Y_i^3 -> Y_i (1 - X_i^2)`.
pub fn f_double<T: Ring>(v: &Point7<T>) -> T {
    (v[6] - k(1)) * f_triple(v)
}

/// `F'''' = X1X2Y3(Y1-Y2) + X1X3Y2(Y3-Y1) + X2X3Y1(Y2-Y3)`.
pub fn f_quad<T: Ring>(v: &Point7<T>) -> T {
    let [x1, x2, x3, y1, y2, y3, _] = *v;
    x1 * x2 * y3 * (y1 - y2) + x1 * x3 * y2 * (y3 - y1) + x2 * x3 * y1 * (y2 - y3)
}

/// Cofactors `K_i` with `F' - F'' = K1 Y1 F4 + K2 Y2 F5 + K3 Y3 F6`.
fn k_terms<T: Ring>(v: &Point7<T>) -> [T; 3] {
    let [_, _, _, y1, y2, y3, z] = *v;
    let f = f_system(v);
    let one = k::<T>(1);
    [
        y3 * (one - z) * f[4] + y2 * (z - one) * f[5] + y2 * (z - one) + y3 * (one - z),
        y3 * (z - one) * f[3] + y1 * (one - z) * f[5] + y1 * (one - z) + y3 * (z - one),
        y2 * (one - z) * f[3] + y1 * (z - one) * f[4] + y1 * (z - one) + y2 * (one - z),
    ]
}

/// Explicit `C1, ..., C6` with `F = Σ C_i F_i`, assembled from the chain.
pub fn flat_cofactors<T: Ring>(v: &Point7<T>) -> [T; 6] {
    let [x1, x2, x3, y1, y2, y3, z] = *v;
    let one = k::<T>(1);
    let g = g_terms(v);
    let kk = k_terms(v);
    [
        z * y1 * (x2 - x3) - (z - one) * x1 * (y3 - y2),
        z * y2 * (x3 - x1) - (z - one) * x2 * (y1 - y3),
        z * y3 * (x1 - x2) - (z - one) * x3 * (y2 - y1),
        z * x1 * y2 * y3 * (x3 - x2) + kk[0] * y1 - g[0],
        z * x2 * y1 * y3 * (x1 - x3) + kk[1] * y2 - g[1],
        z * x3 * y1 * y2 * (x2 - x1) + kk[2] * y3 - g[2],
    ]
}

/// The displayed steps from `F` to membership in the ideal of `F1..F6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChainLink {
    /// `F` equals its six-monomial expansion.
    Expansion,
    /// `F' - F''` is a combination of `F4, F5, F6`.
    CubeReduction,
    /// `F'' = (Z-1) F'''`.
    Factor,
    /// `F''' + X1(Y3-Y2)F1 + X2(Y1-Y3)F2 + X3(Y2-Y1)F3 = Z F''''`.
    Reduction,
    /// `(Z-1) F''''` as a combination of `F1..F6`.
    Membership,
    /// `F = Σ C_i F_i` with the assembled cofactors.
    Flattened,
}

impl ChainLink {
    pub const ALL: [ChainLink; 6] = [
        ChainLink::Expansion,
        ChainLink::CubeReduction,
        ChainLink::Factor,
        ChainLink::Reduction,
        ChainLink::Membership,
        ChainLink::Flattened,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChainLink::Expansion => "F expansion",
            ChainLink::CubeReduction => "F' - F'' in (F4, F5, F6)",
            ChainLink::Factor => "F'' = (Z-1) F'''",
            ChainLink::Reduction => "F''' + X-cofactors = Z F''''",
            ChainLink::Membership => "(Z-1) F'''' in (F1..F6)",
            ChainLink::Flattened => "F = sum C_i F_i",
        }
    }

    /// Both sides of the identity.
    pub fn sides<T: Ring>(self, v: &Point7<T>) -> (T, T) {
        let [x1, x2, x3, y1, y2, y3, z] = *v;
        let one = k::<T>(1);
        let f = f_system(v);
        match self {
            ChainLink::Expansion => {
                let rhs = cube(y1) * y2 * (z - one)
                    + y1 * cube(y2) * (one - z)
                    + cube(y1) * y3 * (one - z)
                    + cube(y2) * y3 * (z - one)
                    + y1 * cube(y3) * (z - one)
                    + y2 * cube(y3) * (one - z);
                (f[6], rhs)
            }
            ChainLink::CubeReduction => {
                let kk = k_terms(v);
                (f_prime(v) - f_double(v), kk[0] * y1 * f[3] + kk[1] * y2 * f[4] + kk[2] * y3 * f[5])
            }
            ChainLink::Factor => {
                let rep = |x: T, y: T| sq(x) + sq(y);
                let lhs = rep(x1, y1) * y2 * y3 * (z - one) * (sq(x3) - sq(x2))
                    + rep(x2, y2) * y1 * y3 * (z - one) * (sq(x1) - sq(x3))
                    + rep(x3, y3) * y1 * y2 * (z - one) * (sq(x2) - sq(x1));
                (lhs, (z - one) * f_triple(v))
            }
            ChainLink::Reduction => {
                let lhs = f_triple(v) + x1 * (y3 - y2) * f[0] + x2 * (y1 - y3) * f[1] + x3 * (y2 - y1) * f[2];
                (lhs, z * f_quad(v))
            }
            ChainLink::Membership => {
                let rhs = y1 * (x2 - x3) * f[0]
                    + y2 * (x3 - x1) * f[1]
                    + y3 * (x1 - x2) * f[2]
                    + x1 * y2 * y3 * (x3 - x2) * f[3]
                    + x2 * y1 * y3 * (x1 - x3) * f[4]
                    + x3 * y1 * y2 * (x2 - x1) * f[5];
                ((z - one) * f_quad(v), rhs)
            }
            ChainLink::Flattened => {
                let c = flat_cofactors(v);
                let rhs = (0..6).fold(k::<T>(0), |acc, i| acc + c[i] * f[i]);
                (f[6], rhs)
            }
        }
    }
}

/// `u = (2+w²)(2+α²) - (1+α+w)²`.
pub fn u_poly<T: Ring>(a: T, w: T) -> T {
    (k::<T>(2) + sq(w)) * (k::<T>(2) + sq(a)) - sq(k::<T>(1) + a + w)
}

/// `(α-1)² + (w-1)² + (αw-1)²`.
pub fn u_squares<T: Ring>(a: T, w: T) -> T {
    let one = k::<T>(1);
    sq(a - one) + sq(w - one) + sq(a * w - one)
}

pub fn p1<T: Ring>(a: T, w: T) -> T {
    let two_a2 = k::<T>(2) + sq(a);
    k::<T>(4) * (k::<T>(2) + sq(w)) * (sq(two_a2) - sq(k::<T>(1) + k::<T>(2) * a))
        - two_a2 * (k::<T>(4) * u_poly(a, w) + k::<T>(2) * sq(a - w))
}

pub fn p2<T: Ring>(a: T, w: T) -> T {
    k::<T>(32) * u_poly(a, w) * sq(a - w) * sq(k::<T>(2) + sq(a)) - sq(p1(a, w))
}

/// Coefficients `(A, B, C)` of `p3 = A w² + B w + C`.
pub fn p3_coeffs<T: Ring>(a: T) -> [T; 3] {
    let a2 = sq(a);
    let a3 = a2 * a;
    let a4 = a2 * a2;
    let a5 = a4 * a;
    let a6 = a3 * a3;
    [
        k::<T>(8) * a6 - k::<T>(9) * a4 - k::<T>(112) * a3 + k::<T>(32),
        k::<T>(64) * a + k::<T>(240) * a2 + k::<T>(40) * a3 - k::<T>(30) * a5 - k::<T>(88) * a4 - k::<T>(64),
        k::<T>(7) * a6 - k::<T>(24) * a5 + k::<T>(64) * a4 + k::<T>(48) * a3 + k::<T>(48) * a2 - k::<T>(256) * a
            + k::<T>(32),
    ]
}

pub fn p3<T: Ring>(a: T, w: T) -> T {
    let [ca, cb, cc] = p3_coeffs(a);
    ca * sq(w) + cb * w + cc
}

/// Closed form `-32α(α-4)(α-1)²(α²+2)²(α²+2α+3)(7α²+4α+16)`.
pub fn disc_p3<T: Ring>(a: T) -> T {
    let a2 = sq(a);
    k::<T>(0)
        - k::<T>(32)
            * a
            * (a - k(4))
            * sq(a - k(1))
            * sq(a2 + k(2))
            * (a2 + k::<T>(2) * a + k(3))
            * (k::<T>(7) * a2 + k::<T>(4) * a + k(16))
}

pub fn q1<T: Ring>(a: T, w: T) -> T {
    k::<T>(6) * (k::<T>(2) + sq(w)) * sq(a - k(1)) - (k::<T>(4) * u_poly(a, w) + k::<T>(2) * sq(a - w))
}

pub fn q2<T: Ring>(a: T, w: T) -> T {
    k::<T>(32) * u_poly(a, w) * sq(a - w) - sq(q1(a, w))
}

pub fn q3<T: Ring>(a: T, w: T) -> T {
    q2(a, w) - k::<T>(4) * a * (k::<T>(4) - a) * sq(w - k(1)) * q1(a, w)
}

/// Coefficients `(A, B, C)` of `q4 = A w² + B w + C`.
pub fn q4_coeffs<T: Ring>(a: T) -> [T; 3] {
    let a2 = sq(a);
    let a3 = a2 * a;
    let a4 = a2 * a2;
    [
        a4 - k::<T>(8) * a3 + k::<T>(20) * a2 + k(8),
        k::<T>(8) * a3 - k::<T>(2) * a4 - k::<T>(32) * a2 - k::<T>(16) * a,
        k::<T>(5) * a4 - k::<T>(8) * a3 + k::<T>(24) * a2,
    ]
}

pub fn q4<T: Ring>(a: T, w: T) -> T {
    let [ca, cb, cc] = q4_coeffs(a);
    ca * sq(w) + cb * w + cc
}

/// Closed form `-16α²(α-4)²(α-1)²(α²+2)`.
pub fn disc_q4<T: Ring>(a: T) -> T {
    k::<T>(0) - k::<T>(16) * sq(a) * sq(a - k(4)) * sq(a - k(1)) * (sq(a) + k(2))
}

/// `B² - 4AC` for coefficients `[A, B, C]`.
pub fn discriminant<T: Ring>(c: [T; 3]) -> T {
    sq(c[1]) - k::<T>(4) * c[0] * c[2]
}

/// Identities in `(α, w)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChainIdentity {
    /// `u = (α-1)² + (w-1)² + (αw-1)²`.
    USquares,
    /// `p2 = 4(w-α)² p3`.
    PFactor,
    /// `q3 = 4(w-1)² q4`.
    QFactor,
    /// `p2(4, w) = 93312 (w-4)² (w-1)²`.
    PAtFour,
    /// `Δ(p3)` closed form against `B² - 4AC`.
    DiscP3,
    /// `Δ(q4)` closed form against `B² - 4AC`.
    DiscQ4,
}

impl ChainIdentity {
    pub const ALL: [ChainIdentity; 6] = [
        ChainIdentity::USquares,
        ChainIdentity::PFactor,
        ChainIdentity::QFactor,
        ChainIdentity::PAtFour,
        ChainIdentity::DiscP3,
        ChainIdentity::DiscQ4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChainIdentity::USquares => "u sum of squares",
            ChainIdentity::PFactor => "p2 = 4(w-a)^2 p3",
            ChainIdentity::QFactor => "q3 = 4(w-1)^2 q4",
            ChainIdentity::PAtFour => "p2(4, w) = 93312(w-4)^2(w-1)^2",
            ChainIdentity::DiscP3 => "disc(p3) closed form",
            ChainIdentity::DiscQ4 => "disc(q4) closed form",
        }
    }

    pub fn sides<T: Ring>(self, a: T, w: T) -> (T, T) {
        match self {
            ChainIdentity::USquares => (u_poly(a, w), u_squares(a, w)),
            ChainIdentity::PFactor => (p2(a, w), k::<T>(4) * sq(w - a) * p3(a, w)),
            ChainIdentity::QFactor => (q3(a, w), k::<T>(4) * sq(w - k(1)) * q4(a, w)),
            ChainIdentity::PAtFour => (p2(k(4), w), k::<T>(93312) * sq(w - k(4)) * sq(w - k(1))),
            ChainIdentity::DiscP3 => (discriminant(p3_coeffs(a)), disc_p3(a)),
            ChainIdentity::DiscQ4 => (discriminant(q4_coeffs(a)), disc_q4(a)),
        }
    }
}

/// `|lhs - rhs|` divided by the magnitude of all terms involved.
pub fn relative_residual(lhs: f64, rhs: f64, mag: (Mag, Mag)) -> f64 {
    let scale = mag.0 .0 + mag.1 .0;
    let diff = (lhs - rhs).abs();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}
