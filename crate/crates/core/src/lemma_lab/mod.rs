//! Executable checks of the lemmas, polynomial identities and constructions
//! behind the classification of Fermat-Torricelli sets.
//!
//! Polynomial identities are evaluated at random points with residuals scaled
//! by the magnitude of their terms (see [`poly::Mag`]) and, for integer
//! points, exactly in `i128`. Lemmas about minimizers are evaluated at
//! oracle-certified approximate minimizers with slack `3 R`, where `R` is the
//! covering radius of the oracle grid.

pub mod constructions;
pub mod poly;
mod suites;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::reduced::reduced_j;
use crate::projective::{ProjectiveTriangle, UnitVector};

pub use constructions::{construct_b_prime_c_prime, construct_c_p, construct_c_star, GeneralFrame, IsoscelesFrame};
pub use poly::{ChainIdentity, ChainLink};

/// Relative tolerance for floating-point identity residuals.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Inner products and the common cosine of an equilateral configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilateralState {
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub z: f64,
}

impl EquilateralState {
    /// `y_i = sqrt(1 - x_i^2)`; requires `|x_i| <= 1` and `z` in `(0, 1)`.
    pub fn new(x: [f64; 3], z: f64) -> Result<Self> {
        if x.iter().any(|v| !(v.abs() <= 1.0)) {
            return Err(Error::OutOfRange(format!("inner products {x:?} must lie in [-1, 1]")));
        }
        if !(z > 0.0 && z < 1.0) {
            return Err(Error::OutOfRange(format!("z = {z} must lie in (0, 1)")));
        }
        Ok(EquilateralState { x, y: x.map(|v| (1.0 - v * v).max(0.0).sqrt()), z })
    }

    /// State of `p` against an equilateral triangle (`z` is the mean cosine).
    pub fn from_point(t: &ProjectiveTriangle, p: &UnitVector) -> Result<Self> {
        let [a, b, c] = t.vertices();
        if p.dim() != 3 {
            return Err(Error::DimensionMismatch { left: p.dim(), right: 3 });
        }
        let z = (t.phi_ab().cos() + t.phi_ac().cos() + t.phi_bc().cos()) / 3.0;
        EquilateralState::new([a.dot(p), b.dot(p), c.dot(p)], z)
    }

    pub fn as_array(&self) -> [f64; 7] {
        [self.x[0], self.x[1], self.x[2], self.y[0], self.y[1], self.y[2], self.z]
    }
}

/// `F1, ..., F6` and `F = (1-Z)(Y1-Y2)(Y2-Y3)(Y3-Y1)(Y1+Y2+Y3)` at the state.
#[allow(non_snake_case)]
pub fn eval_F_system(s: &EquilateralState) -> [f64; 7] {
    poly::f_system(&s.as_array())
}

/// Outcome of one identity or predicate over many trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub trials: usize,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub tolerance: f64,
    /// Trials whose residual exceeded the tolerance.
    pub violations: usize,
}

impl IdentityReport {
    fn empty(name: &str, tolerance: f64) -> Self {
        IdentityReport {
            name: name.to_string(),
            trials: 0,
            max_abs_residual: 0.0,
            max_rel_residual: 0.0,
            tolerance,
            violations: 0,
        }
    }

    fn record(&mut self, abs: f64, rel: f64, violated: bool) {
        self.trials += 1;
        self.max_abs_residual = self.max_abs_residual.max(abs);
        self.max_rel_residual = self.max_rel_residual.max(rel);
        self.violations += violated as usize;
    }

    fn merge(&mut self, other: &IdentityReport) {
        self.trials += other.trials;
        self.max_abs_residual = self.max_abs_residual.max(other.max_abs_residual);
        self.max_rel_residual = self.max_rel_residual.max(other.max_rel_residual);
        self.violations += other.violations;
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<48} trials={:<6} max_abs={:.3e} max_rel={:.3e} tol={:.1e} violations={}",
            self.name, self.trials, self.max_abs_residual, self.max_rel_residual, self.tolerance, self.violations
        )
    }
}

/// Per-trial seed from the suite seed, a check tag and the trial index.
pub(crate) fn trial_seed(seed: u64, tag: u64, trial: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0xA076_1D64_78BD_642F) ^ trial.wrapping_mul(0xE703_7ED1_A0B4_28DB);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn trial_rng(seed: u64, tag: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(seed, tag, trial))
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::OutOfRange("trials must be at least 1".into()));
    }
    Ok(())
}

fn random_point7(rng: &mut ChaCha8Rng) -> [f64; 7] {
    std::array::from_fn(|_| rng.gen_range(-2.0..2.0))
}

/// Evaluates every link of the ideal-membership chain at `trials` random real
/// points; one report per link.
pub fn verify_ideal_membership(seed: u64, trials: usize) -> Result<Vec<IdentityReport>> {
    check_trials(trials)?;
    let per_trial: Vec<Vec<(f64, f64)>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let v = random_point7(&mut trial_rng(seed, 1, i));
            let m = v.map(poly::Mag::of);
            ChainLink::ALL
                .iter()
                .map(|link| {
                    let (l, r) = link.sides(&v);
                    ((l - r).abs(), poly::relative_residual(l, r, link.sides(&m)))
                })
                .collect()
        })
        .collect();
    Ok(ChainLink::ALL
        .iter()
        .enumerate()
        .map(|(k, link)| {
            let mut rep = IdentityReport::empty(link.name(), IDENTITY_TOL);
            for t in &per_trial {
                rep.record(t[k].0, t[k].1, t[k].1 > IDENTITY_TOL);
            }
            rep
        })
        .collect())
}

/// Exact evaluation of the chain at integer points with coordinates in `[-50, 50]`.
pub fn verify_ideal_membership_exact(seed: u64, trials: usize) -> Result<Vec<IdentityReport>> {
    check_trials(trials)?;
    let mut reps: Vec<IdentityReport> =
        ChainLink::ALL.iter().map(|l| IdentityReport::empty(&format!("{} (exact)", l.name()), 0.0)).collect();
    for i in 0..trials as u64 {
        let mut rng = trial_rng(seed, 2, i);
        let v: [i128; 7] = std::array::from_fn(|_| rng.gen_range(-50i128..=50));
        for (rep, link) in reps.iter_mut().zip(ChainLink::ALL) {
            let (l, r) = link.sides(&v);
            let d = (l - r).unsigned_abs() as f64;
            rep.record(d, d, l != r);
        }
    }
    Ok(reps)
}

/// Values along the `p` chain at `(α, w)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PChain {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub disc_p3: f64,
    /// Relative residual of `p2 = 4(w-α)² p3`.
    pub factor_residual: f64,
}

pub fn p_chain(alpha: f64, w: f64) -> PChain {
    let (l, r) = ChainIdentity::PFactor.sides(alpha, w);
    let m = ChainIdentity::PFactor.sides(poly::Mag::of(alpha), poly::Mag::of(w));
    PChain {
        p1: poly::p1(alpha, w),
        p2: poly::p2(alpha, w),
        p3: poly::p3(alpha, w),
        disc_p3: poly::disc_p3(alpha),
        factor_residual: poly::relative_residual(l, r, m),
    }
}

/// Values along the `q` chain at `(α, w)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QChain {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub q4: f64,
    pub disc_q4: f64,
    /// Relative residual of `q3 = 4(w-1)² q4`.
    pub factor_residual: f64,
}

pub fn q_chain(alpha: f64, w: f64) -> QChain {
    let (l, r) = ChainIdentity::QFactor.sides(alpha, w);
    let m = ChainIdentity::QFactor.sides(poly::Mag::of(alpha), poly::Mag::of(w));
    QChain {
        q1: poly::q1(alpha, w),
        q2: poly::q2(alpha, w),
        q3: poly::q3(alpha, w),
        q4: poly::q4(alpha, w),
        disc_q4: poly::disc_q4(alpha),
        factor_residual: poly::relative_residual(l, r, m),
    }
}

/// The `(α, w)` identities at `trials` random points of `[-8, 8]²`.
pub fn verify_chain_identities(seed: u64, trials: usize) -> Result<Vec<IdentityReport>> {
    check_trials(trials)?;
    let mut reps: Vec<IdentityReport> =
        ChainIdentity::ALL.iter().map(|c| IdentityReport::empty(c.name(), IDENTITY_TOL)).collect();
    for i in 0..trials as u64 {
        let mut rng = trial_rng(seed, 3, i);
        let (a, w): (f64, f64) = (rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
        for (rep, id) in reps.iter_mut().zip(ChainIdentity::ALL) {
            let (l, r) = id.sides(a, w);
            let rel = poly::relative_residual(l, r, id.sides(poly::Mag::of(a), poly::Mag::of(w)));
            rep.record((l - r).abs(), rel, rel > IDENTITY_TOL);
        }
    }
    Ok(reps)
}

/// Sign claims: `Δ(p3) < 0` with positive leading coefficient on `(4, 100)`,
/// and `Δ(q4) < 0` with positive leading coefficient on `(1, 4)`.
pub fn verify_discriminant_signs(seed: u64, samples: usize) -> Result<Vec<IdentityReport>> {
    check_trials(samples)?;
    let names = [
        "disc(p3) < 0 on (4, 100)",
        "leading coefficient of p3 > 0 on (4, 100)",
        "disc(q4) < 0 on (1, 4)",
        "leading coefficient of q4 > 0 on (1, 4)",
    ];
    let mut reps: Vec<IdentityReport> = names.iter().map(|n| IdentityReport::empty(n, 0.0)).collect();
    let mut rng = trial_rng(seed, 4, 0);
    for _ in 0..samples {
        let a: f64 = open_interval(&mut rng, 4.0, 100.0);
        let b: f64 = open_interval(&mut rng, 1.0, 4.0);
        let vals = [-poly::disc_p3(a), poly::p3_coeffs(a)[0], -poly::disc_q4(b), poly::q4_coeffs(b)[0]];
        for (rep, v) in reps.iter_mut().zip(vals) {
            let bad = (-v).max(0.0);
            rep.record(bad, bad, !(v > 0.0));
        }
    }
    Ok(reps)
}

fn open_interval(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let x = rng.gen_range(lo..hi);
        if x > lo {
            return x;
        }
    }
}

/// Grid step used by [`reduced_grid_argmin`] in the suites.
pub const REDUCED_STEP: f64 = 1e-3;

/// First minimizer of `w -> reduced_J(α, w)` over `w = k·step`, `|w| <= 2|α| + 20`.
pub fn reduced_grid_argmin(alpha: f64, step: f64) -> f64 {
    let half = ((2.0 * alpha.abs() + 20.0) / step).ceil() as i64;
    let mut best = (f64::INFINITY, 0.0);
    for k in -half..=half {
        let w = k as f64 * step;
        let v = reduced_j(alpha, w);
        if v < best.0 {
            best = (v, w);
        }
    }
    best.1
}

/// Where the reduced objective is minimized, for `samples` values of `α` in
/// each of `(1, 4)`, `{4}` and `(4, 20)`.
pub fn verify_reduced_minima(seed: u64, samples: usize) -> Result<Vec<IdentityReport>> {
    check_trials(samples)?;
    let step = REDUCED_STEP;
    let mut rng = trial_rng(seed, 5, 0);
    let alphas: Vec<(usize, f64)> = (0..samples)
        .flat_map(|_| {
            let lo = open_interval(&mut rng, 1.0, 4.0);
            let hi = open_interval(&mut rng, 4.0, 20.0);
            [(0, lo), (1, 4.0), (2, hi)]
        })
        .collect();
    let dists: Vec<(usize, f64)> = alphas
        .par_iter()
        .map(|&(k, a)| {
            let w = reduced_grid_argmin(a, step);
            let d = match k {
                0 => (w - 1.0).abs(),
                1 => (w - 1.0).abs().min((w - 4.0).abs()),
                _ => (w - a).abs(),
            };
            (k, d)
        })
        .collect();
    let names = [
        "reduced minimum at w = 1 for alpha in (1, 4)",
        "reduced minimum at w in {1, 4} for alpha = 4",
        "reduced minimum at w = alpha for alpha in (4, 20)",
    ];
    let mut reps: Vec<IdentityReport> = names.iter().map(|n| IdentityReport::empty(n, step)).collect();
    for (k, d) in dists {
        reps[k].record(d, d, d > step);
    }
    let tie = (reduced_j(4.0, 1.0) - reduced_j(4.0, 4.0)).abs();
    let mut rep = IdentityReport::empty("reduced J(1) = J(4) = sqrt(3) at alpha = 4", 1e-12);
    let dev = tie.max((reduced_j(4.0, 1.0) - 3f64.sqrt()).abs());
    rep.record(dev, dev, dev > 1e-12);
    reps.push(rep);
    Ok(reps)
}

/// Groups of checks run by [`verify_lemma_suite`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Section {
    /// Triangle inequality and first properties of minimizers.
    S2,
    /// Big triangles.
    S3,
    /// Polynomial identities of the equilateral case.
    S4,
    /// Isosceles triangles.
    S5,
    /// General triangles.
    S6,
}

impl Section {
    pub const ALL: [Section; 5] = [Section::S2, Section::S3, Section::S4, Section::S5, Section::S6];
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Section::S2 => "s2",
            Section::S3 => "s3",
            Section::S4 => "s4",
            Section::S5 => "s5",
            Section::S6 => "s6",
        })
    }
}

impl FromStr for Section {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s2" => Ok(Section::S2),
            "s3" => Ok(Section::S3),
            "s4" => Ok(Section::S4),
            "s5" => Ok(Section::S5),
            "s6" => Ok(Section::S6),
            other => Err(Error::OutOfRange(format!("unknown suite {other:?}"))),
        }
    }
}

/// All reports of one suite run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub section: Section,
    pub seed: u64,
    pub trials: usize,
    pub reports: Vec<IdentityReport>,
}

impl SuiteReport {
    pub fn violations(&self) -> usize {
        self.reports.iter().map(|r| r.violations).sum()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }
}

/// Runs every check of a section with `trials` sampled configurations each.
pub fn verify_lemma_suite(section: Section, seed: u64, trials: usize) -> Result<SuiteReport> {
    check_trials(trials)?;
    let reports = match section {
        Section::S2 => suites::section2(seed, trials)?,
        Section::S3 => suites::section3(seed, trials)?,
        Section::S4 => {
            let mut r = verify_ideal_membership(seed, trials)?;
            r.extend(verify_ideal_membership_exact(seed, trials)?);
            r.extend(verify_chain_identities(seed, trials)?);
            r.extend(verify_discriminant_signs(seed, trials)?);
            r.extend(verify_reduced_minima(seed, trials.min(50))?);
            r
        }
        Section::S5 => suites::section5(seed, trials)?,
        Section::S6 => suites::section6(seed, trials)?,
    };
    Ok(SuiteReport { section, seed, trials, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::{centroid, triangle_from_angles, AngleTriple};

    #[test]
    fn f_system_examples() {
        let s = EquilateralState::new([0.3, 0.3, 0.8], 0.4).unwrap();
        assert_eq!(eval_F_system(&s)[6], 0.0);
        let raw = poly::f_system(&[0.1, 0.2, 0.3, 0.5, 0.6, 0.7, 1.0]);
        assert_eq!(raw[6], 0.0);
        assert!(EquilateralState::new([0.3, 0.3, 0.8], 1.0).is_err());
        assert!(EquilateralState::new([1.3, 0.3, 0.8], 0.5).is_err());
    }

    #[test]
    fn stationary_centroid_satisfies_generators() {
        let t = triangle_from_angles(&AngleTriple::from_degrees(50.0, 50.0, 50.0).unwrap()).unwrap();
        let e = centroid(&t).unwrap();
        let s = EquilateralState::from_point(&t, &e).unwrap();
        for f in &eval_F_system(&s)[..6] {
            assert!(f.abs() < 1e-9, "{f}");
        }
    }

    #[test]
    fn ideal_membership_reports() {
        let reps = verify_ideal_membership(42, 1000).unwrap();
        assert_eq!(reps.len(), ChainLink::ALL.len());
        for r in &reps {
            assert!(r.passed(), "{r}");
            assert_eq!(r.trials, 1000);
        }
        for r in verify_ideal_membership_exact(7, 200).unwrap() {
            assert!(r.passed() && r.max_abs_residual == 0.0, "{r}");
        }
        assert!(verify_ideal_membership(1, 0).is_err());
    }

    #[test]
    fn chains_and_signs() {
        for r in verify_chain_identities(3, 1000).unwrap() {
            assert!(r.passed(), "{r}");
        }
        for r in verify_discriminant_signs(3, 100).unwrap() {
            assert!(r.passed(), "{r}");
        }
        let p = p_chain(5.0, 2.0);
        assert!(p.factor_residual < 1e-12);
        assert_eq!(p_chain(2.5, 2.5).p2, 0.0);
        let q = q_chain(2.0, 3.0);
        assert!(q.factor_residual < 1e-12);
        assert_eq!(q_chain(2.0, 1.0).q3, 0.0);
        for w in [-3.0, 0.0, 2.5, 7.0] {
            let p2 = p_chain(4.0, w).p2;
            let expect = 93312.0 * (w - 4.0f64).powi(2) * (w - 1.0f64).powi(2);
            assert!((p2 - expect).abs() <= 1e-9 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn reduced_minima_land_where_expected() {
        for r in verify_reduced_minima(11, 5).unwrap() {
            assert!(r.passed(), "{r}");
        }
        assert_eq!(reduced_grid_argmin(2.0, 1e-3), 1.0);
    }

    #[test]
    fn seeds_are_spread() {
        assert_ne!(trial_seed(1, 0, 0), trial_seed(1, 0, 1));
        assert_ne!(trial_seed(1, 0, 0), trial_seed(2, 0, 0));
        assert_ne!(trial_seed(1, 0, 0), trial_seed(1, 1, 0));
    }

    #[test]
    fn section_names_round_trip() {
        for s in Section::ALL {
            assert_eq!(s.to_string().parse::<Section>().unwrap(), s);
        }
        assert!("s7".parse::<Section>().is_err());
    }
}
