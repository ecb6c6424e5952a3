//! Brute-force global minimization of the objective on S², with a Lipschitz
//! certificate, and best-of-N sampling for higher dimensions.
//!
//! Lipschitz constant: each term `w sin θ(v, p)` satisfies
//! `|sin θ(v,p) - sin θ(v,q)| <= |θ(v,p) - θ(v,q)| <= geodesic(p, q)`, the second
//! step being the triangle inequality for the line angle. Summing gives
//! `|J(p) - J(q)| <= (Σ w) geodesic(p, q)`, so if every sphere point is within
//! `R` of a grid point, `min J >= min_grid J - (Σ w) R`.
//!
//! Grids exploit `J(p) = J(-p)`: they cover the upper hemisphere plus a band
//! below the equator, and all distances to a grid are projective (a point and
//! its antipode are the same).

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::hash::{BuildHasherDefault, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::SolutionSet;
use crate::error::{Error, Result};
use crate::objective::{evaluate_raw, Metric, WeightedPointSet};
use crate::projective::{dot, line_angle, Angle, UnitVector};

/// Smallest accepted grid.
pub const MIN_GRID: usize = 12;
/// Default grid size used by the CLI and the acceptance checks.
pub const DEFAULT_GRID: usize = 100_000;
/// Default number of refinement rounds.
pub const DEFAULT_REFINE: usize = 20;
/// Cap on the number of cells kept alive during refinement.
const MAX_ACTIVE_CELLS: usize = 4096;
const CHUNK: usize = 4096;

fn expected_radius(n: usize) -> f64 {
    2.0 / (n as f64).sqrt()
}

/// Quasi-uniform points on the upper hemisphere and an equator band.
#[derive(Debug, Serialize, Deserialize)]
pub struct SphereGrid {
    points: Vec<UnitVector>,
    covering_radius: Angle,
    #[serde(skip)]
    index: OnceLock<VoxelIndex>,
}

impl Clone for SphereGrid {
    fn clone(&self) -> Self {
        SphereGrid { points: self.points.clone(), covering_radius: self.covering_radius, index: OnceLock::new() }
    }
}

impl PartialEq for SphereGrid {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.covering_radius == other.covering_radius
    }
}

impl SphereGrid {
    pub fn points(&self) -> &[UnitVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Upper bound on the projective distance from any sphere point to the grid.
    pub fn covering_radius(&self) -> Angle {
        self.covering_radius
    }

    fn index(&self) -> &VoxelIndex {
        self.index.get_or_init(|| VoxelIndex::new(&self.points, NEIGHBOUR_REACH * expected_radius(self.len())))
    }

    /// Index of the nearest grid line to `q` and the angle between them.
    pub fn nearest(&self, q: &[f64; 3]) -> (usize, Angle) {
        let (i, chord) = self.index().nearest(q);
        (i, Angle(2.0 * (chord / 2.0).min(1.0).asin()))
    }

    /// Angle between the line of `q` and the nearest grid line.
    pub fn distance_to(&self, q: &UnitVector) -> Result<Angle> {
        let q = as3(q)?;
        Ok(self.nearest(&q).1)
    }
}

fn as3(p: &UnitVector) -> Result<[f64; 3]> {
    match p.as_slice() {
        &[x, y, z] => Ok([x, y, z]),
        s => Err(Error::DimensionMismatch { left: s.len(), right: 3 }),
    }
}

#[derive(Debug, Default)]
struct CellHasher(u64);

impl Hasher for CellHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(b as u64);
        }
    }
    fn write_u64(&mut self, x: u64) {
        self.0 = (self.0.rotate_left(5) ^ x).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
    }
}

type CellMap = HashMap<u64, (u32, u32), BuildHasherDefault<CellHasher>>;

/// Uniform voxel hash over a point set and its antipodes.
#[derive(Debug)]
struct VoxelIndex {
    cell: f64,
    coords: Vec<[f64; 3]>,
    owner: Vec<u32>,
    ranges: CellMap,
}

fn cell_key(c: [i64; 3]) -> u64 {
    let m = |x: i64| (x + (1 << 20)) as u64 & ((1 << 21) - 1);
    (m(c[0]) << 42) | (m(c[1]) << 21) | m(c[2])
}

impl VoxelIndex {
    fn new(points: &[UnitVector], cell: f64) -> Self {
        let cell = cell.clamp(1e-6, 1.0);
        let mut entries: Vec<(u64, [f64; 3], u32)> = Vec::with_capacity(2 * points.len());
        for (i, p) in points.iter().enumerate() {
            let s = p.as_slice();
            for sign in [1.0, -1.0] {
                let q = [sign * s[0], sign * s[1], sign * s[2]];
                entries.push((cell_key(Self::cell_of(cell, &q)), q, i as u32));
            }
        }
        entries.sort_by_key(|e| (e.0, e.2));
        let mut ranges = CellMap::default();
        let mut start = 0;
        while start < entries.len() {
            let key = entries[start].0;
            let mut end = start;
            while end < entries.len() && entries[end].0 == key {
                end += 1;
            }
            ranges.insert(key, (start as u32, end as u32));
            start = end;
        }
        VoxelIndex {
            cell,
            coords: entries.iter().map(|e| e.1).collect(),
            owner: entries.iter().map(|e| e.2).collect(),
            ranges,
        }
    }

    fn cell_of(cell: f64, q: &[f64; 3]) -> [i64; 3] {
        [(q[0] / cell).floor() as i64, (q[1] / cell).floor() as i64, (q[2] / cell).floor() as i64]
    }

    /// Stored points within chord distance `r` of `q`, in storage order.
    fn within(&self, q: &[f64; 3], r: f64) -> Vec<[f64; 3]> {
        let lo = Self::cell_of(self.cell, &[q[0] - r, q[1] - r, q[2] - r]);
        let hi = Self::cell_of(self.cell, &[q[0] + r, q[1] + r, q[2] + r]);
        let mut out = Vec::new();
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    if let Some(&(s, e)) = self.ranges.get(&cell_key([x, y, z])) {
                        for p in &self.coords[s as usize..e as usize] {
                            let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
                            if d2 <= r * r {
                                out.push(*p);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Nearest stored point by chord length. Shells of cells are scanned until
    /// no unvisited cell can hold a closer point.
    fn nearest(&self, q: &[f64; 3]) -> (usize, f64) {
        let c = Self::cell_of(self.cell, q);
        let mut best = (u32::MAX, f64::INFINITY);
        let max_shell = (2.0 / self.cell).ceil() as i64 + 1;
        for k in 0..=max_shell {
            for dx in -k..=k {
                for dy in -k..=k {
                    for dz in -k..=k {
                        if dx.abs().max(dy.abs()).max(dz.abs()) != k {
                            continue;
                        }
                        let key = cell_key([c[0] + dx, c[1] + dy, c[2] + dz]);
                        if let Some(&(s, e)) = self.ranges.get(&key) {
                            for j in s as usize..e as usize {
                                let p = &self.coords[j];
                                let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
                                let o = self.owner[j];
                                if d2 < best.1 || (d2 == best.1 && o < best.0) {
                                    best = (o, d2);
                                }
                            }
                        }
                    }
                }
            }
            // cells at Chebyshev distance > k are farther than k * cell in some coordinate
            if best.1.sqrt() <= k as f64 * self.cell {
                break;
            }
        }
        (best.0 as usize, best.1.sqrt())
    }
}

fn fibonacci_hemisphere(n: usize) -> Vec<UnitVector> {
    let band = (2.0 * expected_radius(n)).min(0.5);
    let total = ((2 * n) as f64 / (1.0 + band)).round().max(n as f64);
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / total;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let lon = golden * i as f64;
            UnitVector::from_unit_unchecked(vec![r * lon.cos(), r * lon.sin(), z])
        })
        .collect()
}

/// Sites within this multiple of the expected covering radius are used to
/// clip a Voronoi cell.
const NEIGHBOUR_REACH: f64 = 2.5;
/// Gnomonic half-width of the initial clipping square (about 89.94°).
const GNOMONIC_LIMIT: f64 = 1e3;

/// Clips `poly` to `a x + b y <= c`.
fn clip(poly: &[[f64; 2]], a: f64, b: f64, c: f64) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let side = |p: &[f64; 2]| c - a * p[0] - b * p[1];
    for (i, p) in poly.iter().enumerate() {
        let q = &poly[(i + 1) % poly.len()];
        let (sp, sq) = (side(p), side(q));
        if sp >= 0.0 {
            out.push(*p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let t = sp / (sp - sq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// Largest distance from grid point `i` to a point of its Voronoi cell among
/// the sites `±grid`, or `None` if the neighbours found do not close the cell.
///
/// In gnomonic coordinates around `g`, `q ∝ g + x e1 + y e2`, the set of
/// points closer to `g` than to a site `s` is the half-plane
/// `(e1.s) x + (e2.s) y <= 1 - g.s`. Intersecting the half-planes of any
/// subset of sites gives a superset of the true cell, so its farthest vertex
/// bounds the cell radius from above. A bounded intersection also rules out
/// cell points beyond 90° of `g`, since the cell is spherically convex.
fn cell_radius(grid: &SphereGrid, i: usize, reach: f64) -> Option<f64> {
    let g = as3(&grid.points[i]).expect("grid is 3-dimensional");
    let (e1, e2) = tangent_basis(&g);
    let l = GNOMONIC_LIMIT;
    let mut poly = vec![[-l, -l], [l, -l], [l, l], [-l, l]];
    for s in grid.index().within(&g, reach) {
        let c = 1.0 - dot(&g, &s);
        if c <= 1e-15 {
            continue;
        }
        poly = clip(&poly, dot(&e1, &s), dot(&e2, &s), c);
    }
    let mut worst: f64 = 0.0;
    for v in &poly {
        if v[0].abs() >= 0.5 * l || v[1].abs() >= 0.5 * l {
            return None;
        }
        worst = worst.max(v[0].hypot(v[1]).atan());
    }
    Some(worst)
}

/// Exact covering radius of `±grid`, up to rounding, as the largest Voronoi
/// cell radius.
fn covering_bound(grid: &SphereGrid) -> Angle {
    let base = NEIGHBOUR_REACH * expected_radius(grid.len());
    let worst = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let mut reach = base;
            loop {
                if let Some(r) = cell_radius(grid, i, reach) {
                    return r;
                }
                if reach >= 2.0 {
                    return FRAC_PI_2;
                }
                reach = (2.0 * reach).min(2.0);
            }
        })
        .reduce(|| 0.0, f64::max);
    Angle(worst + 1e-12)
}

fn grid_cache() -> &'static Mutex<HashMap<usize, Arc<SphereGrid>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<SphereGrid>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Deterministic `n`-point grid with a validated covering radius. Results are
/// cached per `n` for the lifetime of the process.
pub fn build_grid(n: usize) -> Result<Arc<SphereGrid>> {
    if n < MIN_GRID {
        return Err(Error::OutOfRange(format!("grid size {n} is below {MIN_GRID}")));
    }
    if let Some(g) = grid_cache().lock().unwrap().get(&n) {
        return Ok(g.clone());
    }
    let mut grid = SphereGrid { points: fibonacci_hemisphere(n), covering_radius: Angle(PI), index: OnceLock::new() };
    grid.covering_radius = covering_bound(&grid);
    let grid = Arc::new(grid);
    grid_cache().lock().unwrap().entry(n).or_insert(grid.clone());
    Ok(grid)
}

/// Interval `[lower, upper]` containing the global minimum of the objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedBound {
    pub lower: f64,
    pub upper: f64,
    /// A point whose objective value is `upper`.
    pub argmin_cell: UnitVector,
    /// Covering radius of the grid behind `lower`.
    pub resolution: Angle,
    /// `false` for sampled bounds, where `lower` is the trivial bound 0.
    pub certified: bool,
}

impl CertifiedBound {
    pub fn contains(&self, value: f64, slack: f64) -> bool {
        value >= self.lower - slack && value <= self.upper + slack
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

fn argmin_ordered(values: &[f64]) -> (usize, f64) {
    values
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            let mut best = (c * CHUNK, f64::INFINITY);
            for (i, &v) in chunk.iter().enumerate() {
                if v < best.1 {
                    best = (c * CHUNK + i, v);
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
}

/// Orthonormal basis of the tangent plane at unit `p`.
fn tangent_basis(p: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let axis = if p[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = dot(&axis, p);
    let mut e1 = [axis[0] - d * p[0], axis[1] - d * p[1], axis[2] - d * p[2]];
    let n1 = dot(&e1, &e1).sqrt();
    e1.iter_mut().for_each(|x| *x /= n1);
    let e2 = [p[1] * e1[2] - p[2] * e1[1], p[2] * e1[0] - p[0] * e1[2], p[0] * e1[1] - p[1] * e1[0]];
    (e1, e2)
}

fn exp_map(p: &[f64; 3], v: [f64; 3]) -> [f64; 3] {
    let t = dot(&v, &v).sqrt();
    if t == 0.0 {
        return *p;
    }
    let (s, c) = t.sin_cos();
    let q = [c * p[0] + s * v[0] / t, c * p[1] + s * v[1] / t, c * p[2] + s * v[2] / t];
    let n = dot(&q, &q).sqrt();
    [q[0] / n, q[1] / n, q[2] / n]
}

#[derive(Clone, Copy)]
struct Cell {
    center: [f64; 3],
    value: f64,
}

/// Splits a geodesic disc of radius `r` into nine discs of radius `√2 r/3`
/// centred on a 3×3 pattern in the tangent plane. The exponential map does not
/// increase distances within a hemisphere, so the children cover the parent.
fn children(cell: &Cell, r: f64) -> [[f64; 3]; 9] {
    let (e1, e2) = tangent_basis(&cell.center);
    let step = 2.0 * r / 3.0;
    let mut out = [[0.0; 3]; 9];
    let mut k = 0;
    for i in -1..=1 {
        for j in -1..=1 {
            let (a, b) = (i as f64 * step, j as f64 * step);
            let v = [a * e1[0] + b * e2[0], a * e1[1] + b * e2[1], a * e1[2] + b * e2[2]];
            out[k] = exp_map(&cell.center, v);
            k += 1;
        }
    }
    out
}

/// Certified global minimum of the sine objective for a point set in R³.
///
/// `upper` is the best value found on the grid and during `refine_iters`
/// rounds of cell subdivision around the grid's best cells; `lower` is the
/// grid minimum minus `(Σ w) R` with `R` the grid's covering radius.
pub fn certified_min(ps: &WeightedPointSet, grid_n: usize, refine_iters: usize) -> Result<CertifiedBound> {
    if ps.dim() != 3 {
        return Err(Error::DimensionMismatch { left: ps.dim(), right: 3 });
    }
    let grid = build_grid(grid_n)?;
    certified_min_on(ps, &grid, refine_iters)
}

/// [`certified_min`] on a prebuilt grid.
pub fn certified_min_on(ps: &WeightedPointSet, grid: &SphereGrid, refine_iters: usize) -> Result<CertifiedBound> {
    if ps.dim() != 3 {
        return Err(Error::DimensionMismatch { left: ps.dim(), right: 3 });
    }
    let lip = ps.total_weight();
    let radius = grid.covering_radius.0;
    let values: Vec<f64> = grid.points.par_iter().map(|g| evaluate_raw(ps, g.as_slice(), Metric::Sine)).collect();
    let (best_i, upper_grid) = argmin_ordered(&values);
    let mut best = Cell { center: as3(&grid.points[best_i])?, value: upper_grid };

    let mut r = radius;
    let mut active: Vec<Cell> = grid
        .points
        .iter()
        .zip(&values)
        .filter(|(_, &v)| v - lip * r <= upper_grid)
        .map(|(g, &v)| Cell { center: as3(g).expect("grid is 3-dimensional"), value: v })
        .collect();
    for _ in 0..refine_iters {
        if active.is_empty() {
            break;
        }
        if active.len() > MAX_ACTIVE_CELLS {
            active.sort_by(|a, b| a.value.total_cmp(&b.value));
            active.truncate(MAX_ACTIVE_CELLS);
        }
        let child_r = std::f64::consts::SQRT_2 * r / 3.0;
        let next: Vec<Cell> = active
            .par_iter()
            .flat_map_iter(|cell| {
                children(cell, r)
                    .into_iter()
                    .map(|center| Cell { center, value: evaluate_raw(ps, &center, Metric::Sine) })
            })
            .collect();
        for c in &next {
            if c.value < best.value {
                best = *c;
            }
        }
        r = child_r;
        active = next.into_iter().filter(|c| c.value - lip * r <= best.value).collect();
    }

    Ok(CertifiedBound {
        lower: upper_grid - lip * radius,
        upper: best.value,
        argmin_cell: UnitVector::from_unit_unchecked(best.center.to_vec()),
        resolution: grid.covering_radius,
        certified: true,
    })
}

/// Best of `samples` seeded uniform points and the data points themselves, in
/// any dimension. No covering argument applies, so the bound is uncertified.
pub fn sampled_min(ps: &WeightedPointSet, samples: usize, seed: u64) -> CertifiedBound {
    let dim = ps.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<Vec<f64>> = ps.points().iter().map(|p| p.as_slice().to_vec()).collect();
    candidates.extend((0..samples).map(|_| random_unit(&mut rng, dim)));
    let values: Vec<f64> = candidates.par_iter().map(|c| evaluate_raw(ps, c, Metric::Sine)).collect();
    let (i, v) = argmin_ordered(&values);
    CertifiedBound {
        lower: 0.0,
        upper: v,
        argmin_cell: UnitVector::from_unit_unchecked(candidates.swap_remove(i)),
        resolution: Angle::RIGHT,
        certified: false,
    }
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = dot(&v, &v).sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Whether a claimed solution set is consistent with an oracle bound: some
/// member attains at most `upper` and the oracle's argmin lies within
/// `geo_tol + resolution` of some member, projectively.
pub fn oracle_agrees(ss: &SolutionSet, cb: &CertifiedBound, geo_tol: Angle) -> bool {
    let value_ok = ss.members.iter().any(|m| m.value <= cb.upper + 1e-12);
    let reach = geo_tol.0 + cb.resolution.0;
    let near = ss.members.iter().any(|m| {
        m.point.dim() == cb.argmin_cell.dim() && line_angle(m.point.as_slice(), cb.argmin_cell.as_slice()) <= reach
    });
    value_ok && near
}
