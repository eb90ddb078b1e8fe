//! Sub-step resolution of windings by Brownian bridge refinement.
//!
//! Between two consecutive vertices a discretized Brownian loop is, in law,
//! a planar Brownian bridge of duration `tau = 1/N`; the straight chord drops
//! every winding that happens below the step scale. Windings around a point
//! `z` close to the path are recovered by Lévy midpoint refinement: the
//! midpoint of a bridge piece of duration `tau` from `a` to `b` is
//! `(a + b)/2 + sqrt(tau/4) * N(0, I)`, and the two halves are again
//! independent bridges. Only pieces whose chord passes within
//! `reach * sqrt(tau)` of `z` are split, down to spatial scale `min_scale`.
//!
//! The correction for one step is the winding number of the closed curve
//! formed by the refined piece followed by the reversed chord. It is zero
//! unless the piece actually loops around `z`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bridge::LoopPath;
use crate::geometry::PlanarPoint;
use crate::grid::GridSpec;
use crate::grid::CellMask;
use crate::hull::WindingField;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineParams {
    /// Pieces whose chord lies farther than `reach * sqrt(tau)` from the
    /// point are left unrefined. A planar bridge leaves that band with
    /// probability below `4 exp(-2 reach^2)`.
    pub reach: f64,
    /// Spatial scale below which pieces are no longer split.
    pub min_scale: f64,
}

impl Default for RefineParams {
    fn default() -> Self {
        Self { reach: 3.0, min_scale: 1e-12 }
    }
}

#[inline]
fn turn(a: PlanarPoint, b: PlanarPoint) -> f64 {
    (a.x * b.y - a.y * b.x).atan2(a.x * b.x + a.y * b.y)
}

/// Distance from `z` to the segment `[a, b]`.
pub fn segment_distance(z: PlanarPoint, a: PlanarPoint, b: PlanarPoint) -> f64 {
    let ab = b - a;
    let az = z - a;
    let len2 = ab.x * ab.x + ab.y * ab.y;
    let t = if len2 > 0.0 { ((az.x * ab.x + az.y * ab.y) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let q = PlanarPoint::new(a.x + t * ab.x - z.x, a.y + t * ab.y - z.y);
    q.norm()
}

/// Angle swept around `z` by a refined bridge piece from `a` to `b`.
fn swept_angle<R: Rng + ?Sized>(
    a: PlanarPoint,
    b: PlanarPoint,
    tau: f64,
    z: PlanarPoint,
    params: &RefineParams,
    rng: &mut R,
) -> f64 {
    let sd = tau.sqrt();
    if sd < params.min_scale || segment_distance(z, a, b) >= params.reach * sd {
        return turn(a - z, b - z);
    }
    let half = 0.5 * sd;
    let gx: f64 = rng.sample(StandardNormal);
    let gy: f64 = rng.sample(StandardNormal);
    let mid = PlanarPoint::new(0.5 * (a.x + b.x) + half * gx, 0.5 * (a.y + b.y) + half * gy);
    swept_angle(a, mid, 0.5 * tau, z, params, rng) + swept_angle(mid, b, 0.5 * tau, z, params, rng)
}

/// Extra winding around `z` contributed by one bridge step of duration `tau`
/// once it is resolved below the chord.
pub fn step_correction<R: Rng + ?Sized>(
    a: PlanarPoint,
    b: PlanarPoint,
    tau: f64,
    z: PlanarPoint,
    params: &RefineParams,
    rng: &mut R,
) -> i64 {
    if segment_distance(z, a, b) >= params.reach * tau.sqrt() {
        return 0;
    }
    let swept = swept_angle(a, b, tau, z, params, rng);
    ((swept - turn(a - z, b - z)) / std::f64::consts::TAU).round() as i64
}

/// Winding number of a time-1 Brownian loop around `z`, given its vertices at
/// the uniform times `k/N`, with every step near `z` refined.
///
/// Returns `None` if `z` coincides with a vertex.
pub fn refined_winding<R: Rng + ?Sized>(
    path: &LoopPath,
    z: PlanarPoint,
    params: &RefineParams,
    rng: &mut R,
) -> Option<i64> {
    let tau = (path.steps() as f64).recip();
    let reach = params.reach * tau.sqrt();
    let mut total = 0.0;
    for w in path.points().windows(2) {
        let (a, b) = (w[0] - z, w[1] - z);
        if (a.x == 0.0 && a.y == 0.0) || (b.x == 0.0 && b.y == 0.0) {
            return None;
        }
        if segment_distance(z, w[0], w[1]) < reach {
            total += swept_angle(w[0], w[1], tau, z, params, rng);
        } else {
            total += turn(a, b);
        }
    }
    Some((total / std::f64::consts::TAU).round() as i64)
}

/// Per-cell winding corrections for cell centers within refinement reach of
/// the path. Each center gets its own independent refinement of the nearby
/// steps, so every center's winding has the law of the continuous loop's
/// winding given the vertices; the joint law across centers is not that of
/// one refined loop. Area expectations only depend on the marginals.
///
/// `time_step` is the duration of one step in path units squared. When
/// `selected` is given, only cells whose flag is set are refined.
pub fn winding_corrections<R: Rng + ?Sized>(
    path: &LoopPath,
    grid: &GridSpec,
    time_step: f64,
    params: &RefineParams,
    selected: Option<&[bool]>,
    rng: &mut R,
) -> Vec<i32> {
    let mut delta = vec![0i32; grid.len()];
    let reach = params.reach * time_step.sqrt();
    let span = |lo: f64, hi: f64, n: usize| -> (usize, usize) {
        let first = ((lo - 0.5).ceil().max(0.0) as usize).min(n);
        let last = (((hi - 0.5).floor() + 1.0).max(0.0) as usize).min(n);
        (first, last)
    };
    for w in path.points().windows(2) {
        let (a, b) = (w[0], w[1]);
        let lo = grid.to_cell(PlanarPoint::new(a.x.min(b.x) - reach, a.y.min(b.y) - reach));
        let hi = grid.to_cell(PlanarPoint::new(a.x.max(b.x) + reach, a.y.max(b.y) + reach));
        let (i0, i1) = span(lo.x, hi.x, grid.nx);
        let (j0, j1) = span(lo.y, hi.y, grid.ny);
        for j in j0..j1 {
            for i in i0..i1 {
                let idx = grid.index(i, j);
                if selected.is_some_and(|s| !s[idx]) {
                    continue;
                }
                let c = step_correction(a, b, time_step, grid.center(i, j), params, rng);
                if c != 0 {
                    delta[idx] += c as i32;
                }
            }
        }
    }
    delta
}

/// Apply corrections to the center windings of a field.
pub fn corrected_centers(field: &WindingField, delta: &[i32]) -> Vec<i32> {
    let nx = field.nx();
    (0..field.ny())
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .zip(delta)
        .map(|((i, j), d)| field.center_winding(i, j) + d)
        .collect()
}

/// Winding-index areas with sub-step corrections, as unbiased estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexAreas {
    pub per_index: BTreeMap<i32, f64>,
    /// Hull cells whose corrected winding is zero.
    pub zero_inside: f64,
    pub refined_cells: u64,
    pub changed_cells: u64,
}

impl IndexAreas {
    pub fn per_index(&self, n: i32) -> f64 {
        self.per_index.get(&n).copied().unwrap_or(0.0)
    }

    pub fn rescaled(mut self, factor: f64) -> Self {
        self.per_index.values_mut().for_each(|v| *v *= factor);
        self.zero_inside *= factor;
        self
    }
}

/// Difference estimator for the index areas: every cell contributes its
/// chord-polygon center winding, and a Bernoulli(`fraction`) subsample of
/// cells contributes `(corrected - polygon) / fraction`. The result is
/// unbiased for the refined areas whatever the fraction; corrections are
/// rare, so the added variance is small.
#[allow(clippy::too_many_arguments)]
pub fn refined_index_areas<R: Rng + ?Sized>(
    path: &LoopPath,
    grid: &GridSpec,
    field: &WindingField,
    hull: &CellMask,
    time_step: f64,
    params: &RefineParams,
    fraction: f64,
    rng: &mut R,
) -> IndexAreas {
    let ca = grid.cell_area();
    let mut per_index: BTreeMap<i32, f64> = BTreeMap::new();
    let mut zero_inside = 0.0;
    let inside = hull.bits();
    for (idx, &w) in field.centers().iter().enumerate() {
        *per_index.entry(w).or_default() += ca;
        if w == 0 && inside[idx] {
            zero_inside += ca;
        }
    }
    if fraction <= 0.0 {
        return IndexAreas { per_index, zero_inside, refined_cells: 0, changed_cells: 0 };
    }
    let fraction = fraction.min(1.0);
    let selected: Vec<bool> = (0..grid.len()).map(|_| fraction >= 1.0 || rng.random_bool(fraction)).collect();
    let delta = winding_corrections(path, grid, time_step, params, Some(&selected), rng);
    let weight = ca / fraction;
    let mut changed = 0;
    for (idx, &d) in delta.iter().enumerate() {
        if d == 0 {
            continue;
        }
        changed += 1;
        let before = field.centers()[idx];
        let after = before + d;
        *per_index.entry(before).or_default() -= weight;
        *per_index.entry(after).or_default() += weight;
        if inside[idx] {
            if before == 0 {
                zero_inside -= weight;
            }
            if after == 0 {
                zero_inside += weight;
            }
        }
    }
    IndexAreas {
        per_index,
        zero_inside,
        refined_cells: selected.iter().filter(|&&s| s).count() as u64,
        changed_cells: changed,
    }
}
