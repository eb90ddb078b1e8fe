//! Filled hulls and winding-number fields of closed polylines on a grid.
//!
//! The pipeline is: supercover rasterization of the path ([`rasterize_path`]),
//! a 4-connected flood fill of the unbounded component from the grid's
//! boundary ring ([`flood_fill_outside`]), and a scanline winding count at
//! every cell center ([`winding_field`]). [`region_areas`] combines them.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bridge::LoopPath;
use crate::grid::{CellMask, GridSpec, MaskRole};
use crate::{Error, Result};

/// Stored in [`WindingField::values`] for cells the path passes through.
pub const ON_PATH: i32 = i32::MIN;

/// Mark every cell whose closed square meets some segment of the path.
///
/// Segments are walked column by column; within a column the segment's
/// closed `y` range selects the rows. A segment through a cell corner thus
/// marks all four cells around it, so the blocked set is 4-connected-tight:
/// no 4-connected walk through unblocked cells can cross the path.
pub fn rasterize_path(path: &LoopPath, grid: &GridSpec) -> Result<CellMask> {
    let mut mask = CellMask::empty(grid, MaskRole::Blocked);
    let pts: Vec<_> = path.points().iter().map(|p| grid.to_cell(*p)).collect();
    let (nx, ny) = (grid.nx as f64, grid.ny as f64);
    if let Some(p) = pts.iter().find(|p| !(p.x >= 0.0 && p.y >= 0.0 && p.x <= nx && p.y <= ny)) {
        return Err(Error::Geometry(format!(
            "path leaves the grid at cell coordinates ({:.3}, {:.3})",
            p.x, p.y
        )));
    }
    let clamp_i = |v: f64, n: usize| (v.max(0.0) as usize).min(n - 1);

    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (umin, umax) = if a.x <= b.x { (a.x, b.x) } else { (b.x, a.x) };
        let (vmin, vmax) = if a.y <= b.y { (a.y, b.y) } else { (b.y, a.y) };
        let du = b.x - a.x;
        let slope = if du != 0.0 { (b.y - a.y) / du } else { 0.0 };

        let i_lo = clamp_i((umin - 1.0).ceil(), grid.nx);
        let i_hi = clamp_i(umax.floor(), grid.nx);
        for i in i_lo..=i_hi {
            let (lo, hi) = if du == 0.0 {
                (vmin, vmax)
            } else {
                let xa = umin.max(i as f64);
                let xb = umax.min(i as f64 + 1.0);
                let va = a.y + (xa - a.x) * slope;
                let vb = a.y + (xb - a.x) * slope;
                (va.min(vb).max(vmin), va.max(vb).min(vmax))
            };
            let j_lo = clamp_i((lo - 1.0).ceil(), grid.ny);
            let j_hi = clamp_i(hi.floor(), grid.ny);
            for j in j_lo..=j_hi {
                mask.set(i, j, true);
            }
        }
    }
    Ok(mask)
}

/// Cells reachable from the grid's boundary ring through unblocked cells by
/// 4-connected steps. Blocked boundary cells are not seeds.
pub fn flood_fill_outside(blocked: &CellMask, grid: &GridSpec) -> CellMask {
    let (nx, ny) = (grid.nx, grid.ny);
    let mut outside = vec![false; nx * ny];
    let mut stack: Vec<usize> = Vec::new();
    let blocked_bits = blocked.bits();

    let seed = |idx: usize, outside: &mut Vec<bool>, stack: &mut Vec<usize>| {
        if !blocked_bits[idx] && !outside[idx] {
            outside[idx] = true;
            stack.push(idx);
        }
    };
    for i in 0..nx {
        seed(i, &mut outside, &mut stack);
        seed((ny - 1) * nx + i, &mut outside, &mut stack);
    }
    for j in 0..ny {
        seed(j * nx, &mut outside, &mut stack);
        seed(j * nx + nx - 1, &mut outside, &mut stack);
    }

    while let Some(idx) = stack.pop() {
        let (i, j) = (idx % nx, idx / nx);
        let mut visit = |n: usize| {
            if !blocked_bits[n] && !outside[n] {
                outside[n] = true;
                stack.push(n);
            }
        };
        if i > 0 {
            visit(idx - 1);
        }
        if i + 1 < nx {
            visit(idx + 1);
        }
        if j > 0 {
            visit(idx - nx);
        }
        if j + 1 < ny {
            visit(idx + nx);
        }
    }
    CellMask::from_bits(nx, ny, outside, MaskRole::Outside)
}

/// The rasters behind one hull computation.
#[derive(Debug, Clone)]
pub struct HullRasters {
    pub grid: GridSpec,
    pub blocked: CellMask,
    pub outside: CellMask,
}

impl HullRasters {
    pub fn compute(path: &LoopPath, grid: &GridSpec) -> Result<Self> {
        let blocked = rasterize_path(path, grid)?;
        let outside = flood_fill_outside(&blocked, grid);
        Ok(Self { grid: *grid, blocked, outside })
    }

    /// Every cell not reached by the outside flood, blocked cells included.
    pub fn hull(&self) -> CellMask {
        self.outside.complement(MaskRole::Hull)
    }

    pub fn hull_cells(&self) -> usize {
        self.grid.len() - self.outside.count()
    }

    pub fn hull_area(&self) -> f64 {
        self.hull_cells() as f64 * self.grid.cell_area()
    }
}

/// Area of the filled hull: `(nx ny - #outside) h^2`.
pub fn hull_area(path: &LoopPath, grid: &GridSpec) -> Result<f64> {
    Ok(HullRasters::compute(path, grid)?.hull_area())
}

/// Hull membership of every cell center, decided on a grid refined by the odd
/// factor `sub` so that each center is the center of a fine cell. The coarse
/// hull counts whole blocked cells, which biases center-level quantities by
/// a band of width `O(h)`; the fine decision shrinks that band by `sub`.
pub fn center_hull_membership(path: &LoopPath, grid: &GridSpec, sub: usize) -> Result<CellMask> {
    if sub == 0 || sub.is_multiple_of(2) {
        return Err(Error::Config(format!("sub-grid factor must be odd, got {sub}")));
    }
    let fine = GridSpec::new(grid.origin, grid.cell_size / sub as f64, grid.nx * sub, grid.ny * sub)?;
    let outside = flood_fill_outside(&rasterize_path(path, &fine)?, &fine);
    let mut mask = CellMask::empty(grid, MaskRole::Hull);
    let c = sub / 2;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            mask.set(i, j, !outside.get(i * sub + c, j * sub + c));
        }
    }
    Ok(mask)
}

/// Winding number at every cell center, with the on-path cells marked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindingField {
    nx: usize,
    ny: usize,
    /// Winding at each center; [`ON_PATH`] for blocked cells.
    values: Vec<i32>,
    /// Winding at each center, blocked cells included.
    centers: Vec<i32>,
}

impl WindingField {
    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Winding of cell `(i, j)`, or [`ON_PATH`] if the path touches the cell.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i32 {
        self.values[j * self.nx + i]
    }

    /// Winding at the center of `(i, j)` regardless of blocking. The center
    /// of a blocked cell is generically off the path, so this is still the
    /// winding number of a point.
    #[inline]
    pub fn center_winding(&self, i: usize, j: usize) -> i32 {
        self.centers[j * self.nx + i]
    }

    /// Winding of every cell center, blocked or not.
    pub fn centers(&self) -> &[i32] {
        &self.centers
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    /// CSV export `i,j,n` of every unblocked cell, row-major from `j = 0`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "i,j,n")?;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let n = self.get(i, j);
                if n != ON_PATH {
                    writeln!(w, "{i},{j},{n}")?;
                }
            }
        }
        Ok(())
    }
}

/// Signed crossings of the horizontal lines through the cell-center rows.
///
/// A segment from `a` to `b` crosses row `j` (at `v = j + 1/2` in grid units)
/// iff `min(a.y, b.y) <= v < max(a.y, b.y)`; the crossing counts `+1` when the
/// segment goes up. Returns per-row crossing lists sorted by abscissa, in a
/// flat buffer with row offsets.
fn row_crossings(path: &LoopPath, grid: &GridSpec) -> (Vec<usize>, Vec<(f64, i32)>) {
    let pts: Vec<_> = path.points().iter().map(|p| grid.to_cell(*p)).collect();
    let ny = grid.ny;
    let rows_of = |lo: f64, hi: f64| -> (usize, usize) {
        // rows j with lo <= j + 1/2 < hi
        let first = (lo - 0.5).ceil().max(0.0);
        let last = (hi - 0.5).ceil().max(0.0);
        ((first as usize).min(ny), (last as usize).min(ny))
    };

    let mut counts = vec![0usize; ny + 1];
    for w in pts.windows(2) {
        let (lo, hi) = if w[0].y <= w[1].y { (w[0].y, w[1].y) } else { (w[1].y, w[0].y) };
        let (first, end) = rows_of(lo, hi);
        for j in first..end {
            let v = j as f64 + 0.5;
            if lo <= v && v < hi {
                counts[j + 1] += 1;
            }
        }
    }
    for j in 0..ny {
        counts[j + 1] += counts[j];
    }
    let offsets = counts;
    let mut fill = offsets.clone();
    let mut crossings = vec![(0.0f64, 0i32); offsets[ny]];
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (lo, hi, sign) = if a.y <= b.y { (a.y, b.y, 1) } else { (b.y, a.y, -1) };
        let (first, end) = rows_of(lo, hi);
        for j in first..end {
            let v = j as f64 + 0.5;
            if lo <= v && v < hi {
                let x = a.x + (v - a.y) * (b.x - a.x) / (b.y - a.y);
                crossings[fill[j]] = (x, sign);
                fill[j] += 1;
            }
        }
    }
    for j in 0..ny {
        crossings[offsets[j]..offsets[j + 1]].sort_by(|p, q| p.0.total_cmp(&q.0));
    }
    (offsets, crossings)
}

/// Scanline winding numbers: the winding at a center is the sum of the signs
/// of the crossings of its row strictly to its right.
pub fn winding_field(path: &LoopPath, grid: &GridSpec, blocked: &CellMask) -> WindingField {
    let (nx, ny) = (grid.nx, grid.ny);
    let (offsets, crossings) = row_crossings(path, grid);
    let mut centers = vec![0i32; nx * ny];
    for j in 0..ny {
        let row = &crossings[offsets[j]..offsets[j + 1]];
        let mut k = row.len();
        let mut acc = 0i32;
        for i in (0..nx).rev() {
            let uc = i as f64 + 0.5;
            while k > 0 && row[k - 1].0 > uc {
                k -= 1;
                acc += row[k].1;
            }
            centers[j * nx + i] = acc;
        }
    }
    let values = centers
        .iter()
        .zip(blocked.bits())
        .map(|(&c, &b)| if b { ON_PATH } else { c })
        .collect();
    WindingField { nx, ny, values, centers }
}

/// Areas of the hull and of the winding regions inside it.
///
/// All areas are cell counts times the cell area, and the counts partition
/// the hull: `zero_inside + sum(per_index) + blocked == hull` holds exactly.
/// Blocked cells are additionally classified by the winding at their center
/// in `blocked_by_index` (index 0 included).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionAreas {
    pub cell_area: f64,
    pub hull_cells: u64,
    pub zero_inside_cells: u64,
    pub blocked_cells: u64,
    pub per_index_cells: BTreeMap<i32, u64>,
    pub blocked_by_index_cells: BTreeMap<i32, u64>,
}

impl RegionAreas {
    pub fn hull_area(&self) -> f64 {
        self.hull_cells as f64 * self.cell_area
    }

    pub fn zero_inside(&self) -> f64 {
        self.zero_inside_cells as f64 * self.cell_area
    }

    pub fn blocked_area(&self) -> f64 {
        self.blocked_cells as f64 * self.cell_area
    }

    /// Area of the unblocked cells of index `n` (`n != 0`).
    pub fn per_index(&self, n: i32) -> f64 {
        self.per_index_cells.get(&n).copied().unwrap_or(0) as f64 * self.cell_area
    }

    /// Area of all hull cells whose center has index `n`, blocked cells
    /// included. For `n = 0` this is the index-0-inside region.
    pub fn by_center_index(&self, n: i32) -> f64 {
        let unblocked = if n == 0 {
            self.zero_inside_cells
        } else {
            self.per_index_cells.get(&n).copied().unwrap_or(0)
        };
        let blocked = self.blocked_by_index_cells.get(&n).copied().unwrap_or(0);
        (unblocked + blocked) as f64 * self.cell_area
    }

    /// `hull - zero_inside - sum(per_index) - blocked`, in cells. Always 0.
    pub fn partition_residual(&self) -> i64 {
        let indexed: u64 = self.per_index_cells.values().sum();
        self.hull_cells as i64
            - self.zero_inside_cells as i64
            - indexed as i64
            - self.blocked_cells as i64
    }

    /// Same areas with lengths scaled by `factor`.
    pub fn rescaled(mut self, factor: f64) -> Self {
        self.cell_area *= factor * factor;
        self
    }
}

/// Summarize a winding field over the hull.
pub fn region_areas(
    field: &WindingField,
    hull: &CellMask,
    blocked: &CellMask,
    grid: &GridSpec,
) -> RegionAreas {
    let mut out = RegionAreas {
        cell_area: grid.cell_area(),
        hull_cells: 0,
        zero_inside_cells: 0,
        blocked_cells: 0,
        per_index_cells: BTreeMap::new(),
        blocked_by_index_cells: BTreeMap::new(),
    };
    for (idx, (&in_hull, &is_blocked)) in hull.bits().iter().zip(blocked.bits()).enumerate() {
        let n = field.values[idx];
        if is_blocked {
            out.blocked_cells += 1;
            *out.blocked_by_index_cells.entry(field.centers[idx]).or_insert(0) += 1;
            // The flood never enters blocked cells, so they are hull cells.
            debug_assert!(in_hull);
        } else if n != 0 {
            *out.per_index_cells.entry(n).or_insert(0) += 1;
        } else if in_hull {
            out.zero_inside_cells += 1;
        }
        if in_hull {
            out.hull_cells += 1;
        }
    }
    out
}

/// Everything computed for one path on one grid.
#[derive(Debug, Clone)]
pub struct PathAnalysis {
    pub rasters: HullRasters,
    pub field: WindingField,
    pub areas: RegionAreas,
}

impl PathAnalysis {
    pub fn compute(path: &LoopPath, grid: &GridSpec) -> Result<Self> {
        let rasters = HullRasters::compute(path, grid)?;
        let field = winding_field(path, grid, &rasters.blocked);
        let areas = region_areas(&field, &rasters.hull(), &rasters.blocked, grid);
        Ok(Self { rasters, field, areas })
    }
}

/// JSON sidecar written next to a winding CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindingSidecar {
    pub grid: GridSpec,
    pub on_path_sentinel: i32,
    pub areas: RegionAreas,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{shoelace_area, PlanarPoint};

    fn square(side: f64) -> LoopPath {
        LoopPath::closed_polygon(vec![
            PlanarPoint::new(0.0, 0.0),
            PlanarPoint::new(side, 0.0),
            PlanarPoint::new(side, side),
            PlanarPoint::new(0.0, side),
        ])
        .unwrap()
    }

    fn blocked_cells(mask: &CellMask) -> Vec<(usize, usize)> {
        let mut out = vec![];
        for j in 0..mask.ny() {
            for i in 0..mask.nx() {
                if mask.get(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    #[test]
    fn horizontal_segment_inside_a_row() {
        let g = GridSpec::new(PlanarPoint::ORIGIN, 1.0, 8, 5).unwrap();
        let p = LoopPath::closed_polygon(vec![
            PlanarPoint::new(2.25, 2.5),
            PlanarPoint::new(5.5, 2.5),
        ])
        .unwrap();
        let m = rasterize_path(&p, &g).unwrap();
        assert_eq!(blocked_cells(&m), vec![(2, 2), (3, 2), (4, 2), (5, 2)]);
    }

    #[test]
    fn diagonal_through_corner_marks_all_four() {
        let g = GridSpec::new(PlanarPoint::ORIGIN, 1.0, 6, 6).unwrap();
        let p = LoopPath::closed_polygon(vec![
            PlanarPoint::new(2.0, 2.0),
            PlanarPoint::new(4.0, 4.0),
        ])
        .unwrap();
        let m = rasterize_path(&p, &g).unwrap();
        let cells = blocked_cells(&m);
        for c in [(2, 2), (3, 3), (2, 3), (3, 2), (1, 1), (4, 4), (1, 2), (2, 1), (3, 4), (4, 3)] {
            assert!(cells.contains(&c), "missing {c:?}");
        }
        // Nothing off the closed 2x2 block's neighbourhood.
        assert!(!cells.contains(&(0, 0)));
        assert!(!cells.contains(&(1, 3)));
        assert!(!cells.contains(&(5, 5)));
    }

    #[test]
    fn path_outside_grid_is_an_error() {
        let g = GridSpec::new(PlanarPoint::ORIGIN, 1.0, 4, 4).unwrap();
        let p = LoopPath::closed_polygon(vec![
            PlanarPoint::new(1.0, 1.0),
            PlanarPoint::new(6.0, 1.0),
        ])
        .unwrap();
        assert!(matches!(rasterize_path(&p, &g), Err(Error::Geometry(_))));
    }

    #[test]
    fn empty_mask_floods_everything() {
        let g = GridSpec::new(PlanarPoint::ORIGIN, 1.0, 7, 3).unwrap();
        let out = flood_fill_outside(&CellMask::empty(&g, MaskRole::Blocked), &g);
        assert_eq!(out.count(), 21);
    }

    #[test]
    fn unit_square_hull_and_winding() {
        let h = 1.0 / 256.0;
        let sq = square(1.0);
        let g = GridSpec::enclosing(&sq, h, 4.0 * h).unwrap();
        let a = PathAnalysis::compute(&sq, &g).unwrap();
        let hull = a.areas.hull_area();
        assert!((hull - 1.0).abs() <= 4.0 * h + 4.0 * h * h, "hull {hull}");
        assert!(a.areas.hull_area() >= 1.0);
        let c = g.center(g.nx / 2, g.ny / 2);
        assert!(c.x > 0.4 && c.x < 0.6);
        assert!(!a.rasters.outside.get(g.nx / 2, g.ny / 2));
        assert_eq!(a.field.get(g.nx / 2, g.ny / 2), 1);
        assert_eq!(a.field.get(0, 0), 0);
        assert_eq!(a.areas.zero_inside_cells, 0);
        assert!((a.areas.per_index(1) - 1.0).abs() < 4.0 * h);
        assert_eq!(a.areas.partition_residual(), 0);
    }

    #[test]
    fn doubled_circle_has_winding_two() {
        let n = 400;
        let mut pts: Vec<PlanarPoint> = (0..2 * n)
            .map(|k| PlanarPoint::polar(1.0, std::f64::consts::TAU * k as f64 / n as f64))
            .collect();
        pts.push(pts[0]);
        let p = LoopPath::new(pts, crate::bridge::LoopKind::Polygon).unwrap();
        let g = GridSpec::enclosing(&p, 0.02, 0.1).unwrap();
        let a = PathAnalysis::compute(&p, &g).unwrap();
        let (ci, cj) = ((-g.origin.x / g.cell_size) as usize, (-g.origin.y / g.cell_size) as usize);
        assert_eq!(a.field.get(ci, cj), 2);
        assert!(a.areas.per_index(1) < 0.05);
    }

    #[test]
    fn back_and_forth_segment_encloses_nothing() {
        let p = LoopPath::closed_polygon(vec![
            PlanarPoint::new(0.0, 0.0),
            PlanarPoint::new(1.0, 0.3),
        ])
        .unwrap();
        let g = GridSpec::enclosing(&p, 0.01, 0.05).unwrap();
        let a = PathAnalysis::compute(&p, &g).unwrap();
        assert_eq!(a.areas.hull_cells, a.areas.blocked_cells);
        assert_eq!(a.areas.hull_area(), a.areas.blocked_area());
    }

    #[test]
    fn figure_eight_lobes() {
        // Left lobe counterclockwise, right lobe clockwise, crossing at origin.
        let p = LoopPath::closed_polygon(vec![
            PlanarPoint::new(0.0, 0.0),
            PlanarPoint::new(-1.0, -0.5),
            PlanarPoint::new(-1.0, 0.5),
            PlanarPoint::new(0.0, 0.0),
            PlanarPoint::new(2.0, -0.75),
            PlanarPoint::new(2.0, 0.75),
        ])
        .unwrap();
        let left = [
            PlanarPoint::new(0.0, 0.0),
            PlanarPoint::new(-1.0, -0.5),
            PlanarPoint::new(-1.0, 0.5),
        ];
        let right = [
            PlanarPoint::new(0.0, 0.0),
            PlanarPoint::new(2.0, -0.75),
            PlanarPoint::new(2.0, 0.75),
        ];
        let (a_left, a_right) = (shoelace_area(&left), shoelace_area(&right));
        assert!(a_left < 0.0 && a_right > 0.0);
        let h = 1.0 / 512.0;
        let g = GridSpec::enclosing(&p, h, 0.05).unwrap();
        let a = PathAnalysis::compute(&p, &g).unwrap();
        // The shoelace sign tells the orientation; the winding regions must match.
        let band = 4.0 * h * p.total_length();
        assert!((a.areas.per_index(-1) - a_left.abs()).abs() < band);
        assert!((a.areas.per_index(1) - a_right).abs() < band);
        assert_eq!(a.areas.zero_inside_cells, 0);
        assert_eq!(a.areas.partition_residual(), 0);
    }

    #[test]
    fn csv_skips_blocked_cells() {
        let sq = square(1.0);
        let g = GridSpec::enclosing(&sq, 0.25, 0.5).unwrap();
        let a = PathAnalysis::compute(&sq, &g).unwrap();
        let mut buf = Vec::new();
        a.field.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows = text.lines().count() - 1;
        assert_eq!(rows, g.len() - a.rasters.blocked.count());
        assert!(text.starts_with("i,j,n\n0,0,0\n"));
    }
}
