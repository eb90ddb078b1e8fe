//! Uniform cell grids and boolean rasters over them.

use serde::{Deserialize, Serialize};

use crate::bridge::LoopPath;
use crate::geometry::{BoundingBox, PlanarPoint};
use crate::{Error, Result};

/// Sub-cell offset applied to the grid origin when a vertex lies exactly on
/// a row of cell centers: `h * (1/2 + 2^-20)`.
pub const DEGENERACY_SHIFT: f64 = 0.5 + 1.0 / (1u64 << 20) as f64;

/// Smallest margin, in cells, between a path's bounding box and the grid edge.
pub const MIN_MARGIN_CELLS: f64 = 2.0;

/// A uniform grid of `nx * ny` square cells of side `cell_size`. Cell `(i, j)`
/// covers `origin + [i h, (i+1) h] x [j h, (j+1) h]`; its center sits at
/// `origin + ((i + 1/2) h, (j + 1/2) h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: PlanarPoint,
    pub cell_size: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(origin: PlanarPoint, cell_size: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::Config(format!("cell size must be positive, got {cell_size}")));
        }
        if nx == 0 || ny == 0 {
            return Err(Error::Config("grid must have at least one cell".into()));
        }
        if !origin.is_finite() {
            return Err(Error::Config("grid origin must be finite".into()));
        }
        Ok(Self { origin, cell_size, nx, ny })
    }

    /// The grid pinned to a path's bounding box: `margin` (plane units, at
    /// least two cells) on every side. If some vertex has its `y` exactly on
    /// a row of cell centers, the origin is shifted down by
    /// [`DEGENERACY_SHIFT`] cells until no vertex does.
    pub fn enclosing(path: &LoopPath, cell_size: f64, margin: f64) -> Result<Self> {
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::Config(format!("cell size must be positive, got {cell_size}")));
        }
        let bb = BoundingBox::of(path.points()).expect("a LoopPath is never empty");
        let margin = margin.max(MIN_MARGIN_CELLS * cell_size);
        let mut origin = PlanarPoint::new(bb.min.x - margin, bb.min.y - margin);
        let cells = |lo: f64, hi: f64| ((hi + margin - lo) / cell_size).ceil() as usize;
        let nx = cells(origin.x, bb.max.x);
        let ny = cells(origin.y, bb.max.y);

        for shift in 0..16 {
            let grid = Self::new(origin, cell_size, nx, ny + shift)?;
            if !grid.has_row_degeneracy(path) {
                return Ok(grid);
            }
            origin.y -= DEGENERACY_SHIFT * cell_size;
        }
        Err(Error::Geometry("could not remove center-row degeneracy".into()))
    }

    fn has_row_degeneracy(&self, path: &LoopPath) -> bool {
        path.points().iter().any(|p| {
            let v = self.to_cell_y(p.y) - 0.5;
            v == v.floor()
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.cell_size * self.cell_size
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Map a plane coordinate to grid units (cell edges at integers).
    #[inline]
    pub fn to_cell_x(&self, x: f64) -> f64 {
        (x - self.origin.x) / self.cell_size
    }

    #[inline]
    pub fn to_cell_y(&self, y: f64) -> f64 {
        (y - self.origin.y) / self.cell_size
    }

    #[inline]
    pub fn to_cell(&self, p: PlanarPoint) -> PlanarPoint {
        PlanarPoint::new(self.to_cell_x(p.x), self.to_cell_y(p.y))
    }

    pub fn center(&self, i: usize, j: usize) -> PlanarPoint {
        PlanarPoint::new(
            self.origin.x + (i as f64 + 0.5) * self.cell_size,
            self.origin.y + (j as f64 + 0.5) * self.cell_size,
        )
    }

    /// Whether every vertex of `path` is at least `margin_cells` cells away
    /// from the grid edge.
    pub fn contains_with_margin(&self, path: &LoopPath, margin_cells: f64) -> bool {
        path.points().iter().all(|p| {
            let c = self.to_cell(*p);
            c.x >= margin_cells
                && c.y >= margin_cells
                && c.x <= self.nx as f64 - margin_cells
                && c.y <= self.ny as f64 - margin_cells
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskRole {
    Blocked,
    Outside,
    Hull,
}

/// A boolean raster over a grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellMask {
    nx: usize,
    ny: usize,
    bits: Vec<bool>,
    role: MaskRole,
}

impl CellMask {
    pub fn empty(grid: &GridSpec, role: MaskRole) -> Self {
        Self { nx: grid.nx, ny: grid.ny, bits: vec![false; grid.len()], role }
    }

    pub(crate) fn from_bits(nx: usize, ny: usize, bits: Vec<bool>, role: MaskRole) -> Self {
        debug_assert_eq!(bits.len(), nx * ny);
        Self { nx, ny, bits, role }
    }

    pub fn role(&self) -> MaskRole {
        self.role
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[j * self.nx + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.bits[j * self.nx + i] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn complement(&self, role: MaskRole) -> Self {
        Self { nx: self.nx, ny: self.ny, bits: self.bits.iter().map(|b| !b).collect(), role }
    }

    /// Plain PBM (`P1`) rendering. Row 0 of the output is the top row of the
    /// grid (largest `j`), as image viewers expect.
    pub fn to_pbm(&self) -> String {
        let mut out = format!("P1\n# {}\n{} {}\n", role_name(self.role), self.nx, self.ny);
        for j in (0..self.ny).rev() {
            let row: Vec<&str> =
                (0..self.nx).map(|i| if self.get(i, j) { "1" } else { "0" }).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

fn role_name(role: MaskRole) -> &'static str {
    match role {
        MaskRole::Blocked => "blocked",
        MaskRole::Outside => "outside",
        MaskRole::Hull => "hull",
    }
}
