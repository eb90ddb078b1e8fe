//! SVG figures: a loop over its filled hull, and the winding-index map.
//!
//! Cells are emitted as horizontal runs of equal color, one `<rect>` per
//! run, so even large rasters stay a manageable size. A binary PPM writer is
//! kept for grids too large for vector output.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::geometry::PlanarPoint;
use crate::grid::{CellMask, GridSpec};
use crate::hull::WindingField;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Palette {
    pub background: String,
    pub hull: String,
    pub path: String,
    pub axes: String,
    /// Index 0 inside the hull.
    pub zero_inside: String,
    /// Colors for indices 1, 2, ... (cycled).
    pub positive: Vec<String>,
    /// Colors for indices -1, -2, ... (cycled).
    pub negative: Vec<String>,
}

impl Default for Palette {
    fn default() -> Self {
        let s = |v: &[&str]| v.iter().map(|c| c.to_string()).collect();
        Self {
            background: "#ffffff".into(),
            hull: "#9db4d3".into(),
            path: "#c0392b".into(),
            axes: "#bbbbbb".into(),
            zero_inside: "#000000".into(),
            positive: s(&["#f4d03f", "#e67e22", "#d35400", "#a04000", "#6e2c00"]),
            negative: s(&["#76d7c4", "#3498db", "#2e5fa1", "#1b3a6b", "#0b1a33"]),
        }
    }
}

impl Palette {
    /// Fill color of a cell in the winding map; `None` means background.
    pub fn index_color(&self, n: i32) -> &str {
        match n {
            0 => &self.zero_inside,
            n if n > 0 => &self.positive[(n as usize - 1) % self.positive.len()],
            n => &self.negative[((-n) as usize - 1) % self.negative.len()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub width: u32,
    pub height: u32,
    pub palette: Palette,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self { width: 800, height: 800, palette: Palette::default() }
    }
}

const LEGEND_ROW: f64 = 18.0;

struct Frame {
    scale: f64,
    grid: GridSpec,
    height: f64,
}

impl Frame {
    fn new(grid: &GridSpec, spec: &RenderSpec) -> Self {
        let scale = (spec.width as f64 / grid.nx as f64).min(spec.height as f64 / grid.ny as f64);
        Self { scale, grid: *grid, height: grid.ny as f64 * scale }
    }

    fn px(&self, p: PlanarPoint) -> (f64, f64) {
        let c = self.grid.to_cell(p);
        (c.x * self.scale, self.height - c.y * self.scale)
    }

    /// Emit `color_of(i, j)` runs for row `j`, skipping `None`.
    fn runs<'a>(&self, out: &mut String, color_of: impl Fn(usize, usize) -> Option<&'a str>) {
        for j in 0..self.grid.ny {
            let y = self.height - (j + 1) as f64 * self.scale;
            let mut i = 0;
            while i < self.grid.nx {
                let Some(c) = color_of(i, j) else {
                    i += 1;
                    continue;
                };
                let start = i;
                while i < self.grid.nx && color_of(i, j) == Some(c) {
                    i += 1;
                }
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{c}"/>"#,
                    start as f64 * self.scale,
                    y,
                    (i - start) as f64 * self.scale,
                    self.scale
                );
            }
        }
    }
}

fn header(out: &mut String, w: f64, h: f64, background: &str) {
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#);
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w:.3}" height="{h:.3}" fill="{background}"/>"#);
}

fn axes(out: &mut String, f: &Frame, color: &str) {
    let w = f.grid.nx as f64 * f.scale;
    let (ox, oy) = f.px(PlanarPoint::ORIGIN);
    let x = ox.clamp(0.0, w);
    let y = oy.clamp(0.0, f.height);
    let _ = writeln!(out, r#"<g stroke="{color}" stroke-width="1" class="axes">"#);
    let _ = writeln!(out, r#"<line x1="0" y1="{y:.3}" x2="{w:.3}" y2="{y:.3}"/>"#);
    let _ = writeln!(out, r#"<line x1="{x:.3}" y1="0" x2="{x:.3}" y2="{:.3}"/>"#, f.height);
    let _ = writeln!(out, "</g>");
}

/// The loop drawn over its filled hull. `hull` may be omitted, and an empty
/// point list yields the blank canvas with axes.
pub fn render_hull(points: &[PlanarPoint], hull: Option<&CellMask>, grid: &GridSpec, spec: &RenderSpec) -> String {
    let f = Frame::new(grid, spec);
    let pal = &spec.palette;
    let mut out = String::new();
    header(&mut out, grid.nx as f64 * f.scale, f.height, &pal.background);
    if let Some(mask) = hull {
        let _ = writeln!(out, r#"<g class="hull">"#);
        f.runs(&mut out, |i, j| mask.get(i, j).then_some(pal.hull.as_str()));
        let _ = writeln!(out, "</g>");
    }
    axes(&mut out, &f, &pal.axes);
    if !points.is_empty() {
        let _ = write!(out, r#"<polyline class="path" fill="none" stroke="{}" stroke-width="0.6" points=""#, pal.path);
        for (k, &p) in points.iter().enumerate() {
            let (x, y) = f.px(p);
            let _ = write!(out, "{}{x:.2},{y:.2}", if k == 0 { "" } else { " " });
        }
        let _ = writeln!(out, r#""/>"#);
    }
    out.push_str("</svg>\n");
    out
}

/// Cells colored by winding index. Outside cells are background, on-path
/// cells take the path color, index-0 cells inside the hull the dedicated
/// (black) color. A legend lists every index present.
pub fn render_winding(field: &WindingField, hull: &CellMask, grid: &GridSpec, spec: &RenderSpec) -> String {
    let f = Frame::new(grid, spec);
    let pal = &spec.palette;
    let cell_color = |i: usize, j: usize| -> Option<&str> {
        if !hull.get(i, j) {
            return None;
        }
        match field.get(i, j) {
            crate::hull::ON_PATH => Some(pal.path.as_str()),
            n => Some(pal.index_color(n)),
        }
    };
    let present: BTreeSet<i32> =
        (0..grid.ny).flat_map(|j| (0..grid.nx).map(move |i| (i, j))).filter(|&(i, j)| hull.get(i, j)).map(|(i, j)| field.get(i, j)).collect();

    let legend_h = LEGEND_ROW * (present.len() as f64 + 1.0);
    let w = grid.nx as f64 * f.scale;
    let mut out = String::new();
    header(&mut out, w, f.height + legend_h, &pal.background);
    let _ = writeln!(out, r#"<g class="cells">"#);
    f.runs(&mut out, cell_color);
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g class="legend" font-family="sans-serif" font-size="12">"#);
    for (k, &n) in present.iter().enumerate() {
        let y = f.height + LEGEND_ROW * (k as f64 + 0.5);
        let (color, label) = match n {
            crate::hull::ON_PATH => (pal.path.as_str(), "path".to_string()),
            0 => (pal.zero_inside.as_str(), "index 0 (inside)".to_string()),
            n => (pal.index_color(n), format!("index {n}")),
        };
        let _ = writeln!(
            out,
            r##"<rect x="6" y="{y:.1}" width="12" height="12" fill="{color}" stroke="#333"/><text x="24" y="{:.1}">{label}</text>"##,
            y + 10.0
        );
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}

fn hex_rgb(color: &str) -> [u8; 3] {
    let h = color.trim_start_matches('#');
    let c = |k: usize| h.get(k..k + 2).and_then(|s| u8::from_str_radix(s, 16).ok()).unwrap_or(0);
    [c(0), c(2), c(4)]
}

/// Binary PPM (P6) of the winding map, one pixel per cell, top row first.
pub fn write_winding_ppm<W: Write>(field: &WindingField, hull: &CellMask, spec: &RenderSpec, mut w: W) -> Result<()> {
    let pal = &spec.palette;
    write!(w, "P6\n{} {}\n255\n", field.nx(), field.ny())?;
    let mut row = Vec::with_capacity(3 * field.nx());
    for j in (0..field.ny()).rev() {
        row.clear();
        for i in 0..field.nx() {
            let c = if !hull.get(i, j) {
                &pal.background
            } else {
                match field.get(i, j) {
                    crate::hull::ON_PATH => &pal.path,
                    n => pal.index_color(n),
                }
            };
            row.extend_from_slice(&hex_rgb(c));
        }
        w.write_all(&row)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::LoopPath;
    use crate::hull::PathAnalysis;

    fn square() -> LoopPath {
        LoopPath::closed_polygon(vec![
            PlanarPoint::new(0.0, 0.0),
            PlanarPoint::new(1.0, 0.0),
            PlanarPoint::new(1.0, 1.0),
            PlanarPoint::new(0.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn square_hull_svg() {
        let p = square();
        let g = GridSpec::enclosing(&p, 1.0 / 32.0, 0.1).unwrap();
        let a = PathAnalysis::compute(&p, &g).unwrap();
        let svg = render_hull(p.points(), Some(&a.rasters.hull()), &g, &RenderSpec::default());
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains(r#"class="hull""#) && svg.contains("<polyline"));
    }

    #[test]
    fn empty_canvas_has_axes_only() {
        let g = GridSpec::new(PlanarPoint::new(-1.0, -1.0), 0.1, 20, 20).unwrap();
        let svg = render_hull(&[], None, &g, &RenderSpec::default());
        assert!(svg.contains(r#"class="axes""#));
        assert!(!svg.contains("<polyline"));
    }

    #[test]
    fn square_winding_single_interior_color() {
        let p = square();
        let g = GridSpec::enclosing(&p, 1.0 / 32.0, 0.1).unwrap();
        let a = PathAnalysis::compute(&p, &g).unwrap();
        let spec = RenderSpec::default();
        let svg = render_winding(&a.field, &a.rasters.hull(), &g, &spec);
        assert!(svg.contains("index 1"));
        assert!(!svg.contains("index 0"));
        assert!(!svg.contains("index -1"));
    }

    #[test]
    fn ppm_size() {
        let p = square();
        let g = GridSpec::enclosing(&p, 1.0 / 16.0, 0.1).unwrap();
        let a = PathAnalysis::compute(&p, &g).unwrap();
        let mut buf = Vec::new();
        write_winding_ppm(&a.field, &a.rasters.hull(), &RenderSpec::default(), &mut buf).unwrap();
        let header = format!("P6\n{} {}\n255\n", g.nx, g.ny);
        assert_eq!(buf.len(), header.len() + 3 * g.len());
    }
}
