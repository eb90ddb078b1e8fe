use serde::{Deserialize, Serialize};

/// A point of the plane. Coordinates are always finite.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub const ORIGIN: PlanarPoint = PlanarPoint { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Polar constructor, `r e^{i theta}`.
    pub fn polar(r: f64, theta: f64) -> Self {
        Self::new(r * theta.cos(), r * theta.sin())
    }
}

impl std::ops::Sub for PlanarPoint {
    type Output = PlanarPoint;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add for PlanarPoint {
    type Output = PlanarPoint;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: PlanarPoint,
    pub max: PlanarPoint,
}

impl BoundingBox {
    pub fn of(points: &[PlanarPoint]) -> Option<Self> {
        let first = *points.first()?;
        let mut bb = BoundingBox { min: first, max: first };
        for p in &points[1..] {
            bb.min.x = bb.min.x.min(p.x);
            bb.min.y = bb.min.y.min(p.y);
            bb.max.x = bb.max.x.max(p.x);
            bb.max.y = bb.max.y.max(p.y);
        }
        Some(bb)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }
}

/// Signed area of a closed polygon (shoelace). Positive for counterclockwise
/// traversal. The closing edge from the last to the first point is implied.
pub fn shoelace_area(points: &[PlanarPoint]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let o = points[0];
    let mut acc = 0.0;
    for w in points.windows(2) {
        let a = w[0] - o;
        let b = w[1] - o;
        acc += a.x * b.y - a.y * b.x;
    }
    0.5 * acc
}

/// Winding number of a closed polyline around `z` by summing the turning
/// angle of `p_k - z` along every edge. `None` if `z` lies on a vertex.
pub fn angle_winding(points: &[PlanarPoint], z: PlanarPoint) -> Option<i64> {
    if points.len() < 2 {
        return Some(0);
    }
    let mut total = 0.0;
    let mut prev = points[0] - z;
    if prev.x == 0.0 && prev.y == 0.0 {
        return None;
    }
    let n = points.len();
    // Close the polyline if the caller passed an open one.
    let closing = points[0] != points[n - 1];
    let extra = if closing { Some(points[0]) } else { None };
    for p in points[1..].iter().copied().chain(extra) {
        let cur = p - z;
        if cur.x == 0.0 && cur.y == 0.0 {
            return None;
        }
        let cross = prev.x * cur.y - prev.y * cur.x;
        let dot = prev.x * cur.x + prev.y * cur.y;
        total += cross.atan2(dot);
        prev = cur;
    }
    Some((total / std::f64::consts::TAU).round() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Vec<PlanarPoint> {
        vec![
            PlanarPoint::new(0.0, 0.0),
            PlanarPoint::new(1.0, 0.0),
            PlanarPoint::new(1.0, 1.0),
            PlanarPoint::new(0.0, 1.0),
            PlanarPoint::new(0.0, 0.0),
        ]
    }

    #[test]
    fn shoelace_square() {
        assert_eq!(shoelace_area(&unit_square()), 1.0);
        let mut cw = unit_square();
        cw.reverse();
        assert_eq!(shoelace_area(&cw), -1.0);
    }

    #[test]
    fn angle_winding_square() {
        let sq = unit_square();
        assert_eq!(angle_winding(&sq, PlanarPoint::new(0.5, 0.5)), Some(1));
        assert_eq!(angle_winding(&sq, PlanarPoint::new(1.5, 0.5)), Some(0));
        assert_eq!(angle_winding(&sq, PlanarPoint::new(0.0, 0.0)), None);
    }

    #[test]
    fn bounding_box() {
        let bb = BoundingBox::of(&unit_square()).unwrap();
        assert_eq!(bb.width(), 1.0);
        assert_eq!(bb.height(), 1.0);
        assert!(BoundingBox::of(&[]).is_none());
    }
}
