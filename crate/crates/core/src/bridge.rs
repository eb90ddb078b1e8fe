//! Discretized planar Brownian loops and the lowest-point (Vervaat) shift.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::geometry::PlanarPoint;
use crate::seed::rng_from_seed;
use crate::{Error, Result};

/// Gaussian bridge coordinates are rounded to multiples of this dyadic
/// quantum, so translating a path by one of its own vertices is exact in
/// floating point.
pub const COORDINATE_QUANTUM: f64 = 1.0 / (1u64 << 36) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopKind {
    /// Exact finite-dimensional marginals of the time-1 Brownian bridge.
    GaussianBridge,
    /// Closed simple random walk on the unit square lattice.
    LatticeLoop,
    /// Any other closed polyline (test shapes, imported paths).
    Polygon,
}

impl LoopKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LoopKind::GaussianBridge => "gaussian_bridge",
            LoopKind::LatticeLoop => "lattice_loop",
            LoopKind::Polygon => "polygon",
        }
    }
}

impl fmt::Display for LoopKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LoopKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian_bridge" | "gaussian" => Ok(LoopKind::GaussianBridge),
            "lattice_loop" | "lattice" => Ok(LoopKind::LatticeLoop),
            "polygon" => Ok(LoopKind::Polygon),
            other => Err(Error::Config(format!("unknown loop kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeSpec {
    pub steps: usize,
    pub seed: u64,
    pub kind: LoopKind,
}

impl BridgeSpec {
    pub fn gaussian(steps: usize, seed: u64) -> Self {
        Self { steps, seed, kind: LoopKind::GaussianBridge }
    }

    pub fn lattice(steps: usize, seed: u64) -> Self {
        Self { steps, seed, kind: LoopKind::LatticeLoop }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::Config(format!("steps must be at least 2, got {}", self.steps)));
        }
        match self.kind {
            LoopKind::LatticeLoop if !self.steps.is_multiple_of(2) => Err(Error::Config(format!(
                "a lattice loop needs an even number of steps, got {}",
                self.steps
            ))),
            LoopKind::Polygon => Err(Error::Config("polygon paths are not sampled".into())),
            _ => Ok(()),
        }
    }

    /// Draw the path this spec describes.
    pub fn sample(&self) -> Result<LoopPath> {
        match self.kind {
            LoopKind::GaussianBridge => sample_gaussian_bridge(self),
            LoopKind::LatticeLoop => sample_lattice_loop(self),
            LoopKind::Polygon => Err(Error::Config("polygon paths are not sampled".into())),
        }
    }
}

/// A closed polyline with uniform time steps: `points.len() == N + 1` and
/// `points[0] == points[N]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopPath {
    points: Vec<PlanarPoint>,
    kind: LoopKind,
}

impl LoopPath {
    /// Wrap a closed polyline. Fails if fewer than two points are given, a
    /// coordinate is not finite, or the last point differs from the first.
    pub fn new(points: Vec<PlanarPoint>, kind: LoopKind) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Geometry("a loop needs at least two points".into()));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::Geometry(format!("non-finite coordinate {p:?}")));
        }
        if points[0] != points[points.len() - 1] {
            return Err(Error::Geometry("path is not closed".into()));
        }
        Ok(Self { points, kind })
    }

    /// Close `points` by appending the first point if needed.
    pub fn closed_polygon(mut points: Vec<PlanarPoint>) -> Result<Self> {
        if let (Some(&first), Some(&last)) = (points.first(), points.last()) {
            if first != last {
                points.push(first);
            }
        }
        Self::new(points, LoopKind::Polygon)
    }

    pub fn points(&self) -> &[PlanarPoint] {
        &self.points
    }

    pub fn kind(&self) -> LoopKind {
        self.kind
    }

    /// Number of steps `N`.
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn increments(&self) -> impl Iterator<Item = PlanarPoint> + '_ {
        self.points.windows(2).map(|w| w[1] - w[0])
    }

    /// Keep every `factor`-th vertex. For a Gaussian bridge this is exactly
    /// a bridge with `N / factor` steps, coupled to the finer one.
    pub fn decimate(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.steps().is_multiple_of(factor) {
            return Err(Error::Config(format!("cannot decimate {} steps by {factor}", self.steps())));
        }
        if factor > 1 && self.kind == LoopKind::LatticeLoop {
            return Err(Error::Config("a decimated lattice loop is no longer a lattice loop".into()));
        }
        let points = self.points.iter().step_by(factor).copied().collect();
        Ok(Self { points, kind: self.kind })
    }

    pub fn total_length(&self) -> f64 {
        self.increments().map(|d| d.norm()).sum()
    }

    /// Write the path in the plain-text exchange format: a header line
    /// `N kind` followed by `N + 1` lines `x y`. Coordinates are printed in
    /// shortest round-trip form, so reading the file back is lossless.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.steps(), self.kind)?;
        for p in &self.points {
            writeln!(w, "{:?} {:?}", p.x, p.y)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("path text is ASCII")
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate().filter_map(|(i, l)| match l {
            Ok(l) if l.trim().is_empty() => None,
            other => Some((i + 1, other)),
        });
        let (hline, header) = lines
            .next()
            .ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let header = header?;
        let mut parts = header.split_whitespace();
        let steps: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse { line: hline, msg: format!("bad header `{header}`") })?;
        let kind: LoopKind = parts
            .next()
            .ok_or_else(|| Error::Parse { line: hline, msg: "missing kind".into() })?
            .parse()
            .map_err(|e: Error| Error::Parse { line: hline, msg: e.to_string() })?;

        let mut points = Vec::with_capacity(steps + 1);
        for (line, text) in lines {
            let text = text?;
            let mut it = text.split_whitespace().map(f64::from_str);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(x)), Some(Ok(y)), None) => points.push(PlanarPoint::new(x, y)),
                _ => return Err(Error::Parse { line, msg: format!("expected `x y`, got `{text}`") }),
            }
        }
        if points.len() != steps + 1 {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header announces {} steps but {} points follow", steps, points.len()),
            });
        }
        Self::new(points, kind)
    }
}

fn quantize(v: f64) -> f64 {
    (v / COORDINATE_QUANTUM).round() * COORDINATE_QUANTUM
}

/// Sample `B_k = W_k - (k/N) W_N`, `k = 0..=N`, where `W` is a planar Gaussian
/// walk with independent `N(0, 1/N)` coordinate increments. The marginals at
/// the grid times are those of the time-1 Brownian bridge, exactly.
pub fn sample_gaussian_bridge(spec: &BridgeSpec) -> Result<LoopPath> {
    if spec.kind != LoopKind::GaussianBridge {
        return Err(Error::Config(format!("expected a gaussian_bridge spec, got {}", spec.kind)));
    }
    spec.validate()?;
    let n = spec.steps;
    let sd = (n as f64).recip().sqrt();
    let mut rng = rng_from_seed(spec.seed);

    let mut walk = Vec::with_capacity(n + 1);
    let (mut wx, mut wy) = (0.0f64, 0.0f64);
    walk.push(PlanarPoint::ORIGIN);
    for _ in 0..n {
        let dx: f64 = rng.sample(StandardNormal);
        let dy: f64 = rng.sample(StandardNormal);
        wx += sd * dx;
        wy += sd * dy;
        walk.push(PlanarPoint::new(wx, wy));
    }
    let end = walk[n];
    let inv_n = (n as f64).recip();
    let mut points: Vec<PlanarPoint> = walk
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let t = k as f64 * inv_n;
            PlanarPoint::new(quantize(w.x - t * end.x), quantize(w.y - t * end.y))
        })
        .collect();
    points[0] = PlanarPoint::ORIGIN;
    points[n] = PlanarPoint::ORIGIN;
    LoopPath::new(points, LoopKind::GaussianBridge)
}

/// Unnormalized log-weights of the number of horizontal steps `h` (even) in a
/// closed lattice walk of length `n`: `C(n,h) C(h,h/2) C(n-h,(n-h)/2)`.
pub(crate) fn horizontal_step_log_weights(n: usize) -> Vec<(usize, f64)> {
    let mut ln_fact = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    ln_fact.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        ln_fact.push(acc);
    }
    let ln_choose = |a: usize, b: usize| ln_fact[a] - ln_fact[b] - ln_fact[a - b];
    (0..=n)
        .step_by(2)
        .map(|h| (h, ln_choose(n, h) + ln_choose(h, h / 2) + ln_choose(n - h, (n - h) / 2)))
        .collect()
}

/// Sample a uniformly random closed simple random walk of length `N` on the
/// square lattice, started at the origin.
///
/// The number of horizontal steps is drawn from its exact law, then the
/// balanced multiset of unit steps is shuffled uniformly.
pub fn sample_lattice_loop(spec: &BridgeSpec) -> Result<LoopPath> {
    if spec.kind != LoopKind::LatticeLoop {
        return Err(Error::Config(format!("expected a lattice_loop spec, got {}", spec.kind)));
    }
    spec.validate()?;
    let n = spec.steps;
    let mut rng = rng_from_seed(spec.seed);

    let weights = horizontal_step_log_weights(n);
    let max_lw = weights.iter().map(|w| w.1).fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = weights.iter().map(|w| (w.1 - max_lw).exp()).sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut horizontal = weights.last().map(|w| w.0).unwrap_or(0);
    for &(h, lw) in &weights {
        acc += (lw - max_lw).exp();
        if u < acc {
            horizontal = h;
            break;
        }
    }

    const STEPS: [(i8, i8); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    let vertical = n - horizontal;
    let mut steps: Vec<(i8, i8)> = Vec::with_capacity(n);
    steps.extend(std::iter::repeat_n(STEPS[0], horizontal / 2));
    steps.extend(std::iter::repeat_n(STEPS[1], horizontal / 2));
    steps.extend(std::iter::repeat_n(STEPS[2], vertical / 2));
    steps.extend(std::iter::repeat_n(STEPS[3], vertical / 2));
    steps.shuffle(&mut rng);

    let mut points = Vec::with_capacity(n + 1);
    let (mut x, mut y) = (0i64, 0i64);
    points.push(PlanarPoint::ORIGIN);
    for (dx, dy) in steps {
        x += dx as i64;
        y += dy as i64;
        points.push(PlanarPoint::new(x as f64, y as f64));
    }
    LoopPath::new(points, LoopKind::LatticeLoop)
}

/// Index of the lowest vertex (smallest `y`), ties broken by smallest index.
pub fn lowest_point_index(path: &LoopPath) -> usize {
    let pts = &path.points()[..path.steps()];
    let mut best = 0;
    for (k, p) in pts.iter().enumerate() {
        if p.y < pts[best].y {
            best = k;
        }
    }
    best
}

/// Restart the loop at its lowest point and translate that point to the
/// origin: `Z_k = B_{(t + k) mod N} - B_t`. The output is closed, starts at
/// the origin, and lies in the closed upper half-plane.
pub fn vervaat_transform(path: &LoopPath) -> LoopPath {
    let n = path.steps();
    let t = lowest_point_index(path);
    let pts = path.points();
    let base = pts[t];
    let points: Vec<PlanarPoint> = (0..=n).map(|k| pts[(t + k) % n] - base).collect();
    LoopPath { points, kind: path.kind }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_step_bridge_is_pinned() {
        for seed in 0..20 {
            let p = sample_gaussian_bridge(&BridgeSpec::gaussian(2, seed)).unwrap();
            assert_eq!(p.points().len(), 3);
            assert_eq!(p.points()[0], PlanarPoint::ORIGIN);
            assert_eq!(p.points()[2], PlanarPoint::ORIGIN);
        }
    }

    #[test]
    fn bridge_matches_walk_minus_drift() {
        // Recompute W from the same seed and compare.
        let spec = BridgeSpec::gaussian(64, 9);
        let p = sample_gaussian_bridge(&spec).unwrap();
        let mut rng = rng_from_seed(9);
        let sd = (1.0f64 / 64.0).sqrt();
        let mut w = vec![PlanarPoint::ORIGIN];
        for _ in 0..64 {
            let dx: f64 = rng.sample(StandardNormal);
            let dy: f64 = rng.sample(StandardNormal);
            let last = *w.last().unwrap();
            w.push(PlanarPoint::new(last.x + sd * dx, last.y + sd * dy));
        }
        for k in 0..=64 {
            let t = k as f64 / 64.0;
            let ex = w[k].x - t * w[64].x;
            let ey = w[k].y - t * w[64].y;
            assert!((p.points()[k].x - ex).abs() <= COORDINATE_QUANTUM);
            assert!((p.points()[k].y - ey).abs() <= COORDINATE_QUANTUM);
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(
            sample_gaussian_bridge(&BridgeSpec::gaussian(1, 0)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            sample_lattice_loop(&BridgeSpec::lattice(7, 0)),
            Err(Error::Config(_))
        ));
        assert!(sample_lattice_loop(&BridgeSpec::gaussian(8, 0)).is_err());
    }

    #[test]
    fn lattice_loop_is_balanced_and_unit() {
        for seed in 0..50 {
            let p = sample_lattice_loop(&BridgeSpec::lattice(100, seed)).unwrap();
            let (mut px, mut mx, mut py, mut my) = (0, 0, 0, 0);
            for d in p.increments() {
                match (d.x as i32, d.y as i32) {
                    (1, 0) => px += 1,
                    (-1, 0) => mx += 1,
                    (0, 1) => py += 1,
                    (0, -1) => my += 1,
                    other => panic!("non-unit step {other:?}"),
                }
            }
            assert_eq!(px, mx);
            assert_eq!(py, my);
            assert_eq!(p.points()[100], PlanarPoint::ORIGIN);
        }
    }

    #[test]
    fn horizontal_weights_small_case() {
        // n = 4: h=0 -> 1*1*6, h=2 -> 6*2*2, h=4 -> 1*6*1 ; total 36.
        let w = horizontal_step_log_weights(4);
        let v: Vec<f64> = w.iter().map(|x| x.1.exp()).collect();
        assert!((v[0] - 6.0).abs() < 1e-9);
        assert!((v[1] - 24.0).abs() < 1e-9);
        assert!((v[2] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn vervaat_on_square_is_identity() {
        let sq = LoopPath::closed_polygon(vec![
            PlanarPoint::new(0.0, 0.0),
            PlanarPoint::new(1.0, 0.0),
            PlanarPoint::new(1.0, 1.0),
            PlanarPoint::new(0.0, 1.0),
        ])
        .unwrap();
        assert_eq!(lowest_point_index(&sq), 0);
        assert_eq!(vervaat_transform(&sq), sq);
    }

    #[test]
    fn vervaat_unique_minimum() {
        let p = LoopPath::closed_polygon(vec![
            PlanarPoint::new(0.0, 0.0),
            PlanarPoint::new(2.0, 1.0),
            PlanarPoint::new(1.0, -3.0),
            PlanarPoint::new(-1.0, 2.0),
        ])
        .unwrap();
        let z = vervaat_transform(&p);
        assert_eq!(z.points()[0], PlanarPoint::ORIGIN);
        assert_eq!(z.points()[4], PlanarPoint::ORIGIN);
        let min_y = z.points().iter().map(|q| q.y).fold(f64::INFINITY, f64::min);
        assert_eq!(min_y, 0.0);
        assert_eq!(z.points()[1], PlanarPoint::new(-2.0, 5.0));
    }

    #[test]
    fn path_text_round_trip() {
        let p = sample_gaussian_bridge(&BridgeSpec::gaussian(16, 3)).unwrap();
        let text = p.to_text();
        assert!(text.starts_with("16 gaussian_bridge\n"));
        let q = LoopPath::read_from(text.as_bytes()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn path_text_rejects_garbage() {
        assert!(LoopPath::read_from("2 gaussian_bridge\n0 0\n1 1\n".as_bytes()).is_err());
        assert!(LoopPath::read_from("1 polygon\n0 0\nx 1\n".as_bytes()).is_err());
        assert!(LoopPath::read_from("1 blob\n0 0\n0 0\n".as_bytes()).is_err());
        assert!(LoopPath::read_from("2 polygon\n0 0\n1 0\n0 1\n".as_bytes()).is_err());
    }
}
