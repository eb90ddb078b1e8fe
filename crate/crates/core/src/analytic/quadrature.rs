//! Globally adaptive Gauss–Kronrod (7/15) quadrature with tail truncation
//! for semi-infinite ranges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

// 15-point Kronrod abscissae (positive half, last entry is the center) and
// the embedded 7-point Gauss weights.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// How an infinite upper limit is replaced by a finite one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum Truncation {
    /// Cut at `t`; the caller vouches for the tail.
    Fixed { t: f64 },
    /// `|f(t)| <= coefficient * exp(-rate * t)` beyond the lower limit; the
    /// cut is placed where the tail bound drops below `abs_tol / 10`.
    Exponential { coefficient: f64, rate: f64 },
    /// `|f(t)| <= coefficient * exp(-scale * cosh t)`; cut where
    /// `scale * cosh t > 745`, past which the factor underflows in binary64.
    CoshUnderflow { coefficient: f64, scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub truncation: Truncation,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
            truncation: Truncation::Fixed { t: 50.0 },
        }
    }
}

impl QuadratureConfig {
    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::Config("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Config("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }

    /// Finite replacement for an infinite upper limit starting at `a`, and a
    /// bound on the discarded tail.
    pub fn truncate(&self, a: f64) -> Result<(f64, f64)> {
        match self.truncation {
            Truncation::Fixed { t } => {
                if t <= a {
                    return Err(Error::Config(format!("truncation point {t} is not above {a}")));
                }
                Ok((t, 0.0))
            }
            Truncation::Exponential { coefficient, rate } => {
                if !(rate > 0.0 && coefficient >= 0.0) {
                    return Err(Error::Config("exponential tail needs rate > 0".into()));
                }
                let target = self.abs_tol / 10.0;
                let len = ((coefficient / (rate * target)).ln() / rate).max(1.0);
                let tail = coefficient / rate * (-rate * (a + len)).exp();
                Ok((a + len, tail))
            }
            Truncation::CoshUnderflow { coefficient, scale } => {
                if !(scale > 0.0) {
                    return Err(Error::Config("cosh tail needs scale > 0".into()));
                }
                let t = (745.0 / scale).max(1.0).acosh().max(a + 1.0);
                // exp(-s cosh t) <= exp(-s cosh T) exp(-s sinh T (t - T)).
                let tail = coefficient * (-745.0f64).exp() / (scale * t.sinh());
                Ok((t, tail))
            }
        }
    }
}

/// A converged integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    let value = k * h;
    let err = ((k - g) * h).abs();
    // Keep the error estimate above what roundoff allows.
    let floor = 50.0 * f64::EPSILON * value.abs();
    (value, err.max(floor))
}

/// Integrate `f` over `[a, b]`; `b` may be `f64::INFINITY`, in which case the
/// config's truncation rule chooses the cut and its tail bound is added to
/// the reported error.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Integral> {
    cfg.validate()?;
    if a.is_nan() || b.is_nan() || a.is_infinite() {
        return Err(Error::Domain(format!("unsupported integration range [{a}, {b}]")));
    }
    let (b, tail) = if b.is_infinite() { cfg.truncate(a)? } else { (b, 0.0) };
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, subdivisions: 0 });
    }

    let (value, error) = kronrod(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut subdivisions = 0;

    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err + tail <= tol {
            break;
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::Quadrature { estimate: total, error: total_err + tail, subdivisions });
        }
        let worst = heap.pop().expect("heap holds at least one piece");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at machine resolution; its error cannot shrink further.
            return Err(Error::Quadrature { estimate: total, error: total_err + tail, subdivisions });
        }
        let (v1, e1) = kronrod(&mut f, worst.a, mid);
        let (v2, e2) = kronrod(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
        subdivisions += 1;
    }

    // Re-sum from the pieces so the running update does not accumulate drift.
    let mut pieces: Vec<Piece> = heap.into_vec();
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = crate::stats::kahan_sum(pieces.iter().map(|p| p.value));
    let error = pieces.iter().map(|p| p.error).sum::<f64>() + tail;
    Ok(Integral { value, error, subdivisions })
}

/// Composite trapezoid rule on `n` uniform panels; the brute-force oracle
/// used to cross-check the adaptive routine.
pub fn trapezoid<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let ends = 0.5 * (f(a) + f(b));
    let inner = crate::stats::kahan_sum((1..n).map(|k| f(a + k as f64 * h)));
    h * (ends + inner)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_half_period() {
        let r = integrate_adaptive(f64::sin, 0.0, std::f64::consts::PI, &QuadratureConfig::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cosh_decay_against_trapezoid() {
        let cfg = QuadratureConfig::default().with_truncation(Truncation::CoshUnderflow { coefficient: 1.0, scale: 1.0 });
        let r = integrate_adaptive(|t: f64| (-t.cosh()).exp(), 0.0, f64::INFINITY, &cfg).unwrap();
        // Trapezoid is spectrally accurate for this analytic, rapidly decaying integrand.
        let oracle = trapezoid(|t: f64| (-t.cosh()).exp(), 0.0, 8.0, 80_000);
        assert!((r.value - oracle).abs() < 1e-10, "{} vs {}", r.value, oracle);
    }

    #[test]
    fn inverse_sqrt_endpoint() {
        let cfg = QuadratureConfig { abs_tol: 1e-10, rel_tol: 1e-10, ..Default::default() };
        let r = integrate_adaptive(|u: f64| u.powf(-0.5), 0.0, 1.0, &cfg).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn exhausted_budget_reports_partial_estimate() {
        let cfg = QuadratureConfig { max_subdivisions: 2, ..Default::default() };
        match integrate_adaptive(|u: f64| (1.0 / u).sin(), 1e-3, 1.0, &cfg) {
            Err(Error::Quadrature { estimate, subdivisions, .. }) => {
                assert!(estimate.is_finite());
                assert_eq!(subdivisions, 2);
            }
            other => panic!("expected quadrature error, got {other:?}"),
        }
    }

    #[test]
    fn exponential_cut_bounds_tail() {
        let cfg = QuadratureConfig::default().with_truncation(Truncation::Exponential { coefficient: 1.0, rate: 1.0 });
        let r = integrate_adaptive(|t: f64| (-t).exp(), 0.0, f64::INFINITY, &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }
}
