//! Closed forms and quadratures for the loop's exact constants: Schramm's
//! side probability, Yor's index law, the expected index-region areas, the
//! residue-series identity behind them, and the conditioned disk integral.

pub mod checks;
pub mod quadrature;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

pub use checks::{analytic_checks, AnalyticCheck};
pub use quadrature::{integrate_adaptive, Integral, QuadratureConfig, Truncation};

use crate::stats::kahan_sum;
use crate::{Error, Result};

/// Largest `s` with `exp(-s)` still a normal binary64 number, rounded.
pub const UNDERFLOW_EXPONENT: f64 = 745.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaAngle {
    pub kappa: f64,
    pub theta: f64,
}

impl KappaAngle {
    pub fn new(kappa: f64, theta: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa <= 4.0) {
            return Err(Error::Domain(format!("kappa must lie in (0, 4], got {kappa}")));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("theta must lie in [0, pi], got {theta}")));
        }
        Ok(Self { kappa, theta })
    }

    /// Exponent `2(4 - kappa)/kappa` of `sin u` in the side density.
    pub fn exponent(&self) -> f64 {
        2.0 * (4.0 - self.kappa) / self.kappa
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexLawParams {
    pub r: f64,
    pub n: i64,
}

impl IndexLawParams {
    pub fn new(r: f64, n: i64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("r must be positive, got {r}")));
        }
        Ok(Self { r, n })
    }
}

/// A value that may have been flushed to zero because `exp(-r^2)` underflows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LawValue {
    pub value: f64,
    pub underflow: bool,
}

/// Probability that a point at angle `theta` lies to the right of chordal
/// SLE(kappa) from 0 to infinity.
///
/// Substituting `s = (1 + cos u)/2` turns the normalized integral of
/// `sin^p` into a regularized incomplete beta function,
/// `f(theta) = I_{(1+cos theta)/2}(a, a)` with `a = (p + 1)/2`. At
/// `kappa = 8/3` this is `(1 + cos theta)/2` exactly.
pub fn schramm_right_prob(p: KappaAngle) -> f64 {
    let x = 0.5 * (1.0 + p.theta.cos());
    if p.kappa == 8.0 / 3.0 {
        return x;
    }
    let a = 0.5 * (p.exponent() + 1.0);
    beta_reg(a, a, x.clamp(0.0, 1.0))
}

/// The same probability from its defining ratio of integrals.
pub fn schramm_right_prob_quadrature(p: KappaAngle, cfg: &QuadratureConfig) -> Result<f64> {
    let e = p.exponent();
    let g = |u: f64| u.sin().max(0.0).powf(e);
    let num = integrate_adaptive(g, p.theta, PI, cfg)?.value;
    let den = integrate_adaptive(g, 0.0, PI, cfg)?.value;
    Ok(num / den)
}

fn cosh_config(cfg: &QuadratureConfig, scale: f64) -> QuadratureConfig {
    cfg.with_truncation(Truncation::CoshUnderflow { coefficient: 1.0, scale })
}

/// `Psi_r(x) = (x/pi) * int_0^inf exp(-r^2 cosh t) / (t^2 + x^2) dt`.
///
/// Evaluated for `|x|` and given the sign of `x`.
pub fn yor_psi(r: f64, x: f64, cfg: &QuadratureConfig) -> Result<LawValue> {
    if !(r > 0.0) || x == 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("Psi_r(x) needs r > 0 and finite x != 0, got r={r}, x={x}")));
    }
    let s = r * r;
    if s > UNDERFLOW_EXPONENT {
        return Ok(LawValue { value: 0.0, underflow: true });
    }
    let ax = x.abs();
    let int = integrate_adaptive(|t: f64| (-s * t.cosh()).exp() / (t * t + ax * ax), 0.0, f64::INFINITY, &cosh_config(cfg, s))?;
    Ok(LawValue { value: x.signum() * ax / PI * int.value, underflow: false })
}

// a/(t^2+a^2) - b/(t^2+b^2) without cancellation, for 0 < a < b.
#[inline]
fn lorentz_difference(t: f64, a: f64, b: f64) -> f64 {
    let t2 = t * t;
    (b - a) * (a * b - t2) / ((t2 + a * a) * (t2 + b * b))
}

/// `P(n_z = n)` for a time-1 Brownian loop from 0 and `|z| = r`.
///
/// For `n != 0` the difference `e^{-r^2}[Psi((2n-1)pi) - Psi((2n+1)pi)]`
/// is integrated as one integrand, with the prefactor folded into the
/// exponent, so neither cancellation nor underflow of `e^{-r^2}` costs
/// accuracy.
pub fn index_probability(p: IndexLawParams, cfg: &QuadratureConfig) -> Result<LawValue> {
    let s = p.r * p.r;
    if p.n == 0 {
        let psi = yor_psi(p.r, PI, cfg)?;
        return Ok(LawValue { value: 1.0 - 2.0 * (-s).exp() * psi.value, underflow: psi.underflow });
    }
    if 2.0 * s > UNDERFLOW_EXPONENT {
        return Ok(LawValue { value: 0.0, underflow: true });
    }
    let m = p.n.unsigned_abs() as f64;
    let (a, b) = ((2.0 * m - 1.0) * PI, (2.0 * m + 1.0) * PI);
    let int = integrate_adaptive(
        |t: f64| (-s * (1.0 + t.cosh())).exp() * lorentz_difference(t, a, b),
        0.0,
        f64::INFINITY,
        &cosh_config(cfg, s),
    )?;
    Ok(LawValue { value: int.value / PI, underflow: false })
}

/// Mass of `{|n| > n_max}`: the telescoped sum gives
/// `1 - sum_{|n| <= n_max} P(n) = 2 e^{-r^2} Psi_r((2 n_max + 1) pi)`.
pub fn index_tail(r: f64, n_max: u32, cfg: &QuadratureConfig) -> Result<f64> {
    let psi = yor_psi(r, (2.0 * n_max as f64 + 1.0) * PI, cfg)?;
    Ok(2.0 * (-r * r).exp() * psi.value)
}

fn sech_squared_half(t: f64) -> f64 {
    // 1/(1 + cosh t) = 1/(2 cosh^2(t/2)).
    let c = (0.5 * t).cosh();
    0.5 / (c * c)
}

fn exp_config(cfg: &QuadratureConfig, coefficient: f64) -> QuadratureConfig {
    cfg.with_truncation(Truncation::Exponential { coefficient, rate: 1.0 })
}

/// `int_0^inf dt/(1 + cosh t) * (A/(t^2 + A^2 pi^2) - B/(t^2 + B^2 pi^2))`.
fn half_line_kernel(a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    // |integrand| <= 2 e^{-t} (1/(A pi^2) + 1/(B pi^2)).
    let coefficient = 2.0 * (1.0 / a + 1.0 / b) / (PI * PI);
    let int = integrate_adaptive(
        |t: f64| sech_squared_half(t) * lorentz_difference(t, a * PI, b * PI) / PI,
        0.0,
        f64::INFINITY,
        &exp_config(cfg, coefficient),
    )?;
    Ok(int.value)
}

/// `E(W_n)` from the one-dimensional integral
/// `pi * int_0^inf dt/(1+cosh t) ((2n-1)/(t^2+(2n-1)^2 pi^2) - (2n+1)/(t^2+(2n+1)^2 pi^2))`.
pub fn expected_area_index(n: i64, cfg: &QuadratureConfig) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("the index-0 area has no one-dimensional formula; use pi/30".into()));
    }
    let m = n.unsigned_abs() as f64;
    Ok(PI * half_line_kernel(2.0 * m - 1.0, 2.0 * m + 1.0, cfg)?)
}

/// Closed form `1/(2 pi n^2)`.
pub fn expected_area_index_closed(n: i64) -> f64 {
    1.0 / (2.0 * PI * (n * n) as f64)
}

/// The three routes to `F(x) = 4/(pi^2 x^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FIdentity {
    pub x: f64,
    pub integral_value: f64,
    /// Partial residue sum over `k = 1..=terms`; `None` for integer `x`.
    pub series_value: Option<f64>,
    /// Leading-order size of the omitted terms, `1/(pi^2 terms^2)`.
    pub series_tail_estimate: Option<f64>,
    pub closed_form: f64,
}

/// `F(x)` over the whole line (twice the half-line integral, the integrand
/// being even in `t`).
pub fn f_integral(x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(x > 1.0 && x.is_finite()) {
        return Err(Error::Domain(format!("F(x) is evaluated for x > 1, got {x}")));
    }
    Ok(2.0 * half_line_kernel(x - 1.0, x + 1.0, cfg)?)
}

/// Partial residue series
/// `-(8/pi^2) sum_{k=1}^{terms} ((2k-1)(x-1)/((x-1)^2-(2k-1)^2)^2 - (2k-1)(x+1)/((x+1)^2-(2k-1)^2)^2)`,
/// compensated. Only valid for non-integer `x > 1`.
pub fn f_series(x: f64, terms: u64) -> Result<f64> {
    if !(x > 1.0 && x.is_finite()) {
        return Err(Error::Domain(format!("F(x) is evaluated for x > 1, got {x}")));
    }
    if x.fract() == 0.0 {
        return Err(Error::Domain(format!(
            "the residue series for F(x) is only stated for non-integer x; got {x} (use the integral)"
        )));
    }
    let g = |w: f64, odd: f64| odd * w / (w * w - odd * odd).powi(2);
    let s = kahan_sum((1..=terms).map(|k| {
        let odd = (2 * k - 1) as f64;
        g(x - 1.0, odd) - g(x + 1.0, odd)
    }));
    Ok(-8.0 / (PI * PI) * s)
}

pub fn f_identity_check(x: f64, terms: u64, cfg: &QuadratureConfig) -> Result<FIdentity> {
    let integral_value = f_integral(x, cfg)?;
    let (series_value, series_tail_estimate) = if x.fract() == 0.0 {
        (None, None)
    } else {
        (Some(f_series(x, terms)?), Some(1.0 / (PI * PI * (terms as f64).powi(2))))
    };
    Ok(FIdentity { x, integral_value, series_value, series_tail_estimate, closed_form: 4.0 / (PI * PI * x * x) })
}

/// `int_{D+} -(4/5) Im(z + 1/z) Im(z) dA(z)` over the upper half unit disk.
///
/// In polar coordinates the integrand is `-(4/5)(r - 1/r) r^2 sin^2(theta)`;
/// the angular factor integrates to `pi/2` and only the radial integral is
/// done numerically.
pub fn sle_conditioned_area_integral(cfg: &QuadratureConfig) -> Result<f64> {
    let radial = integrate_adaptive(|r: f64| -0.8 * (r * r * r - r), 0.0, 1.0, cfg)?;
    Ok(0.5 * PI * radial.value)
}

/// Fully two-dimensional tensor quadrature of the same integrand over
/// `0 < r < 1`, `theta_range.0 < theta < theta_range.1`.
pub fn sle_conditioned_area_integral_2d(cfg: &QuadratureConfig, theta_range: (f64, f64)) -> Result<f64> {
    let integrand = |r: f64, th: f64| {
        let z_im = r * th.sin();
        let im_z_plus_inv = (r - 1.0 / r) * th.sin();
        -0.8 * im_z_plus_inv * z_im * r
    };
    let mut failure = None;
    let outer = integrate_adaptive(
        |th: f64| match integrate_adaptive(|r: f64| integrand(r, th), 0.0, 1.0, cfg) {
            Ok(i) => i.value,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        theta_range.0,
        theta_range.1,
        cfg,
    );
    // A closure cannot return the error directly; surface the first one.
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(outer?.value)
}

/// `(1/pi) * sum_{n >= 1} 1/n^2 + pi/30` with the sum in closed form
/// (`pi^2/6`), against `pi/5`.
pub fn decomposition_identity() -> (f64, f64) {
    let lhs = (1.0 / PI) * (PI * PI / 6.0) + PI / 30.0;
    (lhs, PI / 5.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn schramm_endpoints_and_symmetry() {
        for kappa in [1.0, 2.0, 8.0 / 3.0, 3.0, 4.0] {
            assert!((schramm_right_prob(KappaAngle::new(kappa, 0.0).unwrap()) - 1.0).abs() < 1e-14);
            assert!(schramm_right_prob(KappaAngle::new(kappa, PI).unwrap()).abs() < 1e-14);
            assert!((schramm_right_prob(KappaAngle::new(kappa, PI / 2.0).unwrap()) - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn kappa_out_of_range() {
        assert!(matches!(KappaAngle::new(4.5, 1.0), Err(Error::Domain(_))));
        assert!(matches!(KappaAngle::new(0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn psi_is_odd() {
        let a = yor_psi(1.0, PI, &cfg()).unwrap().value;
        let b = yor_psi(1.0, -PI, &cfg()).unwrap().value;
        assert_eq!(a, -b);
    }

    #[test]
    fn huge_radius_underflows() {
        let v = yor_psi(40.0, PI, &cfg()).unwrap();
        assert!(v.underflow && v.value == 0.0);
    }

    #[test]
    fn series_rejects_integers() {
        assert!(matches!(f_series(3.0, 10), Err(Error::Domain(_))));
        let f = f_identity_check(2.0, 10, &cfg()).unwrap();
        assert!(f.series_value.is_none());
    }

    #[test]
    fn index_zero_area_has_no_kernel() {
        assert!(expected_area_index(0, &cfg()).is_err());
    }
}
