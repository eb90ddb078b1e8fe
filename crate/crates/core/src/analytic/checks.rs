//! The table behind `verify-analytic`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::*;
use crate::stats::kahan_sum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticCheck {
    pub check_name: String,
    pub computed: f64,
    pub target: f64,
    pub abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl AnalyticCheck {
    pub fn new(name: impl Into<String>, computed: f64, target: f64, tolerance: f64) -> Self {
        let abs_error = (computed - target).abs();
        Self { check_name: name.into(), computed, target, abs_error, tolerance, pass: abs_error <= tolerance }
    }
}

/// Every analytic identity, each evaluated by its own route.
pub fn analytic_checks(cfg: &QuadratureConfig) -> Result<Vec<AnalyticCheck>> {
    let mut out = Vec::new();

    out.push(AnalyticCheck::new("disk_integral", sle_conditioned_area_integral(cfg)?, PI / 10.0, 1e-9));
    out.push(AnalyticCheck::new("disk_integral_2d", sle_conditioned_area_integral_2d(cfg, (0.0, PI))?, PI / 10.0, 1e-9));
    out.push(AnalyticCheck::new(
        "disk_integral_half",
        sle_conditioned_area_integral_2d(cfg, (0.0, PI / 2.0))?,
        PI / 20.0,
        1e-9,
    ));

    for n in 1..=10 {
        out.push(AnalyticCheck::new(
            format!("expected_area_index_{n}"),
            expected_area_index(n, cfg)?,
            expected_area_index_closed(n),
            1e-8,
        ));
    }

    let (lhs, rhs) = decomposition_identity();
    out.push(AnalyticCheck::new("decomposition_identity", lhs, rhs, 1e-12));

    for r in [0.3, 0.7, 1.0, 2.0] {
        let probs = (-50..=50).map(|n| index_probability(IndexLawParams::new(r, n)?, cfg).map(|v| v.value));
        let probs: Vec<f64> = probs.collect::<Result<_>>()?;
        let total = kahan_sum(probs.iter().copied()) + index_tail(r, 50, cfg)?;
        out.push(AnalyticCheck::new(format!("yor_normalization_r{r}"), total, 1.0, 1e-8));
        let negative = probs.iter().filter(|&&p| p < 0.0).count();
        out.push(AnalyticCheck::new(format!("yor_nonnegative_r{r}"), negative as f64, 0.0, 0.0));
    }
    for n in 1..=5 {
        let p = index_probability(IndexLawParams::new(1.0, n)?, cfg)?.value;
        let q = index_probability(IndexLawParams::new(1.0, -n)?, cfg)?.value;
        out.push(AnalyticCheck::new(format!("yor_symmetry_n{n}"), p - q, 0.0, 1e-12));
    }

    for x in [2.0, 2.5, 4.0] {
        let f = f_identity_check(x, 1_000_000, cfg)?;
        out.push(AnalyticCheck::new(format!("f_integral_x{x}"), f.integral_value, f.closed_form, 1e-6));
        if let Some(s) = f.series_value.filter(|_| x == 2.5) {
            out.push(AnalyticCheck::new(format!("f_series_x{x}"), s, f.closed_form, 1e-5));
        }
    }

    for (label, kappa) in [("8/3", 8.0 / 3.0), ("2", 2.0), ("3", 3.0)] {
        let mut worst = 0.0f64;
        for i in 0..=36 {
            let p = KappaAngle::new(kappa, PI * i as f64 / 36.0)?;
            worst = worst.max((schramm_right_prob(p) - schramm_right_prob_quadrature(p, cfg)?).abs());
        }
        out.push(AnalyticCheck::new(format!("schramm_closed_vs_quadrature_kappa{label}"), worst, 0.0, 1e-10));
    }
    Ok(out)
}
