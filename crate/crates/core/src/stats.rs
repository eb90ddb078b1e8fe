//! Compensated sums and the small set of tests the experiments report.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Neumaier-compensated sum; exact order of the iterator is respected.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Running mean and variance in index order (Welford with a compensated
/// total), so aggregation is independent of how samples were scheduled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn from_slice(xs: &[f64]) -> Self {
        let mut m = Self::default();
        for &x in xs {
            m.push(x);
        }
        m
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Sample standard deviation over `sqrt(M)`.
    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Standard error of a proportion with true value `p` over `m` trials.
pub fn binomial_sigma(p: f64, m: u64) -> f64 {
    (p * (1.0 - p) / m as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of `observed` counts against `expected`
/// probabilities (which must sum to 1). Cells with zero expectation are
/// skipped and do not count towards the degrees of freedom.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> ChiSquareResult {
    assert_eq!(observed.len(), expected.len());
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(expected) {
        if p <= 0.0 {
            continue;
        }
        let e = p * total as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    let dof = cells.saturating_sub(1).max(1);
    let p_value = ChiSquared::new(dof as f64).map(|d| d.sf(stat)).unwrap_or(f64::NAN);
    ChiSquareResult { statistic: stat, dof, p_value }
}

/// Two-sided pooled two-proportion z-test; returns `(z, p_value)`.
pub fn two_proportion_test(k1: u64, n1: u64, k2: u64, n2: u64) -> (f64, f64) {
    let p1 = k1 as f64 / n1 as f64;
    let p2 = k2 as f64 / n2 as f64;
    let pooled = (k1 + k2) as f64 / (n1 + n2) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    if se == 0.0 {
        return (0.0, 1.0);
    }
    let z = (p1 - p2) / se;
    let normal = Normal::standard();
    (z, 2.0 * normal.sf(z.abs()))
}
