use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::stats::{binomial_sigma, Moments};
use crate::Result;

/// Hex SHA-256 of the canonical JSON encoding of `config`.
pub fn config_hash<C: Serialize>(config: &C) -> Result<String> {
    let bytes = serde_json::to_vec(config)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Estimate of one quantity, with enough provenance to rerun it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub quantity: String,
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub target: Option<f64>,
    pub config: serde_json::Value,
    pub config_hash: String,
    pub provenance: String,
    /// Samples that failed or were excluded.
    #[serde(default)]
    pub failures: u64,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl EstimateReport {
    pub fn from_moments<C: Serialize>(quantity: &str, m: &Moments, target: Option<f64>, config: &C) -> Result<Self> {
        Self::build(quantity, m.mean, m.stderr(), m.count, target, config)
    }

    pub fn from_values<C: Serialize>(quantity: &str, values: &[f64], target: Option<f64>, config: &C) -> Result<Self> {
        Self::from_moments(quantity, &Moments::from_slice(values), target, config)
    }

    /// `k` successes out of `n`, with the binomial standard error of the
    /// empirical proportion.
    pub fn proportion<C: Serialize>(quantity: &str, k: u64, n: u64, target: Option<f64>, config: &C) -> Result<Self> {
        let p = k as f64 / n as f64;
        Self::build(quantity, p, binomial_sigma(p, n), n, target, config)
    }

    fn build<C: Serialize>(quantity: &str, mean: f64, stderr: f64, samples: u64, target: Option<f64>, config: &C) -> Result<Self> {
        let hash = config_hash(config)?;
        Ok(Self {
            quantity: quantity.to_string(),
            mean,
            stderr,
            samples,
            target,
            config: serde_json::to_value(config)?,
            provenance: format!("{}@{}+cfg.{}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"), &hash[..12]),
            config_hash: hash,
            failures: 0,
            warnings: Vec::new(),
        })
    }

    pub fn abs_error(&self) -> Option<f64> {
        self.target.map(|t| (self.mean - t).abs())
    }

    pub fn rel_error(&self) -> Option<f64> {
        self.target.map(|t| ((self.mean - t) / t).abs())
    }

    /// Signed distance to the target in standard errors.
    pub fn z_score(&self) -> Option<f64> {
        self.target.map(|t| (self.mean - t) / self.stderr)
    }

    /// `|mean - target| <= max(sigmas * stderr, rel * |target|)`.
    pub fn within(&self, sigmas: f64, rel: f64) -> bool {
        match self.target {
            Some(t) => (self.mean - t).abs() <= (sigmas * self.stderr).max(rel * t.abs()),
            None => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub steps: usize,
    pub cell_size: f64,
    pub samples: u64,
    pub hull_mean: f64,
    pub hull_stderr: f64,
    pub blocked_mean: f64,
    pub blocked_stderr: f64,
    pub w1_mean: f64,
    pub w1_stderr: f64,
    pub w0_mean: f64,
    pub w0_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// Coarsest first.
    pub rows: Vec<ConvergenceRow>,
    /// Hull means increase strictly down the ladder.
    pub hull_monotone: bool,
    /// Blocked means decrease strictly down the ladder.
    pub blocked_monotone_decreasing: bool,
    pub note: String,
}
