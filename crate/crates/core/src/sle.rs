//! Side of a chordal SLE curve, decided from the Loewner flow of one point.
//!
//! With `X_t = g_t(z) - sqrt(kappa) B_t` the marked point obeys
//! `dX = (2/X) dt - sqrt(kappa) dB`. For `kappa <= 4` the point is never
//! swallowed and `arg X_t` converges to 0 (point right of the curve) or to
//! `pi` (left), so the side is read off the argument without building the
//! trace.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{schramm_right_prob, KappaAngle};
use crate::geometry::PlanarPoint;
use crate::mc::EstimateReport;
use crate::seed::{rng_from_seed, sample_seed};
use crate::{Error, Result};

/// Below this modulus the point counts as swallowed.
pub const SWALLOW_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoewnerRun {
    pub kappa: f64,
    pub z0: PlanarPoint,
    pub dt_base: f64,
    pub t_max: f64,
    pub theta_exit: f64,
    pub seed: u64,
}

impl LoewnerRun {
    /// Defaults: `dt_base = 1e-3`, `theta_exit = 0.01`, `t_max = 1e4 |z0|^2`.
    pub fn new(kappa: f64, z0: PlanarPoint, seed: u64) -> Self {
        Self { kappa, z0, dt_base: 1e-3, t_max: 1e4 * (z0.x * z0.x + z0.y * z0.y), theta_exit: 0.01, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa <= 4.0) {
            return Err(Error::Domain(format!("kappa must lie in (0, 4], got {}", self.kappa)));
        }
        if !(self.z0.is_finite() && self.z0.y > 0.0) {
            return Err(Error::Domain(format!("start point must lie in the upper half-plane, got {:?}", self.z0)));
        }
        // Im X shrinks by the factor (1 - 2 delta/|X|^2) >= 1 - 2 dt_base per step.
        if !(self.dt_base > 0.0 && self.dt_base < 0.5) {
            return Err(Error::Config(format!("dt_base must lie in (0, 1/2), got {}", self.dt_base)));
        }
        if !(self.t_max > 0.0) {
            return Err(Error::Config("t_max must be positive".into()));
        }
        if !(self.theta_exit > 0.0 && self.theta_exit < PI / 4.0) {
            return Err(Error::Config(format!("theta_exit must lie in (0, pi/4), got {}", self.theta_exit)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Right,
    Left,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideResult {
    pub side: Side,
    pub t_stop: f64,
    pub theta_final: f64,
}

struct Flow<R> {
    x: PlanarPoint,
    t: f64,
    sqrt_kappa: f64,
    dt_base: f64,
    rng: R,
}

impl<R: Rng> Flow<R> {
    /// One Euler step, never past `t_stop`. Returns false if the point fell
    /// below the swallow floor or left the upper half-plane.
    fn step(&mut self, t_stop: f64) -> bool {
        let r2 = self.x.x * self.x.x + self.x.y * self.x.y;
        let delta = (self.dt_base * r2.min(1.0)).min(t_stop - self.t);
        let g: f64 = self.rng.sample(StandardNormal);
        // 2/X = 2 conj(X)/|X|^2; the noise is real.
        let drift = 2.0 * delta / r2;
        self.x = PlanarPoint::new(
            self.x.x + drift * self.x.x - self.sqrt_kappa * delta.sqrt() * g,
            self.x.y - drift * self.x.y,
        );
        self.t += delta;
        self.x.y > 0.0 && self.x.norm() >= SWALLOW_FLOOR
    }

    fn theta(&self) -> f64 {
        self.x.y.atan2(self.x.x)
    }
}

fn flow(run: &LoewnerRun) -> Flow<crate::seed::SampleRng> {
    Flow { x: run.z0, t: 0.0, sqrt_kappa: run.kappa.sqrt(), dt_base: run.dt_base, rng: rng_from_seed(run.seed) }
}

pub fn evolve_point_side(run: &LoewnerRun) -> Result<SideResult> {
    run.validate()?;
    let mut f = flow(run);
    loop {
        let theta = f.theta();
        if theta <= run.theta_exit {
            return Ok(SideResult { side: Side::Right, t_stop: f.t, theta_final: theta });
        }
        if theta >= PI - run.theta_exit {
            return Ok(SideResult { side: Side::Left, t_stop: f.t, theta_final: theta });
        }
        if f.t >= run.t_max || !f.step(run.t_max) {
            return Ok(SideResult { side: Side::Undecided, t_stop: f.t, theta_final: f.theta() });
        }
    }
}

/// `arg X_t` at each of the increasing `times`, evolving without stopping
/// at the exit band. Steps are clipped to land on every requested time.
pub fn theta_snapshots(run: &LoewnerRun, times: &[f64]) -> Result<Vec<f64>> {
    run.validate()?;
    if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::Config("snapshot times must be nonnegative and increasing".into()));
    }
    let mut f = flow(run);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        while f.t < t {
            if !f.step(t) {
                return Err(Error::Geometry(format!("marked point left the upper half-plane at t = {}", f.t)));
            }
        }
        out.push(f.theta());
    }
    Ok(out)
}

/// Run parameters shared by all samples of an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideExperiment {
    pub kappa: f64,
    pub z0: PlanarPoint,
    pub samples: u64,
    pub dt_base: f64,
    /// `None` means `1e4 |z0|^2`.
    pub t_max: Option<f64>,
    pub theta_exit: f64,
    pub master_seed: u64,
}

impl SideExperiment {
    pub fn new(kappa: f64, z0: PlanarPoint, samples: u64, master_seed: u64) -> Self {
        Self { kappa, z0, samples, dt_base: 1e-3, t_max: None, theta_exit: 0.01, master_seed }
    }

    pub fn run(&self, index: u64) -> LoewnerRun {
        let mut r = LoewnerRun::new(self.kappa, self.z0, sample_seed(self.master_seed, index));
        r.dt_base = self.dt_base;
        r.theta_exit = self.theta_exit;
        if let Some(t) = self.t_max {
            r.t_max = t;
        }
        r
    }
}

/// Fraction of runs ending right of the curve, with Undecided runs dropped
/// from the denominator and counted in the report.
pub fn estimate_side_probability(exp: &SideExperiment) -> Result<EstimateReport> {
    if exp.samples < 100 {
        return Err(Error::Config(format!("need at least 100 samples, got {}", exp.samples)));
    }
    exp.run(0).validate()?;
    let sides: Vec<Side> =
        (0..exp.samples).into_par_iter().map(|k| evolve_point_side(&exp.run(k)).map(|r| r.side)).collect::<Result<_>>()?;
    let right = sides.iter().filter(|&&s| s == Side::Right).count() as u64;
    let undecided = sides.iter().filter(|&&s| s == Side::Undecided).count() as u64;
    let decided = exp.samples - undecided;
    let theta = exp.z0.y.atan2(exp.z0.x);
    let target = schramm_right_prob(KappaAngle::new(exp.kappa, theta)?);
    let mut report = EstimateReport::proportion("sle_right_probability", right, decided, Some(target), exp)?;
    report.failures = undecided;
    if undecided as f64 > 0.01 * exp.samples as f64 {
        report.warnings.push(format!(
            "{undecided} of {} runs undecided; t_max or theta_exit too lax",
            exp.samples
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imaginary_part_stays_positive() {
        let run = LoewnerRun::new(4.0, PlanarPoint::new(0.3, 0.01), 5);
        let th = theta_snapshots(&run, &[0.1, 1.0, 10.0]).unwrap();
        assert!(th.iter().all(|&t| t > 0.0 && t < PI));
    }

    #[test]
    fn deterministic_given_seed() {
        let run = LoewnerRun::new(8.0 / 3.0, PlanarPoint::new(0.0, 1.0), 11);
        assert_eq!(evolve_point_side(&run).unwrap(), evolve_point_side(&run).unwrap());
    }

    #[test]
    fn rejects_bad_runs() {
        let mut run = LoewnerRun::new(8.0 / 3.0, PlanarPoint::new(0.0, 1.0), 1);
        run.dt_base = 0.6;
        assert!(evolve_point_side(&run).is_err());
        assert!(evolve_point_side(&LoewnerRun::new(5.0, PlanarPoint::new(0.0, 1.0), 1)).is_err());
        assert!(evolve_point_side(&LoewnerRun::new(2.0, PlanarPoint::new(0.0, -1.0), 1)).is_err());
    }
}
