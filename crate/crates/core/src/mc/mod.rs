//! Monte Carlo experiments tying sampled loops to the exact constants.
//!
//! Every sample `k` draws its loop from `sample_seed(master_seed, k)` and
//! its refinement randomness from an independent stream of the same seed,
//! so results depend only on the config, never on scheduling. Samples are
//! evaluated in parallel and aggregated in index order.

mod report;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use report::{config_hash, ConvergenceReport, ConvergenceRow, EstimateReport};

use crate::analytic::{index_probability, index_tail, IndexLawParams, QuadratureConfig};
use crate::bridge::{vervaat_transform, BridgeSpec, LoopKind, LoopPath};
use crate::geometry::{angle_winding, PlanarPoint};
use crate::grid::GridSpec;
use crate::hull::{center_hull_membership, HullRasters, PathAnalysis, RegionAreas};
use crate::refine::{refined_index_areas, refined_winding, IndexAreas, RefineParams};
use crate::seed::{mix64, rng_from_seed, sample_seed};
use crate::stats::{binomial_sigma, chi_square, ChiSquareResult, Moments};
use crate::{Error, Result};

/// Stream tag separating refinement randomness from path randomness.
const REFINE_STREAM: u64 = 0x005E_ED0F_5AB5_7E95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub samples: u64,
    pub steps: usize,
    pub cells_per_unit: f64,
    /// Grid margin around the bounding box, in cells.
    pub margin_cells: f64,
    pub index_max: u32,
    pub master_seed: u64,
    pub kind: LoopKind,
    /// Sub-step refinement of windings near the path (Gaussian bridges only).
    pub refine: RefineParams,
    /// Fraction of cell centers refined per sample; 0 disables refinement.
    pub refine_fraction: f64,
    /// Odd factor of the grid on which cell centers are tested for hull
    /// membership when measuring the index-0-inside area.
    pub hull_subgrid: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            steps: 1 << 16,
            cells_per_unit: 256.0,
            margin_cells: 4.0,
            index_max: 3,
            master_seed: 1,
            kind: LoopKind::GaussianBridge,
            refine: RefineParams { reach: 2.0, min_scale: 1e-12 },
            refine_fraction: 0.05,
            hull_subgrid: 5,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("need at least one sample".into()));
        }
        if !(1..=5).contains(&self.index_max) {
            return Err(Error::Config(format!("index_max must lie in 1..=5, got {}", self.index_max)));
        }
        if !(self.cells_per_unit > 0.0 && self.cells_per_unit.is_finite()) {
            return Err(Error::Config("cells per unit must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.refine_fraction) {
            return Err(Error::Config("refine fraction must lie in [0, 1]".into()));
        }
        if self.hull_subgrid.is_multiple_of(2) {
            return Err(Error::Config("hull subgrid factor must be odd".into()));
        }
        self.spec(0).validate()
    }

    pub fn spec(&self, index: u64) -> BridgeSpec {
        BridgeSpec { steps: self.steps, seed: sample_seed(self.master_seed, index), kind: self.kind }
    }

    /// Path units per unit of the time-1 Brownian loop: lattice loops are
    /// analysed in lattice units and their areas divided by `N`.
    pub fn unit(&self) -> f64 {
        match self.kind {
            LoopKind::LatticeLoop => (self.steps as f64).sqrt(),
            _ => 1.0,
        }
    }

    pub fn cell_size(&self) -> f64 {
        self.unit() / self.cells_per_unit
    }

    /// Duration of one step in squared path units.
    pub fn time_step(&self) -> f64 {
        self.unit() * self.unit() / self.steps as f64
    }

    fn refines(&self) -> bool {
        self.kind == LoopKind::GaussianBridge && self.refine_fraction > 0.0
    }

    /// Grid pinned to the path's bounding box. The margin is a whole number
    /// of cells and covers the refinement band.
    pub fn grid_for(&self, path: &LoopPath) -> Result<GridSpec> {
        let h = self.cell_size();
        let band = if self.refines() { self.refine.reach * self.time_step().sqrt() / h + 2.0 } else { 0.0 };
        let cells = self.margin_cells.max(band).ceil();
        GridSpec::enclosing(path, h, cells * h)
    }

    pub fn hash(&self) -> Result<String> {
        config_hash(self)
    }
}

/// Everything measured on one sampled loop, in Brownian units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: u64,
    /// Raster areas; windings exclude blocked cells.
    pub raster: RegionAreas,
    /// Index areas with every cell classified by its center winding, refined
    /// below the step scale, and the index-0 region tested on the subgrid.
    pub refined: IndexAreas,
}

impl SampleRecord {
    pub fn hull_area(&self) -> f64 {
        self.raster.hull_area()
    }
}

/// Analyse sample `index` of the experiment.
pub fn analyze_sample(cfg: &ExperimentConfig, index: u64) -> Result<SampleRecord> {
    analyze_path(cfg, &cfg.spec(index).sample()?, index)
}

/// Analyse `path` as sample `index` of `cfg` (the index selects the
/// refinement stream).
pub fn analyze_path(cfg: &ExperimentConfig, path: &LoopPath, index: u64) -> Result<SampleRecord> {
    let grid = cfg.grid_for(path)?;
    let analysis = PathAnalysis::compute(path, &grid)?;
    let inside = center_hull_membership(path, &grid, cfg.hull_subgrid)?;
    let mut rng = rng_from_seed(mix64(cfg.spec(index).seed ^ REFINE_STREAM));
    let fraction = if cfg.refines() { cfg.refine_fraction } else { 0.0 };
    let refined =
        refined_index_areas(path, &grid, &analysis.field, &inside, cfg.time_step(), &cfg.refine, fraction, &mut rng);
    let scale = 1.0 / (cfg.unit() * cfg.unit());
    Ok(SampleRecord { index, raster: analysis.areas.rescaled(cfg.unit().recip()), refined: refined.rescaled(scale) })
}

/// Hull area of sample `index`, in Brownian units.
pub fn sample_hull_area(cfg: &ExperimentConfig, index: u64) -> Result<f64> {
    sample_hull_area_of(cfg, &cfg.spec(index).sample()?)
}

/// Evaluate `f` on every sample index in parallel, keeping index order.
/// Failed samples are dropped and counted; more than 0.1% fails the run.
fn collect<T: Send>(cfg: &ExperimentConfig, f: impl Fn(u64) -> Result<T> + Sync) -> Result<(Vec<T>, u64)> {
    cfg.validate()?;
    let results: Vec<Result<T>> = (0..cfg.samples).into_par_iter().map(&f).collect();
    let mut ok = Vec::with_capacity(results.len());
    let mut failures = 0u64;
    let mut first = None;
    for r in results {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => {
                failures += 1;
                first.get_or_insert(e);
            }
        }
    }
    if failures as f64 > 1e-3 * cfg.samples as f64 {
        let e = first.expect("failures imply an error");
        return Err(Error::Geometry(format!("{failures} of {} samples failed; first: {e}", cfg.samples)));
    }
    Ok((ok, failures))
}

pub fn run_area_experiment(cfg: &ExperimentConfig) -> Result<EstimateReport> {
    let (areas, failures) = collect(cfg, |k| sample_hull_area(cfg, k))?;
    let mut report = EstimateReport::from_values("hull_area", &areas, Some(PI / 5.0), cfg)?;
    report.failures = failures;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingExperiment {
    pub config: ExperimentConfig,
    pub records: Vec<SampleRecord>,
    pub failures: u64,
}

pub fn run_winding_experiment(cfg: &ExperimentConfig) -> Result<WindingExperiment> {
    let (records, failures) = collect(cfg, |k| analyze_sample(cfg, k))?;
    Ok(WindingExperiment { config: *cfg, records, failures })
}

/// `(1/pi) * sum_{n > k} 1/n^2`, the expected area of `{|n_z| > k}`.
pub fn index_tail_target(k: u32) -> f64 {
    let head: f64 = (1..=k).map(|n| 1.0 / (n * n) as f64).sum();
    (PI * PI / 6.0 - head) / PI
}

impl WindingExperiment {
    fn moments(&self, f: impl Fn(&SampleRecord) -> f64) -> Moments {
        let mut m = Moments::default();
        for r in &self.records {
            m.push(f(r));
        }
        m
    }

    fn report(&self, name: &str, target: Option<f64>, f: impl Fn(&SampleRecord) -> f64) -> Result<EstimateReport> {
        let mut r = EstimateReport::from_moments(name, &self.moments(f), target, &self.config)?;
        r.failures = self.failures;
        Ok(r)
    }

    pub fn hull(&self) -> Result<EstimateReport> {
        self.report("hull_area", Some(PI / 5.0), |r| r.hull_area())
    }

    pub fn blocked(&self) -> Result<EstimateReport> {
        self.report("blocked_area", None, |r| r.raster.blocked_area())
    }

    /// `E(W_n)`; `n = 0` is the index-0-inside region.
    pub fn index_area(&self, n: i32) -> Result<EstimateReport> {
        if n == 0 {
            self.report("W_0", Some(PI / 30.0), |r| r.refined.zero_inside)
        } else {
            let target = 1.0 / (2.0 * PI * (n * n) as f64);
            self.report(&format!("W_{n}"), Some(target), |r| r.refined.per_index(n))
        }
    }

    /// Same regions from unblocked cells only.
    pub fn raster_index_area(&self, n: i32) -> Result<EstimateReport> {
        if n == 0 {
            self.report("W_0_raster", Some(PI / 30.0), |r| r.raster.zero_inside())
        } else {
            let target = 1.0 / (2.0 * PI * (n * n) as f64);
            self.report(&format!("W_{n}_raster"), Some(target), |r| r.raster.per_index(n))
        }
    }

    /// Paired difference `W_n - W_{-n}`, target 0.
    pub fn symmetry(&self, n: i32) -> Result<EstimateReport> {
        self.report(&format!("W_{n}-W_-{n}"), Some(0.0), |r| r.refined.per_index(n) - r.refined.per_index(-n))
    }

    /// Area of `{|n_z| > index_max}`.
    pub fn tail(&self) -> Result<EstimateReport> {
        let k = self.config.index_max as i32;
        self.report("index_tail", Some(index_tail_target(k as u32)), |r| {
            r.refined.per_index.iter().filter(|(n, _)| n.abs() > k).map(|(_, a)| a).sum()
        })
    }

    /// Largest absolute partition residual over all samples, in cells.
    pub fn max_partition_residual(&self) -> i64 {
        self.records.iter().map(|r| r.raster.partition_residual().abs()).max().unwrap_or(0)
    }

    /// All reports: hull, blocked, `W_0`, `W_n` for `0 < |n| <= index_max`,
    /// symmetry differences, tail, and the raster variants.
    pub fn reports(&self) -> Result<Vec<EstimateReport>> {
        let k = self.config.index_max as i32;
        let mut out = vec![self.hull()?, self.blocked()?, self.index_area(0)?];
        for n in (-k..=k).filter(|&n| n != 0) {
            out.push(self.index_area(n)?);
        }
        for n in 1..=k {
            out.push(self.symmetry(n)?);
        }
        out.push(self.tail()?);
        out.push(self.raster_index_area(0)?);
        for n in (-k..=k).filter(|&n| n != 0) {
            out.push(self.raster_index_area(n)?);
        }
        Ok(out)
    }

    /// Per-sample CSV: `index,hull,blocked,w0,w_-k..w_k` (refined areas).
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let k = self.config.index_max as i32;
        let idx: Vec<i32> = (-k..=k).filter(|&n| n != 0).collect();
        let head: Vec<String> = idx.iter().map(|n| format!("w{n}")).collect();
        writeln!(w, "index,hull,blocked,w0,{}", head.join(","))?;
        for r in &self.records {
            let vals: Vec<String> = idx.iter().map(|&n| format!("{:?}", r.refined.per_index(n))).collect();
            writeln!(
                w,
                "{},{:?},{:?},{:?},{}",
                r.index,
                r.hull_area(),
                r.raster.blocked_area(),
                r.refined.zero_inside,
                vals.join(",")
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointwiseRow {
    pub n: i64,
    pub count: u64,
    pub empirical: f64,
    pub analytic: f64,
    pub sigma: f64,
    pub z_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointwiseReport {
    pub z: PlanarPoint,
    pub r: f64,
    pub samples: u64,
    /// Samples redrawn because the point fell on a vertex.
    pub resampled: u64,
    pub rows: Vec<PointwiseRow>,
    /// Count of `|n| > 3`, against the analytic tail.
    pub other_count: u64,
    pub other_analytic: f64,
    pub chi_square: ChiSquareResult,
    pub config_hash: String,
}

impl PointwiseReport {
    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z_score.abs()).fold(0.0, f64::max)
    }
}

/// Winding of sample `index` around `z`, given in Brownian units. Returns
/// the winding and whether the sample had to be redrawn.
fn pointwise_winding(cfg: &ExperimentConfig, index: u64, z: PlanarPoint) -> Result<(i64, bool)> {
    let base = cfg.spec(index);
    let zu = PlanarPoint::new(z.x * cfg.unit(), z.y * cfg.unit());
    for attempt in 0..16u64 {
        let spec = BridgeSpec { seed: if attempt == 0 { base.seed } else { mix64(base.seed.wrapping_add(attempt)) }, ..base };
        let path = spec.sample()?;
        let w = if cfg.kind == LoopKind::GaussianBridge {
            let mut rng = rng_from_seed(mix64(spec.seed ^ REFINE_STREAM));
            refined_winding(&path, zu, &cfg.refine, &mut rng)
        } else {
            angle_winding(path.points(), zu)
        };
        if let Some(w) = w {
            return Ok((w, attempt > 0));
        }
    }
    Err(Error::Geometry(format!("point {z:?} kept landing on sampled vertices")))
}

/// Empirical law of the winding around `z` against Yor's formula.
pub fn run_index_pointwise(cfg: &ExperimentConfig, z: PlanarPoint, quad: &QuadratureConfig) -> Result<PointwiseReport> {
    cfg.validate()?;
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::Domain("the winding around the starting point is undefined".into()));
    }
    let draws: Vec<(i64, bool)> =
        (0..cfg.samples).into_par_iter().map(|k| pointwise_winding(cfg, k, z)).collect::<Result<_>>()?;
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    for &(w, _) in &draws {
        *counts.entry(w).or_default() += 1;
    }
    let m = cfg.samples;
    let mut rows = Vec::new();
    let mut observed = Vec::new();
    let mut expected = Vec::new();
    for n in -3..=3i64 {
        let p = index_probability(IndexLawParams::new(r, n)?, quad)?.value;
        let c = counts.get(&n).copied().unwrap_or(0);
        let e = c as f64 / m as f64;
        let s = binomial_sigma(p, m);
        rows.push(PointwiseRow { n, count: c, empirical: e, analytic: p, sigma: s, z_score: if s > 0.0 { (e - p) / s } else { 0.0 } });
        observed.push(c);
        expected.push(p);
    }
    let other_count = counts.iter().filter(|(n, _)| n.abs() > 3).map(|(_, c)| c).sum();
    let other_analytic = index_tail(r, 3, quad)?;
    observed.push(other_count);
    expected.push(other_analytic);
    Ok(PointwiseReport {
        z,
        r,
        samples: m,
        resampled: draws.iter().filter(|d| d.1).count() as u64,
        rows,
        other_count,
        other_analytic,
        chi_square: chi_square(&observed, &expected),
        config_hash: cfg.hash()?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VervaatReport {
    pub samples: u64,
    /// Samples whose full region areas agree exactly before and after.
    pub equal_areas: u64,
    /// Transformed paths with every `y >= 0` and minimum exactly 0.
    pub nonnegative: u64,
    pub max_hull_difference: f64,
    pub config_hash: String,
}

impl VervaatReport {
    pub fn passed(&self) -> bool {
        self.equal_areas == self.samples && self.nonnegative == self.samples
    }
}

/// Hull and winding areas of each bridge and of its lowest-point shift, on
/// grids pinned to the respective bounding boxes.
pub fn run_vervaat_check(cfg: &ExperimentConfig) -> Result<VervaatReport> {
    if cfg.kind != LoopKind::GaussianBridge {
        return Err(Error::Config("the lowest-point shift is checked on Gaussian bridges".into()));
    }
    let (rows, _) = collect(cfg, |k| {
        let path = cfg.spec(k).sample()?;
        let shifted = vervaat_transform(&path);
        let a = PathAnalysis::compute(&path, &cfg.grid_for(&path)?)?.areas;
        let b = PathAnalysis::compute(&shifted, &cfg.grid_for(&shifted)?)?.areas;
        let min_y = shifted.points().iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        Ok((a == b, min_y == 0.0, (a.hull_area() - b.hull_area()).abs()))
    })?;
    Ok(VervaatReport {
        samples: cfg.samples,
        equal_areas: rows.iter().filter(|r| r.0).count() as u64,
        nonnegative: rows.iter().filter(|r| r.1).count() as u64,
        max_hull_difference: rows.iter().map(|r| r.2).fold(0.0, f64::max),
        config_hash: cfg.hash()?,
    })
}

/// Draw sample `index` at `finest` steps and decimate it to each of
/// `steps`; Gaussian bridges only. Coupling the rungs this way removes most
/// of the sampling noise from differences between them.
fn coupled_paths(cfg: &ExperimentConfig, finest: usize, steps: &[usize], index: u64) -> Result<Vec<LoopPath>> {
    let full = ExperimentConfig { steps: finest, ..*cfg }.spec(index).sample()?;
    steps.iter().map(|&n| full.decimate(finest / n)).collect()
}

fn ladder_finest(cfg: &ExperimentConfig, steps: &[usize]) -> Result<usize> {
    if cfg.kind != LoopKind::GaussianBridge {
        return Err(Error::Config("coupled ladders need Gaussian bridges".into()));
    }
    let finest = steps.iter().copied().max().ok_or_else(|| Error::Config("empty ladder".into()))?;
    if steps.iter().any(|&n| n == 0 || finest % n != 0) {
        return Err(Error::Config(format!("every rung must divide the finest step count {finest}")));
    }
    Ok(finest)
}

/// Hull-area estimates for each step count in `steps` on coupled paths, at
/// the config's grid resolution.
pub fn hull_ladder(cfg: &ExperimentConfig, steps: &[usize]) -> Result<Vec<EstimateReport>> {
    let finest = ladder_finest(cfg, steps)?;
    let (rows, failures) = collect(cfg, |k| {
        coupled_paths(cfg, finest, steps, k)?
            .iter()
            .zip(steps)
            .map(|(p, &n)| sample_hull_area_of(&ExperimentConfig { steps: n, ..*cfg }, p))
            .collect::<Result<Vec<f64>>>()
    })?;
    steps
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let values: Vec<f64> = rows.iter().map(|r| r[i]).collect();
            let mut r = EstimateReport::from_values("hull_area", &values, Some(PI / 5.0), &ExperimentConfig { steps: n, ..*cfg })?;
            r.failures = failures;
            Ok(r)
        })
        .collect()
}

fn sample_hull_area_of(cfg: &ExperimentConfig, path: &LoopPath) -> Result<f64> {
    let grid = cfg.grid_for(path)?;
    Ok(HullRasters::compute(path, &grid)?.hull_area() / (cfg.unit() * cfg.unit()))
}

/// Winding experiments over a ladder of `(steps, cells_per_unit)` pairs,
/// reported coarsest first. Gaussian rungs share coupled paths (every
/// step count must divide the largest). No convergence rate is asserted.
pub fn convergence_study(base: &ExperimentConfig, ladder: &[(usize, f64)]) -> Result<ConvergenceReport> {
    if ladder.len() < 3 {
        return Err(Error::Config("a convergence ladder needs at least three rungs".into()));
    }
    let mut rungs = ladder.to_vec();
    // Coarsest first: fewer steps, then larger cells.
    rungs.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let steps: Vec<usize> = rungs.iter().map(|r| r.0).collect();
    let cfgs: Vec<ExperimentConfig> =
        rungs.iter().map(|&(steps, cpu)| ExperimentConfig { steps, cells_per_unit: cpu, ..*base }).collect();
    let coupled = base.kind == LoopKind::GaussianBridge;
    let finest = if coupled { ladder_finest(base, &steps)? } else { 0 };
    let (records, _) = collect(base, |k| {
        if coupled {
            let paths = coupled_paths(base, finest, &steps, k)?;
            cfgs.iter().zip(&paths).map(|(c, p)| analyze_path(c, p, k)).collect::<Result<Vec<_>>>()
        } else {
            cfgs.iter().map(|c| analyze_sample(c, k)).collect::<Result<Vec<_>>>()
        }
    })?;
    let mut rows = Vec::new();
    for (i, cfg) in cfgs.iter().enumerate() {
        let exp = WindingExperiment { config: *cfg, records: records.iter().map(|r| r[i].clone()).collect(), failures: 0 };
        let (hull, blocked, w1, w0) = (exp.hull()?, exp.blocked()?, exp.index_area(1)?, exp.index_area(0)?);
        rows.push(ConvergenceRow {
            steps: cfg.steps,
            cell_size: 1.0 / cfg.cells_per_unit,
            samples: hull.samples,
            hull_mean: hull.mean,
            hull_stderr: hull.stderr,
            blocked_mean: blocked.mean,
            blocked_stderr: blocked.stderr,
            w1_mean: w1.mean,
            w1_stderr: w1.stderr,
            w0_mean: w0.mean,
            w0_stderr: w0.stderr,
        });
    }
    let hull_monotone = rows.windows(2).all(|w| w[1].hull_mean > w[0].hull_mean);
    let blocked_monotone_decreasing = rows.windows(2).all(|w| w[1].blocked_mean < w[0].blocked_mean);
    let note = format!(
        "hull means {}; blocked means {}; differences between rungs measure the discretization bias, no rate is fitted",
        if hull_monotone { "increase along the ladder" } else { "are not monotone" },
        if blocked_monotone_decreasing { "decrease" } else { "do not decrease monotonically" },
    );
    Ok(ConvergenceReport { rows, hull_monotone, blocked_monotone_decreasing, note })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig { samples: 4, steps: 256, cells_per_unit: 32.0, ..Default::default() }
    }

    #[test]
    fn tail_target_matches_series() {
        let direct: f64 = (4..200_000).map(|n| 1.0 / (n as f64 * n as f64)).sum::<f64>() / PI;
        assert!((index_tail_target(3) - direct).abs() < 1e-5);
    }

    #[test]
    fn single_sample_reproducible() {
        let cfg = ExperimentConfig { samples: 1, ..small() };
        assert_eq!(run_area_experiment(&cfg).unwrap(), run_area_experiment(&cfg).unwrap());
    }

    #[test]
    fn rejects_large_index_max() {
        let cfg = ExperimentConfig { index_max: 6, ..small() };
        assert!(run_winding_experiment(&cfg).is_err());
    }

    #[test]
    fn partition_residual_is_zero() {
        let exp = run_winding_experiment(&small()).unwrap();
        assert_eq!(exp.max_partition_residual(), 0);
        assert_eq!(exp.reports().unwrap().len(), 3 + 6 + 3 + 1 + 1 + 6);
    }

    #[test]
    fn lattice_areas_are_rescaled() {
        let cfg = ExperimentConfig { kind: LoopKind::LatticeLoop, steps: 1024, cells_per_unit: 32.0, samples: 8, ..Default::default() };
        let r = run_area_experiment(&cfg).unwrap();
        assert!(r.mean > 0.1 && r.mean < 2.0, "{}", r.mean);
    }
}
