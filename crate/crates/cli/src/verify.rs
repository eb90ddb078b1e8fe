use loophull::mc::{EstimateReport, WindingExperiment};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct McCheck {
    pub name: String,
    pub estimate: f64,
    pub stderr: f64,
    pub target: f64,
    /// Allowed `|estimate - target|`.
    pub tolerance: f64,
    pub pass: bool,
}

impl McCheck {
    fn relative(r: &EstimateReport, rel: f64) -> Self {
        let target = r.target.unwrap_or(f64::NAN);
        let tolerance = (3.0 * r.stderr).max(rel * target.abs());
        Self {
            name: r.quantity.clone(),
            estimate: r.mean,
            stderr: r.stderr,
            target,
            tolerance,
            pass: (r.mean - target).abs() <= tolerance,
        }
    }

    fn sigma(r: &EstimateReport) -> Self {
        let target = r.target.unwrap_or(0.0);
        let tolerance = 3.0 * r.stderr;
        Self { name: r.quantity.clone(), estimate: r.mean, stderr: r.stderr, target, tolerance, pass: (r.mean - target).abs() <= tolerance }
    }
}

#[derive(Debug, Serialize)]
pub struct McOutcome {
    pub checks: Vec<McCheck>,
    pub reports: Vec<EstimateReport>,
    pub max_partition_residual: i64,
    pub pass: bool,
}

/// Tolerances: hull within max(3 se, 7%), `W_1` within max(3 se, 10%),
/// `W_0` within max(3 se, 15%), `W_n - W_-n` within 3 se for `n <= 3`, and
/// a zero partition residual in every sample.
pub fn monte_carlo(exp: &WindingExperiment) -> loophull::Result<McOutcome> {
    let mut checks = vec![
        McCheck::relative(&exp.hull()?, 0.07),
        McCheck::relative(&exp.index_area(1)?, 0.10),
        McCheck::relative(&exp.index_area(0)?, 0.15),
    ];
    for n in 1..=exp.config.index_max.min(3) as i32 {
        checks.push(McCheck::sigma(&exp.symmetry(n)?));
    }
    let residual = exp.max_partition_residual();
    let pass = residual == 0 && checks.iter().all(|c| c.pass);
    Ok(McOutcome { checks, reports: exp.reports()?, max_partition_residual: residual, pass })
}

pub fn print_monte_carlo(o: &McOutcome) {
    for c in &o.checks {
        println!(
            "{} {:<12} {:.5} +- {:.5} target {:.5} tolerance {:.5}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.estimate,
            c.stderr,
            c.target,
            c.tolerance
        );
    }
    println!("{} partition residual {}", if o.max_partition_residual == 0 { "PASS" } else { "FAIL" }, o.max_partition_residual);
    for r in &o.reports {
        match r.target {
            Some(t) => println!("  {:<14} {:.5} +- {:.5} (target {:.5})", r.quantity, r.mean, r.stderr, t),
            None => println!("  {:<14} {:.5} +- {:.5}", r.quantity, r.mean, r.stderr),
        }
    }
}
