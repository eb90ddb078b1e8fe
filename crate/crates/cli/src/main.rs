//! `loophull`: sample Brownian loops, measure hulls and winding regions,
//! verify the exact constants, and draw the figures.

mod verify;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use loophull::analytic::{analytic_checks, QuadratureConfig};
use loophull::hull::{PathAnalysis, WindingSidecar};
use loophull::mc::{self, ExperimentConfig};
use loophull::render::{render_hull, render_winding, write_winding_ppm, RenderSpec};
use loophull::sle::{estimate_side_probability, SideExperiment};
use loophull::{BridgeSpec, GridSpec, LoopKind, LoopPath, PlanarPoint};

#[derive(Parser, Debug)]
#[command(name = "loophull", version, about = "Planar Brownian loop hulls, winding regions and their exact constants")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "LOOPHULL_THREADS")]
    threads: Option<usize>,

    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct PathArgs {
    /// gaussian | lattice
    #[arg(long, default_value = "gaussian")]
    kind: LoopKind,
    #[arg(long, default_value_t = 1 << 14)]
    steps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Read the path from a file written by `sample` instead of sampling.
    #[arg(long, conflicts_with_all = ["kind", "steps", "seed"])]
    input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    /// Cells per unit of the time-1 loop (lattice loops: per sqrt(N) steps).
    #[arg(long, default_value_t = 256.0)]
    cells_per_unit: f64,
    /// Margin around the bounding box, in cells.
    #[arg(long, default_value_t = 4.0)]
    margin: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Figure {
    Hull,
    Winding,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample one loop and write it in the path text format.
    Sample {
        #[command(flatten)]
        path: PathArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hull and region areas of one loop; optionally write the hull mask (PBM).
    Hull {
        #[command(flatten)]
        path: PathArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Winding field of one loop as CSV `i,j,n`, with a JSON sidecar.
    WindingMap {
        #[command(flatten)]
        path: PathArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate every analytic identity by quadrature.
    VerifyAnalytic,
    /// Monte Carlo hull and winding areas against the exact constants.
    VerifyMc {
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 1 << 16)]
        steps: usize,
        #[arg(long, default_value_t = 256.0)]
        cells_per_unit: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Per-sample CSV of the measured areas.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Side-of-curve probabilities from the Loewner flow.
    SleCheck {
        #[arg(long, default_value = "8/3", value_parser = parse_real)]
        kappa: f64,
        /// Comma-separated angles; `pi` expressions allowed (e.g. `3pi/4`).
        #[arg(long, default_value = "pi/6,pi/4,pi/2,3pi/4", value_delimiter = ',', value_parser = parse_real)]
        theta: Vec<f64>,
        #[arg(long, default_value_t = 20_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-3)]
        dt_base: f64,
        #[arg(long, default_value_t = 0.01)]
        theta_exit: f64,
    },
    /// Exact area invariance of the lowest-point shift.
    VervaatCheck {
        #[arg(long, default_value_t = 100)]
        samples: u64,
        #[arg(long, default_value_t = 1 << 16)]
        steps: usize,
        #[arg(long, default_value_t = 256.0)]
        cells_per_unit: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Estimates over a ladder of `steps:cells_per_unit` pairs.
    Convergence {
        #[arg(long, default_value = "4096:256,16384:256,65536:256", value_delimiter = ',', value_parser = parse_rung)]
        ladder: Vec<(usize, f64)>,
        #[arg(long, default_value_t = 250)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Draw a loop over its hull, or its winding map (SVG, or PPM by extension).
    Render {
        #[command(flatten)]
        path: PathArgs,
        #[arg(long, value_enum, default_value = "hull")]
        figure: Figure,
        #[arg(long, default_value_t = 128.0)]
        cells_per_unit: f64,
        /// SVG width in pixels (PPM output is one pixel per cell).
        #[arg(long, default_value_t = 800)]
        width: u32,
        #[arg(long, default_value_t = 800)]
        height: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

/// A real number, a fraction `a/b`, or a multiple of `pi` such as `3pi/4`.
fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|e| format!("bad denominator in `{s}`: {e}"))?),
        None => (s, 1.0),
    };
    let value = if let Some(coef) = num.strip_suffix("pi") {
        let coef = coef.trim_end_matches('*').trim();
        let c = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|e| format!("bad number `{s}`: {e}"))? };
        c * std::f64::consts::PI
    } else {
        num.parse::<f64>().map_err(|e| format!("bad number `{s}`: {e}"))?
    };
    Ok(value / den)
}

fn parse_rung(s: &str) -> Result<(usize, f64), String> {
    let (n, c) = s.split_once(':').ok_or_else(|| format!("expected steps:cells_per_unit, got `{s}`"))?;
    Ok((n.trim().parse().map_err(|e| format!("{e}"))?, c.trim().parse().map_err(|e| format!("{e}"))?))
}

type CliResult = Result<ExitCode, loophull::Error>;

fn load_path(args: &PathArgs) -> loophull::Result<LoopPath> {
    match &args.input {
        Some(p) => LoopPath::read_from(BufReader::new(File::open(p)?)),
        None => BridgeSpec { steps: args.steps, seed: args.seed, kind: args.kind }.sample(),
    }
}

/// Plane units per Brownian unit for this path.
fn unit_of(path: &LoopPath) -> f64 {
    match path.kind() {
        LoopKind::LatticeLoop => (path.steps() as f64).sqrt(),
        _ => 1.0,
    }
}

fn grid_for(path: &LoopPath, cells_per_unit: f64, margin_cells: f64) -> loophull::Result<GridSpec> {
    let h = unit_of(path) / cells_per_unit;
    GridSpec::enclosing(path, h, margin_cells.ceil() * h)
}

fn create(path: &Path) -> loophull::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn print_json<T: serde::Serialize>(value: &T) -> loophull::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn verdict(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Sample { path, out } => {
            let p = load_path(&path)?;
            match out {
                Some(f) => {
                    let mut w = create(&f)?;
                    p.write_to(&mut w)?;
                    w.flush()?;
                }
                None => p.write_to(io::stdout().lock())?,
            }
        }
        Command::Hull { path, grid, out } => {
            let p = load_path(&path)?;
            let g = grid_for(&p, grid.cells_per_unit, grid.margin)?;
            let a = PathAnalysis::compute(&p, &g)?;
            let areas = a.areas.clone().rescaled(unit_of(&p).recip());
            if let Some(f) = out {
                let mut w = create(&f)?;
                w.write_all(a.rasters.hull().to_pbm().as_bytes())?;
                w.flush()?;
            }
            if cli.json {
                print_json(&areas)?;
            } else {
                println!("hull_area {:?}", areas.hull_area());
                println!("blocked_area {:?}", areas.blocked_area());
                println!("zero_inside {:?}", areas.zero_inside());
                for (n, c) in &areas.per_index_cells {
                    println!("W_{n} {:?}", *c as f64 * areas.cell_area);
                }
            }
        }
        Command::WindingMap { path, grid, out } => {
            let p = load_path(&path)?;
            let g = grid_for(&p, grid.cells_per_unit, grid.margin)?;
            let a = PathAnalysis::compute(&p, &g)?;
            let mut w = create(&out)?;
            a.field.write_csv(&mut w)?;
            w.flush()?;
            let sidecar = WindingSidecar { grid: g, on_path_sentinel: loophull::hull::ON_PATH, areas: a.areas };
            let mut s = create(&out.with_extension("json"))?;
            serde_json::to_writer_pretty(&mut s, &sidecar)?;
            s.flush()?;
            if cli.json {
                print_json(&sidecar)?;
            } else {
                println!("wrote {} ({} x {} cells)", out.display(), g.nx, g.ny);
            }
        }
        Command::VerifyAnalytic => {
            let checks = analytic_checks(&QuadratureConfig::default())?;
            let pass = checks.iter().all(|c| c.pass);
            if cli.json {
                print_json(&checks)?;
            } else {
                for c in &checks {
                    println!(
                        "{} {:<40} computed {:<22.15e} target {:<22.15e} err {:.2e} tol {:.0e}",
                        if c.pass { "PASS" } else { "FAIL" },
                        c.check_name,
                        c.computed,
                        c.target,
                        c.abs_error,
                        c.tolerance
                    );
                }
            }
            return Ok(verdict(pass));
        }
        Command::VerifyMc { samples, steps, cells_per_unit, seed, out } => {
            let cfg = ExperimentConfig { samples, steps, cells_per_unit, master_seed: seed, ..Default::default() };
            let exp = mc::run_winding_experiment(&cfg)?;
            if let Some(f) = out {
                let mut w = create(&f)?;
                exp.write_csv(&mut w)?;
                w.flush()?;
            }
            let outcome = verify::monte_carlo(&exp)?;
            if cli.json {
                print_json(&outcome)?;
            } else {
                verify::print_monte_carlo(&outcome);
            }
            return Ok(verdict(outcome.pass));
        }
        Command::SleCheck { kappa, theta, samples, seed, dt_base, theta_exit } => {
            let mut reports = Vec::new();
            for th in theta {
                let mut e = SideExperiment::new(kappa, PlanarPoint::polar(1.0, th), samples, seed);
                e.dt_base = dt_base;
                e.theta_exit = theta_exit;
                reports.push((th, estimate_side_probability(&e)?));
            }
            let pass = reports.iter().all(|(_, r)| r.z_score().is_some_and(|z| z.abs() < 3.0));
            if cli.json {
                print_json(&reports.iter().map(|(_, r)| r).collect::<Vec<_>>())?;
            } else {
                for (th, r) in &reports {
                    println!(
                        "theta {th:.6} right {:.5} +- {:.5} target {:.5} z {:+.2} undecided {}",
                        r.mean,
                        r.stderr,
                        r.target.unwrap_or(f64::NAN),
                        r.z_score().unwrap_or(f64::NAN),
                        r.failures
                    );
                    for w in &r.warnings {
                        println!("  warning: {w}");
                    }
                }
            }
            return Ok(verdict(pass));
        }
        Command::VervaatCheck { samples, steps, cells_per_unit, seed } => {
            let cfg = ExperimentConfig { samples, steps, cells_per_unit, master_seed: seed, ..Default::default() };
            let r = mc::run_vervaat_check(&cfg)?;
            if cli.json {
                print_json(&r)?;
            } else {
                println!("equal areas {}/{}; nonnegative with zero minimum {}/{}", r.equal_areas, r.samples, r.nonnegative, r.samples);
            }
            return Ok(verdict(r.passed()));
        }
        Command::Convergence { ladder, samples, seed } => {
            let cfg = ExperimentConfig { samples, master_seed: seed, ..Default::default() };
            let r = mc::convergence_study(&cfg, &ladder)?;
            if cli.json {
                print_json(&r)?;
            } else {
                println!("{:>8} {:>10} {:>18} {:>18} {:>18} {:>18}", "steps", "h", "hull", "blocked", "W_1", "W_0");
                for row in &r.rows {
                    println!(
                        "{:>8} {:>10.6} {:>9.5} +- {:.5} {:>9.5} +- {:.5} {:>9.5} +- {:.5} {:>9.5} +- {:.5}",
                        row.steps,
                        row.cell_size,
                        row.hull_mean,
                        row.hull_stderr,
                        row.blocked_mean,
                        row.blocked_stderr,
                        row.w1_mean,
                        row.w1_stderr,
                        row.w0_mean,
                        row.w0_stderr
                    );
                }
                println!("{}", r.note);
            }
        }
        Command::Render { path, figure, cells_per_unit, width, height, out } => {
            let p = load_path(&path)?;
            let g = grid_for(&p, cells_per_unit, 4.0)?;
            let a = PathAnalysis::compute(&p, &g)?;
            let spec = RenderSpec { width, height, ..Default::default() };
            let mut w = create(&out)?;
            let ppm = out.extension().is_some_and(|e| e.eq_ignore_ascii_case("ppm"));
            match (figure, ppm) {
                (Figure::Winding, true) => write_winding_ppm(&a.field, &a.rasters.hull(), &spec, &mut w)?,
                (Figure::Hull, true) => {
                    return Err(loophull::Error::Config("hull figures are SVG only".into()));
                }
                (Figure::Hull, false) => {
                    w.write_all(render_hull(p.points(), Some(&a.rasters.hull()), &g, &spec).as_bytes())?;
                }
                (Figure::Winding, false) => {
                    w.write_all(render_winding(&a.field, &a.rasters.hull(), &g, &spec).as_bytes())?;
                }
            }
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        // Usage errors exit with 2, help and version with 0.
        Err(e) => e.exit(),
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn reals() {
        assert_eq!(parse_real("8/3").unwrap(), 8.0 / 3.0);
        assert_eq!(parse_real("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_real("pi").unwrap(), PI);
        assert_eq!(parse_real("0.5").unwrap(), 0.5);
        assert!(parse_real("two").is_err());
        assert!(parse_real("1/x").is_err());
    }

    #[test]
    fn rungs() {
        assert_eq!(parse_rung("4096:256").unwrap(), (4096, 256.0));
        assert!(parse_rung("4096").is_err());
    }
}
