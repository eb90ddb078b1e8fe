use std::f64::consts::PI;

use loophull::analytic::{schramm_right_prob, KappaAngle, QuadratureConfig};
use loophull::mc::{run_index_pointwise, ExperimentConfig};
use loophull::seed::sample_seed;
use loophull::sle::{estimate_side_probability, theta_snapshots, LoewnerRun, SideExperiment};
use loophull::stats::{two_proportion_test, Moments};
use loophull::PlanarPoint;
use rayon::prelude::*;

const M: u64 = 4000;

fn right_count(exp: &SideExperiment) -> (u64, u64) {
    let r = estimate_side_probability(exp).unwrap();
    let decided = r.samples;
    ((r.mean * decided as f64).round() as u64, decided)
}

#[test]
fn side_probability_is_scale_invariant() {
    let near = SideExperiment::new(8.0 / 3.0, PlanarPoint::new(0.5, 0.5), M, 3);
    let far = SideExperiment::new(8.0 / 3.0, PlanarPoint::new(2.0, 2.0), M, 4);
    let (k1, n1) = right_count(&near);
    let (k2, n2) = right_count(&far);
    let (_, p) = two_proportion_test(k1, n1, k2, n2);
    assert!(p > 0.001, "p = {p}: {k1}/{n1} vs {k2}/{n2}");
}

#[test]
fn kappa_two_on_the_axis_is_fair() {
    let exp = SideExperiment::new(2.0, PlanarPoint::new(0.0, 1.0), M, 9);
    let r = estimate_side_probability(&exp).unwrap();
    assert!((r.mean - 0.5).abs() < 3.0 * r.stderr, "{} +- {}", r.mean, r.stderr);
    assert_eq!(r.failures, 0);
}

#[test]
fn side_function_is_a_martingale() {
    let kappa = 8.0 / 3.0;
    let theta0 = PI / 3.0;
    let z0 = PlanarPoint::polar(1.0, theta0);
    let f = |th: f64| schramm_right_prob(KappaAngle::new(kappa, th.clamp(0.0, PI)).unwrap());
    let times = [0.1, 1.0, 10.0];
    let snaps: Vec<Vec<f64>> = (0..M)
        .into_par_iter()
        .map(|k| theta_snapshots(&LoewnerRun::new(kappa, z0, sample_seed(21, k)), &times).unwrap())
        .collect();
    for (i, t) in times.iter().enumerate() {
        let m = Moments::from_slice(&snaps.iter().map(|s| f(s[i])).collect::<Vec<_>>());
        assert!((m.mean - f(theta0)).abs() < 3.0 * m.stderr(), "t={t}: {} +- {}", m.mean, m.stderr());
    }
}

#[test]
fn side_estimate_rejects_tiny_runs() {
    assert!(estimate_side_probability(&SideExperiment::new(2.0, PlanarPoint::new(0.0, 1.0), 10, 1)).is_err());
}

#[test]
fn far_point_is_never_wound_in_practice() {
    let cfg = ExperimentConfig { samples: 2000, steps: 1 << 10, ..Default::default() };
    let rep = run_index_pointwise(&cfg, PlanarPoint::new(5.0, 0.0), &QuadratureConfig::default()).unwrap();
    let zero = rep.rows.iter().find(|r| r.n == 0).unwrap();
    assert_eq!(zero.count, 2000);
    assert!(zero.analytic > 1.0 - 1e-9);
}

#[test]
fn pointwise_law_near_origin() {
    let cfg = ExperimentConfig { samples: 4000, steps: 1 << 12, master_seed: 17, ..Default::default() };
    let rep = run_index_pointwise(&cfg, PlanarPoint::new(0.35, 0.35), &QuadratureConfig::default()).unwrap();
    assert!(rep.max_abs_z() < 3.5, "{:?}", rep.rows);
    assert!(rep.chi_square.p_value > 1e-3, "{:?}", rep.chi_square);
}
