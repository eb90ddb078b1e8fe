use std::f64::consts::PI;

use loophull::analytic::{index_probability, schramm_right_prob, IndexLawParams, KappaAngle, QuadratureConfig};
use loophull::bridge::vervaat_transform;
use loophull::geometry::angle_winding;
use loophull::hull::ON_PATH;
use loophull::mc::{analyze_sample, ExperimentConfig};
use loophull::{BridgeSpec, LoopPath, PathAnalysis, PlanarPoint};
use proptest::prelude::*;

fn small_cfg(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        samples: 1,
        steps: 1 << 9,
        cells_per_unit: 64.0,
        master_seed: seed,
        refine_fraction: 0.1,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bridge_is_pinned(seed: u64, log_n in 1u32..12) {
        let p = BridgeSpec::gaussian(1 << log_n, seed).sample().unwrap();
        prop_assert_eq!(p.points()[0], PlanarPoint::ORIGIN);
        prop_assert_eq!(*p.points().last().unwrap(), PlanarPoint::ORIGIN);
        prop_assert_eq!(p.points().len(), (1 << log_n) + 1);
    }

    #[test]
    fn lattice_loop_is_closed_nearest_neighbour(seed: u64, half in 1usize..200) {
        let p = BridgeSpec::lattice(2 * half, seed).sample().unwrap();
        prop_assert_eq!(*p.points().last().unwrap(), PlanarPoint::ORIGIN);
        for d in p.increments() {
            prop_assert_eq!(d.x.abs() + d.y.abs(), 1.0);
        }
    }

    #[test]
    fn sampling_is_deterministic(seed: u64) {
        let a = BridgeSpec::gaussian(256, seed).sample().unwrap();
        prop_assert_eq!(&a, &BridgeSpec::gaussian(256, seed).sample().unwrap());
        prop_assert_eq!(&a, &LoopPath::read_from(a.to_text().as_bytes()).unwrap());
    }

    #[test]
    fn regions_partition_hull(seed: u64) {
        let cfg = small_cfg(seed);
        let rec = analyze_sample(&cfg, 0).unwrap();
        prop_assert_eq!(rec.raster.partition_residual(), 0);
        let total: f64 = rec.refined.per_index.values().sum::<f64>() + rec.refined.zero_inside;
        prop_assert!(total.is_finite());
    }

    #[test]
    fn scanline_agrees_with_angle_sum(seed: u64) {
        let p = BridgeSpec::gaussian(200, seed).sample().unwrap();
        let cfg = small_cfg(seed);
        let g = cfg.grid_for(&p).unwrap();
        let an = PathAnalysis::compute(&p, &g).unwrap();
        let outside = &an.rasters.outside;
        for j in (0..g.ny).step_by(3) {
            for i in (0..g.nx).step_by(3) {
                let w = an.field.get(i, j);
                if w == ON_PATH {
                    continue;
                }
                prop_assert_eq!(Some(w as i64), angle_winding(p.points(), g.center(i, j)));
                if outside.get(i, j) {
                    prop_assert_eq!(w, 0);
                }
            }
        }
    }

    #[test]
    fn lowest_point_shift_keeps_areas(seed: u64) {
        let cfg = small_cfg(seed);
        let p = cfg.spec(0).sample().unwrap();
        let v = vervaat_transform(&p);
        let a = PathAnalysis::compute(&p, &cfg.grid_for(&p).unwrap()).unwrap().areas;
        let b = PathAnalysis::compute(&v, &cfg.grid_for(&v).unwrap()).unwrap().areas;
        prop_assert_eq!(a, b);
        prop_assert!(v.points().iter().all(|q| q.y >= 0.0));
    }

    #[test]
    fn side_probability_decreases_with_angle(kappa in 0.5f64..4.0, a in 0.0f64..PI, b in 0.0f64..PI) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let f = |t| schramm_right_prob(KappaAngle::new(kappa, t).unwrap());
        prop_assert!(f(lo) >= f(hi) - 1e-14);
        prop_assert!((f(lo) + f(PI - lo) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn index_law_is_symmetric(r in 0.05f64..4.0, n in 1i64..6) {
        let cfg = QuadratureConfig::default();
        let p = index_probability(IndexLawParams::new(r, n).unwrap(), &cfg).unwrap().value;
        let q = index_probability(IndexLawParams::new(r, -n).unwrap(), &cfg).unwrap().value;
        prop_assert_eq!(p, q);
        prop_assert!((0.0..=1.0).contains(&p));
    }
}
