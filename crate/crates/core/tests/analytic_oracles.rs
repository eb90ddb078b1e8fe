use std::f64::consts::PI;

use loophull::analytic::*;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

/// Composite Simpson on `[0, t_max]`, deliberately naive.
fn simpson<F: Fn(f64) -> f64>(f: F, t_max: f64, n: usize) -> f64 {
    let h = t_max / n as f64;
    let mut s = f(0.0) + f(t_max);
    for k in 1..n {
        s += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn psi_matches_direct_integration() {
    // e^{-cosh 40} is far below double precision, so truncating at 40 is exact.
    for (r, x) in [(1.0, PI), (0.5, 3.0 * PI), (2.0, PI)] {
        let s: f64 = r * r;
        let direct = x / PI * simpson(|t| (-s * t.cosh()).exp() / (t * t + x * x), 40.0, 200_000);
        let v = yor_psi(r, x, &cfg()).unwrap();
        assert!(!v.underflow);
        assert!((v.value - direct).abs() < 1e-12, "r={r} x={x}: {} vs {direct}", v.value);
    }
}

#[test]
fn psi_is_odd_in_x() {
    let a = yor_psi(0.7, 2.0, &cfg()).unwrap().value;
    let b = yor_psi(0.7, -2.0, &cfg()).unwrap().value;
    assert_eq!(a, -b);
}

#[test]
fn psi_large_x_limit() {
    // x Psi_r(x) -> (1/pi) int_0^inf e^{-r^2 cosh t} dt = K_0(r^2)/pi.
    let r: f64 = 0.8;
    let k0 = simpson(|t| (-(r * r) * t.cosh()).exp(), 40.0, 200_000);
    let x = 1e5;
    let v = yor_psi(r, x, &cfg()).unwrap().value;
    assert!((x * v - k0 / PI).abs() < 1e-6 * k0, "{} vs {}", x * v, k0 / PI);
}

#[test]
fn psi_flags_underflow() {
    let v = yor_psi(30.0, PI, &cfg()).unwrap();
    assert!(v.underflow);
    assert_eq!(v.value, 0.0);
    assert!(yor_psi(-1.0, PI, &cfg()).is_err());
    assert!(yor_psi(1.0, 0.0, &cfg()).is_err());
}

#[test]
fn far_point_almost_never_wound() {
    let p = index_probability(IndexLawParams::new(3.0, 1).unwrap(), &cfg()).unwrap().value;
    assert!(p > 0.0 && p < (-9.0f64).exp(), "{p}");
    let p0 = index_probability(IndexLawParams::new(3.0, 0).unwrap(), &cfg()).unwrap().value;
    assert!(1.0 - p0 < 2.0 * (-9.0f64).exp());
}

#[test]
fn index_law_symmetric_and_normalized_near_origin() {
    let r = 0.1;
    let law = |n| index_probability(IndexLawParams::new(r, n).unwrap(), &cfg()).unwrap().value;
    assert_eq!(law(2), law(-2));
    let n_max = 200;
    let sum: f64 = (-n_max..=n_max).map(law).sum();
    let tail = index_tail(r, n_max as u32, &cfg()).unwrap();
    assert!((sum + tail - 1.0).abs() < 1e-8, "{}", sum + tail - 1.0);
}

#[test]
fn schramm_elementary_cases() {
    // kappa = 2: density sin^2, f = (pi - theta + sin(2 theta)/2)/pi.
    let th = PI / 3.0;
    let want = (PI - th + (2.0 * th).sin() / 2.0) / PI;
    let got = schramm_right_prob(KappaAngle::new(2.0, th).unwrap());
    assert!((got - want).abs() < 1e-13, "{got} vs {want}");
    // kappa = 4: uniform density.
    let got = schramm_right_prob(KappaAngle::new(4.0, 1.0).unwrap());
    assert!((got - (PI - 1.0) / PI).abs() < 1e-13);
    let half = schramm_right_prob(KappaAngle::new(3.0, PI / 2.0).unwrap());
    assert!((half - 0.5).abs() < 1e-14);
    assert!(KappaAngle::new(5.0, 1.0).is_err());
    assert!(KappaAngle::new(2.0, 4.0).is_err());
}

#[test]
fn expected_areas_beyond_first_ten() {
    for n in [11, 15, 20, -7] {
        let q = expected_area_index(n, &cfg()).unwrap();
        let c = 1.0 / (2.0 * PI * (n * n) as f64);
        assert!((q - c).abs() < 1e-10, "n={n}: {q} vs {c}");
    }
    assert!(expected_area_index(0, &cfg()).is_err());
}

#[test]
fn f_series_tail_shrinks_quadratically() {
    let x = 2.5;
    let exact = 4.0 / (PI * PI * x * x);
    let e1 = (f_series(x, 1_000).unwrap() - exact).abs();
    let e2 = (f_series(x, 10_000).unwrap() - exact).abs();
    assert!(e2 < e1 / 50.0, "{e1} {e2}");
    assert!(f_series(3.0, 10).is_err());
    assert!(f_integral(0.5, &cfg()).is_err());
    let id = f_identity_check(3.0, 10, &cfg()).unwrap();
    assert!(id.series_value.is_none());
    assert!((id.integral_value - id.closed_form).abs() < 1e-10);
}

#[test]
fn disk_integral_routes_agree() {
    let one = sle_conditioned_area_integral(&cfg()).unwrap();
    let two = sle_conditioned_area_integral_2d(&cfg(), (0.0, PI)).unwrap();
    assert!((one - PI / 10.0).abs() < 1e-12);
    assert!((two - PI / 10.0).abs() < 1e-10);
    // The angular factor is sin^2, so a quarter of the range holds a quarter of it.
    let q = sle_conditioned_area_integral_2d(&cfg(), (0.0, PI / 2.0)).unwrap();
    assert!((q - PI / 20.0).abs() < 1e-10);
}

#[test]
fn every_table_row_passes() {
    let rows = analytic_checks(&cfg()).unwrap();
    assert!(rows.len() >= 10);
    for r in rows {
        assert!(r.pass, "{} failed: {} vs {}", r.check_name, r.computed, r.target);
    }
}
