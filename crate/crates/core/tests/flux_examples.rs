use std::f64::consts::PI;

use fluxknot_core::blocks::Profile;
use fluxknot_core::flux::{
    convergence_report, fiber_sweep, flux_estimate, shear_invariance_test, DiracOrbit, FiberSurface, MeasureSpec,
};
use fluxknot_core::invariants::Normalization;
use fluxknot_core::math::ScalarFn;

const PROB: MeasureSpec = MeasureSpec::Volume(Normalization::Probability);

#[test]
fn unit_flow_flux_is_theta_independent() {
    let p = Profile::constant(1.0, 0.0).unwrap();
    let sweep = fiber_sweep(&p, &PROB, 8, 1e-3, 200_000, 1).unwrap();
    for (_, a) in &sweep.rows {
        for (_, b) in &sweep.rows {
            assert!((a.value - b.value).abs() <= 3.0 * a.stderr.hypot(b.stderr));
        }
    }
}

#[test]
fn lebesgue_max_matches_single_annulus_flux() {
    let p = Profile::constant(2.0, 3.0).unwrap();
    let sweep = fiber_sweep(&p, &MeasureSpec::Volume(Normalization::Lebesgue), 8, 1e-3, 200_000, 2).unwrap();
    let (_, at_max) = sweep.rows.iter().max_by(|a, b| a.1.value.total_cmp(&b.1.value)).unwrap();
    assert_eq!(at_max.value, sweep.empirical_max);
    assert!((sweep.empirical_max - 4.0 * PI).abs() <= 3.0 * at_max.stderr);
}

#[test]
fn dirac_one_one_crosses_once() {
    let p = Profile::constant(1.0, 1.0).unwrap();
    let m = MeasureSpec::DiracOrbit(DiracOrbit::new(1, 1, 0.5).unwrap());
    let sweep = fiber_sweep(&p, &m, 16, 1e-3, 1000, 0).unwrap();
    assert!(sweep.rows.iter().all(|(_, e)| e.value == 1.0 && e.exact));
}

#[test]
fn dirac_two_three_sheared() {
    let orbit = DiracOrbit::new(2, 3, 0.5).unwrap();
    let sheared = orbit.sheared(1);
    assert_eq!((sheared.p, sheared.q), (2, 5));
    for theta in [0.3, 2.0, 5.5] {
        assert_eq!(sheared.crossings(&FiberSurface::new(theta)), 2);
    }
}

#[test]
fn unit_flow_shear_within_noise() {
    let p = Profile::constant(1.0, 0.0).unwrap();
    let r = shear_invariance_test(&p, 1, 8, 1e-3, 100_000, 5).unwrap();
    assert!(r.within_noise, "{r:?}");
}

#[test]
fn convergence_tables() {
    let unit = Profile::constant(1.0, 0.0).unwrap();
    let s = FiberSurface::new(0.4);
    for row in convergence_report(&unit, &PROB, &s, &[1e-2, 1e-3, 1e-4], &[200_000], 8).unwrap() {
        assert!((row.value - 1.0 / (2.0 * PI)).abs() <= 3.0 * row.stderr, "{row:?}");
    }
    let sine = Profile::new(ScalarFn::sinusoid(1.0, 2, 0.0, 0.0), ScalarFn::constant(1.0)).unwrap();
    let est = flux_estimate(&sine, &PROB, &s, 1e-3, 1_000_000, 9).unwrap();
    assert!((est.value - 1.0 / (PI * PI)).abs() <= 3.0 * est.stderr, "{est:?}");
}

#[test]
fn stderr_scales_like_root_n() {
    let p = Profile::new(ScalarFn::sinusoid(1.0, 2, 0.0, 0.2), ScalarFn::constant(1.0)).unwrap();
    let s = FiberSurface::new(1.0);
    let rows = convergence_report(&p, &PROB, &s, &[1e-3], &[200_000, 400_000], 4).unwrap();
    let ratio = rows[0].stderr / rows[1].stderr;
    assert!((ratio / 2f64.sqrt() - 1.0).abs() <= 0.2, "{ratio}");
}

#[test]
fn tangent_flow_has_zero_flux_everywhere() {
    let p = Profile::constant(0.0, 1.0).unwrap();
    let sweep = fiber_sweep(&p, &PROB, 8, 1e-3, 10_000, 3).unwrap();
    assert_eq!(sweep.empirical_max, 0.0);
}
