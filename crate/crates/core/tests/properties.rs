use fluxknot_core::blocks::{
    block_c_field, lutz_valid, sew_lutz, transform_torus, BoundaryJet, LutzPair, Profile, WronskianSign,
};
use fluxknot_core::flux::{FiberSurface, FluxJob, FluxSettings, Tally};
use fluxknot_core::invariants::{CohomologyClass, Normalization, Numerics};
use fluxknot_core::math::{integrate, rk4_flow, RngStream, ScalarFn};
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = ScalarFn> {
    prop::collection::vec(-2.0..2.0f64, 1..5).prop_map(ScalarFn::polynomial)
}

/// Profiles whose `g` stays at least 0.5 away from zero.
fn profile() -> impl Strategy<Value = Profile> {
    (poly(), 0.5..2.0f64, -0.4..0.4f64).prop_map(|(f, b, s)| Profile::new(f, ScalarFn::affine(s, b)).unwrap())
}

fn pwl() -> impl Strategy<Value = Profile> {
    (prop::collection::vec(-1.0..1.0f64, 5), prop::collection::vec(0.1..1.0f64, 5)).prop_map(|(fv, gv)| {
        let knots: Vec<f64> = (0..5).map(|i| i as f64 / 4.0).collect();
        let f = ScalarFn::piecewise_linear(knots.iter().copied().zip(fv).collect::<Vec<_>>()).unwrap();
        let g = ScalarFn::piecewise_linear(knots.iter().copied().zip(gv).collect::<Vec<_>>()).unwrap();
        Profile::new(f, g).unwrap()
    })
}

fn unimodular() -> impl Strategy<Value = [[i64; 2]; 2]> {
    prop::sample::select(vec![
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[1, 1], [0, 1]],
        [[2, 1], [1, 1]],
        [[1, 0], [0, -1]],
        [[1, -3], [0, 1]],
        [[3, 2], [1, 1]],
        [[0, -1], [1, 0]],
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integration_is_linear(u in poly(), v in poly(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let tol = 1e-12;
        let combined = integrate(|t| a * u.eval(t) + b * v.eval(t), 0.0, 1.0, &[], tol).unwrap();
        let parts = a * integrate(|t| u.eval(t), 0.0, 1.0, &[], tol).unwrap()
            + b * integrate(|t| v.eval(t), 0.0, 1.0, &[], tol).unwrap();
        prop_assert!((combined - parts).abs() <= 2.0 * tol * (1.0 + a.abs() + b.abs()));
    }

    #[test]
    fn integration_is_additive(u in poly(), c in 0.01..0.99f64) {
        let tol = 1e-12;
        let whole = integrate(|t| u.eval(t), 0.0, 1.0, &[], tol).unwrap();
        let split = integrate(|t| u.eval(t), 0.0, c, &[], tol).unwrap()
            + integrate(|t| u.eval(t), c, 1.0, &[], tol).unwrap();
        prop_assert!((whole - split).abs() <= 2.0 * tol);
    }

    #[test]
    fn invariant_flows_keep_their_level(p in profile(), t in 0.0..1.0f64, x1 in 0.0..6.0f64) {
        let flow = rk4_flow(
            |x: &[f64; 3]| { let (f, g) = p.velocity(x[2]); [f, g, 0.0] },
            [x1, 0.0, t],
            3.0,
            0.01,
            false,
        ).unwrap();
        prop_assert_eq!(flow.state[2], t);
    }

    #[test]
    fn primitives_differentiate_back(p in profile()) {
        let field = block_c_field(&p);
        for i in 0..=32 {
            let t = i as f64 / 32.0;
            prop_assert!((field.big_f().deriv(t) - p.f().eval(t)).abs() < 1e-8);
            prop_assert!((field.big_g().deriv(t) - p.g().eval(t)).abs() < 1e-8);
        }
    }

    #[test]
    fn transforms_preserve_lutz(s in -1.0..1.0f64, c in 0.5..2.0f64, m in unimodular()) {
        // W = 1 − 0.1·s·c ≥ 0.8
        let pair = LutzPair::new(ScalarFn::affine(1.0, c), ScalarFn::affine(s * 0.1, 1.0));
        prop_assume!(lutz_valid(&pair).is_valid);
        let out = transform_torus(&pair, m).unwrap();
        prop_assert!(lutz_valid(&out).is_valid);
    }

    #[test]
    fn sewing_matches_jets_and_sign(
        a in (0.2..3.0f64, 0.0..6.3f64, -2.0..2.0f64, 0.2..4.0f64),
        b in (0.2..3.0f64, 0.0..6.3f64, -2.0..2.0f64, 0.2..4.0f64),
        sign in prop::bool::ANY,
    ) {
        // jets from polar data: W = −R²Θ′
        let jet = |(r, th, lr, rate): (f64, f64, f64, f64)| {
            let rate = if sign { rate } else { -rate };
            let (c, s) = (th.cos(), th.sin());
            BoundaryJet::new(r * c, r * s, r * (lr * c - rate * s), r * (lr * s + rate * c))
        };
        let (left, right) = (jet(a), jet(b));
        let sewing = sew_lutz(&left, &right, 0).unwrap();
        let report = lutz_valid(&sewing.pair);
        prop_assert!(report.is_valid);
        let expected = if left.wronskian() > 0.0 { WronskianSign::Positive } else { WronskianSign::Negative };
        prop_assert_eq!(report.sign, expected);
        prop_assert!(BoundaryJet::of_pair(&sewing.pair, 0.0).max_abs_diff(&left) < 1e-8);
        prop_assert!(BoundaryJet::of_pair(&sewing.pair, 1.0).max_abs_diff(&right) < 1e-8);
    }

    #[test]
    fn scaling_laws(p in profile(), lambda in 0.1..5.0f64) {
        let n = Numerics::default();
        let q = p.scaled(lambda).unwrap();
        let beta = CohomologyClass::new(0.3, -0.7);
        for norm in [Normalization::Probability, Normalization::Lebesgue] {
            let close = |x: f64, y: f64| (x - y).abs() <= 1e-8 * (1.0 + y.abs());
            prop_assert!(close(n.winding(&q, &beta, norm).unwrap(), lambda * n.winding(&p, &beta, norm).unwrap()));
            prop_assert!(close(n.wrappingness(&q, norm).unwrap(), lambda * n.wrappingness(&p, norm).unwrap()));
            prop_assert!(close(n.trunkenness(&q, norm).unwrap(), lambda * n.trunkenness(&p, norm).unwrap()));
            prop_assert!(close(n.fiber_flux(&q, norm).unwrap(), lambda * n.fiber_flux(&p, norm).unwrap()));
        }
        let h = n.helicity(&p, &CohomologyClass::ZERO).unwrap();
        let hq = n.helicity(&q, &CohomologyClass::ZERO).unwrap();
        prop_assert!((hq - lambda * lambda * h).abs() <= 1e-8 * (1.0 + hq.abs()));
    }

    #[test]
    fn trunkenness_is_symmetric(p in pwl()) {
        let n = Numerics::default();
        let a = n.trunkenness(&p, Normalization::Lebesgue).unwrap();
        let b = n.trunkenness(&p.swapped(), Normalization::Lebesgue).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn winding_is_bounded_by_wrappingness(p in pwl()) {
        let n = Numerics::default();
        let wind = n.winding(&p, &CohomologyClass::FIBER, Normalization::Probability).unwrap();
        let wrap = n.wrappingness(&p, Normalization::Probability).unwrap();
        prop_assert!(wind.abs() <= wrap + 1e-12);
        let obstruction = n.section_obstruction(&p).unwrap();
        if !obstruction.section_possible {
            prop_assert!(!n.tangent_orbits(&p).unwrap().is_empty());
        }
    }

    #[test]
    fn winding_is_linear_in_the_class(p in profile(), a in (-2.0..2.0f64, -2.0..2.0f64), b in (-2.0..2.0f64, -2.0..2.0f64)) {
        let n = Numerics::default();
        let norm = Normalization::Probability;
        let sum = CohomologyClass::new(a.0 + b.0, a.1 + b.1);
        let lhs = n.winding(&p, &sum, norm).unwrap();
        let rhs = n.winding(&p, &CohomologyClass::new(a.0, a.1), norm).unwrap()
            + n.winding(&p, &CohomologyClass::new(b.0, b.1), norm).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn flux_batches_reduce_in_any_order(seed in any::<u64>(), theta in 0.0..6.28f64, split in 1u64..16) {
        let p = Profile::new(ScalarFn::sinusoid(1.0, 2, 0.0, 0.3), ScalarFn::constant(1.0)).unwrap();
        let settings = FluxSettings { batch_size: 1000 * split, ..FluxSettings::default() };
        let job = FluxJob::new(
            &p, Normalization::Probability, &FiberSurface::new(theta), 1e-3, 20_000, RngStream::new(seed, 1), settings,
        ).unwrap();
        let tallies: Vec<Tally> = (0..job.batch_count()).map(|b| job.run_batch(b).unwrap()).collect();
        let forward: Tally = tallies.iter().copied().sum();
        let backward: Tally = tallies.iter().rev().copied().sum();
        prop_assert_eq!(forward, backward);
        // the batch schedule does not change which samples are drawn
        let single = FluxJob::new(
            &p, Normalization::Probability, &FiberSurface::new(theta), 1e-3, 20_000, RngStream::new(seed, 1),
            FluxSettings { batch_size: 20_000, ..FluxSettings::default() },
        ).unwrap();
        prop_assert_eq!(single.run().unwrap(), job.finish(forward));
    }
}

#[test]
fn rng_streams_reproduce() {
    let draw = || {
        let mut c = RngStream::new(42, 7).cursor(0);
        (0..100_000).map(|_| c.next_u64()).collect::<Vec<_>>()
    };
    assert_eq!(draw(), draw());
}

#[test]
fn fiber_flux_oracle_on_smooth_profiles() {
    let n = Numerics::default();
    let mut failures = 0;
    for i in 0..20u64 {
        let amp = 0.3 + 0.05 * i as f64;
        let p = Profile::new(ScalarFn::sinusoid(amp, 2, 0.1 * i as f64, 0.2), ScalarFn::constant(1.0)).unwrap();
        let exact = n.fiber_flux(&p, Normalization::Probability).unwrap();
        let job = FluxJob::new(
            &p, Normalization::Probability, &FiberSurface::new(1.0), 1e-3, 1_000_000, RngStream::new(99, i),
            FluxSettings::default(),
        ).unwrap();
        let est = job.run().unwrap();
        if (est.value - exact).abs() > 3.0 * est.stderr {
            failures += 1;
        }
    }
    // 3σ misses are expected about once in 370 runs
    assert!(failures <= 1, "{failures} of 20 estimates outside 3σ");
}
