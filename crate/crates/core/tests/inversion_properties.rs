//! Inversion of the dual transform and the primal value function.

mod common;

use peakhabit::analysis::linspace;
use peakhabit::*;
use proptest::prelude::*;

/// Effective-region state `(x, h)` from unit-interval coordinates.
fn state(m: &Model, u: f64, h: f64) -> (f64, f64) {
    let t = m.thresholds(h).unwrap();
    (t.w_bkrp + u * (t.w_updt - t.w_bkrp), h)
}

proptest! {
    #[test]
    fn round_trip(p in common::params(), u in 0.0..=1.0f64, h in 0.1..20.0f64) {
        let m = Model::new(&p).unwrap();
        let (x, h) = state(&m, u, h);
        let pt = invert(&m, x, h).unwrap();
        if pt.y.is_finite() {
            let v = dual_value(&m, pt.y, h).unwrap();
            prop_assert!((x + v.v_tilde_y).abs() < 1e-9 * x.max(1.0));
        } else {
            prop_assert_eq!(x, m.thresholds(h).unwrap().w_bkrp);
        }
    }

    #[test]
    fn branch_matches_region(p in common::params(), u in 0.0..=1.0f64, h in 0.1..20.0f64) {
        let m = Model::new(&p).unwrap();
        let (x, h) = state(&m, u, h);
        let t = m.thresholds(h).unwrap();
        let pt = invert(&m, x, h).unwrap();
        prop_assert_eq!(pt.region, classify_region(&t, x));
        prop_assert_eq!(Some(pt.f_branch), peakhabit::inversion::branch_for(pt.region));
        if pt.y.is_finite() {
            let s = m.slice(h).unwrap();
            // The closed end of each wealth interval maps to the open end of
            // the dual interval, so allow the boundary value itself.
            let b = s.dual.branch_of(pt.y);
            prop_assert!(b == Some(pt.f_branch) || b.map(|b| b.index()) == (pt.f_branch != Branch::F1).then(|| pt.f_branch.index() - 1));
        }
    }

    #[test]
    fn f_x_matches_finite_differences(p in common::params(), u in 0.02..0.98f64, h in 0.2..20.0f64) {
        let m = Model::new(&p).unwrap();
        let (x, h) = state(&m, u, h);
        let t = m.thresholds(h).unwrap();
        let d = 1e-6 * x.max(1.0);
        // Stay away from the thresholds, where f_x has kinks.
        prop_assume!(t.as_array().iter().all(|w| (x - w).abs() > 1e3 * d));
        let f = |x: f64| invert(&m, x, h).unwrap().y;
        let fd = (f(x + d) - f(x - d)) / (2.0 * d);
        let fx = f_x(&m, x, h).unwrap();
        prop_assert!((fd - fx).abs() < 1e-5 * fx.abs(), "{} vs {}", fd, fx);
    }

    #[test]
    fn f_h_matches_finite_differences(u in 0.02..0.98f64, h in 0.5..15.0f64) {
        let m = Model::new(&ModelParams::base()).unwrap();
        let (x, h) = state(&m, u, h);
        let d = 1e-6 * h;
        let t0 = m.thresholds(h - d).unwrap();
        let t1 = m.thresholds(h + d).unwrap();
        prop_assume!(classify_region(&t0, x) == classify_region(&t1, x));
        prop_assume!(classify_region(&t0, x).is_effective());
        let f = |h: f64| invert(&m, x, h).unwrap().y;
        let fd = (f(h + d) - f(h - d)) / (2.0 * d);
        let fh = f_h(&m, x, h).unwrap();
        prop_assert!((fd - fh).abs() < 1e-4 * fh.abs().max(1e-8), "{} vs {}", fd, fh);
    }
}

#[test]
fn thresholds_invert_to_dual_endpoints() {
    let m = Model::new(&ModelParams::base()).unwrap();
    let s = m.slice(4.0).unwrap();
    let t = s.thresholds;
    assert_eq!(invert(&m, t.w_ref, 4.0).unwrap().y, 1.0);
    assert_eq!(
        invert(&m, t.w_peak, 4.0).unwrap().y,
        (-(1.0f64 - 0.7) * 2.0 * 4.0).exp()
    );
    assert_eq!(invert(&m, t.w_low, 4.0).unwrap().y, s.dual.y_low);
    assert!(invert(&m, t.w_bkrp, 4.0).unwrap().y.is_infinite());
}

#[test]
fn midpoint_of_depression_inverts_inside_its_interval() {
    let m = Model::new(&ModelParams::base()).unwrap();
    let t = m.thresholds(4.0).unwrap();
    let x = 0.5 * (t.w_low + t.w_ref);
    let pt = invert(&m, x, 4.0).unwrap();
    assert_eq!(pt.f_branch, Branch::F2);
    assert!(pt.y > 1.0 && pt.y < (0.4f64 * 4.0).exp());
    assert!((pt.y - 1.9697915574396635).abs() < 1e-12);
}

#[test]
fn outside_the_effective_region_is_an_error() {
    let m = Model::new(&ModelParams::base()).unwrap();
    let t = m.thresholds(4.0).unwrap();
    for x in [t.w_bkrp - 1e-9, t.w_updt * (1.0 + 1e-12), f64::NAN] {
        assert!(
            matches!(invert(&m, x, 4.0), Err(Error::OutOfEffectiveRegion { .. })),
            "{x}"
        );
    }
}

#[test]
fn inversion_is_continuous_across_thresholds() {
    let m = Model::new(&ModelParams::base()).unwrap();
    for h in [0.5, 4.0, 12.0] {
        let t = m.thresholds(h).unwrap();
        for w in [t.w_low, t.w_ref, t.w_peak] {
            let e = 1e-13 * w;
            let below = invert(&m, w - e, h).unwrap().y;
            let above = invert(&m, w + e, h).unwrap().y;
            assert!((below - above).abs() < 1e-8, "h={h}, w={w}: {below} vs {above}");
        }
    }
}

#[test]
fn value_increases_in_wealth_and_decreases_in_habit() {
    let m = Model::new(&ModelParams::base()).unwrap();
    for h in [1.0, 4.0, 10.0] {
        let t = m.thresholds(h).unwrap();
        let vs: Vec<f64> = linspace(t.w_bkrp, t.w_updt, 200)
            .into_iter()
            .map(|x| primal_value(&m, x, h).unwrap())
            .collect();
        assert!(vs.windows(2).all(|w| w[1] > w[0]), "h={h}");
    }
    let x = 60.0;
    let hs: Vec<f64> = linspace(3.0, 6.0, 50)
        .into_iter()
        .filter(|&h| classify_region(&m.thresholds(h).unwrap(), x).is_effective())
        .collect();
    assert!(hs.len() > 10);
    let vs: Vec<f64> = hs.iter().map(|&h| primal_value(&m, x, h).unwrap()).collect();
    assert!(vs.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn value_is_continuous_across_thresholds() {
    let m = Model::new(&ModelParams::base()).unwrap();
    let t = m.thresholds(4.0).unwrap();
    for w in [t.w_low, t.w_ref, t.w_peak] {
        let e = 1e-9 * w;
        let (a, b) = (
            primal_value(&m, w - e, 4.0).unwrap(),
            primal_value(&m, w + e, 4.0).unwrap(),
        );
        assert!((a - b).abs() < 1e-7 * a.abs().max(1.0));
    }
}

#[test]
fn frozen_primal_value() {
    let m = Model::new(&ModelParams::base()).unwrap();
    assert!((primal_value(&m, 60.0, 4.0).unwrap() - 2.7268882141668786).abs() < 1e-11);
}

#[test]
fn general_reference_value_on_the_bliss_curve_at_large_h() {
    let mut p = ModelParams::base();
    p.variant = Variant::GeneralReference;
    p.phi = Some(PhiSpec::fractional(0.2, 2.0));
    let m = Model::new(&p).unwrap();
    let h = 50.0;
    let x = m.thresholds(h).unwrap().w_updt;
    let v = primal_value(&m, x, h).unwrap();
    let limit = 1.0 / (p.gamma * p.beta2);
    assert!((v - limit).abs() < 0.01 * limit, "{v} vs {limit}");
}
