use std::f64::consts::{FRAC_PI_2, PI};

use cap_illumination::cover_measure::{
    lune_area, union_case, union_measure, union_measure_mc, unlit_probability, UnionCase, UnionMeasureBreakpoints,
};
use proptest::prelude::*;

#[test]
fn lune_endpoints() {
    let bp = UnionMeasureBreakpoints::new();
    assert!(lune_area(bp.theta_tangent).unwrap().abs() < 1e-12);
    assert!((lune_area(bp.theta_cover).unwrap() - 1.0 / 18.0).abs() < 1e-12);
}

#[test]
fn measure_continuous_at_breakpoints() {
    let bp = UnionMeasureBreakpoints::new();
    let h = 1e-12;
    for theta in [bp.theta_tangent, bp.theta_cover] {
        let left = union_measure(theta - h).unwrap();
        let right = union_measure(theta + h).unwrap();
        assert!((left - right).abs() < 1e-9, "jump {} at {theta}", left - right);
    }
    // Exact closed-form values at the breakpoints.
    assert!((union_measure(bp.theta_tangent).unwrap() - 2.0 * (1.0 - bp.theta_tangent.cos())).abs() < 1e-12);
    let covering_limit = 2.0 * (1.0 - bp.theta_cover.cos()) - 6.0 / 18.0;
    assert!((covering_limit - 1.0).abs() < 1e-12);
}

#[test]
fn monte_carlo_agrees_on_a_grid() {
    // Light version of the full acceptance sweep: 20 points at 2·10⁵ samples.
    for k in 1..=20 {
        let theta = FRAC_PI_2 * k as f64 / 20.0;
        let exact = union_measure(theta).unwrap();
        let mc = union_measure_mc(theta, 200_000, k);
        assert!(mc.z_score(exact) < 5.0, "θ = {theta}: {} vs {exact}", mc.estimate);
    }
}

#[test]
fn case_examples() {
    assert_eq!(union_case(1.3).unwrap(), UnionCase::Covering);
    assert_eq!(union_measure(1.3).unwrap(), 1.0);
    assert_eq!(union_case(0.5).unwrap(), UnionCase::Disjoint);
    assert!((union_measure(0.5).unwrap() - 2.0 * (1.0 - 0.5f64.cos())).abs() < 1e-15);
    assert_eq!(union_case(1.0).unwrap(), UnionCase::Overlapping);
    assert!(union_measure(0.0).is_err());
    assert!(union_measure(FRAC_PI_2 + 1e-9).is_err());
}

proptest! {
    #[test]
    fn measure_is_monotone_and_bounded(a in 1e-6f64..FRAC_PI_2, b in 1e-6f64..FRAC_PI_2) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (ml, mh) = (union_measure(lo).unwrap(), union_measure(hi).unwrap());
        prop_assert!((0.0..=1.0).contains(&ml) && (0.0..=1.0).contains(&mh));
        prop_assert!(ml <= mh + 1e-12);
    }

    #[test]
    fn union_never_exceeds_four_caps(theta in 1e-6f64..FRAC_PI_2) {
        let four_caps = 4.0 * (1.0 - theta.cos()) / 2.0;
        prop_assert!(union_measure(theta).unwrap() <= four_caps + 1e-12);
    }

    #[test]
    fn lune_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let bp = UnionMeasureBreakpoints::new();
        let at = |s: f64| bp.theta_tangent + s * (bp.theta_cover - bp.theta_tangent);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (l, h) = (lune_area(at(lo)).unwrap(), lune_area(at(hi)).unwrap());
        prop_assert!(l >= 0.0 && l <= h + 1e-12);
    }

    #[test]
    fn unlit_probability_is_complementary(phi in 0.0f64..FRAC_PI_2) {
        let p = unlit_probability(phi).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        if phi > 1e-9 {
            prop_assert!((p - (1.0 - union_measure(FRAC_PI_2 - phi).unwrap())).abs() < 1e-12);
        }
    }
}

#[test]
fn lune_rejects_outside_range() {
    assert!(lune_area(0.5).is_err());
    assert!(lune_area(PI / 2.0).is_err());
}
