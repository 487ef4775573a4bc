use std::time::Instant;

use cap_illumination::exact::{rational, Rational};
use cap_illumination::ilp::{
    audit_rounding, build_model, build_model_with, certify, solve_exact, solve_float, ConstraintForm, IlpError,
    IlpModel,
};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

/// Exhaustive search over all feasible count vectors.
fn brute_force(m: &IlpModel) -> Result<Rational, IlpError> {
    for i in 0..m.t {
        if m.weight[i].is_zero() && !m.is_big(i) && m.obj[i] > Rational::zero() {
            return Err(IlpError::Unbounded { index: i });
        }
    }
    fn go(m: &IlpModel, i: usize, room: Rational, big_left: u32, value: Rational, best: &mut Rational) {
        if i == m.t {
            if value > *best {
                *best = value;
            }
            return;
        }
        let mut n = 0u64;
        loop {
            let used = &m.weight[i] * Rational::from_integer(BigInt::from(n));
            let big_used = if m.is_big(i) { n } else { 0 };
            if used > room || big_used > u64::from(big_left) {
                break;
            }
            let v = &value + &m.obj[i] * Rational::from_integer(BigInt::from(n));
            go(m, i + 1, &room - &used, big_left - big_used as u32, v, best);
            // Zero-weight items that are not big only add nothing here.
            if m.weight[i].is_zero() && !m.is_big(i) {
                break;
            }
            n += 1;
        }
    }
    let mut best = Rational::zero();
    go(m, 0, m.capacity.clone(), m.bigcap_capacity, Rational::zero(), &mut best);
    Ok(best)
}

#[test]
fn headline_bound() {
    let start = Instant::now();
    let m = build_model(250, 3000).unwrap();
    let sol = solve_exact(&m).unwrap();
    let report = certify(&sol, &m).unwrap();
    assert_eq!(report.m_t, rational(2999, 1000));
    assert_eq!(report.floor_m_t, BigInt::from(2));
    assert_eq!(report.directions_bound, BigInt::from(6));
    assert!(report.verdict_lt_3);
    assert!(report.big_used <= 4);
    assert!(start.elapsed().as_secs() < 600);
}

#[test]
fn headline_bound_doubled_form() {
    let m = build_model_with(250, 3000, ConstraintForm::Doubled).unwrap();
    let sol = solve_exact(&m).unwrap();
    assert_eq!(sol.objective, rational(2999, 1000));
    assert!(certify(&sol, &m).unwrap().verdict_lt_3);
}

#[test]
fn rounding_audit_has_no_violations() {
    let m = build_model(250, 3000).unwrap();
    let audit = audit_rounding(&m, 128).unwrap();
    assert_eq!(audit.objective_checked, 250);
    assert_eq!(audit.weights_checked, 250);
    assert!(audit.violations.is_empty(), "{:?}", audit.violations);
}

#[test]
fn dp_matches_brute_force() {
    for t in 1..=6 {
        for d in [10, 20, 60] {
            for form in [ConstraintForm::Halved, ConstraintForm::Doubled] {
                let m = build_model_with(t, d, form).unwrap();
                match (solve_exact(&m), brute_force(&m)) {
                    (Ok(sol), Ok(best)) => assert_eq!(sol.objective, best, "t={t} D={d} {form:?}"),
                    (Err(IlpError::Unbounded { index: a }), Err(IlpError::Unbounded { index: b })) => {
                        assert_eq!(a, b)
                    }
                    (a, b) => panic!("t={t} D={d} {form:?}: solver {a:?}, brute force {b:?}"),
                }
            }
        }
    }
}

#[test]
fn solutions_are_deterministic() {
    let a = solve_exact(&build_model(60, 3000).unwrap()).unwrap();
    let b = solve_exact(&build_model(60, 3000).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn float_mode_near_exact_value() {
    let start = Instant::now();
    let sol = solve_float(250).unwrap();
    let elapsed = start.elapsed();
    assert!((sol.objective_f64() - 2.999).abs() < 0.01, "{}", sol.objective_f64());
    assert!(elapsed.as_secs_f64() < 5.0, "{elapsed:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn witnesses_satisfy_constraints(t in 1usize..40, d in prop::sample::select(vec![60u64, 300, 3000])) {
        let m = build_model(t, d).unwrap();
        if let Ok(sol) = solve_exact(&m) {
            let report = certify(&sol, &m).unwrap();
            prop_assert!(report.weight_used <= m.capacity);
            prop_assert!(report.big_used <= 4);
        }
    }

    #[test]
    fn relaxing_constraints_never_lowers_the_optimum(t in 1usize..8, extra in 1u32..3) {
        let m = build_model(t, 60).unwrap();
        let Ok(base) = solve_exact(&m) else { return Ok(()); };
        let mut looser = m.clone();
        looser.bigcap_capacity += extra;
        prop_assert!(solve_exact(&looser).unwrap().objective >= base.objective);
        let mut roomier = m.clone();
        roomier.capacity = &m.capacity + rational(i64::from(extra), 60);
        prop_assert!(solve_exact(&roomier).unwrap().objective >= base.objective);
    }
}
