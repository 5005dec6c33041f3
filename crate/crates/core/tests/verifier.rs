use quatlie::cochain::{commutator, gamma_bracket, linear_combination, random_multilinear, zero, Budget};
use quatlie::verifier::{
    check_dt_expansion, check_operator_bounds, check_radial_trace, check_s_decomposition, check_s_direct_expansion,
    format_table, BoundCheck, Direction, VerifyConfig,
};

fn quick() -> VerifyConfig {
    VerifyConfig {
        budget: Budget::new(300, 5),
        trial_budget: Budget::new(100, 2),
        trials: 3,
        n_max: 1,
        max_evaluations: 1e7,
        pointwise_samples: 100,
        ..Default::default()
    }
}

#[test]
fn bound_check_margin_and_verdict() {
    let ok = BoundCheck::upper("x", 2.0, 1.5, "");
    assert!(ok.pass && ok.margin == 0.5 && ok.direction == Direction::Upper);
    let bad = BoundCheck::identity("y", 1e-10, 1e-3, "");
    assert!(!bad.pass && bad.margin < 0.0);
    let nan = BoundCheck::upper("z", f64::NAN, 1.0, "");
    assert!(!nan.pass);
    let t = format_table(&[ok, bad]);
    assert_eq!(t.lines().count(), 3);
}

#[test]
fn lie_identities_hold_for_the_commutator() {
    let checks = check_operator_bounds(&commutator::<f64>(1).unwrap(), &quick()).unwrap();
    for name in ["jacobi_identity", "d_squared_zero"] {
        let c = checks.iter().find(|c| c.name == name).unwrap();
        assert!(c.pass, "{name}: {}", c.empirical_value);
    }
    let a = checks.iter().find(|c| c.name == "d_bound_k1").unwrap();
    assert!(a.pass);
}

#[test]
fn jacobi_check_fails_off_lie() {
    let checks = check_operator_bounds(&gamma_bracket::<f64>(0.1), &quick()).unwrap();
    let c = checks.iter().find(|c| c.name == "jacobi_identity").unwrap();
    assert!(!c.pass && c.empirical_value > 1e-3);
}

#[test]
fn two_routes_to_the_differential_of_t_agree() {
    let c = check_dt_expansion(&gamma_bracket::<f64>(0.1), &quick()).unwrap();
    assert!(c.pass, "{}", c.empirical_value);
}

#[test]
fn radial_traces_vanish() {
    for c in check_radial_trace(&gamma_bracket::<f64>(0.1), &quick()).unwrap() {
        assert!(c.pass, "{}: {}", c.name, c.empirical_value);
    }
}

#[test]
fn s_decomposition_is_exact_for_zero_correction() {
    let b = commutator::<f64>(1).unwrap();
    let phi = zero(2, 1);
    assert!(check_s_decomposition(&b, &phi, 0.1, 200, 1).unwrap().pass);
    assert!(check_s_direct_expansion(&b, &phi, 0.1, 200, 1).unwrap().pass);
}

#[test]
fn direct_expansion_is_exact_for_bilinear_correction() {
    let b = commutator::<f64>(2).unwrap();
    let raw = random_multilinear::<f64>(2, 2, 4, false).unwrap();
    let phi = linear_combination(&[(0.05, &raw)]).unwrap();
    let c = check_s_direct_expansion(&b, &phi, 0.1, 200, 2).unwrap();
    assert!(c.pass, "{}", c.empirical_value);
}
