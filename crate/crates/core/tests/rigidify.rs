use quatlie::cochain::{
    antisymmetry_defect, commutator, gamma_bracket, gamma_commutator, jacobiator, random_points, Budget, Integration,
};
use quatlie::rigidify::{antisymmetrize, fit_budget, neumann_apply, rigidify_pipeline, RigidifyConfig};

fn small(order: usize) -> RigidifyConfig {
    RigidifyConfig {
        neumann_order: order,
        budget: Budget::new(200, 5),
        max_evaluations: 1e7,
        pointwise_samples: 100,
        ..Default::default()
    }
}

#[test]
fn antisymmetrization_splits_the_bracket() {
    let b = gamma_commutator::<f64>(0.3, 1).unwrap();
    let (psi, b1) = antisymmetrize(&b).unwrap();
    assert!(b1.antisymmetric());
    let sym = antisymmetry_defect(&b);
    for i in 0..20 {
        let p = random_points::<f64>(2, 1, 1.0, 1, i);
        // B = B₁ + Ψ with Ψ the symmetric half.
        let sum = &b1.apply(&p[0], &p[1]) + &psi.eval_owned(&p);
        assert!((&sum - &b.apply(&p[0], &p[1])).norm() < 1e-14);
        let half = sym.eval_owned(&p).scale(0.5);
        assert!((&psi.eval_owned(&p) - &half).norm() < 1e-14);
    }
}

#[test]
fn neumann_iterates_grow_along_the_jacobiator() {
    // For an antisymmetric bracket, d Jac = 0 and T Jac = 0, so M(J) = −J and Sₙ = (n+1)J.
    let (_, b1) = antisymmetrize(&gamma_bracket::<f64>(0.1)).unwrap();
    let j = jacobiator(&b1);
    let it = neumann_apply(&b1, &j, 2, Integration::default(), true).unwrap();
    for i in 0..10 {
        let p = random_points::<f64>(3, 2, 0.05, 2, i);
        let jv = j.eval_owned(&p);
        for (n, s) in it.iter().enumerate() {
            let want = jv.scale((n + 1) as f64);
            assert!((&s.eval_owned(&p) - &want).norm() <= 1e-9 * (1.0 + want.norm()), "order {n}");
        }
    }
}

#[test]
fn pipeline_on_a_lie_bracket_is_inert() {
    let out = rigidify_pipeline(&commutator::<f64>(1).unwrap(), &small(1)).unwrap();
    let r = &out.report;
    assert!(r.defect_before.value < 1e-13);
    assert!(r.phi_norm.as_ref().unwrap().value < 1e-13);
    assert!(r.c2_used < 1e-13);
    assert!(r.defect_after.as_ref().unwrap().value < 1e-13);
}

#[test]
fn pipeline_reduces_the_gamma_defect() {
    let out = rigidify_pipeline(&gamma_bracket::<f64>(0.1), &small(0)).unwrap();
    let r = &out.report;
    let after = r.defect_after.as_ref().unwrap().value;
    assert!(after < r.defect_before.value, "{after} vs {}", r.defect_before.value);
    assert_eq!(r.k1, 7.5 * r.c2_used);
    assert_eq!(r.k1_max, r.constants.a.max(4.0 * r.c2_used * r.eps));
    assert_eq!(r.phi_bound_claimed, 4.0 * r.c2_used * r.eps);
    assert_eq!(r.neumann_residuals.len(), 1);
    assert_eq!(out.corrected.as_ref().map(|c| c.antisymmetric()), Some(true));
    let json = serde_json::to_value(r).unwrap();
    for key in ["K1", "K1_max", "C2_used", "M_norm", "A1", "defect_before", "neumann_residuals"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn pipeline_is_reproducible() {
    let a = rigidify_pipeline(&gamma_bracket::<f64>(0.1), &small(0)).unwrap().report;
    let b = rigidify_pipeline(&gamma_bracket::<f64>(0.1), &small(0)).unwrap().report;
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn radius_beyond_eps0_is_rejected() {
    let cfg = RigidifyConfig { eps: 0.2, eps0: Some(0.1), ..small(0) };
    assert!(rigidify_pipeline(&gamma_bracket::<f64>(0.1), &cfg).is_err());
    let cfg = RigidifyConfig { eps: 0.0, ..small(0) };
    assert!(rigidify_pipeline(&gamma_bracket::<f64>(0.1), &cfg).is_err());
}

#[test]
fn budget_fitting_respects_the_limit() {
    let b = Budget::new(1000, 10);
    let fitted = fit_budget(b, 100.0, 3, 2, 1e5, "probe").unwrap();
    assert!(fitted.samples < 1000 && fitted.samples > 0);
    assert_eq!(fit_budget(b, 1.0, 3, 2, 1e12, "probe").unwrap(), b);
    assert!(fit_budget(b, 1e9, 3, 2, 1e5, "probe").is_err());
}
