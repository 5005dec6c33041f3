use quatlie::cochain::{commutator, gamma_commutator, Budget};
use quatlie::constants::{compute_eps_star, estimate_constants, ThresholdVariant};

#[test]
fn commutator_constants() {
    // A = sup|pq − qp|/(|p||q|) = 2; antisymmetric and Lie, so C₁ = C₂ = 0.
    let k = estimate_constants(&commutator::<f64>(1).unwrap(), 0.1, Budget::new(1000, 20), 1).unwrap();
    assert!(k.a <= 2.0 + 1e-12 && k.a > 1.95, "{}", k.a);
    assert_eq!(k.c1_bilinear, 0.0);
    assert!(k.c2 < 1e-14);
}

#[test]
fn gamma_term_sets_the_symmetric_defect() {
    // The symmetric part of pq − qp + γp̄q is γ(p̄q + q̄p)/2 = γ·Re(p̄q), so
    // the antisymmetry defect φ(x,y) = B(x,y) + B(y,x) has norm up to 2γ·|p||q|.
    for gamma in [0.1, 0.4] {
        let k = estimate_constants(&gamma_commutator::<f64>(gamma, 1).unwrap(), 0.1, Budget::new(1000, 20), 2).unwrap();
        assert!(k.c1_bilinear > 0.0 && k.c1_bilinear <= 2.0 * gamma + 1e-12, "{gamma}: {}", k.c1_bilinear);
    }
}

#[test]
fn estimates_feed_the_threshold() {
    let k = estimate_constants(&gamma_commutator::<f64>(0.1, 1).unwrap(), 0.05, Budget::new(300, 10), 3).unwrap();
    let r = compute_eps_star(k.a, k.c1_bilinear, 0.05, ThresholdVariant::Standard).unwrap();
    assert!(r.eps_star <= 0.05);
    assert_eq!(r.branch_a, Some(24.0 / (5.0 * k.a)));
}
