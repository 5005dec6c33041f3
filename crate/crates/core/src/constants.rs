//! Structural constants `(A, C₁, C₂)`, the admissible radius `ε*` and the
//! defect-operator bounds.

use serde::{Deserialize, Serialize};

use crate::cochain::{
    antisymmetry_defect, jacobiator, localized_norm, localized_norm_cubic, Bracket, Budget, NormVariant,
};
use crate::error::{Error, Result};
use crate::quaternion::derive_seed;
use crate::scalar::Scalar;

/// Sampled constants of a bracket on the ball of radius `eps0`:
///
/// * `a`: `‖[x,y]‖ ≤ A‖x‖‖y‖`
/// * `c1_bilinear`: `‖φ(x,y)‖ ≤ 2C₁‖x‖‖y‖`
/// * `c1_cubic`: `‖φ(x,y)‖ ≤ C₁‖x‖‖y‖(‖x‖+‖y‖)`
/// * `c2`: `‖ψ(x,y,z)‖ ≤ 6C₂‖x‖‖y‖‖z‖`
///
/// All are sampled lower bounds of the true suprema.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimates {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "C1_bilinear")]
    pub c1_bilinear: f64,
    #[serde(rename = "C1_cubic")]
    pub c1_cubic: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub eps0: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Which `C₁` convention feeds the threshold formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum C1Convention {
    #[default]
    Bilinear,
    Cubic,
}

impl ConstantEstimates {
    pub fn c1(&self, conv: C1Convention) -> f64 {
        match conv {
            C1Convention::Bilinear => self.c1_bilinear,
            C1Convention::Cubic => self.c1_cubic,
        }
    }
}

pub fn estimate_constants<S: Scalar>(b: &Bracket<S>, eps0: S, budget: Budget, seed: u64) -> Result<ConstantEstimates> {
    let plain = NormVariant::Plain;
    let a = localized_norm(b.cochain(), eps0, budget, plain, derive_seed(seed, 1))?.value;
    let phi = antisymmetry_defect(b);
    let phi_norm = localized_norm(&phi, eps0, budget, plain, derive_seed(seed, 2))?.value;
    let cubic = localized_norm_cubic(&phi, eps0, budget, derive_seed(seed, 3))?.value;
    let psi = jacobiator(b);
    let psi_norm = localized_norm(&psi, eps0, budget, plain, derive_seed(seed, 4))?.value;
    Ok(ConstantEstimates {
        a: a.f64(),
        c1_bilinear: 0.5 * phi_norm.f64(),
        c1_cubic: cubic.f64(),
        c2: psi_norm.f64() / 6.0,
        eps0: eps0.f64(),
        samples: budget.samples,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdVariant {
    #[default]
    Standard,
    Refined,
}

/// The admissible radius and its branches. `None` marks an inactive branch
/// (a zero constant), i.e. `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub eps_star: f64,
    #[serde(rename = "branch_A")]
    pub branch_a: Option<f64>,
    #[serde(rename = "branch_C1")]
    pub branch_c1: Option<f64>,
    pub branch_eps0: f64,
    pub variant: ThresholdVariant,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    /// Radius actually implied by the term-wise conditions
    /// `(6A/5)ε < 1/4` and `(12C₁/5)ε² < 1/4`, i.e. `min{5/(24A), √(5/(48C₁)), ε₀}`.
    pub termwise_eps: f64,
    #[serde(rename = "termwise_branch_A")]
    pub termwise_branch_a: Option<f64>,
    #[serde(rename = "termwise_branch_C1")]
    pub termwise_branch_c1: Option<f64>,
    /// `(6A/5)ε + (12C₁/5)ε²` evaluated at `eps_star`.
    pub m_bound_at_eps_star: f64,
}

impl ThresholdReport {
    pub fn m_bound_at(&self, eps: f64) -> f64 {
        expanded_m_bound(self.a, self.c1, eps)
    }
}

fn branch(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

pub fn compute_eps_star(a: f64, c1: f64, eps0: f64, variant: ThresholdVariant) -> Result<ThresholdReport> {
    if !(a >= 0.0) || !(c1 >= 0.0) {
        return Err(Error::InvalidParameter(format!("constants must be nonnegative, got A={a}, C1={c1}")));
    }
    if !(eps0 > 0.0) {
        return Err(Error::InvalidRadius(eps0));
    }
    let (na, nc) = match variant {
        ThresholdVariant::Standard => (24.0, 48.0),
        ThresholdVariant::Refined => (12.0, 24.0),
    };
    let branch_a = branch(na, 5.0 * a);
    let branch_c1 = branch(nc, 5.0 * c1).map(f64::sqrt);
    let eps_star = [branch_a, branch_c1].iter().flatten().fold(eps0, |m, &b| m.min(b));
    let termwise_branch_a = branch(5.0, 24.0 * a);
    let termwise_branch_c1 = branch(5.0, 48.0 * c1).map(f64::sqrt);
    let termwise_eps = [termwise_branch_a, termwise_branch_c1].iter().flatten().fold(eps0, |m, &b| m.min(b));
    Ok(ThresholdReport {
        eps_star,
        branch_a,
        branch_c1,
        branch_eps0: eps0,
        variant,
        a,
        c1,
        termwise_eps,
        termwise_branch_a,
        termwise_branch_c1,
        m_bound_at_eps_star: expanded_m_bound(a, c1, eps_star),
    })
}

/// `(6A/5)ε + (12C₁/5)ε²`.
pub fn expanded_m_bound(a: f64, c1: f64, eps: f64) -> f64 {
    1.2 * a * eps + 2.4 * c1 * eps * eps
}

/// `4ε(A + C₁)`.
pub fn linear_m_bound(a: f64, c1: f64, eps: f64) -> f64 {
    4.0 * eps * (a + c1)
}

/// `(2/5)ε(3A + 6C₁ε)`, the bound obtained through a `‖T‖ ≤ 2ε/5` step.
pub fn stepwise_m_bound(a: f64, c1: f64, eps: f64) -> f64 {
    0.4 * eps * (3.0 * a + 6.0 * c1 * eps)
}

/// `1/(1 − m)` for `m < 1`, otherwise `None` (the series diverges).
pub fn neumann_bound(m: f64) -> Option<f64> {
    (m < 1.0).then(|| 1.0 / (1.0 - m))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MBoundPoint {
    pub eps: f64,
    pub expanded: f64,
    pub linear: f64,
    pub stepwise: f64,
    /// `(6A/5)ε < 1/4`
    pub linear_term_ok: bool,
    /// `(12C₁/5)ε² < 1/4`
    pub quadratic_term_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MBoundCurve {
    pub points: Vec<MBoundPoint>,
    /// First grid value where the expanded bound reaches `1/2`.
    pub expanded_crosses_half: Option<f64>,
    pub linear_crosses_half: Option<f64>,
    pub stepwise_crosses_half: Option<f64>,
}

pub fn m_bound_curve(a: f64, c1: f64, eps_grid: &[f64]) -> Result<MBoundCurve> {
    if let Some(&e) = eps_grid.iter().find(|e| !(**e > 0.0)) {
        return Err(Error::InvalidRadius(e));
    }
    let points: Vec<MBoundPoint> = eps_grid
        .iter()
        .map(|&eps| MBoundPoint {
            eps,
            expanded: expanded_m_bound(a, c1, eps),
            linear: linear_m_bound(a, c1, eps),
            stepwise: stepwise_m_bound(a, c1, eps),
            linear_term_ok: 1.2 * a * eps < 0.25,
            quadratic_term_ok: 2.4 * c1 * eps * eps < 0.25,
        })
        .collect();
    let first = |f: fn(&MBoundPoint) -> f64| points.iter().find(|p| f(p) >= 0.5).map(|p| p.eps);
    Ok(MBoundCurve {
        expanded_crosses_half: first(|p| p.expanded),
        linear_crosses_half: first(|p| p.linear),
        stepwise_crosses_half: first(|p| p.stepwise),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_branches() {
        let r = compute_eps_star(2.0, 3.0, 10.0, ThresholdVariant::Standard).unwrap();
        assert_eq!(r.branch_a, Some(2.4));
        assert!((r.branch_c1.unwrap() - 3.2f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.eps_star, r.branch_c1.unwrap());
        assert!((r.m_bound_at_eps_star - 27.33).abs() < 0.01);
    }

    #[test]
    fn degenerate_constants_leave_eps0() {
        let r = compute_eps_star(0.0, 0.0, 1.0, ThresholdVariant::Standard).unwrap();
        assert_eq!(r.eps_star, 1.0);
        assert_eq!(r.branch_a, None);
        assert_eq!(r.branch_c1, None);
        let r = compute_eps_star(2.0, 3.0, 0.5, ThresholdVariant::Standard).unwrap();
        assert_eq!(r.eps_star, 0.5);
    }

    #[test]
    fn refined_variant_halves_numerators() {
        let r = compute_eps_star(2.0, 3.0, 10.0, ThresholdVariant::Refined).unwrap();
        assert_eq!(r.branch_a, Some(1.2));
        assert!((r.branch_c1.unwrap() - 1.6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn termwise_radius_satisfies_both_conditions() {
        let r = compute_eps_star(2.0, 3.0, 10.0, ThresholdVariant::Standard).unwrap();
        let e = r.termwise_eps * (1.0 - 1e-12);
        assert!(1.2 * 2.0 * e < 0.25 + 1e-15);
        assert!(2.4 * 3.0 * e * e < 0.25 + 1e-15);
        assert!(expanded_m_bound(2.0, 3.0, e) < 0.5);
    }

    #[test]
    fn eps_star_monotone_in_constants() {
        let grid: Vec<f64> = (0..10).map(|i| 0.25 * i as f64).collect();
        for &a in &grid {
            for &c in &grid {
                let base = compute_eps_star(a, c, 5.0, ThresholdVariant::Standard).unwrap().eps_star;
                let more_a = compute_eps_star(a + 0.3, c, 5.0, ThresholdVariant::Standard).unwrap().eps_star;
                let more_c = compute_eps_star(a, c + 0.3, 5.0, ThresholdVariant::Standard).unwrap().eps_star;
                assert!(more_a <= base && more_c <= base);
            }
        }
    }

    #[test]
    fn curve_flags_crossings() {
        let grid: Vec<f64> = (1..=200).map(|i| i as f64 * 0.01).collect();
        let c = m_bound_curve(2.0, 3.0, &grid).unwrap();
        // 2.4ε + 7.2ε² = 1/2 at ε ≈ 0.1451
        assert!((c.expanded_crosses_half.unwrap() - 0.15).abs() < 1e-12);
        // 20ε = 1/2 at ε = 0.025
        assert!((c.linear_crosses_half.unwrap() - 0.03).abs() < 1e-12);
        let z = m_bound_curve(0.0, 0.0, &grid).unwrap();
        assert!(z.points.iter().all(|p| p.expanded == 0.0 && p.linear == 0.0));
        assert!(z.expanded_crosses_half.is_none());
    }

    #[test]
    fn neumann_series_bound() {
        let b = neumann_bound(0.49).unwrap();
        assert!((b - 1.0 / 0.51).abs() < 1e-15 && b <= 2.0);
        assert!(neumann_bound(1.0).is_none());
    }
}
