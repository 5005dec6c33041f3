//! Cochains `Xᵏ → X` as composable evaluator closures.
//!
//! Images under the radial homotopy and Neumann iterates are polynomial maps
//! that are not multilinear, so no coefficient-tensor representation is
//! attempted. Each cochain carries an upper bound on its polynomial degree
//! (used to pick an exact quadrature order) and an estimate of how many
//! primitive evaluations a single call costs.

mod brackets;
mod norm;
mod ops;
pub mod quadrature;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::quaternion::{derive_seed, sample_ball_with, BallMode, ModuleVector, Quaternion};
use crate::scalar::Scalar;

pub use brackets::{
    commutator, gamma_bracket, gamma_commutator, random_multilinear, symmetric_product, Bracket,
    BracketFamily,
};
pub use norm::{localized_norm, localized_norm_cubic, sup_ratio, Budget, NormEstimate, NormVariant, Normalization};
pub use ops::{
    antisymmetry_defect, ce_differential, defect_operator, identity, jacobiator, linear_combination,
    quadratic_remainder, radial_homotopy, radial_homotopy_any, radial_trace, zero, Integration,
};

pub type Evaluator<S> = Arc<dyn Fn(&[&ModuleVector<S>]) -> ModuleVector<S> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CochainKind {
    Multilinear,
    PolynomialGeneral,
}

/// Upper bounds on the polynomial degree of a cochain: total degree under a
/// uniform scaling of all arguments, and the largest degree in a single
/// argument. `None` means no bound is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Degree {
    pub total: Option<u32>,
    pub slot: Option<u32>,
}

impl Degree {
    pub const UNKNOWN: Degree = Degree { total: None, slot: None };

    pub fn multilinear(arity: usize) -> Self {
        Degree { total: Some(arity as u32), slot: Some(1) }
    }

    pub fn join(self, o: Degree) -> Degree {
        let mx = |a: Option<u32>, b: Option<u32>| Some(a?.max(b?));
        Degree { total: mx(self.total, o.total), slot: mx(self.slot, o.slot) }
    }
}

#[derive(Clone)]
pub struct Cochain<S> {
    arity: usize,
    dim: usize,
    kind: CochainKind,
    degree: Degree,
    cost: f64,
    label: String,
    eval: Evaluator<S>,
}

impl<S> fmt::Debug for Cochain<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cochain")
            .field("label", &self.label)
            .field("arity", &self.arity)
            .field("dim", &self.dim)
            .field("kind", &self.kind)
            .field("degree", &self.degree)
            .field("cost", &self.cost)
            .finish()
    }
}

impl<S: Scalar> Cochain<S> {
    /// A primitive multilinear map given by a closed formula.
    ///
    /// The caller vouches for multilinearity; `probe_multilinear` can check it.
    pub fn multilinear<F>(arity: usize, dim: usize, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[&ModuleVector<S>]) -> ModuleVector<S> + Send + Sync + 'static,
    {
        Self {
            arity,
            dim,
            kind: CochainKind::Multilinear,
            degree: Degree::multilinear(arity),
            cost: 1.0,
            label: label.into(),
            eval: Arc::new(f),
        }
    }

    /// A general (not necessarily polynomial) primitive map.
    pub fn general<F>(arity: usize, dim: usize, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[&ModuleVector<S>]) -> ModuleVector<S> + Send + Sync + 'static,
    {
        Self {
            arity,
            dim,
            kind: CochainKind::PolynomialGeneral,
            degree: Degree::UNKNOWN,
            cost: 1.0,
            label: label.into(),
            eval: Arc::new(f),
        }
    }

    pub(crate) fn composite<F>(
        arity: usize,
        dim: usize,
        kind: CochainKind,
        degree: Degree,
        cost: f64,
        label: String,
        f: F,
    ) -> Self
    where
        F: Fn(&[&ModuleVector<S>]) -> ModuleVector<S> + Send + Sync + 'static,
    {
        Self { arity, dim, kind, degree, cost, label, eval: Arc::new(f) }
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.arity
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn kind(&self) -> CochainKind {
        self.kind
    }

    #[inline]
    pub fn degree(&self) -> Degree {
        self.degree
    }

    /// Estimated number of primitive evaluations per call.
    #[inline]
    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_cost(mut self, cost: f64) -> Self {
        self.cost = cost;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    #[inline]
    pub fn eval(&self, args: &[&ModuleVector<S>]) -> ModuleVector<S> {
        debug_assert_eq!(args.len(), self.arity, "arity mismatch in {}", self.label);
        (self.eval)(args)
    }

    /// Convenience wrapper taking owned arguments.
    pub fn eval_owned(&self, args: &[ModuleVector<S>]) -> ModuleVector<S> {
        let refs: Vec<&ModuleVector<S>> = args.iter().collect();
        self.eval(&refs)
    }

    /// The cochain `args ↦ self(args)·q`.
    pub fn right_mul(&self, q: Quaternion<S>) -> Self {
        let inner = self.clone();
        Self::composite(
            self.arity,
            self.dim,
            self.kind,
            self.degree,
            self.cost,
            format!("({})·q", self.label),
            move |a| inner.eval(a).right_mul(q),
        )
    }

    pub fn scaled(&self, s: S) -> Self {
        let inner = self.clone();
        Self::composite(
            self.arity,
            self.dim,
            self.kind,
            self.degree,
            self.cost,
            format!("{}·({})", s, self.label),
            move |a| inner.eval(a).scale(s),
        )
    }

    /// Wraps the evaluator in a cache keyed on the exact bit patterns of the
    /// arguments. The cache is private to the returned cochain and is cleared
    /// whenever it reaches `capacity` entries.
    pub fn memoized(&self, capacity: usize) -> Self {
        let inner = self.clone();
        let cache: Arc<Mutex<HashMap<Vec<u64>, ModuleVector<S>>>> = Arc::default();
        Self::composite(
            self.arity,
            self.dim,
            self.kind,
            self.degree,
            self.cost,
            self.label.clone(),
            move |a| {
                let key: Vec<u64> = a
                    .iter()
                    .flat_map(|v| v.components().iter().flat_map(|q| q.to_array()))
                    .map(|s| s.f64().to_bits())
                    .collect();
                if let Some(v) = cache.lock().expect("memo cache poisoned").get(&key) {
                    return v.clone();
                }
                let v = inner.eval(a);
                let mut c = cache.lock().expect("memo cache poisoned");
                if c.len() >= capacity {
                    c.clear();
                }
                c.insert(key, v.clone());
                v
            },
        )
    }

    /// Downgrades the kind to `PolynomialGeneral` unless random probes confirm
    /// multilinearity.
    pub(crate) fn confirm_kind(mut self, seed: u64) -> Self {
        if self.kind == CochainKind::Multilinear && !probe_multilinear(&self, 3, seed) {
            self.kind = CochainKind::PolynomialGeneral;
            self.degree = Degree::UNKNOWN;
        }
        self
    }
}

/// Random linearity probes in every slot: checks
/// `c(…, a·u + b·v, …) = a·c(…, u, …) + b·c(…, v, …)` to `1e-10` relative.
pub fn probe_multilinear<S: Scalar>(c: &Cochain<S>, trials: usize, seed: u64) -> bool {
    let tol = S::c(1e-10).max(S::epsilon() * S::c(64.0));
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x9e37_79b9 + t as u64));
        let args: Vec<ModuleVector<S>> =
            (0..c.arity()).map(|_| sample_ball_with(&mut rng, c.dim(), S::one(), BallMode::Sphere)).collect();
        let v = sample_ball_with(&mut rng, c.dim(), S::one(), BallMode::Sphere);
        let a: f64 = StandardNormal.sample(&mut rng);
        let b: f64 = StandardNormal.sample(&mut rng);
        let (a, b) = (S::c(a), S::c(b));
        for slot in 0..c.arity() {
            let mut mixed = args[slot].scale(a);
            mixed.axpy(b, &v);
            let with = |x: &ModuleVector<S>| {
                let refs: Vec<&ModuleVector<S>> =
                    (0..c.arity()).map(|i| if i == slot { x } else { &args[i] }).collect();
                c.eval(&refs)
            };
            let lhs = with(&mixed);
            let mut rhs = with(&args[slot]).scale(a);
            rhs.axpy(b, &with(&v));
            let scale = lhs.norm().max(rhs.norm()).max(S::one());
            if !((&lhs - &rhs).norm() <= tol * scale) {
                return false;
            }
        }
    }
    true
}

/// Largest sampled `‖c(…, y·q) − c(…, y)·q‖ / (∏‖xᵢ‖·|q|)` over `samples`
/// random points: right ℍ-linearity in the last argument.
pub fn right_linearity_defect<S: Scalar>(c: &Cochain<S>, samples: usize, seed: u64) -> S {
    let mut worst = S::zero();
    for t in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, t as u64));
        let args: Vec<ModuleVector<S>> =
            (0..c.arity()).map(|_| sample_ball_with(&mut rng, c.dim(), S::one(), BallMode::Sphere)).collect();
        let q: Quaternion<S> = crate::quaternion::gaussian_quaternion(&mut rng);
        let last = c.arity() - 1;
        let shifted = args[last].right_mul(q);
        let refs: Vec<&ModuleVector<S>> =
            (0..c.arity()).map(|i| if i == last { &shifted } else { &args[i] }).collect();
        let lhs = c.eval(&refs);
        let rhs = c.eval_owned(&args).right_mul(q);
        let denom = args.iter().map(|a| a.norm()).fold(S::one(), |p, n| p * n) * q.abs();
        let r = (&lhs - &rhs).norm() / denom;
        if r > worst || r.is_nan() {
            worst = r;
        }
    }
    worst
}

/// Largest sampled `‖c(x,y) + c(y,x)‖ / (‖x‖‖y‖)` for an arity-2 cochain.
pub fn antisymmetry_violation<S: Scalar>(c: &Cochain<S>, samples: usize, eps: S, seed: u64) -> S {
    assert_eq!(c.arity(), 2, "antisymmetry test needs an arity-2 cochain");
    let mut worst = S::zero();
    for t in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, t as u64));
        let x = sample_ball_with(&mut rng, c.dim(), eps, BallMode::Interior);
        let y = sample_ball_with(&mut rng, c.dim(), eps, BallMode::Interior);
        let s = &c.eval(&[&x, &y]) + &c.eval(&[&y, &x]);
        let r = s.norm() / (x.norm() * y.norm());
        if r > worst || r.is_nan() {
            worst = r;
        }
    }
    worst
}

/// Random points for pointwise checks, drawn from the ball of radius `eps`.
pub fn random_points<S: Scalar>(arity: usize, dim: usize, eps: S, seed: u64, index: u64) -> Vec<ModuleVector<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, index));
    (0..arity).map(|_| sample_ball_with(&mut rng, dim, eps, BallMode::Interior)).collect()
}
