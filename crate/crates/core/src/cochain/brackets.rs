//! Concrete brackets and random test cochains.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{antisymmetry_violation, right_linearity_defect, Cochain};
use crate::error::{Error, Result};
use crate::quaternion::{qmul, ModuleVector, Quaternion};
use crate::scalar::Scalar;

const FLAG_SAMPLES: usize = 64;
const FLAG_SEED: u64 = 0xf1a9_5eed;

/// Named bracket families, as selected from configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum BracketFamily {
    /// Componentwise quaternion commutator on ℍᵐ.
    Commutator { m: usize },
    /// The γ-deformed bracket on ℍ², embedded as `(r, 0)`.
    Gamma { gamma: f64 },
    /// Componentwise `pq − qp + γ·p̄q` on ℍᵐ.
    GammaCommutator { gamma: f64, m: usize },
    /// Componentwise Jordan product `(pq + qp)/2`.
    Symmetric { m: usize },
}

impl BracketFamily {
    pub fn build<S: Scalar>(&self) -> Result<Bracket<S>> {
        match *self {
            BracketFamily::Commutator { m } => commutator(m),
            BracketFamily::Gamma { gamma } => Ok(gamma_bracket(S::c(gamma))),
            BracketFamily::GammaCommutator { gamma, m } => gamma_commutator(S::c(gamma), m),
            BracketFamily::Symmetric { m } => symmetric_product(m),
        }
    }
}

/// A 2-cochain together with sampled structural flags.
#[derive(Debug, Clone)]
pub struct Bracket<S> {
    cochain: Cochain<S>,
    right_h_linear: bool,
    antisymmetric: bool,
    label: String,
}

impl<S: Scalar> Bracket<S> {
    /// Wraps an arity-2 cochain; both flags are decided by random tests at a
    /// relative tolerance of `1e-10` (or a few ulps for `f32`).
    pub fn new(cochain: Cochain<S>, label: impl Into<String>) -> Result<Self> {
        Self::with_samples(cochain, label, FLAG_SAMPLES)
    }

    /// As [`Bracket::new`] with an explicit number of test samples per flag.
    pub fn with_samples(cochain: Cochain<S>, label: impl Into<String>, samples: usize) -> Result<Self> {
        if cochain.arity() != 2 {
            return Err(Error::ArityMismatch { expected: 2, got: cochain.arity() });
        }
        let tol = flag_tolerance::<S>();
        let antisymmetric = antisymmetry_violation(&cochain, samples, S::one(), FLAG_SEED) <= tol;
        let right_h_linear = right_linearity_defect(&cochain, samples, FLAG_SEED) <= tol;
        let label = label.into();
        Ok(Self { cochain: cochain.with_label(label.clone()), right_h_linear, antisymmetric, label })
    }

    #[inline]
    pub fn apply(&self, x: &ModuleVector<S>, y: &ModuleVector<S>) -> ModuleVector<S> {
        self.cochain.eval(&[x, y])
    }

    pub fn cochain(&self) -> &Cochain<S> {
        &self.cochain
    }

    pub fn dim(&self) -> usize {
        self.cochain.dim()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn right_h_linear(&self) -> bool {
        self.right_h_linear
    }

    pub fn antisymmetric(&self) -> bool {
        self.antisymmetric
    }
}

pub(crate) fn flag_tolerance<S: Scalar>() -> S {
    S::c(1e-10).max(S::epsilon() * S::c(64.0))
}

fn check_dim(m: usize) -> Result<()> {
    if m < 1 {
        Err(Error::InvalidDimension(m))
    } else {
        Ok(())
    }
}

fn componentwise<S: Scalar>(
    m: usize,
    label: String,
    f: impl Fn(Quaternion<S>, Quaternion<S>) -> Quaternion<S> + Send + Sync + 'static,
) -> Result<Bracket<S>> {
    check_dim(m)?;
    let c = Cochain::multilinear(2, m, label.clone(), move |a| {
        ModuleVector::from_components(a[0].components().iter().zip(a[1].components()).map(|(&p, &q)| f(p, q)))
    });
    Bracket::new(c, label)
}

/// `[x, y]ᵢ = xᵢyᵢ − yᵢxᵢ`.
pub fn commutator<S: Scalar>(m: usize) -> Result<Bracket<S>> {
    componentwise(m, format!("commutator(m={m})"), |p, q| qmul(p, q) - qmul(q, p))
}

/// `[p, q] = pq − qp + γ·p̄q` componentwise. Reduces to the commutator at γ = 0.
pub fn gamma_commutator<S: Scalar>(gamma: S, m: usize) -> Result<Bracket<S>> {
    componentwise(m, format!("gamma_commutator(gamma={gamma}, m={m})"), move |p, q| {
        qmul(p, q) - qmul(q, p) + qmul(p.conj(), q).scale(gamma)
    })
}

/// `x∘y = (xy + yx)/2` componentwise.
pub fn symmetric_product<S: Scalar>(m: usize) -> Result<Bracket<S>> {
    let half = S::c(0.5);
    componentwise(m, format!("symmetric(m={m})"), move |p, q| (qmul(p, q) + qmul(q, p)).scale(half))
}

/// `[(a,b),(c,d)]_γ = (ad − bc) + γ(āc − b̄d)` on ℍ², returned as `(r, 0)`.
pub fn gamma_bracket<S: Scalar>(gamma: S) -> Bracket<S> {
    let label = format!("gamma(gamma={gamma})");
    let c = Cochain::multilinear(2, 2, label.clone(), move |a| {
        let (x, y) = (a[0], a[1]);
        let (p, q) = (x[0], x[1]);
        let (r, s) = (y[0], y[1]);
        let val = qmul(p, s) - qmul(q, r) + (qmul(p.conj(), r) - qmul(q.conj(), s)).scale(gamma);
        ModuleVector::from_components([val, Quaternion::zero()])
    });
    Bracket::new(c, label).expect("arity 2 by construction")
}

/// A random real-multilinear map `(ℍᵐ)ᵏ → ℍᵐ` with i.i.d. Gaussian
/// coefficients scaled by `(4m)^(−k/2)`.
///
/// With `right_linear_last`, the map is instead right ℍ-linear in its last
/// argument: `ω(…, y)ᵢ = Σⱼ Lᵢⱼ(…)·yⱼ` with `Lᵢⱼ` real-multilinear.
pub fn random_multilinear<S: Scalar>(arity: usize, dim: usize, seed: u64, right_linear_last: bool) -> Result<Cochain<S>> {
    check_dim(dim)?;
    if arity < 1 {
        return Err(Error::ArityMismatch { expected: 1, got: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 4 * dim;
    let label = format!("random{}(k={arity}, seed={seed})", if right_linear_last { "_rl" } else { "" });
    if !right_linear_last {
        let len = n.pow(arity as u32 + 1);
        let scale = (n as f64).powf(-(arity as f64) / 2.0);
        let t: Vec<S> = (0..len).map(|_| S::c(scale * Distribution::<f64>::sample(&StandardNormal, &mut rng))).collect();
        return Ok(Cochain::multilinear(arity, dim, label, move |a| {
            let mut cur = t.clone();
            for x in a.iter().rev() {
                cur = contract_last(&cur, &x.to_reals());
            }
            ModuleVector::from_reals(&cur)
        }));
    }
    // Lᵢⱼ: quaternion-valued, real-multilinear in the first k−1 arguments.
    let lead = n.pow(arity as u32 - 1);
    let len = dim * dim * 4 * lead;
    let scale = (n as f64).powf(-(arity as f64) / 2.0);
    let t: Vec<S> = (0..len).map(|_| S::c(scale * Distribution::<f64>::sample(&StandardNormal, &mut rng))).collect();
    Ok(Cochain::multilinear(arity, dim, label, move |a| {
        let mut cur = t.clone();
        for x in a[..a.len() - 1].iter().rev() {
            cur = contract_last(&cur, &x.to_reals());
        }
        let y = a[a.len() - 1];
        let mut out = ModuleVector::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                let o = 4 * (i * dim + j);
                let l = Quaternion::from_array([cur[o], cur[o + 1], cur[o + 2], cur[o + 3]]);
                out[i] += qmul(l, y[j]);
            }
        }
        out
    }))
}

/// Contracts the trailing index of a row-major tensor with `v`.
fn contract_last<S: Scalar>(t: &[S], v: &[S]) -> Vec<S> {
    let n = v.len();
    t.chunks_exact(n).map(|row| row.iter().zip(v).map(|(&a, &b)| a * b).sum()).collect()
}
