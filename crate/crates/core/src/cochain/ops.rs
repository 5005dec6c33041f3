//! Operations on cochains: the Chevalley–Eilenberg differential, the radial
//! homotopy, defect extraction and the quadratic remainder.

use super::quadrature::{gauss_legendre, nodes_for_degree};
use super::{Bracket, Cochain, CochainKind, Degree};
use crate::error::{Error, Result};
use crate::quaternion::ModuleVector;
use crate::scalar::Scalar;

const KIND_PROBE_SEED: u64 = 0x5eed_c0c4;

/// How the radial integral `∫₀¹ t^(k−1) ω(t·…) dt` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "nodes")]
pub enum Integration {
    /// Closed form for multilinear input; otherwise the smallest Gauss rule
    /// that is exact for the tracked polynomial degree, capped at `max_nodes`.
    Auto { max_nodes: usize },
    /// Always use an `n`-node Gauss–Legendre rule.
    Fixed(usize),
}

impl Default for Integration {
    fn default() -> Self {
        Integration::Auto { max_nodes: 16 }
    }
}

pub fn zero<S: Scalar>(arity: usize, dim: usize) -> Cochain<S> {
    Cochain::multilinear(arity, dim, "0", move |_| ModuleVector::zeros(dim)).with_cost(0.0)
}

/// The identity 1-cochain `x ↦ x`.
pub fn identity<S: Scalar>(dim: usize) -> Cochain<S> {
    Cochain::multilinear(1, dim, "id", |a| a[0].clone()).with_cost(0.0)
}

/// `Σ cᵢ·ωᵢ` for cochains of equal arity and dimension.
pub fn linear_combination<S: Scalar>(terms: &[(S, &Cochain<S>)]) -> Result<Cochain<S>> {
    let first = terms.first().ok_or_else(|| Error::InvalidParameter("empty combination".into()))?.1;
    let (arity, dim) = (first.arity(), first.dim());
    for (_, c) in terms {
        if c.arity() != arity {
            return Err(Error::ArityMismatch { expected: arity, got: c.arity() });
        }
        if c.dim() != dim {
            return Err(Error::DimensionMismatch(dim, c.dim()));
        }
    }
    let multilinear = terms.iter().all(|(_, c)| c.kind() == CochainKind::Multilinear);
    let degree = terms.iter().skip(1).fold(first.degree(), |d, (_, c)| d.join(c.degree()));
    let cost = terms.iter().map(|(_, c)| c.cost()).sum();
    let label = terms.iter().map(|(s, c)| format!("{s}·{}", c.label())).collect::<Vec<_>>().join(" + ");
    let owned: Vec<(S, Cochain<S>)> = terms.iter().map(|(s, c)| (*s, (*c).clone())).collect();
    let kind = if multilinear { CochainKind::Multilinear } else { CochainKind::PolynomialGeneral };
    Ok(Cochain::composite(arity, dim, kind, degree, cost, label, move |a| {
        let mut out = ModuleVector::zeros(dim);
        for (s, c) in &owned {
            out.axpy(*s, &c.eval(a));
        }
        out
    }))
}

/// Chevalley–Eilenberg differential of an arity-`k` cochain:
///
/// `(dω)(x₀…x_k) = Σᵢ (−1)ⁱ B(xᵢ, ω(…x̂ᵢ…)) + Σ_{i<j} (−1)^{i+j} ω(B(xᵢ,xⱼ), …x̂ᵢ…x̂ⱼ…)`.
pub fn ce_differential<S: Scalar>(b: &Bracket<S>, omega: &Cochain<S>) -> Result<Cochain<S>> {
    let k = omega.arity();
    if k < 1 {
        return Err(Error::ArityMismatch { expected: 1, got: 0 });
    }
    let bc = b.cochain().clone();
    if bc.dim() != omega.dim() {
        return Err(Error::DimensionMismatch(bc.dim(), omega.dim()));
    }
    let dim = omega.dim();
    let n = k + 1;
    let pairs = n * (n - 1) / 2;
    let cost = (n + pairs) as f64 * (bc.cost() + omega.cost());
    let both_ml = bc.kind() == CochainKind::Multilinear && omega.kind() == CochainKind::Multilinear;
    let degree = if bc.kind() == CochainKind::Multilinear {
        let d = omega.degree();
        Degree {
            total: d.total.and_then(|t| Some(t + d.slot?)),
            slot: d.slot.map(|s| s.max(1)),
        }
    } else {
        Degree::UNKNOWN
    };
    let kind = if both_ml { CochainKind::Multilinear } else { CochainKind::PolynomialGeneral };
    let label = format!("d({})", omega.label());
    let w = omega.clone();
    let out = Cochain::composite(n, dim, kind, degree, cost, label, move |x| {
        let mut acc = ModuleVector::zeros(dim);
        let mut rest: Vec<&ModuleVector<S>> = Vec::with_capacity(n);
        for i in 0..n {
            rest.clear();
            rest.extend((0..n).filter(|&l| l != i).map(|l| x[l]));
            let inner = w.eval(&rest);
            let term = bc.eval(&[x[i], &inner]);
            acc.axpy(sign(i), &term);
        }
        drop(rest);
        for i in 0..n {
            for j in (i + 1)..n {
                let bij = bc.eval(&[x[i], x[j]]);
                let mut rest: Vec<&ModuleVector<S>> = Vec::with_capacity(n - 1);
                rest.push(&bij);
                rest.extend((0..n).filter(|&l| l != i && l != j).map(|l| x[l]));
                let term = w.eval(&rest);
                acc.axpy(sign(i + j), &term);
            }
        }
        acc
    });
    Ok(if both_ml { out.confirm_kind(KIND_PROBE_SEED) } else { out })
}

#[inline]
fn sign<S: Scalar>(p: usize) -> S {
    if p % 2 == 0 {
        S::one()
    } else {
        -S::one()
    }
}

/// Radial homotopy of a 3-cochain: `(TΘ)(x,y) = ∫₀¹ t² Θ(tx, ty, t(x+y)) dt`.
pub fn radial_homotopy<S: Scalar>(theta: &Cochain<S>, integration: Integration) -> Result<Cochain<S>> {
    if theta.arity() != 3 {
        return Err(Error::ArityMismatch { expected: 3, got: theta.arity() });
    }
    radial_homotopy_any(theta, integration)
}

/// Radial homotopy in any arity `k ≥ 2`:
/// `(Tω)(x₁…x_{k−1}) = ∫₀¹ t^(k−1) ω(tx₁, …, tx_{k−1}, t·Σxᵢ) dt`.
///
/// For multilinear `ω` the integrand is `t^(2k−1)·ω(x₁…, Σxᵢ)`, so the closed
/// form `ω(x₁…, Σxᵢ)/(2k)` is used under [`Integration::Auto`].
pub fn radial_homotopy_any<S: Scalar>(omega: &Cochain<S>, integration: Integration) -> Result<Cochain<S>> {
    let k = omega.arity();
    if k < 2 {
        return Err(Error::ArityMismatch { expected: 2, got: k });
    }
    let dim = omega.dim();
    let d = omega.degree();
    let degree = Degree {
        total: d.total,
        slot: match (d.slot, d.total) {
            (Some(s), Some(t)) => Some((2 * s).min(t)),
            (Some(s), None) => Some(2 * s),
            _ => None,
        },
    };
    let label = format!("T({})", omega.label());
    let w = omega.clone();
    let closed = matches!(integration, Integration::Auto { .. }) && omega.kind() == CochainKind::Multilinear;
    if closed {
        let inv = S::one() / S::c((2 * k) as f64);
        return Ok(Cochain::composite(k - 1, dim, CochainKind::PolynomialGeneral, degree, w.cost(), label, move |x| {
            let s = sum(x, dim);
            let mut args: Vec<&ModuleVector<S>> = x.to_vec();
            args.push(&s);
            w.eval(&args).scale(inv)
        }));
    }
    let n = match integration {
        Integration::Fixed(n) => n.max(1),
        Integration::Auto { max_nodes } => nodes_for_degree(k, d.total, max_nodes.max(1)),
    };
    let (nodes, weights) = gauss_legendre::<S>(n);
    let cost = n as f64 * w.cost();
    Ok(Cochain::composite(k - 1, dim, CochainKind::PolynomialGeneral, degree, cost, label, move |x| {
        let s = sum(x, dim);
        let mut acc = ModuleVector::zeros(dim);
        let mut scaled: Vec<ModuleVector<S>> = Vec::with_capacity(k);
        for (&t, &wq) in nodes.iter().zip(&weights) {
            scaled.clear();
            scaled.extend(x.iter().map(|v| v.scale(t)));
            scaled.push(s.scale(t));
            let refs: Vec<&ModuleVector<S>> = scaled.iter().collect();
            acc.axpy(wq * t.powi(k as i32 - 1), &w.eval(&refs));
        }
        acc
    }))
}

fn sum<S: Scalar>(x: &[&ModuleVector<S>], dim: usize) -> ModuleVector<S> {
    let mut s = ModuleVector::zeros(dim);
    for v in x {
        s.axpy(S::one(), v);
    }
    s
}

/// `Jac(x,y,z) = B(x,B(y,z)) + B(y,B(z,x)) + B(z,B(x,y))`.
pub fn jacobiator<S: Scalar>(b: &Bracket<S>) -> Cochain<S> {
    let bc = b.cochain().clone();
    let dim = bc.dim();
    let ml = bc.kind() == CochainKind::Multilinear;
    let (kind, degree) = if ml {
        (CochainKind::Multilinear, Degree::multilinear(3))
    } else {
        (CochainKind::PolynomialGeneral, Degree::UNKNOWN)
    };
    let label = format!("Jac({})", b.label());
    Cochain::composite(3, dim, kind, degree, 6.0 * bc.cost(), label, move |a| {
        let (x, y, z) = (a[0], a[1], a[2]);
        let mut out = bc.eval(&[x, &bc.eval(&[y, z])]);
        out.axpy(S::one(), &bc.eval(&[y, &bc.eval(&[z, x])]));
        out.axpy(S::one(), &bc.eval(&[z, &bc.eval(&[x, y])]));
        out
    })
}

/// `φ(x,y) = B(x,y) + B(y,x)`.
pub fn antisymmetry_defect<S: Scalar>(b: &Bracket<S>) -> Cochain<S> {
    let bc = b.cochain().clone();
    let dim = bc.dim();
    let label = format!("φ({})", b.label());
    Cochain::composite(2, dim, bc.kind(), bc.degree(), 2.0 * bc.cost(), label, move |a| {
        &bc.eval(&[a[0], a[1]]) + &bc.eval(&[a[1], a[0]])
    })
}

/// `Q(Φ)(x,y,z) = −Σ_cyc Φ(x, Φ(y,z)) + Σ_cyc B(Φ(x,y), z)`.
pub fn quadratic_remainder<S: Scalar>(phi: &Cochain<S>, b: &Bracket<S>) -> Result<Cochain<S>> {
    if phi.arity() != 2 {
        return Err(Error::ArityMismatch { expected: 2, got: phi.arity() });
    }
    let bc = b.cochain().clone();
    if bc.dim() != phi.dim() {
        return Err(Error::DimensionMismatch(bc.dim(), phi.dim()));
    }
    let dim = phi.dim();
    let p = phi.clone();
    let cost = 9.0 * p.cost() + 3.0 * bc.cost();
    let label = format!("Q({})", phi.label());
    Ok(Cochain::composite(3, dim, CochainKind::PolynomialGeneral, Degree::UNKNOWN, cost, label, move |a| {
        let mut out = ModuleVector::zeros(dim);
        for (x, y, z) in [(a[0], a[1], a[2]), (a[1], a[2], a[0]), (a[2], a[0], a[1])] {
            out.axpy(-S::one(), &p.eval(&[x, &p.eval(&[y, z])]));
            out.axpy(S::one(), &bc.eval(&[&p.eval(&[x, y]), z]));
        }
        out
    }))
}

/// Defect operator on 3-cochains, `M(Θ) = T(dΘ) + d(TΘ) − Θ`.
///
/// On the polynomial cochains represented here the radial trace vanishes, so
/// this is the full `M` of the homotopy identity `Td + dT = Id − Π + M`.
pub fn defect_operator<S: Scalar>(b: &Bracket<S>, theta: &Cochain<S>, integration: Integration) -> Result<Cochain<S>> {
    if theta.arity() != 3 {
        return Err(Error::ArityMismatch { expected: 3, got: theta.arity() });
    }
    let td = radial_homotopy_any(&ce_differential(b, theta)?, integration)?;
    let dt = ce_differential(b, &radial_homotopy(theta, integration)?)?;
    let mut m = linear_combination(&[(S::one(), &td), (S::one(), &dt), (-S::one(), theta)])?;
    m = m.with_label(format!("M({})", theta.label()));
    Ok(if m.kind() == CochainKind::Multilinear { m.confirm_kind(KIND_PROBE_SEED) } else { m })
}

/// Radial trace `Π(Θ)(x,y,·) = lim_{t↓0} t²Θ(tx, ty, t(x+y))`, extrapolated
/// from `t_sequence` by Aitken's Δ² on the last three values.
///
/// The returned cochain has arity 3 (the third argument is unused). Random
/// probes are run up front: a limit that moves by more than `1e-6` between
/// consecutive extrapolations yields [`Error::NonConvergent`], and a limit that
/// converges but does not vanish yields [`Error::NonzeroTrace`].
pub fn radial_trace<S: Scalar>(theta: &Cochain<S>, t_sequence: &[S], seed: u64) -> Result<Cochain<S>> {
    if theta.arity() != 3 {
        return Err(Error::ArityMismatch { expected: 3, got: theta.arity() });
    }
    if t_sequence.len() < 4
        || t_sequence.iter().any(|t| !(*t > S::zero()))
        || t_sequence.windows(2).any(|w| !(w[1] < w[0]))
    {
        return Err(Error::BadTSequence);
    }
    let dim = theta.dim();
    let ts: Vec<S> = t_sequence.to_vec();
    let th = theta.clone();
    let trace = move |x: &ModuleVector<S>, y: &ModuleVector<S>| -> (ModuleVector<S>, S) {
        let s = x + y;
        let vals: Vec<ModuleVector<S>> = ts
            .iter()
            .map(|&t| th.eval(&[&x.scale(t), &y.scale(t), &s.scale(t)]).scale(t * t))
            .collect();
        let n = vals.len();
        let a = aitken(&vals[n - 4], &vals[n - 3], &vals[n - 2]);
        let b = aitken(&vals[n - 3], &vals[n - 2], &vals[n - 1]);
        let spread = (&a - &b).norm();
        (b, spread)
    };
    let tol = S::c(1e-6);
    for i in 0..8u64 {
        let p = super::random_points::<S>(2, dim, S::one(), seed, i);
        let (limit, spread) = trace(&p[0], &p[1]);
        if !(spread <= tol) {
            return Err(Error::NonConvergent { spread: spread.f64() });
        }
        if !(limit.norm() <= tol) {
            return Err(Error::NonzeroTrace { magnitude: limit.norm().f64() });
        }
    }
    let cost = t_sequence.len() as f64 * theta.cost();
    let label = format!("Π({})", theta.label());
    Ok(Cochain::composite(3, dim, CochainKind::PolynomialGeneral, Degree::UNKNOWN, cost, label, move |a| {
        trace(a[0], a[1]).0
    }))
}

/// Componentwise Aitken extrapolation; falls back to the last value where the
/// second difference vanishes.
fn aitken<S: Scalar>(a: &ModuleVector<S>, b: &ModuleVector<S>, c: &ModuleVector<S>) -> ModuleVector<S> {
    let (ra, rb, rc) = (a.to_reals(), b.to_reals(), c.to_reals());
    let out: Vec<S> = ra
        .iter()
        .zip(&rb)
        .zip(&rc)
        .map(|((&a, &b), &c)| {
            let den = c - b - (b - a);
            let scale = a.abs().max(b.abs()).max(c.abs());
            if den.abs() <= S::epsilon() * S::c(16.0) * scale || den == S::zero() {
                c
            } else {
                c - (c - b) * (c - b) / den
            }
        })
        .collect();
    ModuleVector::from_reals(&out)
}
