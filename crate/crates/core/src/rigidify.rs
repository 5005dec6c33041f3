//! The correction pipeline: antisymmetrization, defect operator, truncated
//! Neumann inversion, the correction `Φ` and the corrected bracket
//! `{x,y} = [x,y] − Ψ(x,y) − Φ(x,y)`.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::cochain::{
    antisymmetry_defect, defect_operator, jacobiator, linear_combination, localized_norm, radial_homotopy,
    random_multilinear, random_points, Bracket, Budget, Cochain, Integration, NormEstimate, NormVariant,
};
use crate::constants::{compute_eps_star, estimate_constants, ConstantEstimates, ThresholdReport, ThresholdVariant};
use crate::error::{Error, Result};
use crate::quaternion::derive_seed;
use crate::scalar::Scalar;
use crate::verifier::{check_s_decomposition, check_s_direct_expansion, BoundCheck};

const MEMO_CAPACITY: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RigidifyConfig {
    /// Working radius.
    pub eps: f64,
    /// Radius on which the constants are estimated; defaults to `eps`.
    pub eps0: Option<f64>,
    pub neumann_order: usize,
    pub integration: Integration,
    pub budget: Budget,
    pub seed: u64,
    pub antisymmetrize_first: bool,
    /// Ceiling on primitive evaluations spent by any single estimate.
    pub max_evaluations: f64,
    pub memoize: bool,
    /// Samples for pointwise checks (Φ bound, S-decomposition).
    pub pointwise_samples: usize,
    pub variant: ThresholdVariant,
}

impl Default for RigidifyConfig {
    fn default() -> Self {
        Self {
            eps: 0.05,
            eps0: None,
            neumann_order: 2,
            integration: Integration::default(),
            budget: Budget::new(400, 10),
            seed: 1,
            antisymmetrize_first: true,
            max_evaluations: 3e8,
            memoize: true,
            pointwise_samples: 1000,
            variant: ThresholdVariant::Standard,
        }
    }
}

impl RigidifyConfig {
    pub fn eps0(&self) -> f64 {
        self.eps0.unwrap_or(self.eps)
    }
}

/// Shrinks `budget` so that a norm estimate of a cochain with the given
/// per-call cost stays under `limit` primitive evaluations.
pub fn fit_budget(budget: Budget, cost: f64, arity: usize, dim: usize, limit: f64, what: &str) -> Result<Budget> {
    let per_refine = (2 * arity * 4 * dim) as f64;
    let evals = budget.samples as f64 + budget.refine_iterations as f64 * per_refine;
    let cost = cost.max(1.0);
    if cost * evals <= limit {
        return Ok(budget);
    }
    if cost > limit {
        return Err(Error::CostExceeded { what: what.to_string(), needed: cost * evals, limit });
    }
    let f = limit / (cost * evals);
    Ok(Budget {
        samples: ((budget.samples as f64 * f).floor() as usize).max(1),
        refine_iterations: (budget.refine_iterations as f64 * f).floor() as usize,
    })
}

fn fitted_norm<S: Scalar>(
    c: &Cochain<S>,
    eps: S,
    budget: Budget,
    limit: f64,
    seed: u64,
    warnings: &mut Vec<String>,
) -> Result<NormEstimate<S>> {
    let fitted = fit_budget(budget, c.cost(), c.arity(), c.dim(), limit, c.label())?;
    if fitted != budget {
        warnings.push(format!(
            "budget for {} reduced to {} samples / {} refinements (cost {:.3e} per call)",
            short(c.label()),
            fitted.samples,
            fitted.refine_iterations,
            c.cost()
        ));
    }
    localized_norm(c, eps, fitted, NormVariant::Plain, seed)
}

fn short(label: &str) -> String {
    if label.chars().count() > 60 {
        format!("{}…", label.chars().take(60).collect::<String>())
    } else {
        label.to_string()
    }
}

/// `Ψ = φ/2` and `B₁(x,y) = (B(x,y) − B(y,x))/2 = B − Ψ`.
pub fn antisymmetrize<S: Scalar>(b: &Bracket<S>) -> Result<(Cochain<S>, Bracket<S>)> {
    let psi = antisymmetry_defect(b).scaled(S::c(0.5)).with_label(format!("Ψ({})", b.label()));
    let b1 = linear_combination(&[(S::one(), b.cochain()), (-S::one(), &psi)])?;
    let b1 = Bracket::new(b1, format!("antisym({})", b.label()))?;
    Ok((psi, b1))
}

/// Neumann iterates `S₀ … S_n` with `S_k = Σ_{j≤k} (−M)ʲ J`, built by
/// `S_k = J − M(S_{k−1})`.
pub fn neumann_apply<S: Scalar>(
    b: &Bracket<S>,
    j: &Cochain<S>,
    n: usize,
    integration: Integration,
    memoize: bool,
) -> Result<Vec<Cochain<S>>> {
    let memo = |c: Cochain<S>| if memoize { c.memoized(MEMO_CAPACITY) } else { c };
    let j = memo(j.clone());
    let mut out = vec![j.clone()];
    for k in 1..=n {
        let m = defect_operator(b, &out[k - 1], integration)?;
        let s = linear_combination(&[(S::one(), &j), (-S::one(), &m)])?.with_label(format!("S{k}"));
        out.push(memo(s));
    }
    Ok(out)
}

/// `{x,y} = B(x,y) − Ψ(x,y) − Φ(x,y)`; flags decided by `flag_samples` random tests.
pub fn make_corrected_bracket<S: Scalar>(
    b: &Bracket<S>,
    psi: Option<&Cochain<S>>,
    phi: &Cochain<S>,
    flag_samples: usize,
) -> Result<Bracket<S>> {
    let mut terms: Vec<(S, &Cochain<S>)> = vec![(S::one(), b.cochain())];
    if let Some(p) = psi {
        terms.push((-S::one(), p));
    }
    terms.push((-S::one(), phi));
    let c = linear_combination(&terms)?;
    Bracket::with_samples(c, format!("corrected({})", b.label()), flag_samples)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeumannResidual {
    pub order: usize,
    /// `‖(Id+M)S_n − J‖_ε = ‖S_n − S_{n+1}‖_ε`, or `None` when unaffordable.
    pub value: Option<f64>,
    pub cost_per_call: f64,
    pub samples_used: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RigidifyReport {
    pub bracket: String,
    pub eps: f64,
    pub eps0: f64,
    pub neumann_order: usize,
    pub antisymmetrize_first: bool,
    pub constants: ConstantEstimates,
    pub threshold: ThresholdReport,
    /// `‖Jac‖_ε` of the input bracket.
    pub defect_before: NormEstimate<f64>,
    /// `‖Jac‖_ε` of the corrected bracket.
    pub defect_after: Option<NormEstimate<f64>>,
    /// `‖J‖_ε/6` for the Jacobiator actually inverted.
    #[serde(rename = "C2_used")]
    pub c2_used: f64,
    pub phi_norm: Option<NormEstimate<f64>>,
    /// `4C₂ε`.
    pub phi_bound_claimed: f64,
    /// Largest sampled `‖Φ(x,y)‖ / (2C₂‖x‖‖y‖(‖x‖+‖y‖))`; at most 1 if the
    /// pointwise bound holds.
    pub phi_pointwise_ratio: Option<f64>,
    /// Largest `‖MΘ‖_ε/‖Θ‖_ε` over `J` and two random trilinear `Θ`.
    #[serde(rename = "M_norm")]
    pub m_norm: Option<f64>,
    pub neumann_residuals: Vec<NeumannResidual>,
    #[serde(rename = "A1")]
    pub a1: f64,
    /// `15/2·C₂`, the field-bracket constant as defined.
    #[serde(rename = "K1")]
    pub k1: f64,
    /// `max{A, 4C₂ε}`, the constant the field estimate actually uses.
    #[serde(rename = "K1_max")]
    pub k1_max: f64,
    pub corrected_antisymmetric: Option<bool>,
    pub corrected_right_h_linear: Option<bool>,
    pub s_decomposition: Option<BoundCheck>,
    pub s_direct_expansion: Option<BoundCheck>,
    pub warnings: Vec<String>,
}

pub struct RigidifyOutcome<S> {
    pub report: RigidifyReport,
    pub psi: Option<Cochain<S>>,
    pub phi: Cochain<S>,
    pub b1: Bracket<S>,
    pub corrected: Option<Bracket<S>>,
}

/// Runs antisymmetrization, the truncated Neumann inversion and the
/// correction, and measures the Jacobiator before and after.
///
/// Estimates whose cost would exceed `max_evaluations` are reduced in budget
/// or, if even one evaluation is too expensive, skipped with a warning.
pub fn rigidify_pipeline<S: Scalar>(b: &Bracket<S>, cfg: &RigidifyConfig) -> Result<RigidifyOutcome<S>> {
    if !(cfg.eps > 0.0) {
        return Err(Error::InvalidRadius(cfg.eps));
    }
    let eps0 = cfg.eps0();
    if cfg.eps > eps0 {
        return Err(Error::InvalidParameter(format!("eps = {} exceeds eps0 = {eps0}", cfg.eps)));
    }
    let eps = S::c(cfg.eps);
    let limit = cfg.max_evaluations;
    let seed = |i: u64| derive_seed(cfg.seed, i);
    let mut warnings = Vec::new();

    let constants = estimate_constants(b, S::c(eps0), cfg.budget, seed(100))?;
    let threshold = compute_eps_star(constants.a, constants.c1_bilinear, eps0, cfg.variant)?;
    if cfg.eps > threshold.eps_star {
        warnings.push(format!("eps = {} exceeds eps_star = {:.6}", cfg.eps, threshold.eps_star));
    }

    let defect_before = localized_norm(&jacobiator(b), eps, cfg.budget, NormVariant::Plain, seed(1))?;
    let (psi, b1) = if cfg.antisymmetrize_first {
        let (p, b1) = antisymmetrize(b)?;
        (Some(p), b1)
    } else {
        (None, b.clone())
    };
    if cfg.antisymmetrize_first && !b1.antisymmetric() {
        warnings.push("antisymmetrized bracket failed its antisymmetry test".into());
    }
    let j = jacobiator(&b1);
    let j_norm = localized_norm(&j, eps, cfg.budget, NormVariant::Plain, seed(2))?.value.f64();
    let c2_used = j_norm / 6.0;

    let iterates = neumann_apply(&b1, &j, cfg.neumann_order + 1, cfg.integration, cfg.memoize)?;
    let s_n = &iterates[cfg.neumann_order];
    let phi = radial_homotopy(s_n, cfg.integration)?.with_label(format!("Φ(n={})", cfg.neumann_order));

    // ‖M‖ along J and two random trilinear directions.
    let mut m_norm: Option<f64> = None;
    let mut dirs: Vec<Cochain<S>> = Vec::new();
    if j_norm > 0.0 {
        dirs.push(j.clone());
    }
    for i in 0..2 {
        dirs.push(random_multilinear(3, b.dim(), seed(300 + i), false)?);
    }
    for (i, th) in dirs.iter().enumerate() {
        let m = defect_operator(&b1, th, cfg.integration)?;
        let num = match fitted_norm(&m, eps, cfg.budget, limit, seed(310 + i as u64), &mut warnings) {
            Ok(e) => e.value.f64(),
            Err(e) => {
                warnings.push(format!("M norm skipped: {e}"));
                continue;
            }
        };
        let den = localized_norm(th, eps, cfg.budget, NormVariant::Plain, seed(320 + i as u64))?.value.f64();
        if den > 0.0 {
            let r = num / den;
            m_norm = Some(m_norm.map_or(r, |m: f64| m.max(r)));
        }
    }
    if let Some(m) = m_norm {
        if m >= 0.5 {
            warnings.push(format!("measured ‖M‖ ≈ {m:.4} is not below 1/2; the Neumann series is not certified"));
        }
    }

    let mut neumann_residuals = Vec::new();
    for k in 0..=cfg.neumann_order {
        let diff = linear_combination(&[(S::one(), &iterates[k]), (-S::one(), &iterates[k + 1])])?;
        let est = fitted_norm(&diff, eps, cfg.budget, limit, seed(400 + k as u64), &mut warnings);
        neumann_residuals.push(match est {
            Ok(e) => NeumannResidual {
                order: k,
                value: Some(e.value.f64()),
                cost_per_call: diff.cost(),
                samples_used: e.samples_used,
            },
            Err(e) => {
                warnings.push(format!("residual at order {k} skipped: {e}"));
                NeumannResidual { order: k, value: None, cost_per_call: diff.cost(), samples_used: 0 }
            }
        });
    }

    let phi_norm = match fitted_norm(&phi, eps, cfg.budget, limit, seed(3), &mut warnings) {
        Ok(e) => Some(e),
        Err(e) => {
            warnings.push(format!("Φ norm skipped: {e}"));
            None
        }
    };
    let phi_pointwise_ratio = phi_pointwise(&phi, c2_used, eps, cfg.pointwise_samples, limit, seed(4), &mut warnings);

    let flag_samples = affordable(64, 4.0 * (phi.cost() + 2.0), limit);
    let corrected = if flag_samples == 0 {
        warnings.push("corrected bracket too expensive to assemble within the evaluation limit".into());
        None
    } else {
        Some(make_corrected_bracket(b, psi.as_ref(), &phi, flag_samples)?)
    };
    let defect_after = match &corrected {
        Some(c) => match fitted_norm(&jacobiator(c), eps, cfg.budget, limit, seed(1), &mut warnings) {
            Ok(e) => Some(e.to_f64()),
            Err(e) => {
                warnings.push(format!("corrected Jacobiator skipped: {e}"));
                None
            }
        },
        None => None,
    };

    let per_point = 24.0 * phi.cost() + 30.0;
    let s_samples = affordable(cfg.pointwise_samples, per_point, limit);
    let (s_decomposition, s_direct_expansion) = if s_samples > 0 {
        if s_samples < cfg.pointwise_samples {
            warnings.push(format!("S-decomposition checks use {s_samples} points"));
        }
        (
            Some(check_s_decomposition(&b1, &phi, eps, s_samples, seed(5))?),
            Some(check_s_direct_expansion(&b1, &phi, eps, s_samples, seed(6))?),
        )
    } else {
        warnings.push("S-decomposition checks skipped: too expensive".into());
        (None, None)
    };

    for w in &warnings {
        warn!("{w}");
    }
    let report = RigidifyReport {
        bracket: b.label().to_string(),
        eps: cfg.eps,
        eps0,
        neumann_order: cfg.neumann_order,
        antisymmetrize_first: cfg.antisymmetrize_first,
        a1: constants.a + constants.c1_bilinear * cfg.eps,
        k1: 7.5 * c2_used,
        k1_max: constants.a.max(4.0 * c2_used * cfg.eps),
        constants,
        threshold,
        defect_before: defect_before.to_f64(),
        defect_after,
        c2_used,
        phi_norm: phi_norm.map(|e| e.to_f64()),
        phi_bound_claimed: 4.0 * c2_used * cfg.eps,
        phi_pointwise_ratio,
        m_norm,
        neumann_residuals,
        corrected_antisymmetric: corrected.as_ref().map(|c| c.antisymmetric()),
        corrected_right_h_linear: corrected.as_ref().map(|c| c.right_h_linear()),
        s_decomposition,
        s_direct_expansion,
        warnings,
    };
    Ok(RigidifyOutcome { report, psi, phi, b1, corrected })
}

fn affordable(wanted: usize, cost: f64, limit: f64) -> usize {
    wanted.min((limit / cost.max(1.0)).floor() as usize)
}

/// Largest sampled `‖Φ(x,y)‖ / (2C₂‖x‖‖y‖(‖x‖+‖y‖))` over the ball.
fn phi_pointwise<S: Scalar>(
    phi: &Cochain<S>,
    c2: f64,
    eps: S,
    samples: usize,
    limit: f64,
    seed: u64,
    warnings: &mut Vec<String>,
) -> Option<f64> {
    let n = affordable(samples, phi.cost(), limit);
    if n == 0 {
        warnings.push("Φ pointwise check skipped: too expensive".into());
        return None;
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        let p = random_points(2, phi.dim(), eps, seed, i as u64);
        let (nx, ny) = (p[0].norm().f64(), p[1].norm().f64());
        let val = phi.eval_owned(&p).norm().f64();
        let bound = 2.0 * c2 * nx * ny * (nx + ny);
        let r = if bound > 0.0 {
            val / bound
        } else if val == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        worst = worst.max(r);
    }
    Some(worst)
}
