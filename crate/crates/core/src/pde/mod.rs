//! Pseudospectral solver for `∂ₜu + {u, ∂ₓu} = 0` with `u: 𝕋 → ℍ`.
//!
//! The fiber bracket is built once on `ℍ` (module dimension 1) and applied
//! pointwise at every grid node.

mod field;
mod inequalities;
mod solver;

pub use field::{apply_bracket_field, random_band_limited, sobolev_norm, spectral_derivative, Field, Grid, Spectrum, DOMAIN_LENGTH};
pub use inequalities::{functional_inequality_checks, embedding_ratio, k1_estimate_check, kato_ponce_constant_case, kato_ponce_ratio, moser_ratio, InequalityConfig};
pub use solver::{
    diagnostics, fitted_cs, picard_iterate, rhs, rk4_integrate, time_integration_matrix, DiagnosticsRow, PicardResult,
    RunStatus, Trajectory,
};

use std::sync::Arc;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::cochain::{commutator, gamma_commutator, Bracket, Budget};
use crate::constants::estimate_constants;
use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::rigidify::{rigidify_pipeline, RigidifyConfig, RigidifyReport};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct BracketSpec {
    /// `γ` in `pq − qp + γ·p̄q`; zero gives the commutator.
    pub gamma: f64,
    pub use_corrected: bool,
    pub neumann_order: usize,
    /// Radius used when correcting and when estimating the constants.
    pub eps: f64,
    pub budget: Budget,
    pub max_evaluations: f64,
}

impl Default for BracketSpec {
    fn default() -> Self {
        Self { gamma: 0.0, use_corrected: false, neumann_order: 1, eps: 0.05, budget: Budget::new(400, 10), max_evaluations: 3e7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    #[default]
    Rk4,
    Picard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IcSpec {
    Constant { value: [f64; 4] },
    /// `i·sin x + j·cos 2x`.
    QuaternionModes,
    /// `sin x + ½cos 2x`, real-valued.
    RealWave,
    /// `i/(2 − cos x) + j·sin x`, analytic in a strip.
    Analytic,
    Random { modes: usize, decay: f64, amplitude: f64 },
}

impl Default for IcSpec {
    fn default() -> Self {
        IcSpec::QuaternionModes
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct PicardConfig {
    pub iterations: usize,
    pub quad_nodes: usize,
    /// Overrides the horizon `1/(2K₁‖u₀‖_{H¹})`.
    pub horizon: Option<f64>,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self { iterations: 12, quad_nodes: 16, horizon: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct PdeConfig {
    pub grid: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Sobolev index of the diagnostics.
    pub s: f64,
    pub bracket: BracketSpec,
    pub integrator: Integrator,
    pub ic: IcSpec,
    pub seed: u64,
    /// Steps between diagnostics rows.
    pub output_every: usize,
    pub picard: PicardConfig,
}

impl Default for PdeConfig {
    fn default() -> Self {
        Self {
            grid: 256,
            dt: 1e-3,
            t_end: 1.0,
            s: 2.0,
            bracket: BracketSpec::default(),
            integrator: Integrator::Rk4,
            ic: IcSpec::default(),
            seed: 1,
            output_every: 10,
            picard: PicardConfig::default(),
        }
    }
}

impl PdeConfig {
    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.dt > 0.0) || !(self.t_end >= 0.0) {
            return Err(Error::InvalidParameter(format!("dt = {}, t_end = {}", self.dt, self.t_end)));
        }
        if !(self.s >= 0.0) {
            return Err(Error::InvalidParameter(format!("Sobolev index s = {} must be ≥ 0", self.s)));
        }
        if self.output_every == 0 || self.picard.quad_nodes == 0 {
            return Err(Error::InvalidParameter("output-every and quad-nodes must be positive".into()));
        }
        let mut warnings = Vec::new();
        if self.s <= 1.5 {
            warnings.push(format!("s = {} does not exceed n/2 + 1 = 3/2", self.s));
        }
        Ok(warnings)
    }
}

pub fn initial_condition<S: Scalar>(grid: &Arc<Grid<S>>, ic: &IcSpec, seed: u64) -> Field<S> {
    let z = S::zero();
    match ic {
        IcSpec::Constant { value } => Field::constant(grid, Quaternion::from_array(value.map(S::c))),
        IcSpec::QuaternionModes => Field::from_fn(grid, |x| Quaternion::new(z, x.sin(), (S::c(2.0) * x).cos(), z)),
        IcSpec::RealWave => Field::from_fn(grid, |x| Quaternion::real(x.sin() + S::c(0.5) * (S::c(2.0) * x).cos())),
        IcSpec::Analytic => Field::from_fn(grid, |x| Quaternion::new(z, S::one() / (S::c(2.0) - x.cos()), x.sin(), z)),
        IcSpec::Random { modes, decay, amplitude } => random_band_limited(grid, *modes, *decay, *amplitude, seed),
    }
}

/// The fiber bracket and the constant `K₁` used for the Picard horizon.
pub struct FiberBracket<S> {
    pub bracket: Bracket<S>,
    /// `15/2·C₂` for a corrected bracket, the bilinear bound `A` otherwise.
    pub k1: f64,
    pub rigidify: Option<RigidifyReport>,
}

pub fn build_fiber_bracket<S: Scalar>(spec: &BracketSpec, seed: u64) -> Result<FiberBracket<S>> {
    let base = if spec.gamma == 0.0 { commutator(1)? } else { gamma_commutator(S::c(spec.gamma), 1)? };
    if !spec.use_corrected {
        let k = estimate_constants(&base, S::c(spec.eps), spec.budget, seed)?;
        return Ok(FiberBracket { bracket: base, k1: k.a, rigidify: None });
    }
    let cfg = RigidifyConfig {
        eps: spec.eps,
        neumann_order: spec.neumann_order,
        budget: spec.budget,
        seed,
        max_evaluations: spec.max_evaluations,
        pointwise_samples: 100,
        ..Default::default()
    };
    let out = rigidify_pipeline(&base, &cfg)?;
    let bracket = out
        .corrected
        .ok_or_else(|| Error::InvalidParameter("corrected bracket exceeds the evaluation limit".into()))?;
    let k1 = out.report.k1;
    if k1 <= 0.0 {
        warn!("K1 = {k1}: the Picard horizon is unbounded");
    }
    Ok(FiberBracket { bracket, k1, rigidify: Some(out.report) })
}
