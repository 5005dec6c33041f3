//! Time integration: classical RK4 and Picard iteration with Gauss–Legendre
//! nodes in time, plus the Sobolev/BKM diagnostics.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{apply_bracket_field, Field};
use crate::cochain::quadrature::gauss_legendre;
use crate::cochain::Bracket;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const BLOW_UP_LINF: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub l2: f64,
    pub hs: f64,
    pub grad_linf: f64,
    pub bkm_integral: f64,
    pub energy_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    BlowUp { t: f64 },
    NonFinite { t: f64 },
}

#[derive(Debug, Clone)]
pub struct Trajectory<S: Scalar> {
    pub rows: Vec<DiagnosticsRow>,
    /// Last finite state.
    pub final_field: Field<S>,
    pub final_t: f64,
    pub status: RunStatus,
    pub max_cfl: f64,
    pub warnings: Vec<String>,
}

/// `−P{u, ∂ₓu}` with `P` the 2/3-rule projection.
pub fn rhs<S: Scalar>(b: &Bracket<S>, u: &Field<S>) -> Result<Field<S>> {
    Ok(apply_bracket_field(b, u, &u.derivative())?.dealias().scale(-S::one()))
}

fn cfl<S: Scalar>(u: &Field<S>, dt: f64) -> f64 {
    dt * u.grid().dealias_cutoff() as f64 * u.linf().f64()
}

struct Monitor {
    s: f64,
    rows: Vec<DiagnosticsRow>,
    last: Option<(f64, f64)>,
    bkm: f64,
}

impl Monitor {
    fn new(s: f64) -> Self {
        Self { s, rows: Vec::new(), last: None, bkm: 0.0 }
    }

    /// Advances the BKM trapezoid to `t`; records a row if asked.
    fn push<S: Scalar>(&mut self, t: f64, u: &Field<S>, record: bool) {
        let g = u.grad_linf().f64();
        if let Some((t0, g0)) = self.last {
            self.bkm += 0.5 * (t - t0) * (g + g0);
        }
        self.last = Some((t, g));
        if record {
            self.record(t, u, g);
        }
    }

    fn record<S: Scalar>(&mut self, t: f64, u: &Field<S>, grad_linf: f64) {
        self.rows.push(DiagnosticsRow {
            t,
            l2: u.l2().f64(),
            hs: u.sobolev_norm(S::c(self.s)).f64(),
            grad_linf,
            bkm_integral: self.bkm,
            energy_ratio: 0.0,
        });
    }

    fn finish(mut self) -> Vec<DiagnosticsRow> {
        fill_energy_ratio(&mut self.rows);
        self.rows
    }
}

/// `(d/dt‖u‖_{H^s}) / (‖∂ₓu‖_{L∞}‖u‖_{H^s})` by backward differences between
/// rows (forward for the first row).
fn fill_energy_ratio(rows: &mut [DiagnosticsRow]) {
    let n = rows.len();
    for i in 0..n {
        let (a, b) = match (i, n) {
            (_, 0 | 1) => continue,
            (0, _) => (0, 1),
            _ => (i - 1, i),
        };
        let dt = rows[b].t - rows[a].t;
        let den = rows[i].grad_linf * rows[i].hs;
        let num = if dt > 0.0 { (rows[b].hs - rows[a].hs) / dt } else { 0.0 };
        rows[i].energy_ratio = if den > 0.0 { num / den } else { 0.0 };
    }
}

/// Diagnostics of an arbitrary sampled trajectory (times increasing); the BKM
/// integral uses the trapezoid rule on the given samples.
pub fn diagnostics<S: Scalar>(samples: &[(f64, Field<S>)], s: f64) -> Vec<DiagnosticsRow> {
    let mut m = Monitor::new(s);
    for (t, u) in samples {
        m.push(*t, u, true);
    }
    m.finish()
}

/// `Ĉ_s = max |energy_ratio|` over the rows.
pub fn fitted_cs(rows: &[DiagnosticsRow]) -> f64 {
    rows.iter().fold(0.0, |m, r| m.max(r.energy_ratio.abs()))
}

/// Classical RK4 for `du/dt = −P{u, ∂ₓu}` from the projected initial state.
pub fn rk4_integrate<S: Scalar>(
    b: &Bracket<S>,
    u0: &Field<S>,
    dt: f64,
    t_end: f64,
    s: f64,
    output_every: usize,
) -> Result<Trajectory<S>> {
    if !(dt > 0.0) || !(t_end >= 0.0) || output_every == 0 {
        return Err(Error::InvalidParameter(format!("dt = {dt}, t_end = {t_end}, output_every = {output_every}")));
    }
    let steps = (t_end / dt).round() as usize;
    let h = S::c(dt);
    let half = S::c(0.5) * h;
    let mut warnings = Vec::new();
    let mut u = u0.dealias();
    let mut max_cfl = cfl(&u, dt);
    if max_cfl > 1.0 {
        warnings.push(format!("CFL number {max_cfl:.3} exceeds 1 at t = 0"));
    }
    let mut mon = Monitor::new(s);
    mon.push(0.0, &u, true);
    let mut status = RunStatus::Completed;
    let mut t_done = 0.0;
    for step in 1..=steps {
        let k1 = rhs(b, &u)?;
        let k2 = rhs(b, &u.axpy(half, &k1))?;
        let k3 = rhs(b, &u.axpy(half, &k2))?;
        let k4 = rhs(b, &u.axpy(h, &k3))?;
        let incr = k1.axpy(S::c(2.0), &k2).axpy(S::c(2.0), &k3).axpy(S::one(), &k4);
        let next = u.axpy(h / S::c(6.0), &incr);
        let t = step as f64 * dt;
        if !next.is_finite() {
            status = RunStatus::NonFinite { t };
            break;
        }
        u = next;
        t_done = t;
        let c = cfl(&u, dt);
        if c > 1.0 && max_cfl <= 1.0 {
            warnings.push(format!("CFL number {c:.3} exceeds 1 at t = {t}"));
        }
        max_cfl = max_cfl.max(c);
        let blow = u.linf().f64() > BLOW_UP_LINF;
        mon.push(t, &u, blow || step % output_every == 0 || step == steps);
        if blow {
            status = RunStatus::BlowUp { t };
            break;
        }
    }
    if mon.rows.last().map_or(true, |r| r.t != t_done) {
        mon.record(t_done, &u, mon.last.map_or(0.0, |l| l.1));
    }
    for w in &warnings {
        warn!("{w}");
    }
    Ok(Trajectory { rows: mon.finish(), final_field: u, final_t: t_done, status, max_cfl, warnings })
}

/// `W[i][j] = ∫₀^{τᵢ} ℓⱼ(σ) dσ` for the Lagrange basis on the nodes `τ` in [0,1].
pub fn time_integration_matrix(nodes: &[f64]) -> Vec<Vec<f64>> {
    let q = nodes.len();
    let (gx, gw) = gauss_legendre::<f64>(q);
    let lagrange = |j: usize, x: f64| -> f64 {
        nodes.iter().enumerate().filter(|&(m, _)| m != j).map(|(_, &tm)| (x - tm) / (nodes[j] - tm)).product()
    };
    nodes
        .iter()
        .map(|&ti| (0..q).map(|j| ti * gx.iter().zip(&gw).map(|(&x, &w)| w * lagrange(j, ti * x)).sum::<f64>()).collect())
        .collect()
}

#[derive(Debug, Clone)]
pub struct PicardResult<S: Scalar> {
    pub horizon: f64,
    /// Gauss–Legendre nodes in `[0, horizon]`.
    pub nodes: Vec<f64>,
    /// `iterates[k][i] = u_k(tᵢ)`, `k = 0..=K`.
    pub iterates: Vec<Vec<Field<S>>>,
    /// `u_k(horizon)` for `k = 0..=K`.
    pub end_values: Vec<Field<S>>,
    /// `δ_k = maxᵢ ‖u_{k+1}(tᵢ) − u_k(tᵢ)‖_{L²}`.
    pub sup_differences: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `δ_k` increased three times in a row.
    pub divergent: bool,
}

/// `u_{k+1}(t) = u₀ − ∫₀ᵗ P{u_k, ∂ₓu_k} ds` with the iterates held at
/// `quad_nodes` Gauss–Legendre points of `[0, horizon]`.
pub fn picard_iterate<S: Scalar>(
    b: &Bracket<S>,
    u0: &Field<S>,
    horizon: f64,
    iterations: usize,
    quad_nodes: usize,
) -> Result<PicardResult<S>> {
    if !(horizon > 0.0) || !horizon.is_finite() || quad_nodes == 0 {
        return Err(Error::InvalidParameter(format!("horizon = {horizon}, quad_nodes = {quad_nodes}")));
    }
    let (tau, w) = gauss_legendre::<f64>(quad_nodes);
    let wm = time_integration_matrix(&tau);
    let nodes: Vec<f64> = tau.iter().map(|t| t * horizon).collect();
    let u0 = u0.dealias();
    let mut iterates = vec![vec![u0.clone(); quad_nodes]];
    let mut end_values = vec![u0.clone()];
    let mut sup_differences = Vec::new();
    let mut divergent = false;
    let mut rises = 0;
    for _ in 0..iterations {
        let cur = iterates.last().expect("at least one iterate");
        let f: Vec<Field<S>> = cur.par_iter().map(|u| rhs(b, u)).collect::<Result<_>>()?;
        let integrate = |weights: &[f64]| {
            f.iter().zip(weights).fold(u0.clone(), |acc, (fj, &wj)| acc.axpy(S::c(wj * horizon), fj))
        };
        let next: Vec<Field<S>> = wm.iter().map(|row| integrate(row)).collect();
        let end = integrate(&w);
        let delta = next.iter().zip(cur).map(|(a, c)| a.sub(c).l2().f64()).fold(0.0, f64::max);
        if let Some(&prev) = sup_differences.last() {
            rises = if delta > prev { rises + 1 } else { 0 };
        }
        sup_differences.push(delta);
        let finite = next.iter().all(|u| u.is_finite());
        iterates.push(next);
        end_values.push(end);
        if rises >= 3 || !finite {
            divergent = true;
            break;
        }
    }
    let ratios = sup_differences.windows(2).map(|p| if p[0] > 0.0 { p[1] / p[0] } else { 0.0 }).collect();
    Ok(PicardResult { horizon, nodes, iterates, end_values, sup_differences, ratios, divergent })
}
