use std::fs;
use std::path::Path;

use log::info;
use rayon::prelude::*;
use serde::Serialize;

use quatlie::cochain::{Budget, Integration};
use quatlie::constants::{compute_eps_star, estimate_constants, m_bound_curve, ConstantEstimates, MBoundCurve, ThresholdReport};
use quatlie::pde::{
    build_fiber_bracket, diagnostics, fitted_cs, initial_condition, picard_iterate, rk4_integrate, BracketSpec,
    DiagnosticsRow, Grid, Integrator, RunStatus,
};
use quatlie::rigidify::{rigidify_pipeline, RigidifyConfig, RigidifyReport};
use quatlie::verifier::{format_table, run_suite, BoundCheck, VerifyConfig};

use crate::config::{from_table, set_path, Command, Format, RunConfig, SCHEMA_VERSION};
use crate::error::CliError;
use crate::output::{column, line_plot, trajectory_csv, write_json};

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'static str,
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

fn emit<T: Serialize>(cfg: &RunConfig, command: Command, dir: &Path, file: &str, body: T) -> Result<(), CliError> {
    if cfg.output.wants(Format::Json) {
        let env = Envelope { schema_version: SCHEMA_VERSION, command: command.name(), config: cfg, body };
        write_json(&dir.join(file), &env)?;
    }
    Ok(())
}

/// Runs one command with artifacts written to `cfg.output.dir`; returns a
/// one-line summary for standard output.
pub fn run(cfg: &RunConfig, command: Command) -> Result<String, CliError> {
    let mut cfg = cfg.clone();
    cfg.command = Some(command);
    let dir = cfg.output.dir.clone();
    fs::create_dir_all(&dir)?;
    match command {
        Command::Constants => constants(&cfg, &dir),
        Command::Rigidify => rigidify(&cfg, &dir),
        Command::Verify => verify(&cfg, &dir),
        Command::Pde => pde(&cfg, &dir),
        Command::Sweep => sweep(&cfg, &dir),
    }
}

#[derive(Serialize)]
struct ConstantsBody {
    /// `None` when both constants were supplied directly.
    estimates: Option<ConstantEstimates>,
    threshold: ThresholdReport,
    m_bound_curve: MBoundCurve,
}

fn constants(cfg: &RunConfig, dir: &Path) -> Result<String, CliError> {
    let eps0 = cfg.eps0();
    let (estimates, a, c1) = match (cfg.constants.a, cfg.constants.c1) {
        (Some(a), Some(c1)) => (None, a, c1),
        (oa, oc) => {
            let b = cfg.bracket.family().build::<f64>()?;
            let k = estimate_constants(&b, eps0, cfg.budget(), cfg.seed)?;
            (Some(k), oa.unwrap_or(k.a), oc.unwrap_or(k.c1_bilinear))
        }
    };
    let threshold = compute_eps_star(a, c1, eps0, cfg.variant)?;
    let grid: Vec<f64> = (0..=24).map(|i| eps0 * 10f64.powf(-3.0 + 3.0 * i as f64 / 24.0)).collect();
    let curve = m_bound_curve(a, c1, &grid)?;
    let summary = format!(
        "eps_star = {:.6} (branch_A = {}, branch_C1 = {}, eps0 = {})",
        threshold.eps_star,
        fmt_opt(threshold.branch_a),
        fmt_opt(threshold.branch_c1),
        eps0
    );
    emit(cfg, Command::Constants, dir, "constants.json", ConstantsBody { estimates, threshold, m_bound_curve: curve })?;
    Ok(summary)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("inf".into(), |x| format!("{x:.6}"))
}

pub fn rigidify_config(cfg: &RunConfig) -> RigidifyConfig {
    RigidifyConfig {
        eps: cfg.eps,
        eps0: cfg.eps0,
        neumann_order: cfg.neumann_order,
        integration: Integration::default(),
        budget: cfg.budget(),
        seed: cfg.seed,
        antisymmetrize_first: cfg.antisymmetrize,
        max_evaluations: cfg.max_evaluations,
        memoize: true,
        pointwise_samples: cfg.verify.pointwise_samples,
        variant: cfg.variant,
    }
}

#[derive(Serialize)]
struct RigidifyBody {
    report: RigidifyReport,
}

fn rigidify(cfg: &RunConfig, dir: &Path) -> Result<String, CliError> {
    let b = cfg.bracket.family().build::<f64>()?;
    let out = rigidify_pipeline(&b, &rigidify_config(cfg))?;
    let r = out.report;
    let summary = format!(
        "defect before {:.6e}, after {}, ‖Φ‖ {}",
        r.defect_before.value,
        r.defect_after.as_ref().map_or("not computed".into(), |e| format!("{:.6e}", e.value)),
        r.phi_norm.as_ref().map_or("not computed".into(), |e| format!("{:.6e}", e.value)),
    );
    emit(cfg, Command::Rigidify, dir, "rigidify.json", RigidifyBody { report: r })?;
    Ok(summary)
}

pub fn verify_config(cfg: &RunConfig) -> VerifyConfig {
    VerifyConfig {
        eps: cfg.eps,
        budget: cfg.budget(),
        trial_budget: Budget::new(cfg.verify.trial_samples, cfg.verify.trial_refine),
        trials: cfg.verify.trials,
        n_max: cfg.verify.n_max,
        integration: Integration::default(),
        max_evaluations: cfg.max_evaluations,
        pointwise_samples: cfg.verify.pointwise_samples,
        seed: cfg.seed,
    }
}

#[derive(Serialize)]
struct VerifyBody {
    passed: usize,
    failed: usize,
    checks: Vec<BoundCheck>,
}

fn verify(cfg: &RunConfig, dir: &Path) -> Result<String, CliError> {
    let b = cfg.bracket.family().build::<f64>()?;
    let checks = run_suite(&b, &verify_config(cfg))?;
    let table = format_table(&checks);
    print!("{table}");
    fs::write(dir.join("verify.txt"), &table)?;
    let passed = checks.iter().filter(|c| c.pass).count();
    let failed = checks.len() - passed;
    emit(cfg, Command::Verify, dir, "verify.json", VerifyBody { passed, failed, checks })?;
    Ok(format!("{passed} checks passed, {failed} failed"))
}

#[derive(Serialize)]
struct PicardSummary {
    horizon: f64,
    nodes: Vec<f64>,
    sup_differences: Vec<f64>,
    ratios: Vec<f64>,
    divergent: bool,
}

#[derive(Serialize)]
struct PdeBody {
    integrator: Integrator,
    status: RunStatus,
    final_t: f64,
    /// Constant used for the Picard horizon.
    #[serde(rename = "K1")]
    k1: f64,
    u0_h1: f64,
    fitted_cs: f64,
    max_cfl: Option<f64>,
    picard: Option<PicardSummary>,
    rigidify: Option<RigidifyReport>,
    rows: usize,
    warnings: Vec<String>,
}

pub const PLOT_COLUMNS: [&str; 5] = ["l2", "hs", "grad_linf", "bkm_integral", "energy_ratio"];

fn pde(cfg: &RunConfig, dir: &Path) -> Result<String, CliError> {
    let p = &cfg.pde;
    let mut warnings = Vec::new();
    if p.s <= 1.5 {
        warnings.push(format!("s = {} does not exceed n/2 + 1 = 3/2", p.s));
    }
    let spec = BracketSpec {
        gamma: cfg.bracket.fiber_gamma(),
        use_corrected: p.corrected,
        neumann_order: p.neumann_order,
        eps: cfg.eps,
        budget: cfg.budget(),
        max_evaluations: cfg.max_evaluations,
    };
    let fiber = build_fiber_bracket::<f64>(&spec, cfg.seed)?;
    let grid = Grid::<f64>::new(p.grid)?;
    let u0 = initial_condition(&grid, &p.ic, cfg.seed);
    let u0_h1 = u0.dealias().sobolev_norm(1.0);
    let (rows, status, final_t, max_cfl, picard): (Vec<DiagnosticsRow>, RunStatus, f64, Option<f64>, Option<PicardSummary>) =
        match p.integrator {
            Integrator::Rk4 => {
                let tr = rk4_integrate(&fiber.bracket, &u0, p.dt, p.t_end, p.s, p.output_every)?;
                warnings.extend(tr.warnings.iter().cloned());
                (tr.rows, tr.status, tr.final_t, Some(tr.max_cfl), None)
            }
            Integrator::Picard => {
                let horizon = p.horizon.unwrap_or(1.0 / (2.0 * fiber.k1 * u0_h1));
                if !horizon.is_finite() {
                    return Err(CliError::Config(format!("Picard horizon is not finite (K1 = {})", fiber.k1)));
                }
                let res = picard_iterate(&fiber.bracket, &u0, horizon, p.picard_iterations, p.quad_nodes)?;
                let last = res.iterates.last().expect("initial iterate");
                let mut samples = vec![(0.0, u0.dealias())];
                samples.extend(res.nodes.iter().copied().zip(last.iter().cloned()));
                samples.push((horizon, res.end_values.last().expect("initial iterate").clone()));
                let finite = samples.iter().all(|(_, u)| u.is_finite());
                let status = if finite { RunStatus::Completed } else { RunStatus::NonFinite { t: horizon } };
                if res.divergent {
                    warnings.push("Picard differences increased three times in a row".into());
                }
                let summary = PicardSummary {
                    horizon,
                    nodes: res.nodes.clone(),
                    sup_differences: res.sup_differences.clone(),
                    ratios: res.ratios.clone(),
                    divergent: res.divergent,
                };
                (diagnostics(&samples, p.s), status, horizon, None, Some(summary))
            }
        };
    if cfg.output.wants(Format::Csv) {
        fs::write(dir.join("trajectory.csv"), trajectory_csv(&rows))?;
    }
    if cfg.output.wants(Format::Svg) {
        let t = column(&rows, "t");
        for name in PLOT_COLUMNS {
            let svg = line_plot(&format!("{name} vs t"), "t", name, &t, &column(&rows, name));
            fs::write(dir.join(format!("plot_{name}.svg")), svg)?;
        }
    }
    let cs = fitted_cs(&rows);
    let name = match p.integrator { Integrator::Rk4 => "rk4", Integrator::Picard => "picard" };
    let summary = format!("{name} to t = {final_t}: {} rows, fitted C_s = {cs:.6e}", rows.len());
    let n_rows = rows.len();
    emit(
        cfg,
        Command::Pde,
        dir,
        "pde.json",
        PdeBody {
            integrator: p.integrator,
            status,
            final_t,
            k1: fiber.k1,
            u0_h1,
            fitted_cs: cs,
            max_cfl,
            picard,
            rigidify: fiber.rigidify,
            rows: n_rows,
            warnings,
        },
    )?;
    if let RunStatus::NonFinite { t } = status {
        return Err(CliError::Numerical(format!("non-finite state at t = {t}; partial artifacts kept in {}", dir.display())));
    }
    info!("{summary}");
    Ok(summary)
}

#[derive(Serialize)]
struct SweepPoint {
    index: usize,
    dir: String,
    overrides: toml::Table,
    exit_code: i32,
    result: String,
}

#[derive(Serialize)]
struct SweepBody {
    sweep_command: &'static str,
    points: Vec<SweepPoint>,
}

/// Cartesian product of the sweep grid in key order.
fn grid_points(grid: &std::collections::BTreeMap<String, Vec<toml::Value>>) -> Vec<toml::Table> {
    let mut points = vec![toml::Table::new()];
    for (key, values) in grid {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.insert(key.clone(), v.clone());
                    q
                })
            })
            .collect();
    }
    points
}

fn sweep(cfg: &RunConfig, dir: &Path) -> Result<String, CliError> {
    let command = cfg.sweep.command.ok_or_else(|| CliError::Config("sweep.command is required".into()))?;
    if command == Command::Sweep {
        return Err(CliError::Config("sweep.command cannot be sweep".into()));
    }
    if cfg.sweep.grid.is_empty() {
        return Err(CliError::Config("sweep.grid is empty".into()));
    }
    let mut base = toml::Value::try_from(cfg).map_err(|e| CliError::Config(e.to_string()))?;
    let base = base.as_table_mut().expect("config serializes to a table");
    base.remove("sweep");
    // Resolve every point up front, so a bad key fails the whole sweep with exit 2.
    let mut jobs = Vec::new();
    for (i, point) in grid_points(&cfg.sweep.grid).into_iter().enumerate() {
        let mut t = base.clone();
        for (k, v) in &point {
            set_path(&mut t, k, v.clone())?;
        }
        let sub = format!("point_{i:03}");
        set_path(&mut t, "output.dir", toml::Value::String(dir.join(&sub).to_string_lossy().into_owned()))?;
        jobs.push((i, sub, point, from_table(t)?));
    }
    let workers = crate::worker_count(cfg.sweep.workers);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    let points: Vec<SweepPoint> = pool.install(|| {
        jobs.into_par_iter()
            .map(|(index, sub, overrides, pc)| {
                let (exit_code, result) = match run(&pc, command) {
                    Ok(s) => (0, s),
                    Err(e) => (e.exit_code(), e.to_string()),
                };
                SweepPoint { index, dir: sub, overrides, exit_code, result }
            })
            .collect()
    });
    let failed = points.iter().filter(|p| p.exit_code != 0).count();
    let summary = format!("{} grid points of {}, {failed} with errors", points.len(), command.name());
    let mut idx_cfg = cfg.clone();
    idx_cfg.command = Some(Command::Sweep);
    let env = Envelope { schema_version: SCHEMA_VERSION, command: "sweep", config: &idx_cfg, body: SweepBody { sweep_command: command.name(), points } };
    write_json(&dir.join("index.json"), &env)?;
    Ok(summary)
}
