use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use quatlie_cli::config::{from_table, load_table, set_path};
use quatlie_cli::{run, worker_count, CliError, Command};

/// Quasi-Lie brackets on quaternionic modules: constants, correction,
/// bound verification and the transport solver.
#[derive(Parser, Debug)]
#[command(name = "quatlie", version, allow_negative_numbers = true)]
struct Cli {
    /// constants | rigidify | verify | pde | sweep
    #[arg(value_enum)]
    command: Command,
    /// TOML configuration file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    eps0: Option<f64>,
    /// commutator | gamma | gamma-commutator | symmetric
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Module dimension of the bracket.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    neumann_order: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    refine_iterations: Option<usize>,
    #[arg(long)]
    max_evaluations: Option<f64>,
    /// Use this A instead of estimating it (`constants`).
    #[arg(long = "A", alias = "a")]
    a: Option<f64>,
    /// Use this C1 instead of estimating it (`constants`).
    #[arg(long = "C1", alias = "c1")]
    c1: Option<f64>,
    /// standard | refined
    #[arg(long)]
    variant: Option<String>,
    /// Random cochains per operator bound (`verify`).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    /// rk4 | picard
    #[arg(long)]
    integrator: Option<String>,
    /// Use the corrected fiber bracket in `pde`.
    #[arg(long)]
    corrected: Option<bool>,
    /// constant | quaternion-modes | real-wave | analytic
    #[arg(long)]
    ic: Option<String>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Comma-separated subset of json,csv,svg.
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<String>>,
    /// Worker pool size for `sweep`.
    #[arg(long)]
    workers: Option<usize>,
}

impl Cli {
    fn overrides(&self) -> Vec<(&'static str, toml::Value)> {
        use toml::Value as V;
        let mut o = Vec::new();
        let int = |v: u64| V::Integer(v as i64);
        let mut put = |k: &'static str, v: Option<V>| {
            if let Some(v) = v {
                o.push((k, v));
            }
        };
        put("output.dir", self.out.as_ref().map(|p| V::String(p.to_string_lossy().into_owned())));
        put("seed", self.seed.map(int));
        put("eps", self.eps.map(V::Float));
        put("eps0", self.eps0.map(V::Float));
        put("bracket.family", self.family.clone().map(V::String));
        put("bracket.gamma", self.gamma.map(V::Float));
        put("bracket.m", self.m.map(|v| int(v as u64)));
        put("neumann-order", self.neumann_order.map(|v| int(v as u64)));
        put("samples", self.samples.map(|v| int(v as u64)));
        put("refine-iterations", self.refine_iterations.map(|v| int(v as u64)));
        put("max-evaluations", self.max_evaluations.map(V::Float));
        put("constants.a", self.a.map(V::Float));
        put("constants.c1", self.c1.map(V::Float));
        put("variant", self.variant.clone().map(V::String));
        put("verify.trials", self.trials.map(|v| int(v as u64)));
        put("pde.grid", self.grid.map(|v| int(v as u64)));
        put("pde.dt", self.dt.map(V::Float));
        put("pde.t-end", self.t_end.map(V::Float));
        put("pde.s", self.s.map(V::Float));
        put("pde.integrator", self.integrator.clone().map(V::String));
        put("pde.corrected", self.corrected.map(V::Boolean));
        put("pde.horizon", self.horizon.map(V::Float));
        put(
            "pde.ic",
            self.ic.clone().map(|k| V::Table(toml::Table::from_iter([("kind".to_string(), V::String(k))]))),
        );
        put("output.formats", self.format.clone().map(|f| V::Array(f.into_iter().map(V::String).collect())));
        put("sweep.workers", self.workers.map(|v| int(v as u64)));
        o
    }
}

fn main_inner(cli: &Cli) -> Result<String, CliError> {
    let mut table = load_table(cli.config.as_deref())?;
    for (k, v) in cli.overrides() {
        set_path(&mut table, k, v)?;
    }
    let cfg = from_table(table)?;
    let threads = worker_count(None);
    // Ignore the error if a global pool already exists.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    run(&cfg, cli.command)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
