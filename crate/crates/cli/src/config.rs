//! Run configuration: a TOML file with kebab-case keys, overridden key by key
//! from command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use quatlie::cochain::{BracketFamily, Budget};
use quatlie::constants::ThresholdVariant;
use quatlie::pde::{IcSpec, Integrator};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Constants,
    Rigidify,
    Verify,
    Pde,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Rigidify => "rigidify",
            Command::Verify => "verify",
            Command::Pde => "pde",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Commutator,
    Gamma,
    GammaCommutator,
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct BracketConfig {
    pub family: Family,
    pub gamma: f64,
    /// Module dimension; the `gamma` family is fixed to ℍ².
    pub m: usize,
}

impl Default for BracketConfig {
    fn default() -> Self {
        Self { family: Family::Gamma, gamma: 0.1, m: 2 }
    }
}

impl BracketConfig {
    pub fn family(&self) -> BracketFamily {
        match self.family {
            Family::Commutator => BracketFamily::Commutator { m: self.m },
            Family::Gamma => BracketFamily::Gamma { gamma: self.gamma },
            Family::GammaCommutator => BracketFamily::GammaCommutator { gamma: self.gamma, m: self.m },
            Family::Symmetric => BracketFamily::Symmetric { m: self.m },
        }
    }

    /// `γ` of the fiber bracket on ℍ used by the PDE.
    pub fn fiber_gamma(&self) -> f64 {
        match self.family {
            Family::Gamma | Family::GammaCommutator => self.gamma,
            Family::Commutator | Family::Symmetric => 0.0,
        }
    }
}

/// Constants that bypass estimation in the `constants` command.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConstantOverrides {
    pub a: Option<f64>,
    pub c1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct VerifySection {
    pub trials: usize,
    pub trial_samples: usize,
    pub trial_refine: usize,
    pub n_max: usize,
    pub pointwise_samples: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self { trials: 100, trial_samples: 200, trial_refine: 4, n_max: 2, pointwise_samples: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct PdeSection {
    pub grid: usize,
    pub dt: f64,
    pub t_end: f64,
    pub s: f64,
    pub integrator: Integrator,
    pub corrected: bool,
    pub neumann_order: usize,
    pub ic: IcSpec,
    pub output_every: usize,
    pub picard_iterations: usize,
    pub quad_nodes: usize,
    pub horizon: Option<f64>,
}

impl Default for PdeSection {
    fn default() -> Self {
        Self {
            grid: 256,
            dt: 1e-3,
            t_end: 1.0,
            s: 2.0,
            integrator: Integrator::Rk4,
            corrected: false,
            neumann_order: 1,
            ic: IcSpec::QuaternionModes,
            output_every: 10,
            picard_iterations: 12,
            quad_nodes: 16,
            horizon: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), formats: vec![Format::Json, Format::Csv, Format::Svg] }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct SweepConfig {
    /// Command run at every grid point.
    pub command: Option<Command>,
    /// Worker pool size; defaults to the number of processors.
    pub workers: Option<usize>,
    /// Dotted key path (`"bracket.gamma"`, `"pde.dt"`, `"eps"`) to the list of values.
    pub grid: BTreeMap<String, Vec<toml::Value>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub seed: u64,
    pub eps: f64,
    pub eps0: Option<f64>,
    pub neumann_order: usize,
    pub samples: usize,
    pub refine_iterations: usize,
    pub variant: ThresholdVariant,
    pub max_evaluations: f64,
    pub antisymmetrize: bool,
    pub bracket: BracketConfig,
    pub constants: ConstantOverrides,
    pub verify: VerifySection,
    pub pde: PdeSection,
    pub output: OutputConfig,
    pub sweep: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            seed: 1,
            eps: 0.05,
            eps0: None,
            neumann_order: 2,
            samples: 400,
            refine_iterations: 10,
            variant: ThresholdVariant::Standard,
            max_evaluations: 3e8,
            antisymmetrize: true,
            bracket: BracketConfig::default(),
            constants: ConstantOverrides::default(),
            verify: VerifySection::default(),
            pde: PdeSection::default(),
            output: OutputConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn eps0(&self) -> f64 {
        self.eps0.unwrap_or(self.eps)
    }

    pub fn budget(&self) -> Budget {
        Budget::new(self.samples, self.refine_iterations)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if let Some(e0) = self.eps0 {
            if !(e0 > 0.0) || !e0.is_finite() {
                return bad(format!("eps0 must be positive, got {e0}"));
            }
        }
        if self.samples == 0 {
            return bad("samples must be positive".into());
        }
        if self.bracket.m == 0 {
            return bad("bracket.m must be positive".into());
        }
        if !(self.max_evaluations > 0.0) {
            return bad("max-evaluations must be positive".into());
        }
        let p = &self.pde;
        if p.grid < 8 || !p.grid.is_power_of_two() {
            return bad(format!("pde.grid must be a power of two ≥ 8, got {}", p.grid));
        }
        if !(p.dt > 0.0) || !(p.t_end >= 0.0) || !(p.s >= 0.0) {
            return bad(format!("pde.dt = {}, pde.t-end = {}, pde.s = {} out of range", p.dt, p.t_end, p.s));
        }
        if p.output_every == 0 || p.quad_nodes == 0 {
            return bad("pde.output-every and pde.quad-nodes must be positive".into());
        }
        if matches!(p.horizon, Some(h) if !(h > 0.0)) {
            return bad("pde.horizon must be positive".into());
        }
        if self.verify.trials == 0 || self.verify.trial_samples == 0 {
            return bad("verify.trials and verify.trial-samples must be positive".into());
        }
        Ok(())
    }
}

/// Reads a config file into a TOML table (empty when no file is given).
pub fn load_table(path: Option<&Path>) -> Result<toml::Table, CliError> {
    match path {
        None => Ok(toml::Table::new()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            text.parse::<toml::Table>().map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
    }
}

/// Sets a dotted key path, creating intermediate tables.
pub fn set_path(table: &mut toml::Table, path: &str, value: toml::Value) -> Result<(), CliError> {
    let mut parts: Vec<&str> = path.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| CliError::Config(format!("empty key path {path:?}")))?;
    let mut cur = table;
    for p in parts {
        let entry = cur.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| CliError::Config(format!("{path}: {p} is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

pub fn from_table(table: toml::Table) -> Result<RunConfig, CliError> {
    let cfg: RunConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}
