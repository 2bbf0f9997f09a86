//! Run configurations: one flat JSON object per command.
//!
//! Unknown keys are rejected. Syntax and type errors carry the line and
//! column reported by the JSON parser; range errors name the offending field.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;

use dimerlab_core::{Chart, PotentialFamily, PotentialSpec, ReductionOptions};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Critical,
    Bifurcation,
    Portrait,
    Simulate,
    Reduce,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Critical => "critical",
            Command::Bifurcation => "bifurcation",
            Command::Portrait => "portrait",
            Command::Simulate => "simulate",
            Command::Reduce => "reduce",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalConfig {
    #[serde(default)]
    pub command: Option<Command>,
    pub mu: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BifurcationConfig {
    #[serde(default)]
    pub command: Option<Command>,
    pub mu: f64,
    pub eta_min: f64,
    pub eta_max: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    501
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortraitConfig {
    #[serde(default)]
    pub command: Option<Command>,
    pub mu: f64,
    pub eta: f64,
    #[serde(default = "default_resolution")]
    pub nz: usize,
    #[serde(default = "default_resolution")]
    pub ntheta: usize,
}

fn default_resolution() -> usize {
    dimerlab_core::stationary::DEFAULT_PORTRAIT_RESOLUTION
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartName {
    Phase,
    Amplitude,
}

impl From<ChartName> for Chart {
    fn from(c: ChartName) -> Chart {
        match c {
            ChartName::Phase => Chart::Phase,
            ChartName::Amplitude => Chart::Amplitude,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    #[serde(default)]
    pub command: Option<Command>,
    pub mu: f64,
    pub eta: f64,
    pub z0: f64,
    pub theta0: f64,
    pub tau_end: f64,
    #[serde(default = "default_chart")]
    pub chart: ChartName,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_stride")]
    pub sample_stride: f64,
    #[serde(default = "default_dt")]
    pub dt_init: f64,
    #[serde(default)]
    pub reverse: bool,
    /// Common phase of both amplitudes (amplitude chart only).
    #[serde(default)]
    pub global_phase: f64,
}

fn default_chart() -> ChartName {
    ChartName::Amplitude
}
fn default_tol() -> f64 {
    1e-10
}
fn default_stride() -> f64 {
    0.01
}
fn default_dt() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialName {
    Quartic,
    GaussianWells,
    Tabulated,
    Harmonic,
}

impl PotentialName {
    fn as_str(&self) -> &'static str {
        match self {
            PotentialName::Quartic => "quartic",
            PotentialName::GaussianWells => "gaussian_wells",
            PotentialName::Tabulated => "tabulated",
            PotentialName::Harmonic => "harmonic",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceConfig {
    #[serde(default)]
    pub command: Option<Command>,
    pub potential: PotentialName,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub depth: Option<f64>,
    #[serde(default)]
    pub center: Option<f64>,
    #[serde(default)]
    pub width: Option<f64>,
    #[serde(default)]
    pub omega: Option<f64>,
    /// Two-column `x V` file, relative to the config file.
    #[serde(default)]
    pub table: Option<PathBuf>,
    pub hbar: f64,
    /// Nonlinearity power used for `c`, the cross term and the ε ↔ η table.
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default)]
    pub epsilon: Vec<f64>,
    #[serde(default)]
    pub half_width: Option<f64>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "yes")]
    pub auto_refine: bool,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "yes")]
    pub auto_widen: bool,
    #[serde(default = "default_boundary_tol")]
    pub boundary_tol: f64,
    #[serde(default = "default_grid_cap")]
    pub grid_cap: usize,
    #[serde(default = "default_gap_ratio")]
    pub min_gap_ratio: f64,
    #[serde(default)]
    pub validation_mode: bool,
}

fn default_mu() -> f64 {
    1.0
}
fn default_grid_points() -> usize {
    1023
}
fn yes() -> bool {
    true
}
fn default_rel_tol() -> f64 {
    ReductionOptions::default().rel_tol
}
fn default_boundary_tol() -> f64 {
    ReductionOptions::default().boundary_tol
}
fn default_grid_cap() -> usize {
    ReductionOptions::default().grid_cap
}
fn default_gap_ratio() -> f64 {
    ReductionOptions::default().min_gap_ratio
}

/// A parsed and validated configuration.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum RunConfig {
    Critical(CriticalConfig),
    Bifurcation(BifurcationConfig),
    Portrait(PortraitConfig),
    Simulate(SimulateConfig),
    Reduce(ReduceConfig, PotentialSpec, ReductionOptions),
}

fn field_error(field: &str, value: impl std::fmt::Display, reason: &str) -> CliError {
    CliError::Config(format!("field `{field}`: {reason} (got {value})"))
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(field_error(field, v, "must be finite and > 0"))
    }
}

fn parse<T: DeserializeOwned>(text: &str, source: &Path) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("{}: {e}", source.display())))
}

fn check_command(declared: Option<Command>, expected: Command) -> Result<(), CliError> {
    match declared {
        Some(c) if c != expected => Err(CliError::Config(format!(
            "field `command`: config is for `{}` but `{}` was requested",
            c.as_str(),
            expected.as_str()
        ))),
        _ => Ok(()),
    }
}

/// Reads and validates the configuration for `command` from `path`.
pub fn load(command: Command, path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(command, &text, path, base)
}

/// Parses `text`; relative table paths resolve against `base`.
pub fn parse_config(
    command: Command,
    text: &str,
    source: &Path,
    base: &Path,
) -> Result<RunConfig, CliError> {
    match command {
        Command::Critical => {
            let c: CriticalConfig = parse(text, source)?;
            check_command(c.command, command)?;
            positive("mu", c.mu)?;
            Ok(RunConfig::Critical(c))
        }
        Command::Bifurcation => {
            let c: BifurcationConfig = parse(text, source)?;
            check_command(c.command, command)?;
            positive("mu", c.mu)?;
            positive("eta_min", c.eta_min)?;
            if !(c.eta_max.is_finite() && c.eta_max > c.eta_min) {
                return Err(field_error(
                    "eta_max",
                    c.eta_max,
                    "must be finite and > eta_min",
                ));
            }
            if c.samples < 2 {
                return Err(field_error("samples", c.samples, "need at least 2"));
            }
            Ok(RunConfig::Bifurcation(c))
        }
        Command::Portrait => {
            let c: PortraitConfig = parse(text, source)?;
            check_command(c.command, command)?;
            positive("mu", c.mu)?;
            positive("eta", c.eta)?;
            for (name, n) in [("nz", c.nz), ("ntheta", c.ntheta)] {
                if n < 16 {
                    return Err(field_error(name, n, "need at least 16"));
                }
            }
            Ok(RunConfig::Portrait(c))
        }
        Command::Simulate => {
            let c: SimulateConfig = parse(text, source)?;
            check_command(c.command, command)?;
            positive("mu", c.mu)?;
            positive("eta", c.eta)?;
            if !(c.z0.is_finite() && c.z0.abs() <= 1.0) {
                return Err(field_error("z0", c.z0, "must lie in [-1, 1]"));
            }
            if !c.theta0.is_finite() {
                return Err(field_error("theta0", c.theta0, "must be finite"));
            }
            if !c.global_phase.is_finite() {
                return Err(field_error(
                    "global_phase",
                    c.global_phase,
                    "must be finite",
                ));
            }
            positive("tau_end", c.tau_end)?;
            if !(1e-14..=1e-6).contains(&c.tol) {
                return Err(field_error("tol", c.tol, "must lie in [1e-14, 1e-6]"));
            }
            positive("sample_stride", c.sample_stride)?;
            positive("dt_init", c.dt_init)?;
            if c.tau_end / c.sample_stride > 1e7 {
                return Err(field_error(
                    "sample_stride",
                    c.sample_stride,
                    "yields more than 1e7 samples",
                ));
            }
            if c.chart == ChartName::Phase && c.z0.abs() >= 1.0 - dimerlab_core::DELTA_SING {
                return Err(field_error(
                    "z0",
                    c.z0,
                    "the phase chart needs |z0| < 1; use chart \"amplitude\"",
                ));
            }
            Ok(RunConfig::Simulate(c))
        }
        Command::Reduce => {
            let c: ReduceConfig = parse(text, source)?;
            check_command(c.command, command)?;
            let (spec, opts) = reduce_spec(&c, base)?;
            Ok(RunConfig::Reduce(c, spec, opts))
        }
    }
}

fn reduce_spec(
    c: &ReduceConfig,
    base: &Path,
) -> Result<(PotentialSpec, ReductionOptions), CliError> {
    let name = c.potential.as_str();
    let supplied = [
        ("a", c.a.is_some()),
        ("b", c.b.is_some()),
        ("depth", c.depth.is_some()),
        ("center", c.center.is_some()),
        ("width", c.width.is_some()),
        ("omega", c.omega.is_some()),
        ("table", c.table.is_some()),
    ];
    let wanted: &[&str] = match c.potential {
        PotentialName::Quartic => &["a", "b"],
        PotentialName::GaussianWells => &["depth", "center", "width"],
        PotentialName::Tabulated => &["table"],
        PotentialName::Harmonic => &["omega"],
    };
    for (field, present) in supplied {
        let needed = wanted.contains(&field);
        if needed && !present {
            return Err(CliError::Config(format!(
                "field `{field}`: required for potential \"{name}\""
            )));
        }
        if !needed && present {
            return Err(CliError::Config(format!(
                "field `{field}`: does not apply to potential \"{name}\""
            )));
        }
    }
    let get = |field: &str, v: Option<f64>| -> Result<f64, CliError> {
        let v = v.expect("presence checked");
        positive(field, v)?;
        Ok(v)
    };
    let family = match c.potential {
        PotentialName::Quartic => PotentialFamily::Quartic {
            a: get("a", c.a)?,
            b: get("b", c.b)?,
        },
        PotentialName::GaussianWells => PotentialFamily::GaussianWells {
            depth: get("depth", c.depth)?,
            center: get("center", c.center)?,
            width: get("width", c.width)?,
        },
        PotentialName::Harmonic => {
            if !c.validation_mode {
                return Err(CliError::Config(
                    "field `potential`: \"harmonic\" is a single well and requires validation_mode = true".into(),
                ));
            }
            PotentialFamily::Harmonic {
                omega: get("omega", c.omega)?,
            }
        }
        PotentialName::Tabulated => {
            let rel = c.table.as_ref().expect("presence checked");
            let path = if rel.is_absolute() {
                rel.clone()
            } else {
                base.join(rel)
            };
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
            PotentialFamily::parse_table(&text)
                .map_err(|e| CliError::Config(format!("field `table` ({}): {e}", path.display())))?
        }
    };
    positive("hbar", c.hbar)?;
    if !(c.mu.is_finite() && c.mu >= 0.0) {
        return Err(field_error("mu", c.mu, "must be finite and >= 0"));
    }
    for (i, e) in c.epsilon.iter().enumerate() {
        if !e.is_finite() {
            return Err(field_error(&format!("epsilon[{i}]"), e, "must be finite"));
        }
    }
    if let Some(l) = c.half_width {
        positive("half_width", l)?;
    }
    if c.grid_points < 128 {
        return Err(field_error(
            "grid_points",
            c.grid_points,
            "need at least 128",
        ));
    }
    positive("rel_tol", c.rel_tol)?;
    positive("boundary_tol", c.boundary_tol)?;
    positive("min_gap_ratio", c.min_gap_ratio)?;
    if c.grid_cap < c.grid_points {
        return Err(field_error(
            "grid_cap",
            c.grid_cap,
            "must be >= grid_points",
        ));
    }
    let spec = PotentialSpec {
        family,
        hbar: c.hbar,
        half_width: c.half_width,
        grid_points: c.grid_points,
        validation_mode: c.validation_mode,
    };
    let opts = ReductionOptions {
        auto_refine: c.auto_refine,
        rel_tol: c.rel_tol,
        grid_cap: c.grid_cap,
        auto_widen: c.auto_widen,
        boundary_tol: c.boundary_tol,
        min_gap_ratio: c.min_gap_ratio,
    };
    Ok((spec, opts))
}
