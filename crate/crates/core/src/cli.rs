//! Command-line front end.
//!
//! Every subcommand reads an optional JSON config (`--config`) whose keys
//! mirror the long flags; flags given on the command line override it.
//! Exit codes: 0 success (UNSTABLE rows included), 1 I/O failure,
//! 2 usage or validation error, 3 solver failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchmark::{
    initial_condition, reference_solution_with, run_experiment, run_to_times, write_error_table,
    write_fields_csv, BenchmarkError, Grid2D, Reference, SchnakenbergParams, SchnakenbergSystem,
    SplitMode, REFERENCE_STEPS,
};
use crate::stability::{
    log_radii, raster_domain_with, SchemeKind, StabilityError, StabilityParams, WedgeSpec, Window,
};
use crate::stepper::{MethodType, NamedScheme, StepError};
use crate::tableau::{
    build_example1, build_example2, build_example3, correction_coefficients, verify_order2,
    PairKind, RkPair, TableauError,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl From<TableauError> for CliError {
    fn from(e: TableauError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<StabilityError> for CliError {
    fn from(e: StabilityError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<BenchmarkError> for CliError {
    fn from(e: BenchmarkError) -> Self {
        match e {
            BenchmarkError::Shape { .. }
            | BenchmarkError::InvalidGamma(_)
            | BenchmarkError::OutputTime(..)
            | BenchmarkError::MissingReference(_) => CliError::Usage(e.to_string()),
            BenchmarkError::Step(StepError::InvalidStep(_)) => CliError::Usage(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(
    name = "stabcorr",
    version,
    about = "Stabilizing-correction splitting schemes: tableau checks, stability domains and the reaction-diffusion benchmark"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print order-condition residuals of a Runge-Kutta pair.
    TableauCheck(TableauCheckArgs),
    /// Rasterize the stability domain in the explicit-argument plane.
    Stability(StabilityArgs),
    /// Error-versus-step-size table for the reaction-diffusion benchmark.
    Converge(ConvergeArgs),
    /// Integrate the reaction-diffusion benchmark and dump the fields.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ConfigFiles {
    /// JSON file with default values for this command's options.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write the resolved configuration as JSON.
    #[arg(long, value_name = "PATH")]
    pub save_config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Example1,
    Example2,
    Example3,
    /// All coefficients given explicitly.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum KindArg {
    A,
    B,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableauCheckConfig {
    /// Coefficient family.
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Named scheme (overrides the family).
    #[arg(long)]
    pub scheme: Option<NamedScheme>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Pair kind for `--family raw`.
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a21: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub ahat21: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub ahat31: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub ahat32: Option<f64>,
    /// Output CSV (stdout when absent).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TableauCheckArgs {
    #[command(flatten)]
    pub files: ConfigFiles,
    #[command(flatten)]
    pub config: TableauCheckConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    /// Method type, A or B.
    #[arg(long = "type")]
    #[serde(rename = "type")]
    pub kind: Option<SchemeKind>,
    /// Named scheme; sets type, theta and nu.
    #[arg(long)]
    pub scheme: Option<NamedScheme>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Correction parameter for type B (default: theta).
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    /// Type B with the fixed-theta family parametrized by omega.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Number of implicit terms.
    #[arg(long)]
    pub s: Option<usize>,
    /// Wedge half-angle: a number or an expression like `pi/2`, `0.05pi`.
    #[arg(long)]
    pub alpha: Option<String>,
    /// `re_min,re_max,im_min,im_max`.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<Window>,
    /// `N` for N×N cells, or `NXxNY`.
    #[arg(long)]
    pub res: Option<String>,
    /// Radii per wedge ray (default depends on s).
    #[arg(long)]
    pub radii: Option<usize>,
    /// Output CSV (stdout when absent).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Optional PGM membership image.
    #[arg(long)]
    pub pgm: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub files: ConfigFiles,
    #[command(flatten)]
    pub config: StabilityConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    #[arg(long)]
    pub scheme: Option<NamedScheme>,
    /// s1 (full 2D diffusion implicit) or s2 (x and y separately).
    #[arg(long)]
    pub split: Option<SplitMode>,
    /// Cells per dimension.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Output times, comma separated.
    #[arg(long = "T", value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    /// Step indices `j` as `first-last`; `N_j` ≈ 50·2^{(j-1)/2}.
    #[arg(long)]
    pub j_range: Option<String>,
    /// Reference steps per unit time.
    #[arg(long)]
    pub reference_steps: Option<usize>,
    /// Reference cache file; reused when it matches, written otherwise.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Initial perturbation amplitude.
    #[arg(long)]
    pub perturbation: Option<f64>,
    /// Output CSV (stdout when absent).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub files: ConfigFiles,
    #[command(flatten)]
    pub config: ConvergeConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    #[arg(long)]
    pub scheme: Option<NamedScheme>,
    #[arg(long)]
    pub split: Option<SplitMode>,
    #[arg(long)]
    pub grid: Option<usize>,
    /// Steps per unit time.
    #[arg(long)]
    pub n: Option<usize>,
    /// Snapshot times, comma separated.
    #[arg(long = "T", value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    #[arg(long)]
    pub perturbation: Option<f64>,
    /// Output CSV (stdout when absent).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub files: ConfigFiles,
    #[command(flatten)]
    pub config: SimulateConfig,
}

/// Tagged union of all command configs, for storing complete run records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    TableauCheck(TableauCheckConfig),
    Stability(StabilityConfig),
    Converge(ConvergeConfig),
    Simulate(SimulateConfig),
}

/// Overlays non-null flag values onto the file config. The file may be a
/// bare option set or a record written by `--save-config`, whose `command`
/// tag must then name this command.
fn resolve<C>(command: &str, files: &ConfigFiles, flags: &C) -> Result<C, CliError>
where
    C: Serialize + DeserializeOwned + Clone,
{
    let Some(path) = &files.config else {
        return Ok(flags.clone());
    };
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let usage = |e: &dyn std::fmt::Display| CliError::Usage(format!("{}: {e}", path.display()));
    let mut value: serde_json::Value = serde_json::from_str(&text).map_err(|e| usage(&e))?;
    if let Some(tag) = value.as_object_mut().and_then(|m| m.remove("command")) {
        if tag.as_str() != Some(command) {
            return Err(usage(&format!("config is for `{tag}`, not `{command}`")));
        }
    }
    let base: C = serde_json::from_value(value).map_err(|e| usage(&e))?;
    let mut merged = serde_json::to_value(base).map_err(|e| CliError::Usage(e.to_string()))?;
    let over = serde_json::to_value(flags).map_err(|e| CliError::Usage(e.to_string()))?;
    if let (Some(m), Some(o)) = (merged.as_object_mut(), over.as_object()) {
        for (k, v) in o {
            if !v.is_null() {
                m.insert(k.clone(), v.clone());
            }
        }
    }
    serde_json::from_value(merged).map_err(|e| CliError::Usage(e.to_string()))
}

fn save_config(files: &ConfigFiles, record: RunConfig) -> Result<(), CliError> {
    if let Some(path) = &files.save_config {
        let mut text =
            serde_json::to_string_pretty(&record).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        fs::write(path, text).map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| io_err(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("missing required option --{flag}")))
}

/// Parses `0.3`, `pi`, `pi/2`, `0.05pi`, `0.05*pi/2`, `3pi/8`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.to_ascii_lowercase();
    let bad = || format!("cannot parse angle `{text}`");
    let Some(pos) = s.find("pi") else {
        return s.parse::<f64>().map_err(|_| bad());
    };
    let coef = s[..pos].trim_end_matches('*');
    let coef = if coef.is_empty() {
        1.0
    } else {
        coef.parse::<f64>().map_err(|_| bad())?
    };
    let rest = &s[pos + 2..];
    let den = if rest.is_empty() {
        1.0
    } else {
        rest.strip_prefix('/')
            .ok_or_else(bad)?
            .parse::<f64>()
            .map_err(|_| bad())?
    };
    Ok(coef * std::f64::consts::PI / den)
}

/// Parses `N`, `NXxNY` or `NX,NY`.
pub fn parse_resolution(text: &str) -> Result<(usize, usize), String> {
    let bad = || format!("cannot parse resolution `{text}`");
    let parts: Vec<&str> = text.split(['x', 'X', ',']).collect();
    match parts.as_slice() {
        [n] => {
            let n = n.trim().parse().map_err(|_| bad())?;
            Ok((n, n))
        }
        [a, b] => Ok((
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

/// Parses `a-b` or a single index.
pub fn parse_j_range(text: &str) -> Result<(u32, u32), String> {
    let bad = || format!("cannot parse step-index range `{text}` (expected e.g. 1-14)");
    let (a, b) = match text.split_once('-') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (text.trim(), text.trim()),
    };
    let a: u32 = a.parse().map_err(|_| bad())?;
    let b: u32 = b.parse().map_err(|_| bad())?;
    if a == 0 || b < a {
        return Err(bad());
    }
    Ok((a, b))
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(buf)
}

fn tableau_pair(c: &TableauCheckConfig) -> Result<RkPair, CliError> {
    if let Some(name) = c.scheme {
        return Ok(name.spec().pair);
    }
    let family = need(c.family, "family")?;
    let pair = match family {
        Family::Example1 => build_example1(need(c.theta, "theta")?)?,
        Family::Example2 => build_example2(need(c.theta, "theta")?)?,
        Family::Example3 => build_example3(need(c.omega, "omega")?)?,
        Family::Raw => {
            let theta = need(c.theta, "theta")?;
            let kappa = need(c.kappa, "kappa")?;
            let pair = RkPair {
                theta,
                kappa,
                a21: c.a21.unwrap_or(kappa - theta),
                b1: need(c.b1, "b1")?,
                b2: need(c.b2, "b2")?,
                ahat21: c.ahat21.unwrap_or(kappa),
                ahat31: need(c.ahat31, "ahat31")?,
                ahat32: need(c.ahat32, "ahat32")?,
                kind: match need(c.kind, "kind")? {
                    KindArg::A => PairKind::TypeA,
                    KindArg::B => PairKind::TypeB,
                },
            };
            // residuals are the output; only structural problems abort
            match pair.validate() {
                Ok(()) | Err(TableauError::OrderCondition { .. }) => pair,
                Err(e) => return Err(e.into()),
            }
        }
    };
    Ok(pair)
}

pub fn cmd_tableau_check(args: &TableauCheckArgs) -> Result<(), CliError> {
    let c = resolve("tableau-check", &args.files, &args.config)?;
    let pair = tableau_pair(&c)?;
    let bytes = csv_bytes(|buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["condition", "residual"])?;
        for r in verify_order2(&pair) {
            w.write_record([r.name.to_string(), format!("{:e}", r.value)])?;
        }
        w.flush()
    })?;
    save_config(&args.files, RunConfig::TableauCheck(c.clone()))?;
    emit(c.output.as_deref(), &bytes)
}

fn stability_params(c: &StabilityConfig) -> Result<StabilityParams, CliError> {
    let s = c.s.unwrap_or(1);
    if let Some(name) = c.scheme {
        let spec = name.spec();
        let kind = match spec.method {
            MethodType::TypeA => SchemeKind::A,
            MethodType::TypeB => SchemeKind::B,
        };
        return Ok(StabilityParams::new(
            kind,
            spec.pair.theta,
            spec.coeffs.nu,
            s,
        ));
    }
    let kind = need(c.kind, "type")?;
    if let (SchemeKind::B, Some(omega)) = (kind, c.omega) {
        let pair = build_example3(omega)?;
        let nu = correction_coefficients(&pair)?.nu;
        return Ok(StabilityParams::new(
            kind,
            pair.theta,
            c.nu.unwrap_or(nu),
            s,
        ));
    }
    let theta = need(c.theta, "theta")?;
    if !(theta.is_finite() && theta > 0.0) {
        return Err(StabilityError::InvalidTheta(theta).into());
    }
    let nu = match kind {
        SchemeKind::A => theta,
        SchemeKind::B => c.nu.unwrap_or(theta),
    };
    Ok(StabilityParams::new(kind, theta, nu, s))
}

pub fn cmd_stability(args: &StabilityArgs) -> Result<(), CliError> {
    let c = resolve("stability", &args.files, &args.config)?;
    let params = stability_params(&c)?;
    let alpha = match &c.alpha {
        Some(a) => parse_angle(a).map_err(CliError::Usage)?,
        None => 0.0,
    };
    let res = match &c.res {
        Some(r) => parse_resolution(r).map_err(CliError::Usage)?,
        None => (201, 201),
    };
    let wedge = match c.radii {
        Some(n) => WedgeSpec::with_radii(alpha, log_radii(n)),
        None => WedgeSpec::for_implicit_count(alpha, params.s),
    };
    let raster = raster_domain_with(params, &wedge, c.window.unwrap_or_default(), res)?;
    let csv = csv_bytes(|buf| raster.write_csv(buf))?;
    let pgm = match &c.pgm {
        Some(_) => Some(csv_bytes(|buf| raster.write_pgm(buf))?),
        None => None,
    };
    save_config(&args.files, RunConfig::Stability(c.clone()))?;
    if let (Some(path), Some(bytes)) = (&c.pgm, pgm) {
        fs::write(path, bytes).map_err(|e| io_err(path, e))?;
    }
    emit(c.output.as_deref(), &csv)
}

#[derive(Debug, Serialize, Deserialize)]
struct ReferenceCache {
    params: SchnakenbergParams,
    reference: Reference,
}

fn load_or_compute_reference(
    cache: Option<&Path>,
    grid: &Grid2D,
    params: &SchnakenbergParams,
    times: &[f64],
    steps: usize,
) -> Result<Reference, CliError> {
    if let Some(path) = cache {
        if let Ok(text) = fs::read_to_string(path) {
            if let Ok(c) = serde_json::from_str::<ReferenceCache>(&text) {
                let matches = c.params == *params
                    && c.reference.m == grid.m
                    && c.reference.n_per_unit == steps
                    && times.iter().all(|&t| c.reference.at(t).is_some());
                if matches {
                    return Ok(c.reference);
                }
            }
        }
    }
    eprintln!(
        "computing reference: m={}, {steps} steps per unit time",
        grid.m
    );
    let reference = reference_solution_with(grid, params, times, steps)?;
    if let Some(path) = cache {
        let c = ReferenceCache {
            params: *params,
            reference,
        };
        let text = serde_json::to_string(&c).map_err(|e| CliError::Io(e.to_string()))?;
        fs::write(path, text).map_err(|e| io_err(path, e))?;
        return Ok(c.reference);
    }
    Ok(reference)
}

fn check_grid(m: usize) -> Result<Grid2D, CliError> {
    if m == 0 {
        return Err(CliError::Usage("--grid must be at least 1".into()));
    }
    Ok(Grid2D::new(m))
}

fn check_times(times: &[f64]) -> Result<(), CliError> {
    if times.is_empty() || times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(CliError::Usage(
            "output times must be positive and finite".into(),
        ));
    }
    Ok(())
}

pub fn cmd_converge(args: &ConvergeArgs) -> Result<(), CliError> {
    let c = resolve("converge", &args.files, &args.config)?;
    let scheme = need(c.scheme, "scheme")?;
    let split = c.split.unwrap_or(SplitMode::S1);
    let grid = check_grid(c.grid.unwrap_or(100))?;
    let times = c.times.clone().unwrap_or_else(|| vec![0.5, 1.0]);
    check_times(&times)?;
    let (j0, j1) = match &c.j_range {
        Some(r) => parse_j_range(r).map_err(CliError::Usage)?,
        None => (1, 14),
    };
    let params = SchnakenbergParams {
        perturbation: c.perturbation.unwrap_or(1e-3),
        ..SchnakenbergParams::default()
    };
    let steps = c.reference_steps.unwrap_or(REFERENCE_STEPS);
    let reference =
        load_or_compute_reference(c.reference.as_deref(), &grid, &params, &times, steps)?;
    let rows = run_experiment(scheme, split, &grid, &params, j0..=j1, &times, &reference)?;
    let bytes = csv_bytes(|buf| write_error_table(&rows, buf))?;
    save_config(&args.files, RunConfig::Converge(c.clone()))?;
    emit(c.output.as_deref(), &bytes)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let c = resolve("simulate", &args.files, &args.config)?;
    let scheme = need(c.scheme, "scheme")?;
    let split = c.split.unwrap_or(SplitMode::S1);
    let grid = check_grid(c.grid.unwrap_or(100))?;
    let times = c.times.clone().unwrap_or_else(|| vec![1.0]);
    check_times(&times)?;
    let n = c.n.unwrap_or(400);
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let params = SchnakenbergParams {
        perturbation: c.perturbation.unwrap_or(1e-3),
        ..SchnakenbergParams::default()
    };
    let sys = SchnakenbergSystem::new(params, grid, split);
    let u0 = initial_condition(&params, &grid);
    let snaps = run_to_times(scheme, &sys, &u0, n, &times)?;
    let bytes = csv_bytes(|buf| write_fields_csv(&grid, &snaps, buf))?;
    save_config(&args.files, RunConfig::Simulate(c.clone()))?;
    emit(c.output.as_deref(), &bytes)
}

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::TableauCheck(a) => cmd_tableau_check(a),
        Command::Stability(a) => cmd_stability(a),
        Command::Converge(a) => cmd_converge(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run() -> i32 {
    run_from(std::env::args_os())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("0").unwrap(), 0.0);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("PI").unwrap(), PI);
        assert!((parse_angle("0.05pi").unwrap() - 0.05 * PI).abs() < 1e-15);
        assert!((parse_angle("3*pi/8").unwrap() - 3.0 * PI / 8.0).abs() < 1e-15);
        assert!((parse_angle("0.7").unwrap() - 0.7).abs() < 1e-15);
        assert!(parse_angle("pi2").is_err());
        assert!(parse_angle("half").is_err());
    }

    #[test]
    fn resolutions_and_ranges() {
        assert_eq!(parse_resolution("401").unwrap(), (401, 401));
        assert_eq!(parse_resolution("30x20").unwrap(), (30, 20));
        assert_eq!(parse_resolution("30,20").unwrap(), (30, 20));
        assert!(parse_resolution("a").is_err());
        assert_eq!(parse_j_range("1-14").unwrap(), (1, 14));
        assert_eq!(parse_j_range("7").unwrap(), (7, 7));
        assert!(parse_j_range("5-2").is_err());
        assert!(parse_j_range("0-3").is_err());
    }

    #[test]
    fn run_config_round_trips() {
        let cfgs = vec![
            RunConfig::Stability(StabilityConfig {
                kind: Some(SchemeKind::A),
                theta: Some(0.5),
                s: Some(2),
                alpha: Some("pi/2".into()),
                window: Some(Window::default()),
                res: Some("41".into()),
                ..Default::default()
            }),
            RunConfig::Converge(ConvergeConfig {
                scheme: Some(NamedScheme::ScmB2),
                split: Some(SplitMode::S2),
                times: Some(vec![0.5, 1.0]),
                ..Default::default()
            }),
            RunConfig::TableauCheck(TableauCheckConfig {
                family: Some(Family::Example3),
                omega: Some(0.25),
                ..Default::default()
            }),
            RunConfig::Simulate(SimulateConfig {
                n: Some(400),
                ..Default::default()
            }),
        ];
        for c in cfgs {
            let text = serde_json::to_string(&c).unwrap();
            let back: RunConfig = serde_json::from_str(&text).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let r: Result<ConvergeConfig, _> = serde_json::from_str(r#"{"scheme":"SCM-A1","gird":50}"#);
        assert!(r.is_err());
        let r: Result<StabilityConfig, _> = serde_json::from_str(r#"{"type":"A","theta":0.5}"#);
        assert!(r.is_ok());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"scheme":"SCM-A1","grid":50,"split":"s2"}"#).unwrap();
        let files = ConfigFiles {
            config: Some(path),
            save_config: None,
        };
        let flags = ConvergeConfig {
            grid: Some(20),
            ..Default::default()
        };
        let c = resolve("converge", &files, &flags).unwrap();
        assert_eq!(c.grid, Some(20));
        assert_eq!(c.scheme, Some(NamedScheme::ScmA1));
        assert_eq!(c.split, Some(SplitMode::S2));
    }

    #[test]
    fn stability_parameter_resolution() {
        let c = StabilityConfig {
            scheme: Some(NamedScheme::ScmB1),
            s: Some(2),
            ..Default::default()
        };
        let p = stability_params(&c).unwrap();
        assert_eq!(p.kind, SchemeKind::B);
        assert_eq!(p.s, 2);
        let expected = NamedScheme::ScmB1.spec().coeffs.nu;
        assert_eq!(p.nu, expected);

        let c = StabilityConfig {
            kind: Some(SchemeKind::B),
            omega: Some(0.0),
            ..Default::default()
        };
        assert_eq!(stability_params(&c).unwrap().nu, expected);

        let c = StabilityConfig {
            kind: Some(SchemeKind::A),
            theta: Some(0.0),
            ..Default::default()
        };
        assert!(matches!(stability_params(&c), Err(CliError::Usage(_))));
    }
}
