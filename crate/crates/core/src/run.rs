//! Batch front end: one subcommand per pipeline stage. Every run writes its
//! tables as CSV (9 significant digits), an optional gnuplot script, and a
//! JSON [`RunManifest`] naming every file it produced.
//!
//! CSV contents depend only on the flags, so repeated runs are byte-identical.
//! The manifest timestamp honours `SOURCE_DATE_EPOCH`, which makes the
//! manifests reproducible as well.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analytic::{self, FitSpace, FIT_FIELD_UNIT};
use crate::eigensolver::{self, merge_levels, pattern_string, SolverOptions};
use crate::eos::{self, LevelScheme, DEFAULT_MU_E};
use crate::field::{self, Confinement, FieldProfile, QuantumNumbers, Spin};
use crate::qspeed::{self, DisplacementMeasure, DEFAULT_SWEEP};
use crate::stellar::{self, EosMode, PiecewiseFieldProfile, StructureOptions};
use crate::units::{ConstantConvention, PhysicalConstants};
use crate::Error;

/// Exit code of a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit code when a computation fails.
pub const EXIT_FAILURE: i32 = 1;
/// Exit code for invalid flags (the same code clap uses).
pub const EXIT_USAGE: i32 = 2;

/// Default central Fermi energies of a mass–radius curve.
pub const DEFAULT_CURVE: &str = "eps_f=3,5,8,12,17,25";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => EXIT_USAGE,
            RunError::Compute(_) => EXIT_FAILURE,
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Compute(Error::Io(e))
    }
}

impl From<serde_json::Error> for RunError {
    fn from(e: serde_json::Error) -> Self {
        RunError::Compute(Error::Json(e))
    }
}

type RunResult<T> = std::result::Result<T, RunError>;

#[derive(Debug, Parser)]
#[command(name = "landau", version, about = "Relativistic Landau levels in power-law magnetic fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Effective potential curves V_eff(ρ), one CSV per n.
    Veff(VeffArgs),
    /// Both spin branches of the m-spectrum and their ordering pattern.
    Spectrum(SpectrumArgs),
    /// Least-squares constants of the two-constant eigenvalue formula.
    Fit(FitArgs),
    /// Variational upper bound against the computed spin-up ground level.
    Variational(VariationalArgs),
    /// Quantum speed between the two lowest m = 0 levels over n.
    Qspeed(QspeedArgs),
    /// Landau-quantized electron equation of state.
    Eos(EosArgs),
    /// Magnetized white-dwarf models and their mass–radius curve.
    Wd(WdArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Veff(_) => "veff",
            Command::Spectrum(_) => "spectrum",
            Command::Fit(_) => "fit",
            Command::Variational(_) => "variational",
            Command::Qspeed(_) => "qspeed",
            Command::Eos(_) => "eos",
            Command::Wd(_) => "wd",
        }
    }

    fn common(&self) -> &CommonArgs {
        match self {
            Command::Veff(a) => &a.common,
            Command::Spectrum(a) => &a.common,
            Command::Fit(a) => &a.common,
            Command::Variational(a) => &a.common,
            Command::Qspeed(a) => &a.common,
            Command::Eos(a) => &a.common,
            Command::Wd(a) => &a.common,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstantsArg {
    Codata,
    Paper,
}

impl From<ConstantsArg> for ConstantConvention {
    fn from(c: ConstantsArg) -> Self {
        match c {
            ConstantsArg::Codata => ConstantConvention::Codata,
            ConstantsArg::Paper => ConstantConvention::PaperCalibrated,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpinArg {
    Down,
    Up,
    Both,
}

impl SpinArg {
    fn spins(self) -> Vec<Spin> {
        match self {
            SpinArg::Down => vec![Spin::Down],
            SpinArg::Up => vec![Spin::Up],
            SpinArg::Both => Spin::BOTH.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Calibration of λ_e and B_c.
    #[arg(long, value_enum, default_value_t = ConstantsArg::Codata)]
    pub constants: ConstantsArg,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Also write a gnuplot script for the tables.
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Relative eigenvalue tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Minimum points of the radial grid.
    #[arg(long, default_value_t = 20_000)]
    pub points: usize,
}

impl SolverArgs {
    fn options(&self) -> RunResult<SolverOptions> {
        if !(self.tol > 0.0 && self.tol <= 1e-3) {
            return Err(RunError::Usage(format!("--tol must lie in (0, 1e-3], got {}", self.tol)));
        }
        if self.points < eigensolver::MIN_POINTS {
            return Err(RunError::Usage(format!(
                "--points must be at least {}, got {}",
                eigensolver::MIN_POINTS,
                self.points
            )));
        }
        Ok(SolverOptions::default().with_tol(self.tol).with_points(self.points))
    }
}

#[derive(Debug, Clone, Args)]
pub struct VeffArgs {
    /// Field amplitude, G·pm⁻ⁿ.
    #[arg(long = "B0")]
    pub b0: f64,
    /// Power-law indices (comma separated).
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub n: Vec<f64>,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub m: i32,
    #[arg(long, value_enum, default_value_t = SpinArg::Down)]
    pub spin: SpinArg,
    /// Innermost radius, pm.
    #[arg(long, default_value_t = 0.05)]
    pub rho_min: f64,
    /// Outermost radius, pm.
    #[arg(long, default_value_t = 3.0)]
    pub rho_max: f64,
    #[arg(long, default_value_t = 300)]
    pub samples: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[arg(long = "B0")]
    pub b0: f64,
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub n: Vec<f64>,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub m: i32,
    /// Highest level index solved per spin.
    #[arg(long, default_value_t = 5)]
    pub nu_max: u32,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitSpaceArg {
    Linear,
    Log,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[arg(long = "B0")]
    pub b0: f64,
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub n: Vec<f64>,
    /// Levels ν = 0..=nu_max of each spin enter the fit.
    #[arg(long, default_value_t = 9)]
    pub nu_max: u32,
    #[arg(long, value_enum, default_value_t = FitSpaceArg::Linear)]
    pub space: FitSpaceArg,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VariationalArgs {
    #[arg(long = "B0")]
    pub b0: f64,
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub n: Vec<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Literal,
    SingleRho,
}

#[derive(Debug, Clone, Args)]
pub struct QspeedArgs {
    #[arg(long = "B0")]
    pub b0: f64,
    /// Power-law indices; defaults to the standard sweep.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub n: Vec<f64>,
    #[arg(long, value_enum, default_value_t = SpinArg::Both)]
    pub spin: SpinArg,
    #[arg(long, value_enum, default_value_t = MeasureArg::Literal)]
    pub measure: MeasureArg,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    /// Tabulated fit constants (interpolated in n when not tabulated).
    Fit,
    /// Spectra solved on the fly.
    Computed,
}

#[derive(Debug, Clone, Args)]
pub struct EosArgs {
    #[arg(long = "B0")]
    pub b0: f64,
    /// Power-law indices; n = 0 always uses the closed-form uniform levels.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    pub n: Vec<f64>,
    #[arg(long, default_value_t = 17.0)]
    pub eps_max: f64,
    #[arg(long, default_value_t = 160)]
    pub steps: usize,
    #[arg(long, default_value_t = DEFAULT_MU_E)]
    pub mu_e: f64,
    #[arg(long, value_enum, default_value_t = SourceArg::Fit)]
    pub source: SourceArg,
    /// Levels per spin solved for `--source computed`.
    #[arg(long, default_value_t = 40)]
    pub levels: u32,
    /// Also tabulate the non-magnetic reference EOS.
    #[arg(long)]
    pub reference: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Paper,
    PaperContinuous,
    Uniform,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EosModeArg {
    Regional,
    LocalLandau,
    NonMagnetic,
}

impl From<EosModeArg> for EosMode {
    fn from(m: EosModeArg) -> Self {
        match m {
            EosModeArg::Regional => EosMode::Regional,
            EosModeArg::LocalLandau => EosMode::LocalLandau,
            EosModeArg::NonMagnetic => EosMode::NonMagnetic,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct WdArgs {
    /// Central field, G.
    #[arg(long = "B0", default_value_t = 2e15)]
    pub b0: f64,
    #[arg(long, value_enum, default_value_t = ProfileArg::Paper)]
    pub profile: ProfileArg,
    /// Central Fermi energies, `eps_f=a,b,...`.
    #[arg(long, default_value = DEFAULT_CURVE)]
    pub curve: String,
    #[arg(long, value_enum, default_value_t = EosModeArg::Regional)]
    pub eos_mode: EosModeArg,
    /// Radial step, km.
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    #[arg(long, default_value_t = DEFAULT_MU_E)]
    pub mu_e: f64,
    /// Surface pressure, erg/cm³ (default: the local EOS at ε_F = 1 + 10⁻⁶).
    #[arg(long)]
    pub p_stop: Option<f64>,
    /// Abandon a model beyond this radius, km.
    #[arg(long, default_value_t = 5e4)]
    pub max_radius: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Record of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub constant_convention: ConstantConvention,
    /// File names relative to the output directory, manifest excluded.
    pub outputs: Vec<String>,
    /// Derived quantities worth reading without parsing the tables.
    pub results: Value,
    /// RFC 3339, UTC.
    pub timestamp: String,
    pub tool_version: String,
}

/// File name of the manifest written by `command`.
pub fn manifest_name(command: &str) -> String {
    format!("{command}_manifest.json")
}

/// `SOURCE_DATE_EPOCH` when set, otherwise the current time.
fn timestamp() -> RunResult<String> {
    use chrono::{DateTime, SecondsFormat, Utc};
    let time = match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(raw) => {
            let secs: i64 = raw
                .trim()
                .parse()
                .map_err(|_| RunError::Usage(format!("SOURCE_DATE_EPOCH must be an integer, got `{raw}`")))?;
            DateTime::<Utc>::from_timestamp(secs, 0)
                .ok_or_else(|| RunError::Usage(format!("SOURCE_DATE_EPOCH out of range: {secs}")))?
        }
        Err(_) => Utc::now(),
    };
    Ok(time.to_rfc3339_opts(SecondsFormat::Secs, true))
}

/// Number formatted with 9 significant digits.
fn sci(x: f64) -> String {
    format!("{x:.8e}")
}

/// Compact, file-name-safe rendering of a parameter value.
fn tag(x: f64) -> String {
    format!("{x}")
}

/// Collects output files and writes them under the output directory.
struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
    plots: Vec<(String, String)>,
}

impl Outputs {
    fn new(dir: &Path) -> RunResult<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            plots: Vec::new(),
        })
    }

    fn write(&mut self, name: String, contents: &str) -> RunResult<()> {
        std::fs::write(self.dir.join(&name), contents)?;
        self.files.push(name);
        Ok(())
    }

    /// Write a table and remember a gnuplot `using` clause for it.
    fn table(&mut self, name: String, contents: &str, using: &str) -> RunResult<()> {
        self.plots.push((name.clone(), using.to_string()));
        self.write(name, contents)
    }
}

fn gnuplot_script(command: &str, plots: &[(String, String)], xlabel: &str, ylabel: &str, log: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {command}: plot with `gnuplot -p {command}.gp`");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set xlabel '{xlabel}'");
    let _ = writeln!(s, "set ylabel '{ylabel}'");
    if !log.is_empty() {
        let _ = writeln!(s, "set logscale {log}");
    }
    let clauses: Vec<String> = plots
        .iter()
        .map(|(file, using)| format!("'{file}' using {using} with lines title '{file}'"))
        .collect();
    let _ = writeln!(s, "plot {}", clauses.join(", \\\n     "));
    s
}

fn check_b0(b0: f64) -> RunResult<()> {
    if b0.is_finite() && b0 > 0.0 {
        Ok(())
    } else {
        Err(RunError::Usage(format!("--B0 must be positive, got {b0}")))
    }
}

fn check_bound_n(ns: &[f64]) -> RunResult<()> {
    match ns.iter().find(|n| !(n.is_finite() && **n > -1.0)) {
        Some(n) => Err(RunError::Usage(format!(
            "n = {n} admits no bound states; only `veff` accepts n <= -1"
        ))),
        None if ns.is_empty() => Err(RunError::Usage("--n needs at least one value".into())),
        None => Ok(()),
    }
}

fn parse_curve(raw: &str) -> RunResult<Vec<f64>> {
    let list = raw.trim().strip_prefix("eps_f=").unwrap_or(raw.trim());
    let values = list
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x > 1.0)
                .ok_or_else(|| RunError::Usage(format!("--curve entries must be numbers > 1, got `{v}`")))
        })
        .collect::<RunResult<Vec<f64>>>()?;
    if values.is_empty() {
        return Err(RunError::Usage("--curve needs at least one central eps_F".into()));
    }
    Ok(values)
}

/// Run a parsed command and write its manifest. Returns the manifest.
pub fn execute(command: &Command) -> RunResult<RunManifest> {
    let common = command.common();
    let convention = ConstantConvention::from(common.constants);
    let constants = PhysicalConstants::for_convention(convention);
    let mut out = Outputs::new(&common.out)?;
    let mut parameters = BTreeMap::new();
    parameters.insert("lambda_e_pm".to_string(), json!(constants.lambda_e));
    parameters.insert("b_c_gauss".to_string(), json!(constants.b_c));

    let results = match command {
        Command::Veff(a) => veff(a, &constants, &mut out, &mut parameters)?,
        Command::Spectrum(a) => spectrum(a, &constants, &mut out, &mut parameters)?,
        Command::Fit(a) => fit(a, &constants, &mut out, &mut parameters)?,
        Command::Variational(a) => variational(a, &constants, &mut out, &mut parameters)?,
        Command::Qspeed(a) => quantum_speed(a, &constants, &mut out, &mut parameters)?,
        Command::Eos(a) => equation_of_state(a, &constants, &mut out, &mut parameters)?,
        Command::Wd(a) => white_dwarf(a, &constants, &mut out, &mut parameters)?,
    };

    if common.gnuplot && !out.plots.is_empty() {
        let (xlabel, ylabel, log) = match command {
            Command::Veff(_) => ("rho [pm]", "V_eff", ""),
            Command::Spectrum(_) => ("nu", "alpha", ""),
            Command::Fit(_) => ("n", "C3", ""),
            Command::Variational(_) => ("n", "alpha_0+", ""),
            Command::Qspeed(_) => ("n", "speed [pm/s]", ""),
            Command::Eos(_) => ("rho [g/cc]", "P [erg/cc]", "xy"),
            Command::Wd(_) => ("r [km]", "M [g]", ""),
        };
        let script = gnuplot_script(command.name(), &out.plots, xlabel, ylabel, log);
        out.write(format!("{}.gp", command.name()), &script)?;
    }

    let manifest = RunManifest {
        command: command.name().to_string(),
        parameters,
        constant_convention: convention,
        outputs: out.files.clone(),
        results,
        timestamp: timestamp()?,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    std::fs::write(common.out.join(manifest_name(command.name())), text)?;
    Ok(manifest)
}

/// Parse `args` (program name first) and run. Returns the process exit code;
/// diagnostics go to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(manifest) => {
            eprintln!(
                "{}: wrote {} file(s) and {}",
                manifest.command,
                manifest.outputs.len(),
                manifest_name(&manifest.command)
            );
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn veff(
    a: &VeffArgs,
    constants: &PhysicalConstants,
    out: &mut Outputs,
    parameters: &mut BTreeMap<String, Value>,
) -> RunResult<Value> {
    check_b0(a.b0)?;
    if a.n.is_empty() {
        return Err(RunError::Usage("--n needs at least one value".into()));
    }
    if !(a.rho_min > 0.0 && a.rho_max > a.rho_min && a.rho_max.is_finite()) || a.samples < 2 {
        return Err(RunError::Usage(format!(
            "need 0 < --rho-min < --rho-max and --samples >= 2, got {}, {}, {}",
            a.rho_min, a.rho_max, a.samples
        )));
    }
    parameters.insert("B0".into(), json!(a.b0));
    parameters.insert("n".into(), json!(a.n));
    parameters.insert("m".into(), json!(a.m));
    parameters.insert("spin".into(), json!(format!("{:?}", a.spin).to_lowercase()));
    parameters.insert("rho_min_pm".into(), json!(a.rho_min));
    parameters.insert("rho_max_pm".into(), json!(a.rho_max));
    parameters.insert("samples".into(), json!(a.samples));

    let rho = field::geometric_grid(a.rho_min, a.rho_max, a.samples)?;
    let mut curves = Vec::new();
    for &n in &a.n {
        let profile = FieldProfile::unrestricted(a.b0, n)
            .map_err(|e| RunError::Usage(e.to_string()))?
            .with_constants(*constants);
        if !profile.admits_bound_states() {
            eprintln!("warning: n = {n} is plotted and classified only; no eigen-solve is defined for n <= -1");
        }
        for spin in a.spin.spins() {
            let q = QuantumNumbers::new(a.m, spin, 0);
            let mut csv = String::from("rho_pm,V_eff\n");
            for &r in &rho {
                let _ = writeln!(csv, "{},{}", sci(r), sci(field::effective_potential(&profile, q, r)?));
            }
            let name = match a.spin {
                SpinArg::Both => format!("veff_n{}_{spin}.csv", tag(n)),
                _ => format!("veff_n{}.csv", tag(n)),
            };
            out.table(name.clone(), &csv, "1:2")?;
            let class = field::classify_confinement(&profile, q, 0.01, 100.0, 10_000)?;
            curves.push(json!({
                "file": name,
                "n": n,
                "spin": spin,
                "confinement": class,
                "solvable": profile.admits_bound_states() && class == Confinement::Confining,
                "V_eff_at_1pm": field::effective_potential(&profile, q, 1.0)?,
            }));
        }
    }
    Ok(json!({ "curves": curves }))
}

fn spectrum(
    a: &SpectrumArgs,
    constants: &PhysicalConstants,
    out: &mut Outputs,
    parameters: &mut BTreeMap<String, Value>,
) -> RunResult<Value> {
    check_b0(a.b0)?;
    check_bound_n(&a.n)?;
    let opts = a.solver.options()?;
    parameters.insert("B0".into(), json!(a.b0));
    parameters.insert("n".into(), json!(a.n));
    parameters.insert("m".into(), json!(a.m));
    parameters.insert("nu_max".into(), json!(a.nu_max));
    parameters.insert("tol".into(), json!(opts.tol));
    parameters.insert("points".into(), json!(opts.points));

    let mut spectra = Vec::new();
    for &n in &a.n {
        let profile = FieldProfile::new(a.b0, n)?.with_constants(*constants);
        let down = eigensolver::spectrum(&profile, a.m, Spin::Down, a.nu_max, &opts)?.alphas();
        let up = eigensolver::spectrum(&profile, a.m, Spin::Up, a.nu_max, &opts)?.alphas();
        let merged = merge_levels(&down, &up);
        let mut csv = String::from("nu,spin,alpha\n");
        for l in &merged {
            let _ = writeln!(csv, "{},{},{}", l.nu, l.spin, sci(l.alpha));
        }
        let name = format!("spectrum_n{}.csv", tag(n));
        out.table(name.clone(), &csv, "0:3")?;

        let ties: Vec<Value> = merged
            .chunk_by(|x, y| x.group == y.group)
            .filter(|g| g.len() > 1)
            .map(|g| json!(g.iter().map(|l| format!("{}{}", l.spin.label(), l.nu)).collect::<Vec<_>>()))
            .collect();
        spectra.push(json!({
            "file": name,
            "n": n,
            "pattern": pattern_string(&merged, a.nu_max as usize + 1),
            "degenerate_groups": ties,
        }));
    }
    Ok(json!({ "spectra": spectra }))
}

fn fit(
    a: &FitArgs,
    constants: &PhysicalConstants,
    out: &mut Outputs,
    parameters: &mut BTreeMap<String, Value>,
) -> RunResult<Value> {
    check_b0(a.b0)?;
    check_bound_n(&a.n)?;
    if a.nu_max < 3 {
        return Err(RunError::Usage(format!("--nu-max must be at least 3, got {}", a.nu_max)));
    }
    let opts = a.solver.options()?;
    let space = match a.space {
        FitSpaceArg::Linear => FitSpace::Linear,
        FitSpaceArg::Log => FitSpace::Log,
    };
    parameters.insert("B0".into(), json!(a.b0));
    parameters.insert("n".into(), json!(a.n));
    parameters.insert("nu_max".into(), json!(a.nu_max));
    parameters.insert("space".into(), json!(space));
    parameters.insert("tol".into(), json!(opts.tol));

    let mut csv = String::from("n,C3,C5,rms\n");
    let mut rows = Vec::new();
    for &n in &a.n {
        let profile = FieldProfile::new(a.b0, n)?.with_constants(*constants);
        let down = eigensolver::spectrum(&profile, 0, Spin::Down, a.nu_max, &opts)?;
        let up = eigensolver::spectrum(&profile, 0, Spin::Up, a.nu_max, &opts)?;
        let r = analytic::fit_constants(&down, &up, a.b0 / FIT_FIELD_UNIT, space)?;
        let _ = writeln!(csv, "{},{},{},{}", sci(n), sci(r.constants.c3), sci(r.constants.c5), sci(r.rms));
        rows.push(json!({
            "n": n,
            "C3": r.constants.c3,
            "C5": r.constants.c5,
            "rms": r.rms,
            "levels": r.points,
            "published": analytic::published_fit_constants(n).map(|t| json!({ "C3": t.c3, "C5": t.c5 })),
        }));
    }
    out.table("fit.csv".into(), &csv, "1:2")?;
    Ok(json!({ "constants": rows }))
}

fn variational(
    a: &VariationalArgs,
    constants: &PhysicalConstants,
    out: &mut Outputs,
    parameters: &mut BTreeMap<String, Value>,
) -> RunResult<Value> {
    check_b0(a.b0)?;
    check_bound_n(&a.n)?;
    let opts = a.solver.options()?;
    parameters.insert("B0".into(), json!(a.b0));
    parameters.insert("n".into(), json!(a.n));
    parameters.insert("tol".into(), json!(opts.tol));

    let rows = a
        .n
        .par_iter()
        .map(|&n| -> crate::Result<(f64, f64, f64)> {
            let profile = FieldProfile::new(a.b0, n)?.with_constants(*constants);
            let computed = eigensolver::solve_level(&profile, QuantumNumbers::new(0, Spin::Up, 0), &opts)?.alpha;
            Ok((n, computed, analytic::variational_ground(&profile, Spin::Up)?))
        })
        .collect::<crate::Result<Vec<_>>>()?;

    let mut csv = String::from("n,alpha_computed,alpha_bound,relative_deviation\n");
    let mut violations = Vec::new();
    for &(n, computed, bound) in &rows {
        let _ = writeln!(csv, "{},{},{},{}", sci(n), sci(computed), sci(bound), sci((bound - computed) / computed));
        if bound < computed {
            violations.push(n);
        }
    }
    out.table("variational.csv".into(), &csv, "1:2")?;
    Ok(json!({ "bound_below_computed": violations }))
}

fn quantum_speed(
    a: &QspeedArgs,
    constants: &PhysicalConstants,
    out: &mut Outputs,
    parameters: &mut BTreeMap<String, Value>,
) -> RunResult<Value> {
    check_b0(a.b0)?;
    let ns = if a.n.is_empty() { DEFAULT_SWEEP.to_vec() } else { a.n.clone() };
    check_bound_n(&ns)?;
    let opts = a.solver.options()?;
    let measure = match a.measure {
        MeasureArg::Literal => DisplacementMeasure::Literal,
        MeasureArg::SingleRho => DisplacementMeasure::SingleRho,
    };
    parameters.insert("B0".into(), json!(a.b0));
    parameters.insert("n".into(), json!(ns));
    parameters.insert("measure".into(), json!(measure));
    parameters.insert("tol".into(), json!(opts.tol));

    let mut summary = Vec::new();
    for spin in a.spin.spins() {
        let sweep = qspeed::speed_sweep(a.b0, &ns, spin, constants, &opts, measure)
            .into_iter()
            .collect::<crate::Result<Vec<_>>>()?;
        let mut csv = String::from("n,alpha0,alpha1,delta_h_mev,t_min_s,rho_disp_pm,speed_pm_s\n");
        for r in &sweep {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                sci(r.n),
                sci(r.alpha0),
                sci(r.alpha1),
                sci(r.delta_h),
                sci(r.t_min),
                sci(r.rho_disp),
                sci(r.speed)
            );
        }
        let name = format!("qspeed_{spin}.csv");
        out.table(name.clone(), &csv, "1:7")?;
        let speeds: Vec<f64> = sweep.iter().map(|r| r.speed).collect();
        let argmax = sweep
            .iter()
            .max_by(|x, y| x.speed.total_cmp(&y.speed))
            .map(|r| r.n);
        summary.push(json!({
            "file": name,
            "spin": spin,
            "argmax_n": argmax,
            "local_maxima_n": qspeed::local_maxima(&speeds).iter().map(|&i| ns[i]).collect::<Vec<_>>(),
        }));
    }
    Ok(json!({ "sweeps": summary }))
}

fn eos_scheme(
    a: &EosArgs,
    n: f64,
    constants: &PhysicalConstants,
    opts: &SolverOptions,
) -> RunResult<LevelScheme> {
    if n == 0.0 {
        return Ok(LevelScheme::uniform(a.b0, *constants)?);
    }
    match a.source {
        SourceArg::Fit => {
            let fc = match analytic::published_fit_constants(n) {
                Some(fc) => fc,
                None => analytic::interpolate_fit_table(n).map_err(|e| RunError::Usage(e.to_string()))?,
            };
            Ok(LevelScheme::fit(fc, a.b0, *constants)?)
        }
        SourceArg::Computed => {
            let profile = FieldProfile::new(a.b0, n)?.with_constants(*constants);
            Ok(LevelScheme::from_profile(&profile, a.levels, opts)?)
        }
    }
}

fn equation_of_state(
    a: &EosArgs,
    constants: &PhysicalConstants,
    out: &mut Outputs,
    parameters: &mut BTreeMap<String, Value>,
) -> RunResult<Value> {
    check_b0(a.b0)?;
    check_bound_n(&a.n)?;
    if !(a.eps_max > 1.0 && a.eps_max.is_finite()) || a.steps < 10 {
        return Err(RunError::Usage(format!(
            "need --eps-max > 1 and --steps >= 10, got {}, {}",
            a.eps_max, a.steps
        )));
    }
    if !(a.mu_e > 0.0 && a.mu_e.is_finite()) {
        return Err(RunError::Usage(format!("--mu-e must be positive, got {}", a.mu_e)));
    }
    let opts = a.solver.options()?;
    parameters.insert("B0".into(), json!(a.b0));
    parameters.insert("n".into(), json!(a.n));
    parameters.insert("eps_max".into(), json!(a.eps_max));
    parameters.insert("steps".into(), json!(a.steps));
    parameters.insert("mu_e".into(), json!(a.mu_e));
    parameters.insert("source".into(), json!(format!("{:?}", a.source).to_lowercase()));

    let mut tables = Vec::new();
    for &n in &a.n {
        let scheme = eos_scheme(a, n, constants, &opts)?;
        let table = eos::eos_table(&scheme, a.mu_e, a.eps_max, a.steps)?;
        let name = format!("eos_n{}.csv", tag(n));
        out.table(name.clone(), &table.to_csv(), "3:4")?;
        tables.push(json!({
            "file": name,
            "n": n,
            "B0": a.b0,
            "source": scheme.source_name(),
            "scheme": scheme.source,
            "mu_e": a.mu_e,
            "occupied_levels": table.occupied_levels()?,
        }));
    }
    if a.reference {
        let mut csv = String::from(eos::EOS_CSV_HEADER);
        csv.push('\n');
        for i in 0..=a.steps {
            let eps = 1.0 + (a.eps_max - 1.0) * i as f64 / a.steps as f64;
            let p = eos::chandrasekhar_eos(constants, eps, a.mu_e)?;
            let _ = writeln!(csv, "{},{},{},{}", sci(p.eps_f), sci(p.n_e), sci(p.rho_mass), sci(p.p_e));
        }
        out.table("eos_nonmagnetic.csv".into(), &csv, "3:4")?;
    }
    Ok(json!({ "tables": tables }))
}

fn white_dwarf(
    a: &WdArgs,
    constants: &PhysicalConstants,
    out: &mut Outputs,
    parameters: &mut BTreeMap<String, Value>,
) -> RunResult<Value> {
    let central = parse_curve(&a.curve)?;
    if !(a.step > 0.0 && a.step.is_finite()) {
        return Err(RunError::Usage(format!("--step must be positive, got {}", a.step)));
    }
    if !(a.mu_e > 0.0 && a.mu_e.is_finite()) {
        return Err(RunError::Usage(format!("--mu-e must be positive, got {}", a.mu_e)));
    }
    if !(a.max_radius > a.step) {
        return Err(RunError::Usage(format!("--max-radius must exceed --step, got {}", a.max_radius)));
    }
    if let Some(p) = a.p_stop {
        if !(p > 0.0 && p.is_finite()) {
            return Err(RunError::Usage(format!("--p-stop must be positive, got {p}")));
        }
    }
    let field = match a.profile {
        ProfileArg::Zero => PiecewiseFieldProfile::zero(),
        other => {
            check_b0(a.b0)?;
            match other {
                ProfileArg::Paper => PiecewiseFieldProfile::paper(a.b0)?,
                ProfileArg::PaperContinuous => PiecewiseFieldProfile::paper_continuous(a.b0)?,
                _ => PiecewiseFieldProfile::uniform(a.b0)?,
            }
        }
    };
    let opts = StructureOptions {
        step_km: a.step,
        mu_e: a.mu_e,
        p_stop: a.p_stop,
        max_radius_km: a.max_radius,
        mode: a.eos_mode.into(),
    };
    parameters.insert("B0".into(), json!(a.b0));
    parameters.insert("profile".into(), json!(field.label));
    parameters.insert("eos_mode".into(), json!(opts.mode));
    parameters.insert("step_km".into(), json!(opts.step_km));
    parameters.insert("mu_e".into(), json!(opts.mu_e));
    parameters.insert(
        "p_stop".into(),
        match opts.p_stop {
            Some(p) => json!(p),
            None => json!(format!("local EOS at eps_F = {}", stellar::SURFACE_EPS_F)),
        },
    );
    parameters.insert("max_radius_km".into(), json!(opts.max_radius_km));
    parameters.insert("eps_f_central".into(), json!(central));

    let models: Vec<_> = central
        .par_iter()
        .map(|&eps| stellar::integrate_structure(eps, &field, constants, &opts))
        .collect();

    let mut curve = Vec::new();
    let mut failures = Vec::new();
    for (&eps, model) in central.iter().zip(models) {
        match model {
            Ok(m) => {
                out.table(format!("wd_profile_eps{}.csv", tag(eps)), &m.to_csv(), "1:2")?;
                curve.push(stellar::MassRadiusPoint {
                    eps_f_central: eps,
                    mass_msun: m.total_mass_msun,
                    radius_km: m.surface_r_km,
                    surface_b: m.surface_b,
                });
            }
            Err(e) => {
                eprintln!("warning: central eps_F = {eps}: {e}");
                failures.push(json!({ "eps_f_central": eps, "error": e.to_string() }));
            }
        }
    }
    if curve.is_empty() {
        return Err(RunError::Compute(Error::Structure {
            radius_km: a.max_radius,
            reason: "no model of the curve reached a surface".into(),
        }));
    }
    out.write("wd_curve.csv".into(), &stellar::curve_to_csv(&curve))?;
    let max_mass = curve.iter().map(|p| p.mass_msun).fold(f64::NEG_INFINITY, f64::max);
    Ok(json!({
        "models": curve,
        "failures": failures,
        "max_mass_msun": max_mass,
    }))
}
