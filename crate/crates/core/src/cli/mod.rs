//! `polarkit` command-line driver.
//!
//! `run` evaluates the observable of a spec file over a polar-angle grid of
//! one particle (and optionally an energy window) and writes a CSV table plus
//! a `key,value` summary next to it. `validate` resolves the amplitude lookups
//! without evaluating anything.
//!
//! Exit status: 0 success, 1 output not writable, 2 unreadable or malformed
//! input and usage errors, 3 physics errors, 4 oracle deviation above `--tol`.

pub mod needs;
pub mod output;
pub mod specfile;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use crate::amplitudes::{load_table, AmplitudeError, ReducedAmplitudeTable};
use crate::angular::Direction;
use crate::observables::{alignment_a2, auger_distribution, photoelectron_distribution};
use crate::oracle;
use crate::processes::{
    evaluate, first_step_multipoles, level_multipoles, xsec_cascade, ProcessError, ProcessKind, ProcessSpec, Role,
};

pub use needs::Report;
pub use specfile::{parse_spec, Scan, SpecFile, SpecFileError};

/// Absolute deviation below which oracle comparisons always pass.
const ABS_FLOOR: f64 = 1e-14;
/// Negative values tolerated relative to the largest value of a scan.
const NEGATIVE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Input {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    SpecFile {
        path: String,
        #[source]
        source: SpecFileError,
    },
    #[error("{path}: {source}")]
    Amplitudes {
        path: String,
        #[source]
        source: AmplitudeError,
    },
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("oracle deviation {max:e} exceeds tolerance {tol:e}")]
    OracleMismatch { max: f64, tol: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output { .. } => 1,
            CliError::Usage(_) | CliError::Input { .. } | CliError::SpecFile { .. } | CliError::Amplitudes { .. } => 2,
            CliError::Process(e) => match e {
                ProcessError::Amplitude(_) | ProcessError::Spec(_) => 2,
                ProcessError::Domain(_)
                | ProcessError::ImaginaryResidue { .. }
                | ProcessError::Negative { .. }
                | ProcessError::TooLarge(_) => 3,
            },
            CliError::OracleMismatch { .. } => 4,
        }
    }
}

/// Energies `from..=to` in `points` equal steps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyWindow {
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl EnergyWindow {
    /// Parses `FROM:TO:N`.
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Usage(format!("energy window `{s}` is not FROM:TO:N"));
        let parts: Vec<&str> = s.split(':').collect();
        let [from, to, n] = parts.as_slice() else { return Err(bad()) };
        let w = EnergyWindow {
            from: from.trim().parse().map_err(|_| bad())?,
            to: to.trim().parse().map_err(|_| bad())?,
            points: n.trim().parse().map_err(|_| bad())?,
        };
        if w.points < 1 || !w.from.is_finite() || !w.to.is_finite() {
            return Err(CliError::Usage("energy window needs finite bounds and at least one point".into()));
        }
        Ok(w)
    }

    pub fn energies(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.from];
        }
        let step = (self.to - self.from) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.from + step * i as f64).collect()
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub spec: PathBuf,
    pub amps: PathBuf,
    pub out: PathBuf,
    pub grid_deg: f64,
    pub energies: Option<EnergyWindow>,
    pub k_max: Option<u32>,
    /// Oracle cross-check with this relative tolerance.
    pub oracle_tol: Option<f64>,
    /// Worker threads; rayon's default when absent.
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(spec: impl Into<PathBuf>, amps: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            spec: spec.into(),
            amps: amps.into(),
            out: out.into(),
            grid_deg: 1.0,
            energies: None,
            k_max: None,
            oracle_tol: None,
            threads: None,
        }
    }

    fn theta_grid(&self) -> Result<Vec<f64>, CliError> {
        let d = self.grid_deg;
        let n = (180.0 / d).round();
        if d.is_nan() || d <= 0.0 || n < 1.0 || (n * d - 180.0).abs() > 1e-9 {
            return Err(CliError::Usage(format!("angle step {d} does not divide 180")));
        }
        let n = n as usize;
        Ok((0..=n).map(|i| 180.0 * i as f64 / n as f64).collect())
    }
}

/// Table and summary written by `run`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub csv: String,
    pub summary: Vec<(String, String)>,
    pub max_rel_dev: Option<f64>,
}

impl RunOutput {
    pub fn summary_csv(&self) -> String {
        let rows: Vec<Vec<String>> = self.summary.iter().map(|(k, v)| vec![k.clone(), v.clone()]).collect();
        output::csv(&["key", "value"], &rows)
    }
}

/// Path of the summary file belonging to an output table.
pub fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.summary.csv"))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Input { path: path.display().to_string(), source })
}

fn load(spec: &Path, amps: &Path) -> Result<(SpecFile, ReducedAmplitudeTable), CliError> {
    let file =
        parse_spec(&read(spec)?).map_err(|source| CliError::SpecFile { path: spec.display().to_string(), source })?;
    let table = load_table(amps).map_err(|source| match source {
        AmplitudeError::Io { source, .. } => CliError::Input { path: amps.display().to_string(), source },
        source => CliError::Amplitudes { path: amps.display().to_string(), source },
    })?;
    Ok((file, table))
}

/// Dry run: resolves the amplitudes the spec needs.
pub fn validate_files(spec: &Path, amps: &Path) -> Result<Report, CliError> {
    let (file, table) = load(spec, amps)?;
    Ok(needs::validate(&file, &table))
}

fn set_energy(spec: &mut ProcessSpec, e: f64) -> Result<(), CliError> {
    match spec.kind {
        ProcessKind::Photoexcitation | ProcessKind::Photoionization => spec.photon_energy = Some(e),
        ProcessKind::EExcitation
        | ProcessKind::EIonization
        | ProcessKind::RadRecombination
        | ProcessKind::DielectronicRecombination => spec.electron_energy = Some(e),
        k => return Err(CliError::Usage(format!("no energy to scan for {}", k.as_str()))),
    }
    Ok(())
}

fn at_angle(file: &SpecFile, theta_deg: f64, detected: bool) -> Result<Vec<ProcessSpec>, CliError> {
    let mut steps = file.steps.clone();
    let last = steps.last_mut().expect("nonempty");
    let dir = Direction::from_degrees(theta_deg, file.scan.phi_deg).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut p = last.particle(file.scan.role);
    p.direction = dir;
    p.detected = detected;
    if p.polarization.helicity_twice().is_some() {
        p.polarization.axis = dir;
    }
    last.set_particle(file.scan.role, p);
    Ok(steps)
}

fn value(steps: &[ProcessSpec], table: &ReducedAmplitudeTable) -> Result<(f64, Vec<String>), ProcessError> {
    let obs = if steps.len() > 1 { xsec_cascade(steps, table)? } else { evaluate(&steps[0], table)? };
    Ok((obs.value, obs.warnings.iter().map(ToString::to_string).collect()))
}

fn oracle_value(steps: &[ProcessSpec], table: &ReducedAmplitudeTable) -> Result<f64, ProcessError> {
    if steps.len() > 1 {
        return Ok(oracle::oracle_cascade(steps, table)?.value);
    }
    let s = &steps[0];
    let r = match s.kind {
        ProcessKind::Photoexcitation
        | ProcessKind::Photoionization
        | ProcessKind::RadRecombination
        | ProcessKind::DielectronicRecombination => oracle::oracle_photo(s, table)?,
        ProcessKind::EExcitation | ProcessKind::EIonization => oracle::oracle_e_impact(s, table)?,
        ProcessKind::RadDecay | ProcessKind::Auger => oracle::oracle_decay(s, table)?,
    };
    Ok(r.value)
}

struct Point {
    theta: f64,
    energy: Option<f64>,
    value: f64,
    oracle: Option<f64>,
    warnings: Vec<String>,
}

fn rel_dev(v: f64, o: f64) -> f64 {
    let d = (v - o).abs();
    if d <= ABS_FLOOR {
        0.0
    } else {
        d / o.abs()
    }
}

/// Observables of the first grid energy that have a closed Legendre form.
fn distribution_summary(steps: &[ProcessSpec], table: &ReducedAmplitudeTable, out: &mut Vec<(String, String)>) {
    let push = |out: &mut Vec<(String, String)>, k: &str, v: f64| out.push((k.to_string(), output::float(v)));
    let first = &steps[0];
    if steps.len() == 1 && first.kind == ProcessKind::Photoionization {
        if let Ok(d) = photoelectron_distribution(first, table) {
            push(out, "sigma", d.sigma);
            push(out, "beta", d.beta());
            push(out, "beta_circular", d.beta_circular());
        }
    }
    let level = if steps.len() == 1 && first.kind == ProcessKind::Auger {
        let target = first.particle(Role::Target);
        crate::processes::spec::resolve_auger(first, table)
            .ok()
            .map(|(sys, _)| level_multipoles(sys.two_j1, &target.polarization))
    } else if steps.len() == 2 && steps[1].kind == ProcessKind::Auger {
        first_step_multipoles(first, table).ok().map(|x| x.0)
    } else {
        None
    };
    if let Some(m) = level {
        let auger = steps.last().expect("nonempty");
        if let Ok(a2) = alignment_a2(&m) {
            push(out, "A2", a2);
        }
        if let Ok(d) = auger_distribution(&m, auger, table) {
            push(out, "auger_beta", d.beta());
        }
    }
}

fn scan_is_outgoing(role: Role) -> bool {
    matches!(role, Role::PhotonOut | Role::ElectronOut | Role::ElectronOut2)
}

/// Evaluates the grid and renders the table; writes nothing.
pub fn compute(cfg: &RunConfig, file: &SpecFile, table: &ReducedAmplitudeTable) -> Result<RunOutput, CliError> {
    let mut file = file.clone();
    if let Some(k) = cfg.k_max {
        for s in &mut file.steps {
            s.k_max = k;
        }
    }
    if matches!(file.scan.role, Role::Target | Role::Residual) {
        return Err(CliError::Usage(format!("cannot scan the direction of the {}", file.scan.role.as_str())));
    }
    if let Some(tol) = cfg.oracle_tol {
        if tol.is_nan() || tol <= 0.0 {
            return Err(CliError::Usage(format!("tolerance {tol} must be positive")));
        }
    }
    let thetas = cfg.theta_grid()?;
    let energies: Vec<Option<f64>> = match &cfg.energies {
        Some(w) => w.energies().into_iter().map(Some).collect(),
        None => vec![None],
    };
    let mut grid = Vec::new();
    for &e in &energies {
        for &t in &thetas {
            grid.push((t, e));
        }
    }
    let with_energy = |mut steps: Vec<ProcessSpec>, e: Option<f64>| -> Result<Vec<ProcessSpec>, CliError> {
        if let Some(e) = e {
            set_energy(&mut steps[0], e)?;
        }
        Ok(steps)
    };

    let eval = |&(theta, energy): &(f64, Option<f64>)| -> Result<Point, CliError> {
        let steps = with_energy(at_angle(&file, theta, true)?, energy)?;
        let (value, warnings) = value(&steps, table)?;
        let oracle = match cfg.oracle_tol {
            Some(_) => Some(oracle_value(&steps, table)?),
            None => None,
        };
        Ok(Point { theta, energy, value, oracle, warnings })
    };
    let results: Vec<Result<Point, CliError>> = match cfg.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            pool.install(|| grid.par_iter().map(eval).collect())
        }
        None => grid.par_iter().map(eval).collect(),
    };
    let points: Vec<Point> = results.into_iter().collect::<Result<_, _>>()?;

    let scale = points.iter().map(|p| p.value.abs()).fold(0.0, f64::max);
    let min = points.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
    if min < -NEGATIVE_TOL * scale {
        return Err(ProcessError::Negative { value: min, scale }.into());
    }

    let mut header = vec!["theta_deg", "phi_deg"];
    if cfg.energies.is_some() {
        header.push("energy");
    }
    header.push("value");
    if cfg.oracle_tol.is_some() {
        header.extend(["oracle", "rel_dev"]);
    }
    let mut max_dev: Option<f64> = None;
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            let mut r = vec![output::float(p.theta), output::float(file.scan.phi_deg)];
            if let Some(e) = p.energy {
                r.push(output::float(e));
            }
            r.push(output::float(p.value));
            if let Some(o) = p.oracle {
                let d = rel_dev(p.value, o);
                max_dev = Some(max_dev.map_or(d, |m| m.max(d)));
                r.push(output::float(o));
                r.push(output::float(d));
            }
            r
        })
        .collect();

    let kinds: Vec<&str> = file.steps.iter().map(|s| s.kind.as_str()).collect();
    let mut summary = vec![
        ("process".to_string(), kinds.join("+")),
        ("scan".to_string(), file.scan.role.as_str().to_string()),
        ("points".to_string(), points.len().to_string()),
        ("min_value".to_string(), output::float(min)),
    ];
    let first_energy = with_energy(file.steps.clone(), energies[0])?;
    if scan_is_outgoing(file.scan.role) {
        let steps = with_energy(at_angle(&file, 0.0, false)?, energies[0])?;
        summary.push(("integrated".to_string(), output::float(value(&steps, table)?.0)));
    }
    distribution_summary(&first_energy, table, &mut summary);
    if let Some(d) = max_dev {
        summary.push(("max_rel_dev".to_string(), output::float(d)));
    }
    let mut seen = BTreeSet::new();
    let warnings: Vec<String> =
        points.iter().flat_map(|p| p.warnings.iter().cloned()).filter(|w| seen.insert(w.clone())).collect();
    if !warnings.is_empty() {
        summary.push(("warnings".to_string(), warnings.join("; ")));
    }
    Ok(RunOutput { csv: output::csv(&header, &rows), summary, max_rel_dev: max_dev })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Output { path: path.display().to_string(), source })
}

/// Evaluates, writes the table and its summary, then checks the oracle tolerance.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let (file, table) = load(&cfg.spec, &cfg.amps)?;
    let out = compute(cfg, &file, &table)?;
    write(&cfg.out, &out.csv)?;
    write(&summary_path(&cfg.out), &out.summary_csv())?;
    if let (Some(tol), Some(max)) = (cfg.oracle_tol, out.max_rel_dev) {
        if max > tol {
            return Err(CliError::OracleMismatch { max, tol });
        }
    }
    Ok(out)
}

#[derive(Parser)]
#[command(name = "polarkit", version, about = "Polarized photon and electron collisions with atoms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a spec over an angle grid and write CSV.
    Run(RunArgs),
    /// Resolve the amplitudes a spec needs without evaluating.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Process spec file (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Reduced-amplitude table (JSON).
    #[arg(long)]
    amps: PathBuf,
    /// Output CSV; the summary goes next to it as <stem>.summary.csv.
    #[arg(long)]
    out: PathBuf,
    /// Highest photon multipole rank kept.
    #[arg(long)]
    kmax: Option<u32>,
    /// Cross-check every point against brute-force summation.
    #[arg(long)]
    oracle: bool,
    /// Relative tolerance of the oracle cross-check.
    #[arg(long, default_value_t = 1e-10, requires = "oracle")]
    tol: f64,
    /// Polar angle step in degrees; must divide 180.
    #[arg(long = "grid-deg", default_value_t = 1.0)]
    grid_deg: f64,
    /// Energy window FROM:TO:N in hartree.
    #[arg(long)]
    energies: Option<String>,
    /// Worker threads; the output does not depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Process spec file (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Reduced-amplitude table (JSON).
    #[arg(long)]
    amps: PathBuf,
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Run(a) => {
            let cfg = RunConfig {
                energies: a.energies.as_deref().map(EnergyWindow::parse).transpose()?,
                grid_deg: a.grid_deg,
                k_max: a.kmax,
                oracle_tol: a.oracle.then_some(a.tol),
                threads: a.threads,
                ..RunConfig::new(a.spec, a.amps, a.out)
            };
            let out = run(&cfg)?;
            let mut s = String::new();
            for (k, v) in &out.summary {
                s.push_str(&format!("{k}: {v}\n"));
            }
            Ok(s)
        }
        Command::Validate(a) => Ok(validate_files(&a.spec, &a.amps)?.render()),
    }
}

/// Entry point of the binary; returns the exit status.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(s) => {
            print!("{s}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_window() {
        let w = EnergyWindow::parse("1:2:3").unwrap();
        assert_eq!(w.energies(), vec![1.0, 1.5, 2.0]);
        assert_eq!(EnergyWindow::parse("1.5:9:1").unwrap().energies(), vec![1.5]);
        assert!(EnergyWindow::parse("1:2").is_err());
        assert!(EnergyWindow::parse("1:2:0").is_err());
    }

    #[test]
    fn grid_must_divide_half_turn() {
        let mut c = RunConfig::new("s", "a", "o");
        assert_eq!(c.theta_grid().unwrap().len(), 181);
        c.grid_deg = 7.0;
        assert!(c.theta_grid().is_err());
        c.grid_deg = 0.5;
        assert_eq!(c.theta_grid().unwrap().len(), 361);
    }

    #[test]
    fn summary_sits_next_to_table() {
        assert_eq!(summary_path(Path::new("/tmp/x/out.csv")), PathBuf::from("/tmp/x/out.summary.csv"));
    }

    #[test]
    fn physics_errors_map_to_three() {
        assert_eq!(CliError::from(ProcessError::Domain("x".into())).exit_code(), 3);
        assert_eq!(CliError::from(ProcessError::Spec("x".into())).exit_code(), 2);
        assert_eq!(CliError::OracleMismatch { max: 1.0, tol: 0.1 }.exit_code(), 4);
    }
}
