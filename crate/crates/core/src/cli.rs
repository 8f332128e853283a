//! Command-line surface.
//!
//! Every command writes into an output directory and finishes with
//! `manifest.json`, which lists the effective configuration and every file
//! written. Values come from explicit flags first, then the environment
//! (`ENTWINE_WORKERS` only), then the `--config` file, then built-in
//! defaults.
//!
//! Exit codes: 0 success, 2 invalid input, 3 I/O failure, 4 a check failed.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::analysis::{contour_grid, convergence_study, default_checkpoints, difference, fit_power_law, ErrorSeries, DEFAULT_TIMES};
use crate::config::{validate_alpha, Mode, SamplerKind, SimConfig};
use crate::dirac::{dirac_matrix_checks, dispersion_check, scheme_convergence, u_norm_drift, Profile};
use crate::error::Error;
use crate::evolver::evolve;
use crate::io::{read_fields_csv, write_fields_csv, write_grid_csv, SnapshotMeta};
use crate::lattice::{normalize, FieldSet};
use crate::oracle::{enumerate_exact, max_abs_diff};
use crate::sampler::rng::test_vector_hash;
use crate::sampler::EnsembleSampler;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_CHECK: i32 = 4;

/// Largest entrywise difference accepted by `oracle --compare evolve`.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "entwine", version, about = "Entwined space-time paths on a 1+1D lattice")]
struct Cli {
    /// Flat `key = value` file supplying defaults for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact ensemble fields from the difference equations.
    Evolve(EvolveArgs),
    /// Sample averages from the stochastic process, at each checkpoint.
    Sample(SampleArgs),
    /// Residual series of the difference equations on growing samples.
    Residuals(ResidualArgs),
    /// Log-log slope fits of a residual series.
    Slope(SlopeArgs),
    /// Full (t, z) grid of one field, for contour plotting.
    Contour(ContourArgs),
    /// Matrix identities and dispersion of the continuum Dirac form.
    Dirac(DiracArgs),
    /// Self-convergence of the lattice scheme toward the continuum system.
    Converge(ConvergeArgs),
    /// Exact fields by enumerating every decision sequence.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct OutArg {
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SamplerArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "t-ret")]
    t_ret: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, value_enum)]
    sampler: Option<SamplerKind>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "ENTWINE_WORKERS")]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    sim: SamplerArgs,
    #[arg(long)]
    pairs: Option<u64>,
    /// Pair counts at which to write snapshots; the final count is always written.
    #[arg(long, value_delimiter = ',')]
    checkpoints: Option<Vec<u64>>,
    /// Write one JSON line per entwined pair (eve sampler only).
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct ResidualArgs {
    #[command(flatten)]
    sim: SamplerArgs,
    #[arg(long, value_delimiter = ',')]
    checkpoints: Option<Vec<u64>>,
    /// Time steps to evaluate.
    #[arg(long = "t", value_delimiter = ',')]
    times: Option<Vec<usize>>,
    /// Field indices to evaluate.
    #[arg(long = "i", value_delimiter = ',')]
    fields: Option<Vec<usize>>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct SlopeArgs {
    /// Residual series CSV written by `residuals`.
    #[arg(long, value_name = "FILE")]
    series: Option<PathBuf>,
    #[arg(long = "t", value_delimiter = ',')]
    times: Option<Vec<usize>>,
    #[arg(long = "i", value_delimiter = ',')]
    fields: Option<Vec<usize>>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ContourSource {
    Evolve,
    Sample,
    /// Normalized sample minus exact fields.
    Diff,
}

#[derive(Debug, Args)]
struct ContourArgs {
    #[arg(long, value_enum)]
    source: Option<ContourSource>,
    /// Read fields from a CSV written by `evolve`, `sample` or `oracle` instead.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    #[arg(long = "i")]
    field: Option<usize>,
    #[command(flatten)]
    sim: SamplerArgs,
    #[arg(long)]
    pairs: Option<u64>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct DiracArgs {
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long = "k", value_delimiter = ',', allow_negative_numbers = true)]
    ks: Option<Vec<f64>>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ProfileKind {
    Gaussian,
    Point,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    /// Physical scattering rate.
    #[arg(long = "a")]
    rate: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Steps per unit time at each level; each must double the previous.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<u32>>,
    #[arg(long, value_enum)]
    profile: Option<ProfileKind>,
    /// Gaussian standard deviation in sites of the coarsest level.
    #[arg(long)]
    width: Option<f64>,
    /// `aΔt` for the norm-drift run.
    #[arg(long = "drift-alpha")]
    drift_alpha: Option<f64>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum CompareTarget {
    None,
    Evolve,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_enum)]
    compare: Option<CompareTarget>,
    #[command(flatten)]
    out: OutArg,
}

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Io(String),
    Check(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => EXIT_INVALID,
            Failure::Io(_) => EXIT_IO,
            Failure::Check(_) => EXIT_CHECK,
        }
    }
}

impl Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Invalid(m) => write!(f, "invalid input: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Check(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Json(_) => Failure::Io(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

const CONFIG_KEYS: &[&str] = &[
    "a", "alpha", "checkpoints", "compare", "drift-alpha", "horizon", "i", "input", "k", "levels",
    "mass", "mode", "out", "pairs", "profile", "sampler", "seed", "series", "source", "steps", "t",
    "t-ret", "trace", "width", "workers",
];

/// Parses a flat `key = value` file. `#` starts a comment; `_` in keys reads as `-`.
pub fn parse_config(text: &str) -> std::result::Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", n + 1))?;
        let key = k.trim().replace('_', "-");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(format!("line {}: unknown key `{key}`", n + 1));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

/// Resolves each setting and records what was used.
struct Settings {
    file: BTreeMap<String, String>,
    effective: BTreeMap<String, Value>,
}

impl Settings {
    fn resolve<T>(&mut self, key: &str, flag: Option<T>, default: T) -> CliResult<T>
    where
        T: FromStr + Serialize + Clone,
        T::Err: Display,
    {
        let v = match flag {
            Some(v) => v,
            None => match self.file.get(key) {
                Some(s) => s
                    .parse()
                    .map_err(|e| Failure::Invalid(format!("config `{key} = {s}`: {e}")))?,
                None => default,
            },
        };
        self.record(key, &v);
        Ok(v)
    }

    fn resolve_enum<T: ValueEnum + Serialize + Clone>(&mut self, key: &str, flag: Option<T>, default: T) -> CliResult<T> {
        let v = match flag {
            Some(v) => v,
            None => match self.file.get(key) {
                Some(s) => T::from_str(s, true).map_err(|e| Failure::Invalid(format!("config `{key} = {s}`: {e}")))?,
                None => default,
            },
        };
        self.record(key, &v);
        Ok(v)
    }

    fn resolve_list<T>(&mut self, key: &str, flag: Option<Vec<T>>, default: Vec<T>) -> CliResult<Vec<T>>
    where
        T: FromStr + Serialize + Clone,
        T::Err: Display,
    {
        let v = match flag {
            Some(v) => v,
            None => match self.file.get(key) {
                Some(s) => s
                    .split(',')
                    .map(|x| x.trim().parse().map_err(|e| Failure::Invalid(format!("config `{key} = {s}`: {e}"))))
                    .collect::<CliResult<_>>()?,
                None => default,
            },
        };
        self.record(key, &v);
        Ok(v)
    }

    fn optional_path(&mut self, key: &str, flag: Option<PathBuf>) -> Option<PathBuf> {
        let v = flag.or_else(|| self.file.get(key).map(PathBuf::from));
        if let Some(p) = &v {
            self.record(key, &p.display().to_string());
        }
        v
    }

    fn out(&mut self, flag: Option<PathBuf>) -> CliResult<PathBuf> {
        self.optional_path("out", flag)
            .ok_or_else(|| Failure::Invalid("--out is required".into()))
    }

    fn sim(&mut self, a: SamplerArgs, pairs: Option<u64>, default_t_ret: usize, default_pairs: u64) -> CliResult<SimConfig> {
        let cfg = SimConfig {
            alpha: self.resolve("alpha", a.alpha, 0.5)?,
            t_ret: self.resolve("t-ret", a.t_ret, default_t_ret)?,
            n_pairs: self.resolve("pairs", pairs, default_pairs)?,
            mode: self.resolve_enum("mode", a.mode, Mode::Iid)?,
            sampler: self.resolve_enum("sampler", a.sampler, SamplerKind::Envelope)?,
            seed: self.resolve("seed", a.seed, 0)?,
            workers: self.resolve("workers", a.workers, 1)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn record<T: Serialize>(&mut self, key: &str, v: &T) {
        self.effective
            .insert(key.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a BTreeMap<String, Value>,
    started_unix: u64,
    finished_unix: u64,
    outputs: &'a [String],
    rng_test_vector_sha256: String,
}

/// Seconds since the epoch, or `SOURCE_DATE_EPOCH` when set (for
/// reproducible manifests).
fn timestamp() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.trim().parse().ok()) {
        return t;
    }
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    fn create(dir: PathBuf) -> CliResult<Self> {
        fs::create_dir_all(&dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
        Ok(Output { dir, files: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn write_fields(&mut self, name: &str, fields: &FieldSet) -> CliResult<()> {
        let mut buf = Vec::new();
        write_fields_csv(&mut buf, fields)?;
        self.write(name, &buf)
    }

    fn finish(self, command: &str, settings: &Settings, started: u64) -> CliResult<()> {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config: &settings.effective,
            started_unix: started,
            finished_unix: timestamp(),
            outputs: &self.files,
            rng_test_vector_sha256: test_vector_hash(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Io(e.to_string()))?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        Ok(())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {f}");
            f.code()
        }
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            parse_config(&text).map_err(|e| invalid(format!("{}: {e}", p.display())))?
        }
        None => BTreeMap::new(),
    };
    let mut s = Settings {
        file,
        effective: BTreeMap::new(),
    };
    let started = timestamp();
    match cli.command {
        Command::Evolve(a) => cmd_evolve(a, &mut s, started),
        Command::Sample(a) => cmd_sample(a, &mut s, started),
        Command::Residuals(a) => cmd_residuals(a, &mut s, started),
        Command::Slope(a) => cmd_slope(a, &mut s, started),
        Command::Contour(a) => cmd_contour(a, &mut s, started),
        Command::Dirac(a) => cmd_dirac(a, &mut s, started),
        Command::Converge(a) => cmd_converge(a, &mut s, started),
        Command::Oracle(a) => cmd_oracle(a, &mut s, started),
    }
}

fn cmd_evolve(a: EvolveArgs, s: &mut Settings, started: u64) -> CliResult<()> {
    let alpha = s.resolve("alpha", a.alpha, 0.5)?;
    validate_alpha(alpha)?;
    let steps = s.resolve("steps", a.steps, 24)?;
    let mut out = Output::create(s.out(a.out.out)?)?;
    out.write_fields("fields.csv", &evolve(alpha, steps))?;
    out.finish("evolve", s, started)
}

fn cmd_sample(a: SampleArgs, s: &mut Settings, started: u64) -> CliResult<()> {
    let cfg = s.sim(a.sim, a.pairs, 24, 10_000)?;
    let mut checkpoints = s.resolve_list("checkpoints", a.checkpoints, vec![])?;
    checkpoints.push(cfg.n_pairs);
    checkpoints.sort_unstable();
    checkpoints.dedup();
    if checkpoints[0] == 0 || *checkpoints.last().unwrap() > cfg.n_pairs {
        return Err(invalid("checkpoints must lie in 1..=pairs"));
    }
    s.record("checkpoints", &checkpoints);
    let trace = s.resolve("trace", a.trace.then_some(true), false)?;
    if trace && cfg.sampler != SamplerKind::Eve {
        return Err(invalid("--trace needs --sampler eve"));
    }
    let mut out = Output::create(s.out(a.out.out)?)?;
    let mut sampler = EnsembleSampler::new(&cfg)?;
    if trace {
        sampler.record_traces();
    }
    let mut trace_lines = String::new();
    for &n in &checkpoints {
        let sample = sampler.advance_to(n)?;
        out.write_fields(&format!("sample_{n}.csv"), &normalize(&sample)?)?;
        let meta = SnapshotMeta {
            kind: "sample",
            alpha: cfg.alpha,
            t_ret: cfg.t_ret,
            n_pairs: Some(n),
            mode: Some(cfg.mode),
            sampler: Some(cfg.sampler),
            seed: Some(cfg.seed),
            workers: Some(cfg.workers),
        };
        out.write_json(&format!("sample_{n}.json"), &meta)?;
        for line in sampler.take_traces() {
            trace_lines.push_str(&line);
            trace_lines.push('\n');
        }
    }
    if trace {
        out.write("traces.jsonl", trace_lines.as_bytes())?;
    }
    out.finish("sample", s, started)
}

fn cmd_residuals(a: ResidualArgs, s: &mut Settings, started: u64) -> CliResult<()> {
    let checkpoints = s.resolve_list("checkpoints", a.checkpoints, default_checkpoints())?;
    let last = *checkpoints.last().ok_or_else(|| invalid("no checkpoints"))?;
    let cfg = s.sim(a.sim, Some(last), 16, last)?;
    let times = s.resolve_list("t", a.times, DEFAULT_TIMES.to_vec())?;
    let fields = s.resolve_list("i", a.fields, vec![1, 2, 3, 4])?;
    let series = convergence_study(&cfg, &checkpoints, &times, &fields)?;
    let mut out = Output::create(s.out(a.out.out)?)?;
    let mut buf = Vec::new();
    series.write_csv(&mut buf)?;
    out.write("residuals.csv", &buf)?;
    out.finish("residuals", s, started)
}

fn cmd_slope(a: SlopeArgs, s: &mut Settings, started: u64) -> CliResult<()> {
    let path = s
        .optional_path("series", a.series)
        .ok_or_else(|| invalid("--series is required"))?;
    let text = fs::read_to_string(&path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let series = ErrorSeries::read_csv(&text)?;
    let mut groups: Vec<(usize, usize)> = series.entries.iter().map(|e| (e.t, e.i)).collect();
    groups.sort_unstable();
    groups.dedup();
    let times = s.resolve_list("t", a.times, vec![])?;
    let fields = s.resolve_list("i", a.fields, vec![])?;
    groups.retain(|(t, i)| (times.is_empty() || times.contains(t)) && (fields.is_empty() || fields.contains(i)));
    let mut csv = String::from("t,i,points,slope,intercept,rms_residual\n");
    let mut fitted = 0;
    for (t, i) in groups {
        let points: Vec<(f64, f64)> = series.select(t, i).map(|e| (e.n_pairs as f64, e.e)).collect();
        match fit_power_law(&points) {
            Ok(fit) => {
                csv.push_str(&format!("{t},{i},{},{},{},{}\n", fit.points, fit.slope, fit.intercept, fit.rms_residual));
                fitted += 1;
            }
            Err(Error::TooFewPoints(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    if fitted == 0 {
        return Err(invalid("no (t, i) group has 3 or more positive residuals"));
    }
    let mut out = Output::create(s.out(a.out.out)?)?;
    out.write("slope.csv", csv.as_bytes())?;
    out.finish("slope", s, started)
}

fn cmd_contour(a: ContourArgs, s: &mut Settings, started: u64) -> CliResult<()> {
    let field = s.resolve("i", a.field, 3)?;
    let fields = match s.optional_path("input", a.input) {
        Some(p) => {
            let text = fs::read_to_string(&p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            read_fields_csv(&text)?
        }
        None => {
            let source = s.resolve_enum("source", a.source, ContourSource::Evolve)?;
            let cfg = s.sim(a.sim, a.pairs, 24, 10_000)?;
            let exact = || evolve(cfg.alpha, cfg.t_ret);
            let sampled = || -> CliResult<FieldSet> { Ok(normalize(&EnsembleSampler::new(&cfg)?.advance_to(cfg.n_pairs)?)?) };
            match source {
                ContourSource::Evolve => exact(),
                ContourSource::Sample => sampled()?,
                ContourSource::Diff => difference(&sampled()?, &exact())?,
            }
        }
    };
    let grid = contour_grid(&fields, field)?;
    let mut out = Output::create(s.out(a.out.out)?)?;
    let mut buf = Vec::new();
    write_grid_csv(&mut buf, &grid)?;
    out.write("grid.csv", &buf)?;
    out.finish("contour", s, started)
}

fn cmd_dirac(a: DiracArgs, s: &mut Settings, started: u64) -> CliResult<()> {
    let mass = s.resolve("mass", a.mass, 1.0)?;
    let ks = s.resolve_list("k", a.ks, vec![0.0, 1.0, 3.0])?;
    if !mass.is_finite() || ks.iter().any(|k| !k.is_finite()) {
        return Err(invalid("mass and k must be finite"));
    }
    let mut report = dirac_matrix_checks(mass);
    report.extend(dispersion_check(mass, &ks));
    let mut out = Output::create(s.out(a.out.out)?)?;
    out.write_json("dirac.json", &report)?;
    out.finish("dirac", s, started)?;
    match report.checks.iter().find(|c| !c.pass) {
        Some(c) => Err(Failure::Check(format!("{} = {:e} exceeds {:e}", c.name, c.measured, c.tolerance))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct ConvergeOutput {
    scheme: crate::dirac::ConvergenceReport,
    norm_drift: NormDrift,
}

#[derive(Serialize)]
struct NormDrift {
    alpha: f64,
    horizon: f64,
    relative_drift: f64,
}

fn cmd_converge(a: ConvergeArgs, s: &mut Settings, started: u64) -> CliResult<()> {
    let rate = s.resolve("a", a.rate, 1.0)?;
    let horizon = s.resolve("horizon", a.horizon, 1.0)?;
    let levels = s.resolve_list("levels", a.levels, vec![16, 32, 64])?;
    let kind = s.resolve_enum("profile", a.profile, ProfileKind::Gaussian)?;
    let width = s.resolve("width", a.width, 8.0)?;
    let drift_alpha = s.resolve("drift-alpha", a.drift_alpha, 0.01)?;
    if !(rate >= 0.0) || !(horizon > 0.0) || !(width > 0.0) || levels.contains(&0) {
        return Err(invalid("need a >= 0, horizon > 0, width > 0 and positive levels"));
    }
    if levels.iter().any(|&l| rate / l as f64 > 1.0) {
        return Err(invalid("a Δt must not exceed 1 at any level"));
    }
    validate_alpha(drift_alpha)?;
    let profile = match kind {
        ProfileKind::Gaussian => Profile::Gaussian { width_sites: width },
        ProfileKind::Point => Profile::Point,
    };
    let scheme = scheme_convergence(rate, horizon, &levels, profile)?;
    if !scheme.smooth {
        eprintln!("warning: point initial data has no continuum order of accuracy");
    }
    let relative_drift = if rate > 0.0 && drift_alpha > 0.0 {
        // Width of half a unit of length at the drift resolution.
        let sites = 0.5 * rate / drift_alpha;
        u_norm_drift(rate, horizon, drift_alpha, sites)?
    } else {
        0.0
    };
    let report = ConvergeOutput {
        scheme,
        norm_drift: NormDrift {
            alpha: drift_alpha,
            horizon,
            relative_drift,
        },
    };
    let mut out = Output::create(s.out(a.out.out)?)?;
    out.write_json("converge.json", &report)?;
    out.finish("converge", s, started)
}

#[derive(Serialize)]
struct Comparison {
    against: &'static str,
    max_abs_diff: f64,
    tolerance: f64,
    pass: bool,
}

fn cmd_oracle(a: OracleArgs, s: &mut Settings, started: u64) -> CliResult<()> {
    let alpha = s.resolve("alpha", a.alpha, 0.5)?;
    validate_alpha(alpha)?;
    let steps = s.resolve("steps", a.steps, 8)?;
    let compare = s.resolve_enum("compare", a.compare, CompareTarget::None)?;
    let exact = enumerate_exact(alpha, steps)?;
    let mut out = Output::create(s.out(a.out.out)?)?;
    out.write_fields("oracle.csv", &exact)?;
    let mut failed = None;
    if compare == CompareTarget::Evolve {
        let d = max_abs_diff(&exact, &evolve(alpha, steps))?;
        let cmp = Comparison {
            against: "evolve",
            max_abs_diff: d,
            tolerance: ORACLE_TOLERANCE,
            pass: d <= ORACLE_TOLERANCE,
        };
        out.write_json("compare.json", &cmp)?;
        if !cmp.pass {
            failed = Some(format!("oracle and evolve differ by {d:e}"));
        }
    }
    out.finish("oracle", s, started)?;
    failed.map_or(Ok(()), |m| Err(Failure::Check(m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_parsing() {
        let m = parse_config("# defaults\nalpha = 0.25\nt_ret=12 # trailing\n\nmode = balanced\n").unwrap();
        assert_eq!(m["alpha"], "0.25");
        assert_eq!(m["t-ret"], "12");
        assert_eq!(m["mode"], "balanced");
        assert!(parse_config("alpha 0.5").is_err());
        assert!(parse_config("colour = red").is_err());
    }

    #[test]
    fn precedence_flag_over_file_over_default() {
        let mut s = Settings {
            file: parse_config("alpha = 0.25\nseed = 7").unwrap(),
            effective: BTreeMap::new(),
        };
        assert_eq!(s.resolve("alpha", Some(0.75), 0.5).unwrap(), 0.75);
        assert_eq!(s.resolve("seed", None, 0u64).unwrap(), 7);
        assert_eq!(s.resolve("steps", None, 24usize).unwrap(), 24);
        assert_eq!(s.effective["alpha"], Value::from(0.75));
        assert_eq!(s.effective["steps"], Value::from(24));
        let mut bad = Settings {
            file: parse_config("steps = many").unwrap(),
            effective: BTreeMap::new(),
        };
        assert!(matches!(bad.resolve("steps", None, 1usize), Err(Failure::Invalid(_))));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["entwine"]), EXIT_INVALID);
        assert_eq!(run(["entwine", "evolve", "--alpha", "x"]), EXIT_INVALID);
        assert_eq!(run(["entwine", "frobnicate"]), EXIT_INVALID);
        assert_eq!(run(["entwine", "--help"]), EXIT_OK);
    }

    #[test]
    fn error_classes() {
        assert_eq!(Failure::from(Error::EmptySample).code(), EXIT_INVALID);
        let io = std::io::Error::new(std::io::ErrorKind::PermissionDenied, "no");
        assert_eq!(Failure::from(Error::Io(io)).code(), EXIT_IO);
        assert_eq!(Failure::Check("x".into()).code(), EXIT_CHECK);
    }
}
