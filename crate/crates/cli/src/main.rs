//! `verify` — run identity suites against the catalogue models and emit
//! machine- or human-readable reports.
//!
//! Exit codes: 0 when every non-skipped identity passes, 1 on failed
//! identities or numerical evaluation errors, 2 on usage errors (unknown
//! model, suite, flag, or config key).
//!
//! Configuration precedence: command-line flags > `--config` file >
//! built-in defaults. The config file is plain `key = value` text with `#`
//! comments; keys mirror the long flag names, plus `tol.<suite>` entries.
//!
//! Reports are reproducible: the sample stream is ChaCha8 keyed by the seed,
//! so identical invocations produce byte-identical JSON.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use contactgeo::error::GeoError;
use contactgeo::suites::{emit_json, emit_markdown, run_suites, SuiteKind};
use contactgeo::{DerivativeConfig, SamplePlan};

#[derive(Debug, Parser)]
#[command(
    name = "verify",
    about = "Pointwise verification of contact-geometry identities on model spaces",
    disable_help_subcommand = true
)]
struct Args {
    /// Model name: `r2n1`, `sphere`, or `<base>-deformed:a=<val>`.
    #[arg(long)]
    model: Option<String>,

    /// Structure parameter n (dimension 2n+1).
    #[arg(long)]
    n: Option<usize>,

    /// Comma-separated suite list. Default: all suites.
    #[arg(long)]
    suite: Option<String>,

    /// Number of sample points.
    #[arg(long)]
    points: Option<usize>,

    /// Random tangent vectors drawn per point.
    #[arg(long = "vectors-per-point")]
    vectors_per_point: Option<usize>,

    /// Seed for the sample stream.
    #[arg(long)]
    seed: Option<u64>,

    /// Per-suite tolerance override, `<suite>=<value>`. Repeatable.
    #[arg(long = "tol")]
    tol: Vec<String>,

    /// First-order finite-difference step.
    #[arg(long = "fd-h1")]
    fd_h1: Option<f64>,

    /// Second-order finite-difference step.
    #[arg(long = "fd-h2")]
    fd_h2: Option<f64>,

    /// Step for derivatives of curvature-valued fields.
    #[arg(long = "fd-h3")]
    fd_h3: Option<f64>,

    /// Output format: `markdown` or `json`.
    #[arg(long)]
    format: Option<String>,

    /// D-homothetic constant used by the deformation suite.
    #[arg(long = "deform-a")]
    deform_a: Option<f64>,

    /// Key-value config file applied below the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone)]
struct Settings {
    model: Option<String>,
    n: usize,
    suites: Vec<SuiteKind>,
    points: usize,
    vectors_per_point: usize,
    seed: u64,
    tolerances: BTreeMap<String, f64>,
    fd: DerivativeConfig,
    format: Format,
    deform_a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Markdown,
    Json,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            model: None,
            n: 1,
            suites: SuiteKind::all(),
            points: 20,
            vectors_per_point: 4,
            seed: 42,
            tolerances: BTreeMap::new(),
            fd: DerivativeConfig::default(),
            format: Format::Markdown,
            deform_a: 2.0,
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Run(GeoError),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl From<GeoError> for CliError {
    fn from(e: GeoError) -> Self {
        match e {
            GeoError::UnknownModel(_) | GeoError::UnknownSuite(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Run(other),
        }
    }
}

fn parse_suites(list: &str) -> Result<Vec<SuiteKind>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| SuiteKind::parse(name).map_err(CliError::from))
        .collect()
}

fn parse_tol(entry: &str) -> Result<(String, f64), CliError> {
    let (suite, value) = entry
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--tol expects <suite>=<value>, got `{entry}`")))?;
    SuiteKind::parse(suite.trim())?;
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid tolerance value `{value}`")))?;
    Ok((suite.trim().to_string(), v))
}

fn apply_config(settings: &mut Settings, path: &PathBuf) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key = value", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad_value =
            |k: &str| CliError::Usage(format!("config line {}: invalid value for {k}", lineno + 1));
        match key {
            "model" => settings.model = Some(value.to_string()),
            "n" => settings.n = value.parse().map_err(|_| bad_value("n"))?,
            "suite" => settings.suites = parse_suites(value)?,
            "points" => settings.points = value.parse().map_err(|_| bad_value("points"))?,
            "vectors-per-point" => {
                settings.vectors_per_point =
                    value.parse().map_err(|_| bad_value("vectors-per-point"))?
            }
            "seed" => settings.seed = value.parse().map_err(|_| bad_value("seed"))?,
            "format" => settings.format = parse_format(value)?,
            "deform-a" => settings.deform_a = value.parse().map_err(|_| bad_value("deform-a"))?,
            "fd-h1" => settings.fd.h1 = value.parse().map_err(|_| bad_value("fd-h1"))?,
            "fd-h2" => settings.fd.h2 = value.parse().map_err(|_| bad_value("fd-h2"))?,
            "fd-h3" => settings.fd.h3 = value.parse().map_err(|_| bad_value("fd-h3"))?,
            k if k.starts_with("tol.") => {
                let suite = &k[4..];
                SuiteKind::parse(suite)?;
                let v: f64 = value.parse().map_err(|_| bad_value(k))?;
                settings.tolerances.insert(suite.to_string(), v);
            }
            other => {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key `{other}`",
                    lineno + 1
                )))
            }
        }
    }
    Ok(())
}

fn parse_format(value: &str) -> Result<Format, CliError> {
    match value {
        "markdown" | "md" => Ok(Format::Markdown),
        "json" => Ok(Format::Json),
        other => Err(CliError::Usage(format!("unknown format `{other}`"))),
    }
}

fn resolve(args: Args) -> Result<Settings, CliError> {
    let mut settings = Settings::default();
    if let Some(path) = &args.config {
        apply_config(&mut settings, path)?;
    }
    if let Some(m) = args.model {
        settings.model = Some(m);
    }
    if let Some(n) = args.n {
        settings.n = n;
    }
    if let Some(list) = &args.suite {
        settings.suites = parse_suites(list)?;
    }
    if let Some(p) = args.points {
        settings.points = p;
    }
    if let Some(v) = args.vectors_per_point {
        settings.vectors_per_point = v;
    }
    if let Some(s) = args.seed {
        settings.seed = s;
    }
    for entry in &args.tol {
        let (suite, v) = parse_tol(entry)?;
        settings.tolerances.insert(suite, v);
    }
    if let Some(h) = args.fd_h1 {
        settings.fd.h1 = h;
    }
    if let Some(h) = args.fd_h2 {
        settings.fd.h2 = h;
    }
    if let Some(h) = args.fd_h3 {
        settings.fd.h3 = h;
    }
    if let Some(f) = &args.format {
        settings.format = parse_format(f)?;
    }
    if let Some(a) = args.deform_a {
        settings.deform_a = a;
    }
    if settings.points == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    if settings.vectors_per_point == 0 {
        return Err(CliError::Usage("--vectors-per-point must be positive".into()));
    }
    Ok(settings)
}

fn run(settings: &Settings) -> Result<ExitCode, CliError> {
    let model = settings
        .model
        .as_deref()
        .ok_or_else(|| CliError::Usage("--model is required (r2n1 | sphere)".into()))?;
    let mut plan = SamplePlan::new(settings.points, settings.seed)
        .with_vectors(settings.vectors_per_point)
        .with_fd(settings.fd);
    plan.tolerances = settings.tolerances.clone();
    let rows = run_suites(model, settings.n, settings.deform_a, &settings.suites, &plan)?;
    let text = match settings.format {
        Format::Json => emit_json(&rows, model, settings.n, settings.seed),
        Format::Markdown => emit_markdown(&rows, model, settings.n, settings.seed),
    };
    println!("{text}");
    if rows.iter().any(|r| r.failed()) {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match resolve(args).and_then(|settings| run(&settings)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Usage(_) => ExitCode::from(2),
                CliError::Run(_) => ExitCode::from(1),
            }
        }
    }
}
