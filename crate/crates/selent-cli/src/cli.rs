//! Command-line surface: constants tables, risk simulation, dominance
//! checks, two-sample analysis, and SVG rendering of result CSVs.

use crate::analysis::{self, AnalysisError, AnalyzeOptions, SampleFormat};
use crate::plot;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use selent_core::constants::{self, DEFAULT_TABLE_ALPHAS};
use selent_core::estimators::{EstimatorId, Target};
use selent_core::montecarlo::{
    default_mu_grid, dominance_csv, dominance_report, risk_points_csv, simulate_risk, SimConfig,
    DEFAULT_REPS,
};
use selent_core::{QuadratureConfig, Shape};
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

/// Seed used when `--seed` is not given; fixed so repeated runs agree byte
/// for byte.
pub const DEFAULT_SEED: u64 = 0x5E1E_C7ED;

/// Environment variable overriding the quadrature tolerance (both absolute
/// and relative) used by `table` and `constants`.
pub const QUAD_TOL_ENV: &str = "SELENT_QUAD_TOL";

const LONG_ABOUT: &str = "Entropy estimation for a gamma population chosen by \
the natural selection rule (largest or smallest observation), with naive, \
generalized Bayes, and shrinkage estimators, seeded Monte Carlo risk \
comparison, and a two-sample analysis pipeline.\n\n\
Set SELENT_QUAD_TOL to override the quadrature tolerance used by `table` \
and `constants` (absolute and relative; default 1e-12).";

#[derive(Parser)]
#[command(name = "selent", version, about = "Selected-population entropy toolkit", long_about = LONG_ABOUT)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the constants table (alpha, c1, c2, c3, ln alpha, ln(alpha+1),
    /// beta0, beta1, psi(2 alpha) - ln 2) as CSV.
    Table(TableArgs),
    /// Print the constants row for a single alpha.
    Constants(ConstantsArgs),
    /// Simulate estimator risk over a ratio grid; write RiskPoint CSV.
    Simulate(SimulateArgs),
    /// Paired risk comparison of two estimators with common random numbers.
    Dominance(DominanceArgs),
    /// Two-sample selection analysis with the full estimate table.
    Analyze(AnalyzeArgs),
    /// Render columns of a result CSV as an SVG line chart.
    Plot(PlotArgs),
}

#[derive(Args)]
struct TableArgs {
    /// Comma-separated alpha list; defaults to the built-in table grid.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long)]
    alpha: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    Worse,
    Better,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Target {
        match t {
            TargetArg::Worse => Target::Worse,
            TargetArg::Better => Target::Better,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "worse")]
    target: TargetArg,
    /// Replications per grid point.
    #[arg(long, default_value_t = DEFAULT_REPS)]
    reps: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Comma-separated scale ratios; default 1.0,1.25,...,10.0.
    #[arg(long, value_delimiter = ',')]
    mu_grid: Option<Vec<f64>>,
    /// Comma-separated estimators, `family=value` with family one of
    /// naive-worse, gen-bayes-worse, shrink-worse, naive-better,
    /// gen-bayes-better, shrink-better and value a number or ln-alpha,
    /// ln-alpha-plus-1, psi-alpha (gen-bayes takes a numeric beta).
    #[arg(long, value_delimiter = ',')]
    estimators: Option<Vec<String>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DominanceArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "worse")]
    target: TargetArg,
    #[arg(long, default_value_t = DEFAULT_REPS)]
    reps: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_delimiter = ',')]
    mu_grid: Option<Vec<f64>>,
    /// Candidate estimator (the one claimed to dominate), `family=value`.
    #[arg(long)]
    a: String,
    /// Baseline estimator it is compared against.
    #[arg(long)]
    b: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Whitespace,
    Csv,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// First sample file.
    #[arg(long)]
    a: PathBuf,
    /// Second sample file.
    #[arg(long)]
    b: PathBuf,
    /// Gamma shape of each individual observation.
    #[arg(long)]
    shape: f64,
    #[arg(long, value_enum, default_value = "whitespace")]
    format: FormatArg,
    /// Report full entropies instead of ln-scale values.
    #[arg(long)]
    full_entropy: bool,
    /// Add better-target shrinkage rows with the pooling guard at the
    /// per-observation shape.
    #[arg(long)]
    per_obs_guard: bool,
    /// Emit machine CSV instead of the human-readable report.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct PlotArgs {
    /// Input CSV path.
    #[arg(long)]
    input: PathBuf,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
    /// Column for the x axis.
    #[arg(long, default_value = "mu")]
    x: String,
    /// Comma-separated y columns.
    #[arg(long, value_delimiter = ',', default_value = "mse")]
    y: Vec<String>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<selent_core::Error> for CliError {
    fn from(e: selent_core::Error) -> Self {
        match e {
            selent_core::Error::QuadratureNoConverge { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Core(inner) => inner.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<plot::PlotError> for CliError {
    fn from(e: plot::PlotError) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

/// Entry point against explicit streams; returns the process exit code.
pub fn run_from<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    1
                }
            };
        }
    };
    let result = match cli.cmd {
        Cmd::Table(a) => cmd_table(a, out),
        Cmd::Constants(a) => cmd_constants(a, out),
        Cmd::Simulate(a) => cmd_simulate(a, out),
        Cmd::Dominance(a) => cmd_dominance(a, out),
        Cmd::Analyze(a) => cmd_analyze(a, out),
        Cmd::Plot(a) => cmd_plot(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

/// Entry point on the real process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_from(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn shape_arg(alpha: f64) -> Result<Shape, CliError> {
    Shape::new(alpha).map_err(|e| CliError::Usage(e.to_string()))
}

/// Reads the optional tolerance override from the environment.
fn env_quadrature() -> Result<Option<QuadratureConfig>, CliError> {
    match std::env::var(QUAD_TOL_ENV) {
        Err(_) => Ok(None),
        Ok(text) => {
            let tol: f64 = text
                .parse()
                .map_err(|_| CliError::Usage(format!("{QUAD_TOL_ENV}={text:?} is not a number")))?;
            if !(tol > 0.0) || !tol.is_finite() {
                return Err(CliError::Usage(format!(
                    "{QUAD_TOL_ENV} must be a positive tolerance, got {tol}"
                )));
            }
            Ok(Some(QuadratureConfig {
                abs_tol: tol,
                rel_tol: tol,
                ..QuadratureConfig::default()
            }))
        }
    }
}

fn write_out(path: Option<&PathBuf>, content: &str, out: &mut dyn Write) -> CliResult {
    match path {
        Some(p) => fs::write(p, content)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(content.as_bytes())
            .map_err(|e| CliError::Data(format!("cannot write output: {e}"))),
    }
}

fn rows_to_csv(rows: &[constants::ConstantsRow]) -> String {
    let mut s = String::from(constants::ConstantsRow::csv_header());
    s.push('\n');
    for row in rows {
        s.push_str(&row.to_csv_row());
        s.push('\n');
    }
    s
}

fn cmd_table(args: TableArgs, out: &mut dyn Write) -> CliResult {
    let alphas: Vec<Shape> = match args.alphas {
        Some(list) => list.into_iter().map(shape_arg).collect::<Result<_, _>>()?,
        None => DEFAULT_TABLE_ALPHAS
            .iter()
            .map(|&a| Shape::new(a).expect("table grid is valid"))
            .collect(),
    };
    let rows = match env_quadrature()? {
        Some(cfg) => constants::generate_table_with(&alphas, &cfg)?,
        None => constants::generate_table(&alphas)?,
    };
    write_out(args.out.as_ref(), &rows_to_csv(&rows), out)
}

fn cmd_constants(args: ConstantsArgs, out: &mut dyn Write) -> CliResult {
    let alpha = shape_arg(args.alpha)?;
    let rows = match env_quadrature()? {
        Some(cfg) => constants::generate_table_with(&[alpha], &cfg)?,
        None => constants::generate_table(&[alpha])?,
    };
    write_out(None, &rows_to_csv(&rows), out)
}

/// Parses `family=value` into an estimator id, resolving the symbolic
/// constants against `alpha`.
fn parse_estimator(token: &str, alpha: Shape) -> Result<EstimatorId, CliError> {
    let usage = |msg: String| CliError::Usage(msg);
    let (family, value) = token
        .split_once('=')
        .ok_or_else(|| usage(format!("estimator {token:?} is not family=value")))?;
    let family = family.trim().replace('_', "-");
    let value = value.trim();
    let resolve = |v: &str| -> Result<f64, CliError> {
        match v.replace('_', "-").as_str() {
            "ln-alpha" => Ok(alpha.get().ln()),
            "ln-alpha-plus-1" => Ok((alpha.get() + 1.0).ln()),
            "psi-alpha" => selent_core::numerics::digamma(alpha.get()).map_err(CliError::from),
            _ => v
                .parse()
                .map_err(|_| usage(format!("estimator value {v:?} is not a number or symbol"))),
        }
    };
    let id = match family.as_str() {
        "naive-worse" => EstimatorId::NaiveWorse { c: resolve(value)? },
        "shrink-worse" => EstimatorId::ShrinkWorse { c: resolve(value)? },
        "naive-better" => EstimatorId::NaiveBetter { c: resolve(value)? },
        "shrink-better" => EstimatorId::ShrinkBetter { c: resolve(value)? },
        "gen-bayes-worse" => EstimatorId::GenBayesWorse {
            beta: value
                .parse()
                .map_err(|_| usage(format!("beta {value:?} is not a number")))?,
        },
        "gen-bayes-better" => EstimatorId::GenBayesBetter {
            beta: value
                .parse()
                .map_err(|_| usage(format!("beta {value:?} is not a number")))?,
        },
        other => {
            return Err(usage(format!("unknown estimator family {other:?}")));
        }
    };
    id.validate(alpha)?;
    Ok(id)
}

fn default_estimators(target: Target, alpha: Shape) -> Vec<EstimatorId> {
    let c = alpha.get().ln();
    match target {
        Target::Worse => vec![
            EstimatorId::NaiveWorse { c },
            EstimatorId::ShrinkWorse { c },
        ],
        Target::Better => vec![
            EstimatorId::NaiveBetter { c },
            EstimatorId::ShrinkBetter { c },
        ],
    }
}

fn cmd_simulate(args: SimulateArgs, out: &mut dyn Write) -> CliResult {
    let alpha = shape_arg(args.alpha)?;
    let target = Target::from(args.target);
    let estimators = match args.estimators {
        Some(tokens) => tokens
            .iter()
            .map(|t| parse_estimator(t, alpha))
            .collect::<Result<_, _>>()?,
        None => default_estimators(target, alpha),
    };
    let cfg = SimConfig {
        alpha,
        mu_grid: args.mu_grid.unwrap_or_else(default_mu_grid),
        reps: args.reps,
        seed: args.seed,
        estimators,
        target,
    };
    let points = simulate_risk(&cfg)?;
    write_out(args.out.as_ref(), &risk_points_csv(&cfg, &points), out)
}

fn cmd_dominance(args: DominanceArgs, out: &mut dyn Write) -> CliResult {
    let alpha = shape_arg(args.alpha)?;
    let a = parse_estimator(&args.a, alpha)?;
    let b = parse_estimator(&args.b, alpha)?;
    let cfg = SimConfig {
        alpha,
        mu_grid: args.mu_grid.unwrap_or_else(default_mu_grid),
        reps: args.reps,
        seed: args.seed,
        estimators: Vec::new(),
        target: Target::from(args.target),
    };
    let points = dominance_report(&cfg, a, b)?;
    write_out(args.out.as_ref(), &dominance_csv(&cfg, a, b, &points), out)
}

fn cmd_analyze(args: AnalyzeArgs, out: &mut dyn Write) -> CliResult {
    let format = match args.format {
        FormatArg::Whitespace => SampleFormat::Whitespace,
        FormatArg::Csv => SampleFormat::Csv,
    };
    let load = |path: &PathBuf| -> Result<analysis::SampleSet, CliError> {
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let mut file = fs::File::open(path)
            .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;
        analysis::load_samples(&mut file, format, &label).map_err(CliError::from)
    };
    let a = load(&args.a)?;
    let b = load(&args.b)?;
    let opts = AnalyzeOptions {
        full_entropy: args.full_entropy,
        per_observation_guard: args.per_obs_guard,
    };
    let report = analysis::analyze_with(&a, &b, args.shape, opts)?;
    let rendered = if args.csv {
        analysis::render_csv(&report)
    } else {
        analysis::render_text(&report)
    };
    write_out(None, &rendered, out)
}

fn cmd_plot(args: PlotArgs, out: &mut dyn Write) -> CliResult {
    let text = fs::read_to_string(&args.input)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", args.input.display())))?;
    let table = plot::parse_csv(&text)?;
    let svg = plot::render_svg(&table, &args.x, &args.y)?;
    write_out(Some(&args.out), &svg, out)?;
    writeln!(out, "wrote {}", args.out.display())
        .map_err(|e| CliError::Data(format!("cannot write output: {e}")))
}
