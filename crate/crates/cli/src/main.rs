mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tlincomb::fitting::Method;
use tlincomb::mceval::{DEFAULT_BINS, DEFAULT_SAMPLES};

use config::{Format, Grid, SweepKind, Terms};

/// Statistics and scaled-t fits of linear combinations of Student's t variables.
#[derive(Debug, Parser)]
#[command(name = "tlincomb", version = config::version(), about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// E[Z^2], E|Z| and CF_Z of a combination
    Stats(StatsArgs),
    /// Fit a single scaled t to a combination
    Fit(FitArgs),
    /// Fit (or load a fit) and measure it against Monte-Carlo samples
    Eval(EvalArgs),
    /// Parameter sweeps over nu, K or r
    Sweep(SweepArgs),
    /// Fast invariant checks; exit 1 if any fails
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Args)]
struct OutArgs {
    /// Output file (stdout if absent)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Args)]
struct McArgs {
    /// Monte-Carlo sample count
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Clone, Args)]
struct StatsArgs {
    /// Addends as "sigma:nu,sigma:nu,..."
    #[arg(long)]
    terms: Terms,
    /// r values for CF_Z (default: E[Z^2]^{-1/2})
    #[arg(long)]
    grid: Option<Grid>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Args)]
struct FitArgs {
    #[arg(long)]
    terms: Terms,
    #[arg(long, default_value = "CF_CLOSED", value_parser = parse_method)]
    method: Method,
    /// CF evaluation point; CF_BISECT only
    #[arg(long)]
    r: Option<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Args)]
struct EvalArgs {
    /// JSON written by `tlincomb fit`
    #[arg(long, conflicts_with_all = ["terms", "method", "r"])]
    fit: Option<PathBuf>,
    #[arg(long, required_unless_present = "fit")]
    terms: Option<Terms>,
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    #[arg(long)]
    r: Option<f64>,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    sweep: SweepKind,
    /// "start:step:stop", "logspace:a:b:count" or a comma list
    #[arg(long)]
    grid: Grid,
    #[arg(long = "k-set", default_value = "3,12")]
    k_set: Grid,
    #[arg(long = "nu-set", default_value = "2.5,5,10")]
    nu_set: Grid,
    /// Methods of a nu-sweep
    #[arg(long, value_delimiter = ',', value_parser = parse_method,
          default_value = "ABS_MOMENT,CF_CLOSED,MOMENT4")]
    methods: Vec<Method>,
    #[command(flatten)]
    mc: McArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Args)]
struct SelftestArgs {
    /// Print the report as JSON
    #[arg(long)]
    json: bool,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: tlincomb::Error| e.to_string())
}

fn init_threads() -> Result<(), output::Failure> {
    let Ok(v) = std::env::var("TLINCOMB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| output::Failure::invalid(format!("TLINCOMB_THREADS='{v}' is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| output::Failure::invalid(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match cli.cmd {
        Cmd::Stats(a) => commands::stats(a),
        Cmd::Fit(a) => commands::fit(a),
        Cmd::Eval(a) => commands::eval(a),
        Cmd::Sweep(a) => commands::sweep(a),
        Cmd::Selftest(a) => commands::selftest(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
