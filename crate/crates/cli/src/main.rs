//! `gausslab`: experiment runner over the `gausslab` library.
//!
//! Exit codes: 0 success, 1 compute or cache error, 2 unknown command or bad
//! usage, 3 missing field, 4 precondition violation.

mod commands;
mod params;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use gausslab::report::{Format, Report};
use serde::Serialize;
use serde_json::{Map, Value};

use params::{Bag, CliError, CliResult, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "gausslab", version, about = "Gaussian prime and Diophantine approximation experiments")]
struct Cli {
    /// JSON experiment config; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized commands (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Report destination (default stdout).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Working precision in bits for complex constants.
    #[arg(long, global = true)]
    prec: Option<u32>,
    /// Prime-table cache file.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
enum Command {
    /// Build (and cache) the table of Gaussian primes up to a norm.
    Sieve(SieveArgs),
    /// Count primes in a sector, optionally with a distance constraint on pc.
    Count(CountArgs),
    /// Constrained versus unconstrained prime counts in a norm window.
    Equid(EquidArgs),
    /// Spacing and zero-window audit at the convergents of c.
    Spacing(SpacingArgs),
    /// Primes with ‖pc‖ ≤ |p|^e.
    CoroSearch(CoroArgs),
    /// Vaaler's polynomial, its envelope and the sawtooth on a grid.
    Vaaler(VaalerArgs),
    /// Linear exponential sum over a sector annulus and its bound.
    Linear(LinearArgs),
    /// The sum G_c(y, z) and its two bounds.
    Gc(GcArgs),
    /// Type I exponential sum with unit coefficients.
    E3(BilinearArgs),
    /// Type II exponential sum restricted to ‖mnc‖ ≤ δ.
    F3(BilinearArgs),
    /// Type I and type II counts against their main terms at a convergent.
    Report(ReportArgs),
    /// The count F_N(α) of simultaneous approximations.
    FnCount(FnCountArgs),
    /// Monte-Carlo integral of F_N over a sector next to the lower bound.
    #[command(name = "theo1-mc")]
    Theo1Mc(Theo1Args),
    /// T_P, E_P and two-prime counts over the μ-window.
    SieveError(SieveErrorArgs),
    /// Hurwitz continued fraction of c.
    Hurwitz(HurwitzArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sieve(_) => "sieve",
            Command::Count(_) => "count",
            Command::Equid(_) => "equid",
            Command::Spacing(_) => "spacing",
            Command::CoroSearch(_) => "coro-search",
            Command::Vaaler(_) => "vaaler",
            Command::Linear(_) => "linear",
            Command::Gc(_) => "gc",
            Command::E3(_) => "e3",
            Command::F3(_) => "f3",
            Command::Report(_) => "report",
            Command::FnCount(_) => "fn-count",
            Command::Theo1Mc(_) => "theo1-mc",
            Command::SieveError(_) => "sieve-error",
            Command::Hurwitz(_) => "hurwitz",
        }
    }
}

pub const COMMANDS: [&str; 15] = [
    "sieve", "count", "equid", "spacing", "coro-search", "vaaler", "linear", "gc", "e3", "f3", "report", "fn-count",
    "theo1-mc", "sieve-error", "hurwitz",
];

#[derive(Args, Debug, Serialize, Default)]
struct SieveArgs {
    #[arg(long)]
    max_norm: Option<u64>,
}

#[derive(Args, Debug, Serialize, Default)]
struct SectorFlags {
    #[arg(long, allow_hyphen_values = true)]
    r_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    r_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_max: Option<f64>,
}

#[derive(Args, Debug, Serialize, Default)]
struct CountArgs {
    #[command(flatten)]
    #[serde(flatten)]
    sector: SectorFlags,
    /// Split the angular range into this many equal sectors.
    #[arg(long)]
    pieces: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    /// sup or euclid.
    #[arg(long)]
    metric: Option<String>,
}

#[derive(Args, Debug, Serialize, Default)]
struct EquidArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// Lower end of the norm window.
    #[arg(long)]
    x: Option<f64>,
    /// Upper end of the norm window, or the cap for the scale schedule.
    #[arg(long)]
    n_max: Option<u64>,
    /// Use the k-th scale norm(q_k)⁶ as the upper end.
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_max: Option<f64>,
}

#[derive(Args, Debug, Serialize, Default)]
struct SpacingArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Audit convergents with |q| ≤ q_max.
    #[arg(long)]
    q_max: Option<f64>,
}

#[derive(Args, Debug, Serialize, Default)]
struct CoroArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Exponent in ‖pc‖ ≤ |p|^e.
    #[arg(long, allow_hyphen_values = true)]
    e: Option<f64>,
    #[arg(long)]
    max_norm: Option<u64>,
}

#[derive(Args, Debug, Serialize, Default)]
struct VaalerArgs {
    #[arg(long)]
    j: Option<u64>,
    /// Grid size on [0, 1).
    #[arg(long)]
    points: Option<u64>,
    /// Single evaluation point instead of a grid.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
}

#[derive(Args, Debug, Serialize, Default)]
struct LinearArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long)]
    y_lo: Option<f64>,
    #[arg(long)]
    y_hi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_max: Option<f64>,
}

#[derive(Args, Debug, Serialize, Default)]
struct GcArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long)]
    y: Option<f64>,
    #[arg(long)]
    z: Option<f64>,
    /// Denominator; all convergents up to q_norm_max when omitted.
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long)]
    q_norm_max: Option<u64>,
}

#[derive(Args, Debug, Serialize, Default)]
struct BilinearArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long)]
    x1: Option<f64>,
    #[arg(long)]
    x2: Option<f64>,
    /// Bound M on norm(m).
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    h1: Option<f64>,
    #[arg(long)]
    h2: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_max: Option<f64>,
    /// one or signs (seeded by --seed).
    #[arg(long)]
    coefficients: Option<String>,
}

#[derive(Args, Debug, Serialize, Default)]
struct ReportArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Convergent denominator; defaults to the first with norm ≥ 2.
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    x1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_max: Option<f64>,
    /// Allowed ratio |lhs − main|/budget.
    #[arg(long)]
    audit: Option<f64>,
}

#[derive(Args, Debug, Serialize, Default)]
struct MetricalFlags {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Radius bound N.
    #[arg(long = "n", alias = "N")]
    n: Option<f64>,
    #[arg(long = "a", alias = "A")]
    a: Option<f64>,
    #[arg(long = "b", alias = "B")]
    b: Option<f64>,
    /// Constant C of G_N.
    #[arg(long)]
    c_const: Option<f64>,
}

#[derive(Args, Debug, Serialize, Default)]
struct FnCountArgs {
    #[command(flatten)]
    #[serde(flatten)]
    metrical: MetricalFlags,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
}

#[derive(Args, Debug, Serialize, Default)]
struct Theo1Args {
    #[command(flatten)]
    #[serde(flatten)]
    metrical: MetricalFlags,
    #[command(flatten)]
    #[serde(flatten)]
    sector: SectorFlags,
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Args, Debug, Serialize, Default)]
struct SieveErrorArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Dyadic scale P.
    #[arg(long = "p", alias = "P")]
    p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    d1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    d2: Option<String>,
    /// Window width; derived from epsilon when omitted.
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args, Debug, Serialize, Default)]
struct HurwitzArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long)]
    terms: Option<u64>,
}

/// Rebuilds a subcommand value from its name alone, for config-only runs.
fn empty_command(name: &str) -> Option<Command> {
    Some(match name {
        "sieve" => Command::Sieve(Default::default()),
        "count" => Command::Count(Default::default()),
        "equid" => Command::Equid(Default::default()),
        "spacing" => Command::Spacing(Default::default()),
        "coro-search" => Command::CoroSearch(Default::default()),
        "vaaler" => Command::Vaaler(Default::default()),
        "linear" => Command::Linear(Default::default()),
        "gc" => Command::Gc(Default::default()),
        "e3" => Command::E3(Default::default()),
        "f3" => Command::F3(Default::default()),
        "report" => Command::Report(Default::default()),
        "fn-count" => Command::FnCount(Default::default()),
        "theo1-mc" => Command::Theo1Mc(Default::default()),
        "sieve-error" => Command::SieveError(Default::default()),
        "hurwitz" => Command::Hurwitz(Default::default()),
        _ => return None,
    })
}

fn read_config(path: &PathBuf) -> CliResult<Map<String, Value>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError { code: params::EXIT_COMPUTE, msg: format!("config {}: {e}", path.display()) })?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(CliError::invalid("config", "top level must be a JSON object")),
        Err(e) => Err(CliError::invalid("config", e)),
    }
}

pub struct Context {
    pub bag: Bag,
    pub seed: u64,
    pub cache: Option<PathBuf>,
    pub meta: Vec<(String, Value)>,
}

fn run(cli: Cli) -> CliResult<()> {
    let started = Instant::now();
    let mut config = match &cli.config {
        Some(p) => read_config(p)?,
        None => Map::new(),
    };
    let from_config = config.remove("command");
    let command = match (cli.command, from_config) {
        (Some(c), None) => c,
        (Some(c), Some(Value::String(n))) if n == c.name() => c,
        (Some(c), Some(n)) => {
            return Err(CliError::invalid("command", format!("config says {n}, command line says {}", c.name())))
        }
        (None, Some(Value::String(n))) => {
            empty_command(&n).ok_or_else(|| CliError::usage(format!("unknown command {n:?}; expected one of {COMMANDS:?}")))?
        }
        (None, Some(n)) => return Err(CliError::invalid("command", format!("expected a string, got {n}"))),
        (None, None) => return Err(CliError::usage(format!("no command given; expected one of {COMMANDS:?}"))),
    };
    let take_global = |config: &mut Map<String, Value>, key: &str| config.remove(key);
    let seed = match (cli.seed, take_global(&mut config, "seed")) {
        (Some(s), _) => s,
        (None, Some(v)) => v.as_u64().ok_or_else(|| CliError::invalid("seed", format!("expected a 64-bit integer, got {v}")))?,
        (None, None) => 0,
    };
    let format_name = match (cli.format, take_global(&mut config, "format")) {
        (Some(f), _) => f,
        (None, Some(Value::String(f))) => f,
        (None, Some(v)) => return Err(CliError::invalid("format", format!("expected csv or json, got {v}"))),
        (None, None) => "csv".into(),
    };
    let format: Format = format_name.parse().map_err(|e| CliError::invalid("format", e))?;
    let output = cli.output.or_else(|| take_global(&mut config, "output").and_then(|v| v.as_str().map(PathBuf::from)));
    let threads = match (cli.threads, take_global(&mut config, "threads")) {
        (Some(t), _) => Some(t),
        (None, Some(v)) => Some(v.as_u64().filter(|&t| t > 0).ok_or_else(|| CliError::invalid("threads", "expected a positive integer"))? as usize),
        (None, None) => None,
    };
    if threads == Some(0) {
        return Err(CliError::invalid("threads", "must be positive"));
    }
    let prec = match (cli.prec, take_global(&mut config, "prec")) {
        (Some(p), _) => p,
        (None, Some(v)) => v.as_u64().ok_or_else(|| CliError::invalid("prec", "expected an integer"))? as u32,
        (None, None) => gausslab::gint::DEFAULT_PREC,
    };
    if !(64..=1 << 16).contains(&prec) {
        return Err(CliError::invalid("prec", format!("must lie in [64, 65536], got {prec}")));
    }
    let cache = cli.cache.or_else(|| take_global(&mut config, "cache").and_then(|v| v.as_str().map(PathBuf::from)));
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError { code: params::EXIT_COMPUTE, msg: format!("thread pool: {e}") })?;
    }

    let flags = match serde_json::to_value(&command) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    };
    let name = command.name();
    let mut ctx = Context { bag: Bag::new(config, flags, prec)?, seed, cache, meta: Vec::new() };
    let mut report: Report = commands::dispatch(name, &mut ctx)?;

    let mut meta = vec![
        ("command".to_string(), Value::from(name)),
        ("version".to_string(), Value::from(env!("CARGO_PKG_VERSION"))),
        ("seed".to_string(), Value::from(seed)),
        ("threads".to_string(), Value::from(rayon::current_num_threads())),
        ("precision_bits".to_string(), Value::from(prec)),
    ];
    meta.extend(ctx.bag.used().into_iter().map(|(k, v)| (format!("param.{k}"), v)));
    meta.append(&mut ctx.meta);
    meta.push(("wall_clock_seconds".to_string(), gausslab::report::num(started.elapsed().as_secs_f64())));
    meta.append(&mut report.meta);
    report.meta = meta;
    let text = report.render(format)?;
    match output {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| CliError { code: params::EXIT_COMPUTE, msg: format!("writing {}: {e}", path.display()) })?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError { code: params::EXIT_COMPUTE, msg: format!("stdout: {e}") })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                ErrorKind::MissingRequiredArgument => params::EXIT_MISSING,
                ErrorKind::ValueValidation | ErrorKind::InvalidValue => params::EXIT_PRECONDITION,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code as u8)
        }
    }
}
