//! The `pareto-front` command line.
//!
//! `run` streams one JSON record per discovered point followed by a summary;
//! `verify` checks the enumerator against brute force on one instance.
//!
//! Exit codes: 0 success, 1 malformed input, 2 oracle failure, 3 monotonicity
//! violation (with `--check-monotone`), 4 verification failed, 5 output
//! could not be written.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use pareto_front_core::reference::{
    bound_value, brute_force_fronts, random_monotone_instance, RandomInstanceSpec, BRUTE_FORCE_LIMIT,
};
use pareto_front_core::{
    ConeUnionOracle, CountingOracle, EnumerationError, EnumerationResult, Enumerator, Event, FeasibilityOracle,
    MonotonicityGuard, NegativeCacheOracle, OracleError, Point, PointSet, SearchSpace, SelectionStrategy, TraceEntry,
    WeightedThresholdOracle,
};
use serde::Serialize;
use thiserror::Error;

use crate::external::ExternalProcessOracle;
use crate::problem::{load_document, parse_strategy, InlineFields, InputError, OracleSpec, Problem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_ORACLE: i32 = 2;
pub const EXIT_NON_MONOTONE: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;
pub const EXIT_OUTPUT: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "pareto-front", version, about = "Enumerate the Pareto front of a monotone feasibility oracle")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate both fronts, streaming JSON lines to stdout.
    Run(RunArgs),
    /// Compare the enumerator with brute force and check the call bound.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Problem file (TOML, or JSON for *.json).
    #[arg(long, value_name = "PATH")]
    pub problem: Option<PathBuf>,
    /// Per-dimension inclusive upper bounds, e.g. "3,3,3".
    #[arg(long, value_name = "N,N,...")]
    pub bounds: Option<String>,
    /// Oracle kind: cone, threshold or external.
    #[arg(long, value_name = "KIND")]
    pub oracle: Option<String>,
    /// Cone generators, e.g. "2,1,1;1,2,2" ("" for none).
    #[arg(long, value_name = "POINTS")]
    pub generators: Option<String>,
    /// Threshold weights, e.g. "1,2,1".
    #[arg(long, value_name = "W,W,...")]
    pub weights: Option<String>,
    #[arg(long, value_name = "T", allow_hyphen_values = true)]
    pub threshold: Option<String>,
    /// External oracle command line.
    #[arg(long, value_name = "CMD")]
    pub command: Option<String>,
}

#[derive(Debug, Args)]
pub struct RunOptions {
    /// lex-max (default), lex-min or queue.
    #[arg(long, value_name = "NAME")]
    pub strategy: Option<String>,
    /// Disable the negative-result cache.
    #[arg(long)]
    pub no_cache: bool,
    /// Fail with exit code 3 on contradictory oracle answers.
    #[arg(long)]
    pub check_monotone: bool,
    /// Include every oracle query in the summary.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub options: RunOptions,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub options: RunOptions,
    /// Random cone instance instead of a problem: k=.. n=.. front=.. [seed=..].
    #[arg(
        long,
        num_args = 1..,
        value_name = "KEY=VALUE",
        conflicts_with_all = ["problem", "bounds", "oracle", "generators", "weights", "threshold", "command"]
    )]
    pub random: Option<Vec<String>>,
    /// Seed for --random.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("oracle.command: cannot start {command:?}: {source}")]
    Spawn { command: Vec<String>, source: io::Error },
    #[error(transparent)]
    Oracle(OracleError),
    #[error("verification failed")]
    VerifyFailed,
    #[error("cannot write output: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Spawn { .. } => EXIT_ORACLE,
            CliError::Oracle(OracleError::NonMonotone { .. }) => EXIT_NON_MONOTONE,
            CliError::Oracle(_) => EXIT_ORACLE,
            CliError::VerifyFailed => EXIT_VERIFY_FAILED,
            CliError::Output(_) => EXIT_OUTPUT,
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_INPUT
                }
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(&args, out),
        Command::Verify(args) => verify(&args, out, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::VerifyFailed) => EXIT_VERIFY_FAILED,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[derive(Serialize)]
struct PointRecord<'a> {
    event: &'static str,
    point: &'a [u64],
}

#[derive(Serialize)]
struct TraceRecord<'a> {
    point: &'a [u64],
    feasible: bool,
}

#[derive(Serialize)]
struct Summary<'a> {
    event: &'static str,
    strategy: &'static str,
    cache: bool,
    p: u64,
    psi: u64,
    total_calls: u64,
    true_calls: u64,
    false_calls: u64,
    oracle_calls: u64,
    cache_hits: u64,
    bound: u64,
    within_bound: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<TraceRecord<'a>>>,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    event: &'static str,
    result: &'static str,
    strategy: &'static str,
    cache: bool,
    bounds: &'a [u64],
    grid_size: u64,
    front_equal: bool,
    co_front_equal: bool,
    p: u64,
    psi: u64,
    missing_pareto: Vec<&'a [u64]>,
    extra_pareto: Vec<&'a [u64]>,
    missing_co_pareto: Vec<&'a [u64]>,
    extra_co_pareto: Vec<&'a [u64]>,
    total_calls: u64,
    true_calls: u64,
    false_calls: u64,
    oracle_calls: u64,
    cache_hits: u64,
    bound: u64,
    within_bound: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<TraceRecord<'a>>>,
}

fn write_record<T: Serialize>(out: &mut dyn Write, record: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, record)?;
    out.write_all(b"\n")?;
    out.flush()
}

fn trace_records(trace: Option<&[TraceEntry]>) -> Option<Vec<TraceRecord<'_>>> {
    trace.map(|t| t.iter().map(|e| TraceRecord { point: e.point.coords(), feasible: e.feasible }).collect())
}

fn load_problem(args: &ProblemArgs) -> Result<Problem, InputError> {
    let inline = InlineFields {
        bounds: args.bounds.clone(),
        oracle: args.oracle.clone(),
        generators: args.generators.clone(),
        weights: args.weights.clone(),
        threshold: args.threshold.clone(),
        command: args.command.clone(),
    };
    let mut doc = match &args.problem {
        Some(path) => load_document(path)?,
        None if inline.is_empty() => {
            return Err(InputError::new("--problem", "missing (give a problem file or --bounds and --oracle)"))
        }
        None => serde_json::Value::Null,
    };
    inline.apply(&mut doc)?;
    Problem::from_value(&doc)
}

struct Settings {
    strategy: SelectionStrategy,
    cache: bool,
    check_monotone: bool,
    trace: bool,
}

fn settings(
    options: &RunOptions,
    problem_strategy: Option<SelectionStrategy>,
    problem_cache: bool,
) -> Result<Settings, InputError> {
    let strategy = match &options.strategy {
        Some(name) => parse_strategy("--strategy", name)?,
        None => problem_strategy.unwrap_or_default(),
    };
    Ok(Settings {
        strategy,
        cache: problem_cache && !options.no_cache,
        check_monotone: options.check_monotone,
        trace: options.trace,
    })
}

fn build_oracle(
    space: &SearchSpace,
    spec: &OracleSpec,
    check_monotone: bool,
) -> Result<Box<dyn FeasibilityOracle>, CliError> {
    let oracle: Box<dyn FeasibilityOracle> = match spec {
        OracleSpec::Cone { generators } => Box::new(
            ConeUnionOracle::new(space.clone(), generators.clone())
                .map_err(|e| InputError::new("oracle.generators", e.to_string()))?,
        ),
        OracleSpec::Threshold { weights, threshold } => Box::new(
            WeightedThresholdOracle::new(space.clone(), weights.clone(), *threshold)
                .map_err(|e| InputError::new("oracle.weights", e.to_string()))?,
        ),
        OracleSpec::External { command } => Box::new(
            ExternalProcessOracle::spawn(space.clone(), command)
                .map_err(|source| CliError::Spawn { command: command.clone(), source })?,
        ),
    };
    Ok(if check_monotone { Box::new(MonotonicityGuard::new(oracle)) } else { oracle })
}

struct Outcome {
    result: Result<EnumerationResult, EnumerationError>,
    oracle_calls: u64,
    cache_hits: u64,
}

fn enumerate_with(
    space: &SearchSpace,
    settings: &Settings,
    oracle: &mut dyn FeasibilityOracle,
    sink: impl FnMut(&Event),
) -> Outcome {
    let mut enumerator = Enumerator::new(space.clone(), settings.strategy);
    if settings.trace {
        enumerator = enumerator.with_trace();
    }
    let mut counted = CountingOracle::new(oracle);
    if settings.cache {
        let mut cached = NegativeCacheOracle::new(&mut counted);
        let result = enumerator.run(&mut cached, sink);
        let cache_hits = cached.hits();
        Outcome { result, oracle_calls: counted.stats().total_calls, cache_hits }
    } else {
        let result = enumerator.run(&mut counted, sink);
        Outcome { result, oracle_calls: counted.stats().total_calls, cache_hits: 0 }
    }
}

fn run(args: &RunArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let problem = load_problem(&args.problem)?;
    let settings = settings(&args.options, problem.strategy, problem.cache)?;
    let mut oracle = build_oracle(&problem.space, &problem.oracle, settings.check_monotone)?;

    let mut write_error = None;
    let outcome = enumerate_with(&problem.space, &settings, oracle.as_mut(), |event| {
        let record = match event {
            Event::ParetoPointFound(p) => PointRecord { event: "pareto", point: p.coords() },
            Event::CoParetoPointFound(p) => PointRecord { event: "co_pareto", point: p.coords() },
            Event::Done => return,
        };
        if write_error.is_none() {
            write_error = write_record(out, &record).err();
        }
    });
    if let Some(e) = write_error {
        return Err(e.into());
    }
    let result = outcome.result.map_err(|e| CliError::Oracle(e.error))?;
    drop(oracle);

    let p = result.front.len() as u64;
    let psi = result.co_front.len() as u64;
    let bound = bound_value(&problem.space, p, psi);
    let stats = &result.stats;
    let summary = Summary {
        event: "summary",
        strategy: settings.strategy.name(),
        cache: settings.cache,
        p,
        psi,
        total_calls: stats.total_calls,
        true_calls: stats.true_calls,
        false_calls: stats.false_calls,
        oracle_calls: outcome.oracle_calls,
        cache_hits: outcome.cache_hits,
        bound,
        within_bound: stats.total_calls <= bound,
        trace: trace_records(stats.trace.as_deref()),
    };
    write_record(out, &summary)?;
    Ok(())
}

fn random_problem(tokens: &[String], seed_flag: Option<u64>) -> Result<Problem, InputError> {
    let (mut k, mut n, mut front, mut seed) = (None, None, None, None);
    for token in tokens.iter().flat_map(|t| t.split([',', ' ']).filter(|s| !s.is_empty())) {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| InputError::new("--random", format!("expected KEY=VALUE, got {token:?}")))?;
        let value: u64 = value.parse().map_err(|_| {
            InputError::new(format!("--random {key}"), format!("expected a non-negative integer, got {value:?}"))
        })?;
        let slot = match key {
            "k" => &mut k,
            "n" => &mut n,
            "front" => &mut front,
            "seed" => &mut seed,
            other => {
                return Err(InputError::new("--random", format!("unknown key {other:?} (expected k, n, front, seed)")))
            }
        };
        *slot = Some(value);
    }
    let seed = match (seed, seed_flag) {
        (Some(a), Some(b)) if a != b => {
            return Err(InputError::new("--seed", format!("conflicts with seed={a} given to --random")))
        }
        (s, f) => s.or(f).unwrap_or(0),
    };
    let k = k.ok_or_else(|| InputError::new("--random k", "missing"))?;
    let n = n.ok_or_else(|| InputError::new("--random n", "missing"))?;
    let front = front.ok_or_else(|| InputError::new("--random front", "missing"))?;
    let k = usize::try_from(k).map_err(|_| InputError::new("--random k", "too large"))?;
    let space = SearchSpace::uniform(k, n).map_err(|e| InputError::new("--random k", e.to_string()))?;
    if space.grid_size().is_none_or(|g| g > BRUTE_FORCE_LIMIT) {
        return Err(grid_too_large(&space));
    }
    let front = usize::try_from(front).map_err(|_| InputError::new("--random front", "too large"))?;
    let oracle = random_monotone_instance(&RandomInstanceSpec { space: space.clone(), target_front_size: front, seed });
    Ok(Problem {
        space,
        oracle: OracleSpec::Cone { generators: oracle.generators().clone() },
        strategy: None,
        cache: true,
    })
}

fn grid_too_large(space: &SearchSpace) -> InputError {
    let size = match space.grid_size() {
        Some(n) => n.to_string(),
        None => "more than 2^64".into(),
    };
    InputError::new("bounds", format!("grid has {size} points, verify is limited to {BRUTE_FORCE_LIMIT}"))
}

fn difference<'a>(a: &'a PointSet, b: &PointSet) -> Vec<&'a [u64]> {
    a.iter().filter(|p| !b.contains(p)).map(Point::coords).collect()
}

fn verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let problem = match (&args.random, args.seed) {
        (Some(tokens), seed) => random_problem(tokens, seed)?,
        (None, Some(_)) => return Err(InputError::new("--seed", "only used together with --random").into()),
        (None, None) => load_problem(&args.problem)?,
    };
    let space = &problem.space;
    let grid_size = match space.grid_size() {
        Some(n) if n <= BRUTE_FORCE_LIMIT => n,
        _ => return Err(grid_too_large(space).into()),
    };
    let settings = settings(&args.options, problem.strategy, problem.cache)?;
    let mut oracle = build_oracle(space, &problem.oracle, settings.check_monotone)?;

    let outcome = enumerate_with(space, &settings, oracle.as_mut(), |_| {});
    let result = outcome.result.map_err(|e| CliError::Oracle(e.error))?;
    let brute = brute_force_fronts(space, oracle.as_mut()).map_err(|e| match e {
        pareto_front_core::reference::ReferenceError::Oracle(e) => CliError::Oracle(e),
        other => InputError::new("bounds", other.to_string()).into(),
    })?;
    drop(oracle);

    let p = brute.front.len() as u64;
    let psi = brute.co_front.len() as u64;
    let bound = bound_value(space, p, psi);
    let stats = &result.stats;
    let front_equal = result.front == brute.front;
    let co_front_equal = result.co_front == brute.co_front;
    let within_bound = stats.total_calls <= bound;
    let pass = front_equal && co_front_equal && within_bound;
    let report = VerifyReport {
        event: "verify",
        result: if pass { "PASS" } else { "FAIL" },
        strategy: settings.strategy.name(),
        cache: settings.cache,
        bounds: space.bounds(),
        grid_size,
        front_equal,
        co_front_equal,
        p,
        psi,
        missing_pareto: difference(&brute.front, &result.front),
        extra_pareto: difference(&result.front, &brute.front),
        missing_co_pareto: difference(&brute.co_front, &result.co_front),
        extra_co_pareto: difference(&result.co_front, &brute.co_front),
        total_calls: stats.total_calls,
        true_calls: stats.true_calls,
        false_calls: stats.false_calls,
        oracle_calls: outcome.oracle_calls,
        cache_hits: outcome.cache_hits,
        bound,
        within_bound,
        trace: trace_records(stats.trace.as_deref()),
    };
    write_record(out, &report)?;

    let fronts = if front_equal && co_front_equal { "fronts equal" } else { "fronts differ" };
    let cmp = if within_bound { "<=" } else { ">" };
    let _ = writeln!(err, "{}: {fronts}, {} calls {cmp} bound {bound}", report.result, stats.total_calls);
    if pass {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}
