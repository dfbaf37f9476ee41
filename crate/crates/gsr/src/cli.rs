//! Command-line front end: single runs, suite sweeps with optional
//! ablation pairing, and verification of written relations. Artifacts go to
//! an output directory as runs.jsonl, summary.csv, ablation.csv, and
//! expressions/*.txt.

use crate::benchmarks::{all_benchmarks, find, sample_dataset, BenchmarkSpec, Role, Suite};
use crate::expr::{parse_relation, unit_norm_check, ExprError, UnitNormReport};
use crate::gp::{self, GpConfig};
use crate::recovery::{
    aggregate, equivalence_check, prediction_rmse, summary_csv, AggregateReport,
    EquivalenceReport, RecoveredModel, RunRecord, FAILURE_PENALTY,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown benchmark {0:?}")]
    UnknownBenchmark(String),
    #[error("unknown suite {0:?} (expected nguyen, jin, neat, livermore, symset, or all)")]
    UnknownSuite(String),
    #[error("{0}")]
    BadConfig(String),
    #[error("the relation is degenerate: each side needs a nonzero term")]
    Degenerate,
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "gsr",
    about = "Symbolic relation discovery: fits g(y) = f(x) to benchmark data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one benchmark with one seed and print the run record
    Run(RunArgs),
    /// Run a benchmark set over several seeds and aggregate the results
    Suite(SuiteArgs),
    /// Check a written relation against a benchmark's ground truth
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Benchmark name, e.g. Nguyen-5
    #[arg(long)]
    pub benchmark: Option<String>,
    /// Base seed (a suite uses seed..seed+runs)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Restrict the engine to relations of the form y = f(x)
    #[arg(long)]
    pub sgsr: bool,
    /// Output directory (default gsr-out)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Generation cap per run
    #[arg(long)]
    pub max_generations: Option<usize>,
    /// Wall-clock budget per run, in seconds
    #[arg(long)]
    pub budget_seconds: Option<f64>,
    /// Flat key=value config file; command-line flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args, Default)]
pub struct SuiteArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Benchmark family: nguyen, jin, neat, livermore, symset, or all
    #[arg(long)]
    pub suite: Option<String>,
    /// Seeds per benchmark (defaults to 1; seeds are seed..seed+runs)
    #[arg(long)]
    pub runs: Option<usize>,
    /// Threads across runs; each run stays single-threaded and deterministic
    #[arg(long)]
    pub workers: Option<usize>,
    /// Run every benchmark in both modes and pair them in ablation.csv
    #[arg(long)]
    pub ablation: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// File holding one relation, e.g. "0.44721*y = 0.89442*sin(x1)*cos(x2)"
    pub expression: PathBuf,
    /// Benchmark whose ground truth and library the relation is checked against
    #[arg(long)]
    pub benchmark: String,
}

// ---------------------------------------------------------------------------
// Config file

/// Values read from a flat key=value file. Every field has a matching flag,
/// and flags win when both are present.
#[derive(Debug, Default, PartialEq)]
pub struct FileConfig {
    pub benchmark: Option<String>,
    pub suite: Option<String>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub sgsr: Option<bool>,
    pub ablation: Option<bool>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub max_generations: Option<usize>,
    pub budget_seconds: Option<f64>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<FileConfig, CliError> {
        let mut cfg = FileConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(lineno, line, "expected key=value"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "benchmark" => cfg.benchmark = Some(value.to_string()),
                "suite" => cfg.suite = Some(value.to_string()),
                "runs" => cfg.runs = Some(parse_field(lineno, key, value)?),
                "seed" => cfg.seed = Some(parse_field(lineno, key, value)?),
                "sgsr" => cfg.sgsr = Some(parse_field(lineno, key, value)?),
                "ablation" => cfg.ablation = Some(parse_field(lineno, key, value)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                "workers" => cfg.workers = Some(parse_field(lineno, key, value)?),
                "max_generations" => {
                    cfg.max_generations = Some(parse_field(lineno, key, value)?)
                }
                "budget_seconds" => {
                    cfg.budget_seconds = Some(parse_field(lineno, key, value)?)
                }
                other => {
                    return Err(bad(lineno, other, "unknown key"));
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
        match path {
            Some(p) => FileConfig::parse(&fs::read_to_string(p)?),
            None => Ok(FileConfig::default()),
        }
    }
}

fn bad(lineno: usize, what: &str, why: &str) -> CliError {
    CliError::BadConfig(format!("config line {}: {why} at {what:?}", lineno + 1))
}

fn parse_field<T: std::str::FromStr>(
    lineno: usize,
    key: &str,
    value: &str,
) -> Result<T, CliError> {
    value.parse().map_err(|_| {
        CliError::BadConfig(format!(
            "config line {}: bad value {value:?} for {key}",
            lineno + 1
        ))
    })
}

// ---------------------------------------------------------------------------
// Resolved configuration

/// Everything one invocation needs: which benchmarks, which seeds, engine
/// mode, engine overrides, and where artifacts land.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub benchmarks: Vec<BenchmarkSpec>,
    pub seeds: Vec<u64>,
    pub sgsr: bool,
    pub ablation: bool,
    pub out: PathBuf,
    pub workers: usize,
    pub gp: GpConfig,
}

fn base_gp(common: &CommonArgs, file: &FileConfig) -> GpConfig {
    let mut gp = GpConfig::default();
    if let Some(m) = common.max_generations.or(file.max_generations) {
        gp.max_generations = m;
    }
    if let Some(b) = common.budget_seconds.or(file.budget_seconds) {
        gp.budget_seconds = b;
    }
    gp
}

fn lookup(name: &str) -> Result<BenchmarkSpec, CliError> {
    find(name).ok_or_else(|| CliError::UnknownBenchmark(name.to_string()))
}

/// One benchmark, one seed.
pub fn resolve_run(args: &RunArgs) -> Result<RunConfig, CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let name = args
        .common
        .benchmark
        .clone()
        .or(file.benchmark.clone())
        .ok_or_else(|| CliError::BadConfig("run needs --benchmark".into()))?;
    Ok(RunConfig {
        benchmarks: vec![lookup(&name)?],
        seeds: vec![args.common.seed.or(file.seed).unwrap_or(0)],
        sgsr: args.common.sgsr || file.sgsr.unwrap_or(false),
        ablation: false,
        out: args.common.out.clone().or(file.out.clone()).unwrap_or_else(default_out),
        workers: 1,
        gp: base_gp(&args.common, &file),
    })
}

/// A family (or a single named benchmark) over `runs` consecutive seeds.
pub fn resolve_suite(args: &SuiteArgs) -> Result<RunConfig, CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let benchmarks = match (
        args.suite.clone().or(file.suite.clone()),
        args.common.benchmark.clone().or(file.benchmark.clone()),
    ) {
        (Some(suite), _) => {
            if suite.eq_ignore_ascii_case("all") {
                all_benchmarks()
            } else {
                let s = Suite::parse(&suite).ok_or(CliError::UnknownSuite(suite))?;
                all_benchmarks().into_iter().filter(|b| b.suite == s).collect()
            }
        }
        (None, Some(name)) => vec![lookup(&name)?],
        (None, None) => {
            return Err(CliError::BadConfig("suite needs --suite or --benchmark".into()))
        }
    };
    let runs = args.runs.or(file.runs).unwrap_or(1);
    if runs == 0 {
        return Err(CliError::BadConfig("runs must be at least 1".into()));
    }
    let base = args.common.seed.or(file.seed).unwrap_or(0);
    let workers = args.workers.or(file.workers).unwrap_or(1);
    if workers == 0 {
        return Err(CliError::BadConfig("workers must be at least 1".into()));
    }
    Ok(RunConfig {
        benchmarks,
        seeds: (base..base + runs as u64).collect(),
        sgsr: args.common.sgsr || file.sgsr.unwrap_or(false),
        ablation: args.ablation || file.ablation.unwrap_or(false),
        out: args.common.out.clone().or(file.out.clone()).unwrap_or_else(default_out),
        workers,
        gp: base_gp(&args.common, &file),
    })
}

fn default_out() -> PathBuf {
    PathBuf::from("gsr-out")
}

// ---------------------------------------------------------------------------
// Execution

/// Seed flip for the validation draw: the stopping rule re-checks a
/// sub-threshold candidate on training-distribution samples the solver
/// never saw, so the validation set must differ from the training set for
/// every seed while staying a pure function of it.
pub const VALIDATION_SEED_FLIP: u64 = 0x9E37_79B9_7F4A_7C15;

/// Fits one (benchmark, seed) pair and scores the result.
pub fn execute_one(spec: &BenchmarkSpec, seed: u64, sgsr: bool, base: &GpConfig) -> RunRecord {
    let mut cfg = base.clone();
    cfg.seed = seed;
    cfg.sgsr_mode = sgsr;
    cfg.m_psi = if sgsr { 1 } else { spec.m_psi };
    let train = sample_dataset(spec, Role::Train, seed);
    let validation = sample_dataset(spec, Role::Train, seed ^ VALIDATION_SEED_FLIP);
    let test = sample_dataset(spec, Role::Test, seed);
    let result = gp::run(&train, Some(&validation), &spec.library_x, &spec.library_y, &cfg);
    let mut record = RunRecord {
        benchmark: spec.name.to_string(),
        seed,
        sgsr,
        exact: false,
        train_rmse: FAILURE_PENALTY,
        test_rmse: FAILURE_PENALTY,
        train_failures: train.len(),
        test_failures: test.len(),
        runtime_seconds: result.wall_seconds,
        generations: result.generations,
        converged: result.converged,
        expression: String::new(),
    };
    match RecoveredModel::from_individual(spec, &result.best, &train) {
        Some(model) => {
            let train_score = prediction_rmse(&model, &train);
            let test_score = prediction_rmse(&model, &test);
            record.exact = equivalence_check(&model, spec).exact;
            record.train_rmse = train_score.rmse;
            record.test_rmse = test_score.rmse;
            record.train_failures = train_score.failures;
            record.test_failures = test_score.failures;
            record.expression = model.expression();
        }
        None => {
            if let Some(fit) = &result.best.fit {
                record.expression = crate::expr::relation_string(
                    &result.best.phis,
                    &result.best.psis,
                    &fit.admm.w,
                    &spec.library_x,
                    &spec.library_y,
                );
            }
        }
    }
    record
}

/// Runs `f(0..n)` across `workers` threads; results come back in slot order
/// no matter which thread finished first.
pub fn parallel_map<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    assert!(workers >= 1);
    if workers == 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<T>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers.min(n) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let value = f(i);
                results.lock().unwrap()[i] = Some(value);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|slot| slot.expect("every slot filled"))
        .collect()
}

/// A suite's paired ablation row.
#[derive(Debug, Clone, Serialize)]
pub struct AblationRow {
    pub benchmark: String,
    pub gsr_mean_rmse: f64,
    pub sgsr_mean_rmse: f64,
    pub gsr_recovery_rate: f64,
    pub sgsr_recovery_rate: f64,
}

pub fn ablation_csv(rows: &[AblationRow]) -> String {
    let mut out = String::from(
        "benchmark,gsr_mean_rmse,sgsr_mean_rmse,gsr_recovery_rate,sgsr_recovery_rate\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.benchmark, r.gsr_mean_rmse, r.sgsr_mean_rmse, r.gsr_recovery_rate,
            r.sgsr_recovery_rate
        ));
    }
    out
}

/// Everything a suite invocation produced, returned for inspection.
#[derive(Debug)]
pub struct SuiteOutput {
    pub records: Vec<RunRecord>,
    pub reports: Vec<AggregateReport>,
    pub ablation: Vec<AblationRow>,
}

/// Runs the whole configuration: every benchmark, every seed, both modes
/// when ablation pairing is on. Writes runs.jsonl, summary.csv,
/// expressions/*.txt, and (with ablation) ablation.csv under `cfg.out`.
pub fn cmd_suite(cfg: &RunConfig) -> Result<SuiteOutput, CliError> {
    if cfg.benchmarks.is_empty() {
        return Err(CliError::BadConfig("no benchmarks selected".into()));
    }
    let modes: &[bool] = if cfg.ablation {
        &[false, true]
    } else if cfg.sgsr {
        &[true]
    } else {
        &[false]
    };
    let mut jobs: Vec<(usize, u64, bool)> = Vec::new();
    for (b, _) in cfg.benchmarks.iter().enumerate() {
        for &sgsr in modes {
            for &seed in &cfg.seeds {
                jobs.push((b, seed, sgsr));
            }
        }
    }
    let records = parallel_map(jobs.len(), cfg.workers, |i| {
        let (b, seed, sgsr) = jobs[i];
        execute_one(&cfg.benchmarks[b], seed, sgsr, &cfg.gp)
    });

    let per_group = cfg.seeds.len();
    let mut reports = Vec::new();
    let mut ablation = Vec::new();
    for (b, spec) in cfg.benchmarks.iter().enumerate() {
        let start = b * modes.len() * per_group;
        let first = aggregate(&records[start..start + per_group])
            .map_err(|e| CliError::BadConfig(e.to_string()))?;
        if cfg.ablation {
            let second = aggregate(&records[start + per_group..start + 2 * per_group])
                .map_err(|e| CliError::BadConfig(e.to_string()))?;
            ablation.push(AblationRow {
                benchmark: spec.name.to_string(),
                gsr_mean_rmse: first.mean_rmse,
                sgsr_mean_rmse: second.mean_rmse,
                gsr_recovery_rate: first.recovery_rate,
                sgsr_recovery_rate: second.recovery_rate,
            });
        }
        reports.push(first);
    }
    write_artifacts(&cfg.out, &records, &reports, &ablation)?;
    Ok(SuiteOutput { records, reports, ablation })
}

/// Runs a single (benchmark, seed) pair and writes the same artifact layout.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunRecord, CliError> {
    let spec = &cfg.benchmarks[0];
    let record = execute_one(spec, cfg.seeds[0], cfg.sgsr, &cfg.gp);
    write_artifacts(&cfg.out, std::slice::from_ref(&record), &[], &[])?;
    Ok(record)
}

fn expression_filename(record: &RunRecord) -> String {
    let suffix = if record.sgsr { "_sgsr" } else { "" };
    format!("{}_seed{}{}.txt", record.benchmark, record.seed, suffix)
}

fn write_artifacts(
    out: &Path,
    records: &[RunRecord],
    reports: &[AggregateReport],
    ablation: &[AblationRow],
) -> Result<(), CliError> {
    let expressions = out.join("expressions");
    fs::create_dir_all(&expressions)?;
    let mut jsonl = String::new();
    for r in records {
        jsonl.push_str(&serde_json::to_string(r)?);
        jsonl.push('\n');
        fs::write(expressions.join(expression_filename(r)), format!("{}\n", r.expression))?;
    }
    fs::write(out.join("runs.jsonl"), jsonl)?;
    if !reports.is_empty() {
        fs::write(out.join("summary.csv"), summary_csv(reports))?;
    }
    if !ablation.is_empty() {
        fs::write(out.join("ablation.csv"), ablation_csv(ablation))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Verification

/// Report for one verified relation.
#[derive(Debug, Serialize)]
pub struct VerifyOutput {
    pub benchmark: String,
    pub expression: String,
    pub equivalence: EquivalenceReport,
    pub unit_norm: UnitNormReport,
}

/// Checks a relation text against a benchmark: parses it with the
/// benchmark's libraries, rejects degenerate relations, and runs the
/// widened-domain equivalence proxy with normalized coefficients.
pub fn verify_text(spec: &BenchmarkSpec, text: &str) -> Result<VerifyOutput, CliError> {
    let rel = parse_relation(text, &spec.library_x, &spec.library_y)?;
    let unit_norm = unit_norm_check(&rel.w, &rel.decimals);
    let model = RecoveredModel::from_relation(spec, rel).ok_or(CliError::Degenerate)?;
    let equivalence = equivalence_check(&model, spec);
    Ok(VerifyOutput {
        benchmark: spec.name.to_string(),
        expression: text.to_string(),
        equivalence,
        unit_norm,
    })
}

pub fn cmd_verify(path: &Path, benchmark: &str) -> Result<VerifyOutput, CliError> {
    let spec = lookup(benchmark)?;
    let text = fs::read_to_string(path)?;
    verify_text(&spec, text.trim())
}

// ---------------------------------------------------------------------------
// Entry point

/// Parses argv and dispatches; returns the process exit code.
pub fn run_cli() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(args) => {
            let cfg = resolve_run(&args)?;
            let record = cmd_run(&cfg)?;
            println!("{}", serde_json::to_string(&record)?);
        }
        Command::Suite(args) => {
            let cfg = resolve_suite(&args)?;
            let output = cmd_suite(&cfg)?;
            print!("{}", summary_csv(&output.reports));
            if !output.ablation.is_empty() {
                print!("{}", ablation_csv(&output.ablation));
            }
        }
        Command::Verify(args) => {
            let report = cmd_verify(&args.expression, &args.benchmark)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(())
}
